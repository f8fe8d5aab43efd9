"""Exception types shared across the package.

Everything derives from KuniformError so callers can catch broadly; the
parse/validation errors also derive from ValueError so naive code that
expects stdlib behaviour keeps working.
"""

from __future__ import annotations


class KuniformError(Exception):
    """Base class for all errors raised by this package."""


class CapExceeded(KuniformError):
    """An enumeration or matrix size exceeded its configured cap.

    Caps exist to keep desk-scale runs honest: nothing is approximated,
    the operation is refused outright.  See kuniform.caps.
    """


class ParseError(KuniformError, ValueError):
    """A file could not be parsed; the message names the offending line."""


class FieldMismatch(KuniformError, ValueError):
    """Two objects over different finite fields were combined."""


class RankDeficient(KuniformError, ValueError):
    """A generator matrix does not have full row rank."""


class NotIrredundant(KuniformError, ValueError):
    """An array failed an irredundancy requirement; message names the
    violated criterion (strength or minimum distance)."""


class NormError(KuniformError, ValueError):
    """State amplitudes do not satisfy the declared normalization."""


class MaskingError(KuniformError, ValueError):
    """A masker could not be built from the given state."""


class ConstructionUnavailable(KuniformError):
    """No implemented constructive rule covers the requested parameters.

    The message names the nearest rule and why it does not apply.
    """


class CatalogError(KuniformError):
    """Inconsistent catalog data or table request."""
