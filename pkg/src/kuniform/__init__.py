"""k-uniform states from linear codes and orthogonal arrays.

Pipeline: finite fields -> linear codes -> orthogonal arrays -> k-uniform
pure states, plus verification of quantum-information maskers and pure
quantum error-correcting codes built from them, and an existence catalog.
"""

__version__ = "0.1.0"

from .gf import FiniteField, field_new, field_for_order, is_prime, is_prime_power  # noqa: F401
from .errors import (  # noqa: F401
    KuniformError,
    CapExceeded,
    ParseError,
    FieldMismatch,
    RankDeficient,
    NotIrredundant,
    NormError,
    MaskingError,
    ConstructionUnavailable,
    CatalogError,
)
