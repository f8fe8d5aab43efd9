"""Exact arithmetic in Galois fields GF(p^m).

Field elements are plain Python integers in [0, p^m).  The base-p digits of
an element are the coefficients of its polynomial representative, constant
term least significant, so for GF(4) the element 2 is the polynomial x and
3 is x+1.  The reducing modulus is canonical: the lexicographically smallest
monic irreducible polynomial of degree m over Z_p, coefficients compared from
the constant term upward.  Two fields built from equal (p, m) therefore have
identical multiplication tables, on every run.

Multiplication and inversion go through precomputed log/antilog tables over a
fixed multiplicative generator, so both are O(1) per scalar and vectorize
over numpy arrays for the enumeration-heavy callers in kuniform.codes.
"""

from __future__ import annotations

import functools
import itertools

import numpy as np

from .caps import check_cap
from .errors import KuniformError


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def is_prime_power(n: int) -> tuple[int, int] | None:
    """Return (p, m) with n = p^m and p prime, or None."""
    if n < 2:
        return None
    for p in range(2, n + 1):
        if p * p > n:
            break
        if n % p:
            continue
        m, rest = 0, n
        while rest % p == 0:
            rest //= p
            m += 1
        return (p, m) if rest == 1 else None
    return (n, 1)  # no factor <= sqrt(n): n is prime


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of n, ascending."""
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# dense polynomial helpers over Z_p; a polynomial is a list of coefficients,
# constant term first, no trailing zeros (except [0] for the zero polynomial)


def _poly_trim(a: list[int]) -> list[int]:
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _poly_mul(p: int, a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _poly_mod(p: int, a: list[int], mod: list[int]) -> list[int]:
    a = list(a)
    inv_lead = pow(mod[-1], -1, p)
    while len(a) >= len(mod) and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        shift = len(a) - len(mod)
        factor = (a[-1] * inv_lead) % p
        for i, c in enumerate(mod):
            a[shift + i] = (a[shift + i] - factor * c) % p
        a = _poly_trim(a)
    return _poly_trim(a)


def _is_irreducible(p: int, poly: list[int]) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    deg = len(poly) - 1
    if poly[0] == 0:  # divisible by x
        return deg == 1
    for d in range(1, deg // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            divisor = list(tail) + [1]
            if not any(_poly_mod(p, poly, divisor)):
                return False
    return True


def _canonical_modulus(p: int, m: int) -> tuple[int, ...]:
    if m == 1:
        return (0, 1)  # the polynomial x
    for tail in itertools.product(range(p), repeat=m):
        cand = list(tail) + [1]
        if _is_irreducible(p, cand):
            return tuple(cand)
    raise KuniformError(f"no irreducible polynomial of degree {m} over Z_{p}")


class FiniteField:
    """GF(p^m) with canonical modulus and O(1) mul/inv via log tables.

    Instances are immutable after construction and safe to share between
    threads.  Use field_new() rather than the constructor: it validates,
    applies the field_order cap and caches one instance per (p, m).
    """

    def __init__(self, p: int, m: int):
        if not is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if m < 1:
            raise ValueError(f"m = {m} must be positive")
        self.p = p
        self.m = m
        self.order = p**m
        self.modulus: tuple[int, ...] = _canonical_modulus(p, m)
        self._powers = tuple(p**i for i in range(m))
        self._build_tables()

    # -- construction helpers ------------------------------------------------

    def _encode(self, coeffs: list[int]) -> int:
        return sum(c * w for c, w in zip(coeffs, self._powers))

    def _decode(self, a: int) -> list[int]:
        p = self.p
        out = []
        for _ in range(self.m):
            out.append(a % p)
            a //= p
        return out

    def _raw_mul(self, a: int, b: int) -> int:
        """Polynomial multiply mod the modulus; used only to build tables."""
        prod = _poly_mul(self.p, self._decode(a), self._decode(b))
        red = _poly_mod(self.p, prod, list(self.modulus))
        red += [0] * (self.m - len(red))
        return self._encode(red)

    def _build_tables(self) -> None:
        q = self.order
        g = self._find_generator()
        exp = np.zeros(2 * (q - 1), dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        acc = 1
        for i in range(q - 1):
            exp[i] = acc
            log[acc] = i
            acc = self._raw_mul(acc, g)
        if acc != 1:
            raise KuniformError("generator order mismatch while building tables")
        exp[q - 1 :] = exp[: q - 1]  # doubled so exp[la+lb] needs no modulo
        self.generator = g
        self._exp = exp
        self._log = log
        self._exp.setflags(write=False)
        self._log.setflags(write=False)

    def _find_generator(self) -> int:
        q = self.order
        if q == 2:
            return 1
        need = [(q - 1) // f for f in prime_factors(q - 1)]
        for g in range(2, q):
            if all(self._raw_pow(g, e) != 1 for e in need):
                return g
        raise KuniformError("no multiplicative generator found")

    def _raw_pow(self, a: int, e: int) -> int:
        out, base = 1, a
        while e:
            if e & 1:
                out = self._raw_mul(out, base)
            base = self._raw_mul(base, base)
            e >>= 1
        return out

    # -- scalar arithmetic ---------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        out, p = 0, self.p
        for w in self._powers:
            out += ((a // w + b // w) % p) * w
        return out

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        if self.m == 1:
            return (-a) % self.p
        out, p = 0, self.p
        for w in self._powers:
            out += ((-(a // w)) % p) * w
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self._exp[self._log[a] + self._log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no multiplicative inverse")
        return int(self._exp[self.order - 1 - self._log[a]])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("0 has no multiplicative inverse")
            return 1 if e == 0 else 0
        la = int(self._log[a])
        return int(self._exp[(la * e) % (self.order - 1)])

    # -- vectorized arithmetic over numpy integer arrays ---------------------

    def add_arr(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for w in self._powers:
            out += ((a // w + b // w) % self.p) * w
        return out

    def neg_arr(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return a.copy()
        if self.m == 1:
            return (-a) % self.p
        out = np.zeros(a.shape, dtype=np.int64)
        for w in self._powers:
            out += ((-(a // w)) % self.p) * w
        return out

    def mul_arr(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        nz = (a != 0) & (b != 0)
        idx = self._log[a] + self._log[b]
        out = np.where(nz, self._exp[np.where(nz, idx, 0)], 0)
        return out.astype(np.int64)

    # -- misc ----------------------------------------------------------------

    def element_to_coeffs(self, a: int) -> tuple[int, ...]:
        """Base-p digits of a, constant term first."""
        return tuple(self._decode(a))

    def coeffs_to_element(self, coeffs) -> int:
        return self._encode(list(coeffs))

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteField) and (self.p, self.m) == (other.p, other.m)

    def __hash__(self) -> int:
        return hash((self.p, self.m))

    def __repr__(self) -> str:
        if self.m == 1:
            return f"GF({self.p})"
        return f"GF({self.order})=GF({self.p}^{self.m})"


@functools.lru_cache(maxsize=None)
def _cached_field(p: int, m: int) -> FiniteField:
    return FiniteField(p, m)


def field_new(p: int, m: int = 1, cap: int | None = None) -> FiniteField:
    """Build (or fetch the cached) GF(p^m).

    Raises ValueError for non-prime p or m < 1, CapExceeded when p^m is
    larger than the field_order cap.
    """
    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    if m < 1:
        raise ValueError(f"m = {m} must be positive")
    check_cap("field_order", p**m, cap, what=f"field order {p}^{m}")
    return _cached_field(p, m)


def field_for_order(q: int, cap: int | None = None) -> FiniteField:
    """GF(q) for a prime power q; ValueError otherwise."""
    pm = is_prime_power(q)
    if pm is None:
        raise ValueError(f"{q} is not a prime power")
    return field_new(*pm, cap=cap)
