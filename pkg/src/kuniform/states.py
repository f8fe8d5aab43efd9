"""Pure multiparty states with exact sparse amplitudes and partial traces.

A state on N parties of local dimension d is stored as a sparse map from
index tuples to amplitudes.  Exact states keep Gaussian-integer numerators
(a, b) meaning a + bi over a common denominator sqrt(r), so norms, inner
products and reduced density operators are computed in integer arithmetic
with no rounding.  Float states carry physical complex amplitudes for data
that does not fit the integer form.

A state built from an irredundant orthogonal array of strength k is
k-uniform: every reduction onto k parties is exactly I / d^k.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from itertools import combinations
from pathlib import Path

import numpy as np

from .caps import check_cap
from .errors import KuniformError, NormError, NotIrredundant, ParseError
from .oa import OrthogonalArray, oa_min_distance, verify_strength

__all__ = [
    "PureState",
    "SparseOperator",
    "UniformityReport",
    "InnerProduct",
    "ghz",
    "state_from_iroa",
    "tensor_parties",
    "reduction",
    "cross_reduction",
    "inner_product",
    "verify_k_uniform",
    "from_vector",
    "load_state",
    "save_state",
    "load_bundled_state",
    "BUNDLED_STATES",
]

NORM_TOL = 1e-12


@dataclass
class PureState:
    """|psi> = (1 / sqrt(r)) * sum over amplitudes of (a + bi) |index>.

    Exact mode requires sum(a^2 + b^2) == r; float mode stores physical
    complex amplitudes with r == 1.  provenance is an in-memory note about
    where the state came from and is not serialized.
    """

    N: int
    d: int
    amplitudes: dict
    r: int = 1
    exact: bool = True
    provenance: str = field(default="", compare=False)

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("state needs at least one party")
        if self.d < 1:
            raise ValueError("local dimension must be positive")
        if self.r < 1:
            raise ValueError("denominator r must be positive")
        if not self.amplitudes:
            raise ValueError("state has no terms")
        for idx, amp in self.amplitudes.items():
            if len(idx) != self.N:
                raise ValueError(f"index {idx} does not have {self.N} parties")
            if any(not 0 <= x < self.d for x in idx):
                raise ValueError(f"index {idx} out of range for d = {self.d}")
            if self.exact:
                a, b = amp
                if a == b == 0:
                    raise ValueError(f"zero amplitude stored at {idx}")
            elif amp == 0:
                raise ValueError(f"zero amplitude stored at {idx}")
        if self.exact:
            norm = sum(a * a + b * b for a, b in self.amplitudes.values())
            if norm != self.r:
                raise NormError(f"sum of |numerator|^2 is {norm}, expected r = {self.r}")
        else:
            if self.r != 1:
                raise ValueError("float states use r = 1")
            norm = sum(abs(v) ** 2 for v in self.amplitudes.values())
            if abs(norm - 1.0) > NORM_TOL:
                raise NormError(f"squared norm {norm!r} deviates from 1 beyond {NORM_TOL}")

    @property
    def num_terms(self) -> int:
        return len(self.amplitudes)

    def terms(self):
        """Amplitude items in lexicographic index order."""
        return sorted(self.amplitudes.items())

    def to_vector(self, cap: int | None = None) -> np.ndarray:
        """Dense normalized amplitude vector, radix order."""
        dim = self.d**self.N
        check_cap("matrix_dim", dim, cap, what=f"dense vector of length {dim}")
        vec = np.zeros(dim, dtype=complex)
        scale = 1.0 / math.sqrt(self.r)
        for idx, amp in self.amplitudes.items():
            pos = 0
            for x in idx:
                pos = pos * self.d + x
            vec[pos] = complex(amp[0], amp[1]) * scale if self.exact else amp
        return vec

    def __repr__(self) -> str:
        mode = "exact" if self.exact else "float"
        return f"PureState(N={self.N}, d={self.d}, terms={self.num_terms}, {mode})"


@dataclass
class SparseOperator:
    """Sparse operator on n_parties subsystems of dimension d.

    Entries map (row_index, col_index) pairs of index tuples to values; the
    physical operator divides them by sqrt(r_bra * r_ket).  Exact entries
    are Gaussian-integer pairs, float entries are complex.
    """

    n_parties: int
    d: int
    entries: dict
    r_ket: int = 1
    r_bra: int = 1
    exact: bool = True

    @property
    def dim(self) -> int:
        return self.d**self.n_parties

    def is_zero(self, tol: float = 0.0) -> bool:
        if self.exact:
            return not self.entries
        scale = 1.0 / math.sqrt(self.r_ket * self.r_bra)
        return all(abs(v) * scale <= tol for v in self.entries.values())

    def trace(self):
        if self.exact:
            a = sum(v[0] for (r, c), v in self.entries.items() if r == c)
            b = sum(v[1] for (r, c), v in self.entries.items() if r == c)
            return (a, b)
        return sum(v for (r, c), v in self.entries.items() if r == c)

    def to_matrix(self, cap: int | None = None) -> np.ndarray:
        check_cap("matrix_dim", self.dim, cap, what=f"dense {self.dim} x {self.dim} operator")
        M = np.zeros((self.dim, self.dim), dtype=complex)
        scale = 1.0 / math.sqrt(self.r_ket * self.r_bra)
        for (row, col), val in self.entries.items():
            i = 0
            for x in row:
                i = i * self.d + x
            j = 0
            for x in col:
                j = j * self.d + x
            v = complex(val[0], val[1]) if self.exact else val
            M[i, j] = v * scale
        return M

    def maximally_mixed_deviation(self) -> float:
        """Largest entrywise distance from I / d^n_parties."""
        dim = self.dim
        scale = 1.0 / math.sqrt(self.r_ket * self.r_bra)
        target = 1.0 / dim
        dev = 0.0
        diagonal_hits = 0
        for (row, col), val in self.entries.items():
            if self.exact and self.r_ket == self.r_bra:
                # subtract in integers so exact matches report exactly 0
                if row == col:
                    diagonal_hits += 1
                    num = complex(val[0] * dim - self.r_ket, val[1] * dim)
                    dev = max(dev, abs(num) * scale / dim)
                else:
                    dev = max(dev, abs(complex(*val)) * scale)
                continue
            v = complex(*val) * scale if self.exact else val * scale
            if row == col:
                diagonal_hits += 1
                dev = max(dev, abs(v - target))
            else:
                dev = max(dev, abs(v))
        if diagonal_hits < dim:
            dev = max(dev, target)  # some diagonal entry is missing entirely
        return dev

    def is_maximally_mixed(self, tol: float = 0.0) -> bool:
        """Exactly I / d^n_parties for exact operators, within tol otherwise."""
        if not self.exact:
            return self.maximally_mixed_deviation() <= tol
        if self.r_ket != self.r_bra:
            return False
        r, dim = self.r_ket, self.dim
        if r % dim:
            return False
        lam = r // dim
        if len(self.entries) != dim:
            return False
        return all(row == col and val == (lam, 0) for (row, col), val in self.entries.items())


def ghz(N: int, d: int) -> PureState:
    """(1 / sqrt(d)) * sum_i |i i ... i>; 1-uniform for every d >= 2."""
    if N < 1 or d < 1:
        raise ValueError("need N >= 1 and d >= 1")
    amps = {(i,) * N: (1, 0) for i in range(d)}
    return PureState(N=N, d=d, amplitudes=amps, r=d, provenance=f"ghz({N},{d})")


def state_from_iroa(A: OrthogonalArray, k: int) -> PureState:
    """Uniform superposition of the rows of an irredundant strength-k array.

    Each criterion failure is named: missing strength, or minimum row
    distance at most k.
    """
    if not verify_strength(A, k):
        raise NotIrredundant(f"{A} does not have strength {k}")
    w = oa_min_distance(A)
    if w <= k:
        raise NotIrredundant(f"minimum row distance {w} is not above k = {k}")
    amps = {tuple(int(x) for x in row): (1, 0) for row in A.rows}
    return PureState(
        N=A.N,
        d=A.d,
        amplitudes=amps,
        r=A.r,
        provenance=f"rows of {A} ({A.provenance})" if A.provenance else f"rows of {A}",
    )


def tensor_parties(s1: PureState, s2: PureState) -> PureState:
    """Partywise tensor: party j of the result carries the pair of party-j
    symbols, encoded i1 * d2 + i2, so local dimension becomes d1 * d2."""
    if s1.N != s2.N:
        raise ValueError(f"party counts differ: {s1.N} vs {s2.N}")
    d = s1.d * s2.d
    exact = s1.exact and s2.exact
    amps: dict = {}
    for idx1, a1 in s1.amplitudes.items():
        for idx2, a2 in s2.amplitudes.items():
            idx = tuple(x1 * s2.d + x2 for x1, x2 in zip(idx1, idx2))
            if exact:
                re = a1[0] * a2[0] - a1[1] * a2[1]
                im = a1[0] * a2[1] + a1[1] * a2[0]
                if re or im:
                    amps[idx] = (re, im)
            else:
                v1 = complex(a1[0], a1[1]) / math.sqrt(s1.r) if s1.exact else a1
                v2 = complex(a2[0], a2[1]) / math.sqrt(s2.r) if s2.exact else a2
                amps[idx] = v1 * v2
    return PureState(
        N=s1.N,
        d=d,
        amplitudes=amps,
        r=s1.r * s2.r if exact else 1,
        exact=exact,
        provenance=f"tensor of ({s1.provenance}) and ({s2.provenance})",
    )


def _validate_parties(N: int, parties) -> tuple[int, ...]:
    parties = tuple(sorted(set(int(p) for p in parties)))
    if not parties:
        raise ValueError("need at least one party to keep")
    if parties[0] < 0 or parties[-1] >= N:
        raise ValueError(f"party indices out of range for N = {N}")
    return parties


def cross_reduction(
    s1: PureState, s2: PureState, parties, cap: int | None = None
) -> SparseOperator:
    """Trace of |s1><s2| over the complement of `parties`.

    The masking criterion needs exactly this: the result must vanish for
    distinct images and agree with a common reduced operator for equal ones.
    """
    if (s1.N, s1.d) != (s2.N, s2.d):
        raise ValueError("states live on different systems")
    parties = _validate_parties(s1.N, parties)
    check_cap(
        "matrix_dim",
        s1.d ** len(parties),
        cap,
        what=f"reduction onto {len(parties)} parties of dimension {s1.d}",
    )
    others = tuple(p for p in range(s1.N) if p not in parties)
    exact = s1.exact and s2.exact

    groups: dict = {}
    for idx, amp in s2.amplitudes.items():
        comp = tuple(idx[p] for p in others)
        groups.setdefault(comp, []).append((tuple(idx[p] for p in parties), amp))

    entries: dict = {}
    for idx, amp in s1.amplitudes.items():
        comp = tuple(idx[p] for p in others)
        bucket = groups.get(comp)
        if not bucket:
            continue
        kept = tuple(idx[p] for p in parties)
        if exact:
            a1, b1 = amp
            for kept2, (a2, b2) in bucket:
                # (a1 + b1 i)(a2 - b2 i)
                re = a1 * a2 + b1 * b2
                im = b1 * a2 - a1 * b2
                key = (kept, kept2)
                cur = entries.get(key)
                entries[key] = (re, im) if cur is None else (cur[0] + re, cur[1] + im)
        else:
            v1 = complex(amp[0], amp[1]) / math.sqrt(s1.r) if s1.exact else amp
            for kept2, amp2 in bucket:
                v2 = complex(amp2[0], amp2[1]) / math.sqrt(s2.r) if s2.exact else amp2
                key = (kept, kept2)
                entries[key] = entries.get(key, 0j) + v1 * v2.conjugate()
    if exact:
        entries = {key: val for key, val in entries.items() if val != (0, 0)}
    return SparseOperator(
        n_parties=len(parties),
        d=s1.d,
        entries=entries,
        r_ket=s1.r if exact else 1,
        r_bra=s2.r if exact else 1,
        exact=exact,
    )


def reduction(state: PureState, parties, cap: int | None = None) -> SparseOperator:
    """Reduced density operator of `state` on `parties`, exact when the
    state is exact."""
    return cross_reduction(state, state, parties, cap=cap)


def inner_product(s1: PureState, s2: PureState) -> InnerProduct:
    """<s1|s2>, exact when both states are exact."""
    if (s1.N, s1.d) != (s2.N, s2.d):
        raise ValueError("states live on different systems")
    if s1.exact and s2.exact:
        re = im = 0
        for idx, (a1, b1) in s1.amplitudes.items():
            amp2 = s2.amplitudes.get(idx)
            if amp2 is None:
                continue
            a2, b2 = amp2
            # conj(a1 + b1 i) * (a2 + b2 i)
            re += a1 * a2 + b1 * b2
            im += a1 * b2 - b1 * a2
        return InnerProduct(num=(re, im), r_ket=s2.r, r_bra=s1.r, exact=True)
    total = 0j
    for idx, amp in s1.amplitudes.items():
        amp2 = s2.amplitudes.get(idx)
        if amp2 is None:
            continue
        v1 = complex(amp[0], amp[1]) / math.sqrt(s1.r) if s1.exact else amp
        v2 = complex(amp2[0], amp2[1]) / math.sqrt(s2.r) if s2.exact else amp2
        total += v1.conjugate() * v2
    return InnerProduct(num=total, r_ket=1, r_bra=1, exact=False)


@dataclass(frozen=True)
class InnerProduct:
    num: object  # (a, b) Gaussian integer when exact, complex otherwise
    r_ket: int
    r_bra: int
    exact: bool

    @property
    def value(self) -> complex:
        if self.exact:
            return complex(self.num[0], self.num[1]) / math.sqrt(self.r_ket * self.r_bra)
        return complex(self.num)

    def is_zero(self, tol: float = 0.0) -> bool:
        if self.exact:
            return self.num == (0, 0)
        return abs(self.num) <= tol


@dataclass
class UniformityReport:
    N: int
    d: int
    k: int
    verdict: str  # "pass", "fail", or "impossible"
    subsets_checked: int
    failures: list
    max_deviation: float = 0.0

    def __bool__(self) -> bool:
        return self.verdict == "pass"


def verify_k_uniform(
    state: PureState,
    k: int,
    tol: float = 1e-10,
    threads: int = 1,
    cap: int | None = None,
) -> UniformityReport:
    """Check every reduction onto k parties against I / d^k.

    Exact states are checked exactly (tol only enters deviation reporting);
    k = 0 passes trivially and k above floor(N / 2) is impossible for any
    pure state, reported without checking.
    """
    if not 0 <= k <= state.N:
        raise ValueError(f"k = {k} outside [0, {state.N}]")
    if k == 0:
        return UniformityReport(state.N, state.d, 0, "pass", 0, [])
    if k > state.N // 2:
        return UniformityReport(state.N, state.d, k, "impossible", 0, [])
    check_cap("matrix_dim", state.d**k, cap, what=f"reductions of dimension {state.d ** k}")

    def check(subset):
        rho = reduction(state, subset, cap=cap)
        ok = rho.is_maximally_mixed(tol=tol)
        dev = rho.maximally_mixed_deviation()
        return subset, ok, dev

    subsets = list(combinations(range(state.N), k))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(check, subsets))
    else:
        results = [check(s) for s in subsets]

    failures = []
    max_dev = 0.0
    for subset, ok, dev in results:
        max_dev = max(max_dev, dev)
        if not ok:
            failures.append((subset, f"reduction deviates from I/{state.d ** k} by {dev:.3e}"))
    verdict = "pass" if not failures else "fail"
    return UniformityReport(state.N, state.d, k, verdict, len(subsets), failures, max_dev)


def from_vector(vec, N: int, d: int, tol: float = NORM_TOL) -> PureState:
    """Float-mode state from a dense amplitude vector in radix order."""
    vec = np.asarray(vec, dtype=complex).reshape(-1)
    if vec.size != d**N:
        raise ValueError(f"vector length {vec.size} is not d^N = {d ** N}")
    norm = float(np.sum(np.abs(vec) ** 2))
    if abs(norm - 1.0) > tol:
        raise NormError(f"squared norm {norm!r} deviates from 1 beyond {tol}")
    amps = {}
    for pos in np.flatnonzero(vec):
        idx = []
        q = int(pos)
        for _ in range(N):
            q, rem = divmod(q, d)
            idx.append(rem)
        amps[tuple(reversed(idx))] = complex(vec[pos])
    return PureState(N=N, d=d, amplitudes=amps, exact=False, provenance="from_vector")


# ---------------------------------------------------------------------------
# file I/O: header `state N d r mode`, then one line per term holding the N
# indices and the amplitude pair (integers a b when exact, floats re im when
# float); `#` comments, blank lines ignored; terms saved in index order.


def load_state(path: str | Path) -> PureState:
    path = Path(path)
    return parse_state(path.read_text(), source=str(path))


def parse_state(text: str, source: str = "<string>") -> PureState:
    from .codes import _content_lines

    lines = list(_content_lines(text))
    if not lines:
        raise ParseError(f"{source}: empty state file")
    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 5 or parts[0] != "state":
        raise ParseError(f"{source}:{lineno}: expected header 'state N d r mode'")
    try:
        N, d, r = (int(x) for x in parts[1:4])
    except ValueError:
        raise ParseError(f"{source}:{lineno}: non-integer header field") from None
    mode = parts[4]
    if mode not in ("exact", "float"):
        raise ParseError(f"{source}:{lineno}: mode must be 'exact' or 'float'")
    exact = mode == "exact"
    amps: dict = {}
    for lineno, line in lines[1:]:
        fields = line.split()
        if len(fields) != N + 2:
            raise ParseError(f"{source}:{lineno}: expected {N} indices and 2 amplitude fields")
        try:
            idx = tuple(int(x) for x in fields[:N])
        except ValueError:
            raise ParseError(f"{source}:{lineno}: non-integer index") from None
        if any(not 0 <= x < d for x in idx):
            raise ParseError(f"{source}:{lineno}: index out of range [0, {d})")
        if idx in amps:
            raise ParseError(f"{source}:{lineno}: duplicate index {idx}")
        try:
            if exact:
                amps[idx] = (int(fields[N]), int(fields[N + 1]))
            else:
                amps[idx] = complex(float(fields[N]), float(fields[N + 1]))
        except ValueError:
            raise ParseError(f"{source}:{lineno}: malformed amplitude") from None
    try:
        return PureState(N=N, d=d, amplitudes=amps, r=r, exact=exact, provenance=source)
    except NormError:
        raise
    except ValueError as exc:
        raise ParseError(f"{source}: {exc}") from None


def save_state(state: PureState, path: str | Path) -> None:
    path = Path(path)
    mode = "exact" if state.exact else "float"
    out = [f"state {state.N} {state.d} {state.r} {mode}"]
    for idx, amp in state.terms():
        head = " ".join(str(x) for x in idx)
        if state.exact:
            out.append(f"{head} {amp[0]} {amp[1]}")
        else:
            out.append(f"{head} {amp.real!r} {amp.imag!r}")
    path.write_text("\n".join(out) + "\n")


BUNDLED_STATES = ("ame_6_2",)


def load_bundled_state(name: str) -> PureState:
    """One of the shipped states; ame_6_2 is the 16-term 3-uniform state of
    six qubits."""
    if name not in BUNDLED_STATES:
        raise KeyError(f"unknown bundled state {name!r}; have {BUNDLED_STATES}")
    text = resources.files("kuniform.data").joinpath(f"{name}.state").read_text()
    try:
        state = parse_state(text, source=f"bundled:{name}")
    except (ParseError, NormError) as exc:
        raise KuniformError(f"bundled state {name!r} is corrupt: {exc}") from exc
    return state
