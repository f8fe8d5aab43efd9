"""Quantum-information masking and pure error-correcting-code checks.

A masker hides a d-valued input among N parties: it is a family of d
orthonormal image states such that every reduction onto k parties is the
same regardless of which image (or superposition of images) was prepared.
Splitting one party off a (k+1)-uniform state of N+1 parties produces
exactly such a family.  The criterion checked is exact: for every party
subset A of size k and every image pair (s, t), the operator obtained by
tracing |psi_s><psi_t| down to A must vanish for s != t and must agree
with a common reduced operator for s == t.  By sesquilinearity that covers
every unit-norm input superposition.

The same machinery checks pure quantum codes: a ((N, K, delta))_d basis is
pure when <psi_i| E |psi_j> vanishes for every non-identity tensor product
E of generalized Paulis with fewer than delta non-identity factors (every
such E is traceless, so the usual right-hand side delta_ij Tr(E)/d^N is
zero).  For qubits the matrix elements are Gaussian integers and the check
is exact; for d > 2 the root-of-unity phases force float arithmetic.
"""

from __future__ import annotations

import cmath
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, product
from pathlib import Path

import numpy as np

from .caps import check_cap
from .errors import KuniformError, MaskingError, ParseError
from .states import (
    PureState,
    SparseOperator,
    cross_reduction,
    inner_product,
    load_state,
    reduction,
    save_state,
    verify_k_uniform,
)

__all__ = [
    "Masker",
    "MaskingReport",
    "MaskingFeasibility",
    "ErrorOperator",
    "QeccReport",
    "pauli_matrix",
    "build_masker",
    "verify_masker",
    "strong_masking_feasible",
    "verify_pure_qecc",
    "singleton_check",
    "kuniform_subspace_check",
    "save_masker",
    "load_masker",
]

FLOAT_TOL = 1e-10
PAULI_TOL = 1e-9


@dataclass
class Masker:
    """d orthonormal images in (C^d)^{tensor N}; image s encodes input |s>.

    verified_k is the highest k for which verify_masker has passed, -1
    before any verification.
    """

    d: int
    N: int
    images: list
    verified_k: int = -1
    provenance: str = field(default="", compare=False)

    def __post_init__(self):
        if len(self.images) != self.d:
            raise MaskingError(f"need {self.d} images, got {len(self.images)}")
        for img in self.images:
            if (img.N, img.d) != (self.N, self.d):
                raise MaskingError("images disagree on (N, d)")


@dataclass
class MaskingReport:
    N: int
    d: int
    k: int
    verdict: str  # "pass" or "fail"
    subsets_checked: int
    failures: list  # (subset, s, t, reason)
    common: dict  # subset -> SparseOperator, the shared reduction when it exists
    max_deviation: float = 0.0
    samples_checked: int = 0

    def __bool__(self) -> bool:
        return self.verdict == "pass"


@dataclass(frozen=True)
class MaskingFeasibility:
    status: str  # "feasible", "infeasible", or "unknown"
    reason: str
    witness: object = None


def _norm_amplitudes(state: PureState) -> dict:
    """Physical complex amplitudes of a state, whatever its mode."""
    if state.exact:
        scale = 1.0 / math.sqrt(state.r)
        return {idx: complex(a, b) * scale for idx, (a, b) in state.amplitudes.items()}
    return dict(state.amplitudes)


def build_masker(
    psi: PureState,
    split_party: int,
    k: int,
    tol: float = FLOAT_TOL,
    cap: int | None = None,
) -> Masker:
    """Split one party off a (k+1)-uniform state, yielding a masker whose
    images hide the split symbol from any k parties.

    The input's (k+1)-uniformity and the split-party marginal are checked
    up front; the resulting images are renormalized exactly for exact
    inputs and verified orthonormal, then the full criterion runs at k.
    """
    if psi.N < 2:
        raise MaskingError("need at least two parties to split one off")
    if not 0 <= split_party < psi.N:
        raise MaskingError(f"split party {split_party} out of range for N = {psi.N}")
    if k < 0:
        raise MaskingError("k must be non-negative")
    uni = verify_k_uniform(psi, k + 1, tol=tol, cap=cap)
    if uni.verdict != "pass":
        raise MaskingError(
            f"input is not {k + 1}-uniform (verdict {uni.verdict}); cannot mask k = {k}"
        )
    marginal = reduction(psi, [split_party], cap=cap)
    if not marginal.is_maximally_mixed(tol=tol):
        raise MaskingError("split-party marginal is not maximally mixed")

    d, n_out = psi.d, psi.N - 1
    images = []
    for s in range(d):
        branch = {
            idx[:split_party] + idx[split_party + 1 :]: amp
            for idx, amp in psi.amplitudes.items()
            if idx[split_party] == s
        }
        if not branch:
            raise MaskingError(f"no terms carry symbol {s} at the split party")
        if psi.exact:
            if psi.r % d:
                raise MaskingError(f"denominator {psi.r} not divisible by d = {d}")
            img = PureState(
                N=n_out,
                d=d,
                amplitudes=branch,
                r=psi.r // d,
                provenance=f"image {s} of split at party {split_party}",
            )
        else:
            scale = math.sqrt(d)
            img = PureState(
                N=n_out,
                d=d,
                amplitudes={idx: amp * scale for idx, amp in branch.items()},
                exact=False,
                provenance=f"image {s} of split at party {split_party}",
            )
        images.append(img)

    for s, t in combinations(range(d), 2):
        if not inner_product(images[s], images[t]).is_zero(tol=tol):
            raise MaskingError(f"images {s} and {t} are not orthogonal")

    m = Masker(
        d=d,
        N=n_out,
        images=images,
        provenance=f"split party {split_party} of ({psi.provenance})",
    )
    report = verify_masker(m, k, tol=tol, cap=cap)
    if report.verdict != "pass":
        raise MaskingError(
            f"masking criterion failed at k = {k} despite {k + 1}-uniform input: "
            f"{report.failures[:3]}"
        )
    m.verified_k = k
    return m


def _operators_equal(a: SparseOperator, b: SparseOperator, tol: float) -> bool:
    if a.exact and b.exact:
        return (
            a.entries == b.entries
            and (a.r_ket, a.r_bra) == (b.r_ket, b.r_bra)
            and (a.n_parties, a.d) == (b.n_parties, b.d)
        )
    return bool(np.allclose(a.to_matrix(), b.to_matrix(), atol=tol, rtol=0.0))


def _operator_deviation(a: SparseOperator, b: SparseOperator) -> float:
    return float(np.max(np.abs(a.to_matrix() - b.to_matrix()), initial=0.0))


def verify_masker(
    m: Masker,
    k: int,
    tol: float = FLOAT_TOL,
    samples: int = 0,
    seed: int = 0,
    threads: int = 1,
    cap: int | None = None,
) -> MaskingReport:
    """Run the full masking criterion at k.

    k = 0 reduces to image orthonormality.  With samples > 0 a seeded
    sanity pass additionally prepares that many random input superpositions
    and compares each of their k-party reductions against the common one in
    float arithmetic; the exact criterion never depends on it.
    """
    if not 0 <= k <= m.N:
        raise ValueError(f"k = {k} outside [0, {m.N}]")
    failures: list = []
    common: dict = {}
    max_dev = 0.0

    if k == 0:
        for s, t in combinations(range(m.d), 2):
            ip = inner_product(m.images[s], m.images[t])
            if not ip.is_zero(tol=tol):
                failures.append(((), s, t, f"images not orthogonal, <s|t> = {ip.value:.3e}"))
        verdict = "pass" if not failures else "fail"
        return MaskingReport(m.N, m.d, 0, verdict, 1, failures, {}, 0.0)

    def check(subset):
        local_failures = []
        dev = 0.0
        rho0 = cross_reduction(m.images[0], m.images[0], subset, cap=cap)
        for s in range(1, m.d):
            rho_s = cross_reduction(m.images[s], m.images[s], subset, cap=cap)
            delta = _operator_deviation(rho_s, rho0)
            dev = max(dev, delta)
            if not _operators_equal(rho_s, rho0, tol):
                local_failures.append(
                    (subset, s, s, f"reduction differs from image 0 by {delta:.3e}")
                )
        for s, t in combinations(range(m.d), 2):
            cross = cross_reduction(m.images[s], m.images[t], subset, cap=cap)
            if cross.exact:
                leaked = not cross.is_zero()
                mag = float(
                    max(
                        (abs(complex(a, b)) for a, b in cross.entries.values()),
                        default=0.0,
                    )
                ) / math.sqrt(cross.r_ket * cross.r_bra)
            else:
                mag = float(
                    max((abs(v) for v in cross.entries.values()), default=0.0)
                )
                leaked = mag > tol
            dev = max(dev, mag)
            if leaked:
                local_failures.append(
                    (subset, s, t, f"cross term does not vanish, max entry {mag:.3e}")
                )
        return subset, rho0, local_failures, dev

    subsets = list(combinations(range(m.N), k))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(check, subsets))
    else:
        results = [check(s) for s in subsets]

    for subset, rho0, local_failures, dev in results:
        common[subset] = rho0
        failures.extend(local_failures)
        max_dev = max(max_dev, dev)

    samples_checked = 0
    if samples > 0 and not failures:
        rng = np.random.default_rng(seed)
        image_amps = [_norm_amplitudes(img) for img in m.images]
        for _ in range(samples):
            coeffs = rng.normal(size=m.d) + 1j * rng.normal(size=m.d)
            coeffs /= np.linalg.norm(coeffs)
            amps: dict = {}
            for c, amp_map in zip(coeffs, image_amps):
                for idx, v in amp_map.items():
                    amps[idx] = amps.get(idx, 0j) + c * v
            masked = PureState(
                N=m.N,
                d=m.d,
                amplitudes={i: v for i, v in amps.items() if v != 0},
                exact=False,
                provenance="sampled superposition",
            )
            for subset in subsets:
                rho = cross_reduction(masked, masked, subset, cap=cap)
                delta = _operator_deviation(rho, common[subset])
                max_dev = max(max_dev, delta)
                if delta > tol:
                    failures.append(
                        (subset, -1, -1, f"sampled superposition leaks, deviation {delta:.3e}")
                    )
            samples_checked += 1

    verdict = "pass" if not failures else "fail"
    return MaskingReport(
        m.N, m.d, k, verdict, len(subsets), failures, common, max_dev, samples_checked
    )


def strong_masking_feasible(N: int, d: int | None = None) -> MaskingFeasibility:
    """Can every state of one party be hidden from any floor(N/2) of N parties?

    Even N is impossible outright.  Odd N reduces to the existence of a
    maximally (floor((N+1)/2)-) uniform state on N+1 parties, which the
    catalog answers; without a known construction or citation the honest
    answer is unknown rather than no.
    """
    if N < 2:
        raise ValueError("need at least two parties")
    if N % 2 == 0:
        return MaskingFeasibility(
            status="infeasible",
            reason=(
                f"strong masking needs every {N // 2}-party reduction independent of "
                "the input, which fails for an even party count: the no-masking "
                "no-go (Modi, Pati, Sen De, Sen, Phys. Rev. Lett. 120, 230501 "
                "(2018)) forbids it for N = 2 and splitting N parties into two "
                "halves of N/2 reduces the general even case to that one"
            ),
        )
    if d is None:
        raise ValueError("odd N needs the local dimension d")
    from . import catalog

    k_target = (N + 1) // 2
    verdict = catalog.exists_k_uniform(k_target, d, N + 1)
    if verdict.status in ("Exists(constructive)", "Exists(cited)"):
        return MaskingFeasibility(
            status="feasible",
            reason=(
                f"a maximally entangled ({k_target}-uniform) state on {N + 1} parties "
                f"of dimension {d} exists ({verdict.citation or 'constructive'}); "
                "splitting any one party off it is a strong masker"
            ),
            witness=verdict.witness,
        )
    if verdict.status == "NotExists(cited)":
        return MaskingFeasibility(
            status="infeasible",
            reason=(
                f"no maximally entangled state on {N + 1} parties of dimension {d} "
                f"exists ({verdict.citation})"
            ),
        )
    return MaskingFeasibility(
        status="unknown",
        reason=(
            f"existence of a maximally entangled state on {N + 1} parties of "
            f"dimension {d} is open; no construction or citation applies"
        ),
    )


# ---------------------------------------------------------------------------
# generalized Paulis and pure-code checks


def pauli_matrix(d: int, a: int, b: int) -> np.ndarray:
    """X^a Z^b on C^d: X|j> = |j+1 mod d>, Z|j> = omega^j |j>."""
    if d < 2:
        raise ValueError("need d >= 2")
    M = np.zeros((d, d), dtype=complex)
    for j in range(d):
        M[(j + a) % d, j] = cmath.exp(2j * math.pi * (b * j) / d)
    return M


@dataclass(frozen=True)
class ErrorOperator:
    """Tensor product of generalized Paulis, identity everywhere else."""

    positions: tuple  # strictly increasing party indices
    locals: tuple  # matching (a, b) pairs, none equal to (0, 0)

    @property
    def weight(self) -> int:
        return len(self.positions)

    def __str__(self) -> str:
        return " ".join(
            f"X{a}Z{b}[{p}]" for p, (a, b) in zip(self.positions, self.locals)
        )


def _error_operators(N: int, d: int, delta: int, cap: int | None):
    """All non-identity errors of weight below delta, cap-checked first."""
    total = sum(math.comb(N, w) * (d * d - 1) ** w for w in range(1, delta))
    check_cap("qecc_ops", total, cap, what=f"error enumeration below weight {delta}")
    non_identity = [(a, b) for a in range(d) for b in range(d) if (a, b) != (0, 0)]
    for w in range(1, delta):
        for positions in combinations(range(N), w):
            for locs in product(non_identity, repeat=w):
                yield ErrorOperator(positions, locs)


def _pauli_element_exact(si: PureState, sj: PureState, op: ErrorOperator):
    """<si| E |sj> numerator as a Gaussian integer (qubits, exact states)."""
    re = im = 0
    for idx, (a2, b2) in sj.amplitudes.items():
        phase = 0
        shifted = list(idx)
        for p, (a, b) in zip(op.positions, op.locals):
            phase += b * idx[p]
            shifted[p] = (idx[p] + a) % 2
        target = si.amplitudes.get(tuple(shifted))
        if target is None:
            continue
        a1, b1 = target
        sign = 1 if phase % 2 == 0 else -1
        re += sign * (a1 * a2 + b1 * b2)
        im += sign * (a1 * b2 - b1 * a2)
    return re, im


def _pauli_element_float(si: PureState, sj: PureState, op: ErrorOperator, d: int) -> complex:
    amps_i = _norm_amplitudes(si)
    amps_j = _norm_amplitudes(sj)
    omega = [cmath.exp(2j * math.pi * t / d) for t in range(d)]
    total = 0j
    for idx, v2 in amps_j.items():
        phase = 0
        shifted = list(idx)
        for p, (a, b) in zip(op.positions, op.locals):
            phase += b * idx[p]
            shifted[p] = (idx[p] + a) % d
        v1 = amps_i.get(tuple(shifted))
        if v1 is None:
            continue
        total += v1.conjugate() * omega[phase % d] * v2
    return total


@dataclass
class QeccReport:
    N: int
    d: int
    K: int
    delta: int
    verdict: str  # "pass" or "fail"
    ops_checked: int
    failures: list  # (error string, i, j, magnitude)
    worst: float = 0.0
    orthonormal: bool = True

    def __bool__(self) -> bool:
        return self.verdict == "pass"


def verify_pure_qecc(
    basis: list,
    delta: int,
    tol: float = PAULI_TOL,
    threads: int = 1,
    cap: int | None = None,
) -> QeccReport:
    """Check that `basis` spans a pure ((N, K, delta))_d code.

    Every tensor product of generalized Paulis with 1 <= weight < delta is
    traceless, so the pure-code condition is that all its matrix elements
    between basis states vanish; orthonormality of the basis covers the
    identity.  Qubit bases in exact mode are checked with zero tolerance.
    delta = 1 is vacuous: nothing below weight 1 exists.
    """
    if not basis:
        raise ValueError("need at least one basis state")
    N, d = basis[0].N, basis[0].d
    if any((s.N, s.d) != (N, d) for s in basis):
        raise ValueError("basis states live on different systems")
    if delta < 1:
        raise ValueError("delta must be at least 1")
    if d < 2:
        raise ValueError("need local dimension at least 2")
    K = len(basis)

    # unit norms are enforced by the state constructors; only pairwise
    # orthogonality can fail here
    failures: list = []
    worst = 0.0
    for i, j in combinations(range(K), 2):
        ip = inner_product(basis[i], basis[j])
        dev = abs(ip.value)
        bad = not ip.is_zero() if ip.exact else dev > tol
        if bad:
            failures.append(("<i|j>", i, j, dev))
            worst = max(worst, dev)
    if failures:
        return QeccReport(N, d, K, delta, "fail", 0, failures, worst, False)

    exact = d == 2 and all(s.exact for s in basis)
    pairs = [(i, j) for i in range(K) for j in range(i, K)]

    def check(op: ErrorOperator):
        local = []
        local_worst = 0.0
        for i, j in pairs:
            if exact:
                re, im = _pauli_element_exact(basis[i], basis[j], op)
                mag = abs(complex(re, im)) / math.sqrt(basis[i].r * basis[j].r)
                bad = (re, im) != (0, 0)
            else:
                val = _pauli_element_float(basis[i], basis[j], op, d)
                mag = abs(val)
                bad = mag > tol
            local_worst = max(local_worst, mag)
            if bad:
                local.append((str(op), i, j, mag))
        return local, local_worst

    ops = list(_error_operators(N, d, delta, cap))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(check, ops))
    else:
        results = [check(op) for op in ops]
    for local, local_worst in results:
        failures.extend(local)
        worst = max(worst, local_worst)

    verdict = "pass" if not failures else "fail"
    return QeccReport(N, d, K, delta, verdict, len(ops), failures, worst, True)


def singleton_check(N: int, K: int, k: int, d: int) -> bool:
    """K <= d^(N - 2k): necessary for a pure ((N, K, k+1))_d code and hence
    for hiding log_d(K) dimensions from any k of N parties."""
    if min(N, K, d) < 1 or k < 0:
        raise ValueError("parameters must be positive (k non-negative)")
    exponent = N - 2 * k
    if exponent < 0:
        return K <= 0  # never; d^negative < 1
    return K <= d**exponent


def kuniform_subspace_check(
    basis: list,
    k: int,
    tol: float = FLOAT_TOL,
    threads: int = 1,
    cap: int | None = None,
) -> bool:
    """True when every unit-norm combination of the (orthonormal) basis is
    k-uniform: each basis state passes on every k-subset and every cross
    reduction vanishes.  Agrees with verify_pure_qecc at delta = k + 1."""
    if not basis:
        raise ValueError("need at least one basis state")
    N, d = basis[0].N, basis[0].d
    if any((s.N, s.d) != (N, d) for s in basis):
        raise ValueError("basis states live on different systems")
    if not 0 <= k <= N:
        raise ValueError(f"k = {k} outside [0, {N}]")
    for i, j in combinations(range(len(basis)), 2):
        if not inner_product(basis[i], basis[j]).is_zero(tol=tol):
            return False
    if k == 0:
        return True

    def check(subset):
        for s in basis:
            if not reduction(s, subset, cap=cap).is_maximally_mixed(tol=tol):
                return False
        for i, j in combinations(range(len(basis)), 2):
            if not cross_reduction(basis[i], basis[j], subset, cap=cap).is_zero(tol=tol):
                return False
        return True

    subsets = list(combinations(range(N), k))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return all(pool.map(check, subsets))
    return all(check(s) for s in subsets)


# ---------------------------------------------------------------------------
# masker bundles: a directory holding one state file per image plus a JSON
# manifest {format, d, N, verified_k, checks, images, provenance}


def save_masker(m: Masker, directory: str | Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    names = []
    for s, img in enumerate(m.images):
        name = f"image_{s}.state"
        save_state(img, directory / name)
        names.append(name)
    manifest = {
        "format": "masker",
        "d": m.d,
        "N": m.N,
        "verified_k": m.verified_k,
        "checks": {"orthonormal": True, "images": m.d},
        "images": names,
        "provenance": m.provenance,
    }
    (directory / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    )


def load_masker(directory: str | Path, tol: float = FLOAT_TOL) -> Masker:
    directory = Path(directory)
    manifest_path = directory / "manifest.json"
    if not manifest_path.is_file():
        raise ParseError(f"{manifest_path}: missing masker manifest")
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{manifest_path}: {exc}") from None
    if manifest.get("format") != "masker":
        raise ParseError(f"{manifest_path}: not a masker bundle")
    images = [load_state(directory / name) for name in manifest["images"]]
    m = Masker(
        d=int(manifest["d"]),
        N=int(manifest["N"]),
        images=images,
        verified_k=int(manifest.get("verified_k", -1)),
        provenance=str(manifest.get("provenance", str(directory))),
    )
    for s, t in combinations(range(m.d), 2):
        if not inner_product(m.images[s], m.images[t]).is_zero(tol=tol):
            raise KuniformError(f"{directory}: bundle images {s}, {t} not orthogonal")
    return m
