"""Eigenvalue classification, D-instability search and principal-minor tests."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "Dominant",
    "SpectralReport",
    "Theorem1Check",
    "P0Result",
    "DiagonalWitness",
    "StabilityChange",
    "RankAwareCounts",
    "NonHyperbolicError",
    "RankMismatchError",
    "default_tol",
    "pairing_tol",
    "spectrum",
    "classify",
    "theorem1_hypotheses",
    "is_p0_minus",
    "d_instability_search",
    "net_stability_change",
    "rank_aware_counts",
]

P0_DIMENSION_CAP = 12
LOG_BOUND = 6.0


class NonHyperbolicError(ValueError):
    pass


class RankMismatchError(ValueError):
    pass


def _inf_norm(A: np.ndarray) -> float:
    return float(np.max(np.sum(np.abs(A), axis=1))) if A.size else 0.0


def default_tol(A) -> float:
    """Classification band for "zero real part": ``1e-9 * max(1, ||A||_inf)``."""
    return 1e-9 * max(1.0, _inf_norm(np.asarray(A, dtype=float)))


def pairing_tol(A) -> float:
    return 1e-7 * max(1.0, _inf_norm(np.asarray(A, dtype=float)))


def _check_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def _sort(ev: np.ndarray) -> np.ndarray:
    order = np.lexsort((ev.imag, -ev.real))
    return ev[order]


def spectrum(A) -> np.ndarray:
    """All eigenvalues, sorted by descending real part then ascending imaginary part."""
    A = _check_matrix(A)
    if A.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    return _sort(np.linalg.eigvals(A).astype(complex))


@dataclass(frozen=True)
class Dominant:
    value: complex
    simple: bool
    strictly_dominant: bool


@dataclass(frozen=True)
class SpectralReport:
    eigenvalues: np.ndarray
    n_pos: int
    n_neg: int
    n_zero: int
    tol: float
    dominant: Dominant | None

    @property
    def stable(self) -> bool:
        return self.n_pos == 0 and self.n_zero == 0

    @property
    def hyperbolic(self) -> bool:
        return self.n_zero == 0

    @property
    def abscissa(self) -> float:
        return float(self.eigenvalues[0].real) if self.eigenvalues.size else -np.inf

    def to_dict(self) -> dict:
        d = None
        if self.dominant is not None:
            d = {
                "value": [self.dominant.value.real, self.dominant.value.imag],
                "simple": self.dominant.simple,
                "strictly_dominant": self.dominant.strictly_dominant,
            }
        return {
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            "n_pos": self.n_pos,
            "n_neg": self.n_neg,
            "n_zero": self.n_zero,
            "tol": self.tol,
            "dominant": d,
        }


def _is_simple(ev: np.ndarray, k: int, ptol: float) -> bool:
    others = np.delete(ev, k)
    return not np.any(np.abs(others - ev[k]) <= ptol)


def classify(A, tol: float | None = None) -> SpectralReport:
    """Count eigenvalues left of, right of, and on the imaginary axis (within ``tol``)."""
    A = _check_matrix(A)
    if tol is None:
        tol = default_tol(A)
    if tol <= 0:
        raise ValueError("tol must be positive")
    ev = spectrum(A)
    re = ev.real
    n_pos = int(np.sum(re > tol))
    n_neg = int(np.sum(re < -tol))
    dominant = None
    if ev.size:
        ptol = pairing_tol(A)
        top = re[0]
        # prefer the upper member of a conjugate pair
        k = max(np.flatnonzero(re == top), key=lambda i: ev[i].imag)
        z = ev[k]
        conj = None
        if abs(z.imag) > ptol:
            conj = int(np.argmin(np.abs(ev - np.conj(z))))
        rest = [i for i in range(ev.size) if i != k and i != conj]
        strict = not any(re[i] >= top - tol for i in rest)
        dominant = Dominant(complex(z), _is_simple(ev, k, ptol), strict)
    return SpectralReport(ev, n_pos, n_neg, ev.size - n_pos - n_neg, float(tol), dominant)


@dataclass(frozen=True)
class Theorem1Check:
    holds: bool
    pair: complex | None
    strengthened: bool
    reason: str = ""


def theorem1_hypotheses(A, tol: float | None = None) -> Theorem1Check:
    """Look for a simple complex pair with positive real part that no other eigenvalue shares.

    Candidate pairs are tried in order of decreasing real part. The check is
    ``strengthened`` when the chosen pair also has the largest real part of
    the whole spectrum.
    """
    A = _check_matrix(A)
    if tol is None:
        tol = default_tol(A)
    ev = spectrum(A)
    ptol = pairing_tol(A)
    if not ev.size:
        return Theorem1Check(False, None, False, "empty matrix")
    top = ev[0].real
    reasons = []
    for k, z in enumerate(ev):
        if z.imag <= ptol:
            continue
        if z.real <= tol:
            reasons.append(f"pair {z:.6g} does not have positive real part")
            break
        if not _is_simple(ev, k, ptol):
            reasons.append(f"pair {z:.6g} is not simple")
            continue
        conj = int(np.argmin(np.abs(ev - np.conj(z))))
        clash = [w for i, w in enumerate(ev) if i not in (k, conj) and abs(w.real - z.real) <= tol]
        if clash:
            reasons.append(f"pair {z:.6g} shares its real part with {clash[0]:.6g}")
            continue
        strengthened = z.real >= top - tol
        return Theorem1Check(True, complex(z), bool(strengthened))
    if not reasons:
        reasons.append("no complex conjugate pair")
    return Theorem1Check(False, None, False, "; ".join(reasons))


@dataclass(frozen=True)
class P0Result:
    is_p0_minus: bool
    violating_minor: tuple[tuple[int, ...], float] | None


def _bareiss_det(M: list[list[int]]) -> int:
    M = [row[:] for row in M]
    n = len(M)
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def is_p0_minus(A, cap: int = P0_DIMENSION_CAP, exact: bool | None = None, rel_tol: float = 1e-10) -> P0Result:
    """Test whether every nonzero k-by-k principal minor has sign ``(-1)**k``.

    Minors are visited by size, then lexicographically; the first violation
    (a nonzero minor of sign ``(-1)**(k-1)``) is returned. Integer matrices
    are handled exactly. Otherwise a minor counts as zero when its magnitude
    is below ``rel_tol`` times the Hadamard bound of the submatrix.
    """
    A = _check_matrix(A)
    n = A.shape[0]
    if n > cap:
        raise ValueError(f"dimension {n} exceeds the principal-minor cap {cap}")
    integral = bool(np.all(A == np.round(A)))
    if exact is None:
        exact = integral
    if exact:
        if integral:
            M = [[int(v) for v in row] for row in A.tolist()]
            scale = 1
        else:
            F = [[Fraction(v) for v in row] for row in A.tolist()]
            scale = math.lcm(*(v.denominator for row in F for v in row))
            M = [[int(v * scale) for v in row] for row in F]
    row_norms = np.linalg.norm(A, axis=1)
    for k in range(1, n + 1):
        for idx in itertools.combinations(range(n), k):
            if exact:
                det_int = _bareiss_det([[M[i][j] for j in idx] for i in idx])
                value = float(Fraction(det_int, scale**k))
                nonzero = det_int != 0
                sign = (det_int > 0) - (det_int < 0)
            else:
                value = float(np.linalg.det(A[np.ix_(idx, idx)]))
                bound = float(np.prod(row_norms[list(idx)]))
                nonzero = abs(value) > rel_tol * max(bound, np.finfo(float).tiny)
                sign = int(np.sign(value))
            if nonzero and sign != (-1) ** k:
                return P0Result(False, (idx, value))
    return P0Result(True, None)


@dataclass(frozen=True)
class DiagonalWitness:
    d: np.ndarray
    report_before: SpectralReport
    report_after: SpectralReport
    route: str


def _abscissa(A: np.ndarray, log_d: np.ndarray) -> float:
    d = np.exp(log_d - log_d.max())
    return float(np.max(np.linalg.eigvals(A * d).real))


def _verified(A: np.ndarray, d: np.ndarray, tol: float | None, route: str) -> DiagonalWitness | None:
    after = classify(A * d, tol)
    if after.n_pos >= 1:
        return DiagonalWitness(d, classify(A, tol), after, route)
    return None


def d_instability_search(
    A, budget: int = 1000, seed: int = 0, tol: float | None = None, use_minors: bool = True
) -> DiagonalWitness | None:
    """Search for a positive ``d`` such that ``A diag(d)`` has an eigenvalue with positive real part.

    A violated principal-minor sign pattern is tried first: weight is loaded
    on the violating index set. Otherwise seeded multistart coordinate
    ascent on the spectral abscissa over ``log d`` in ``[-6, 6]``. Returns
    ``None`` once ``budget`` eigenvalue evaluations are spent; that is not a
    proof of D-stability.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    A = _check_matrix(A)
    n = A.shape[0]
    evals = 0

    if use_minors and n <= P0_DIMENSION_CAP:
        p0 = is_p0_minus(A)
        if not p0.is_p0_minus:
            idx = list(p0.violating_minor[0])
            for t in (1e2, 1e4, 1e6):
                if evals >= budget:
                    return None
                d = np.full(n, 1.0 / t)
                d[idx] = 1.0
                evals += 1
                w = _verified(A, d, tol, "principal-minor")
                if w is not None:
                    return w

    rng = np.random.default_rng(seed)
    while evals < budget:
        x = rng.uniform(-LOG_BOUND, LOG_BOUND, n)
        fx = _abscissa(A, x)
        evals += 1
        step = 2.0
        while evals < budget and step > 1e-3 and fx <= 0:
            improved = False
            for i in range(n):
                for s in (step, -step):
                    y = x.copy()
                    y[i] = np.clip(y[i] + s, -LOG_BOUND, LOG_BOUND)
                    if y[i] == x[i]:
                        continue
                    fy = _abscissa(A, y)
                    evals += 1
                    if fy > fx:
                        x, fx, improved = y, fy, True
                        break
                    if evals >= budget:
                        break
                if fx > 0 or evals >= budget:
                    break
            if not improved:
                step /= 2
        if fx > 0:
            d = np.exp(x - x.max())
            w = _verified(A, d, tol, "multistart")
            if w is not None:
                return w
    return None


@dataclass(frozen=True)
class StabilityChange:
    differs: bool
    counts: tuple[int, int]


def net_stability_change(A, d1, d2, tol: float | None = None) -> StabilityChange:
    """Compare unstable counts of ``A diag(d1)`` and ``A diag(d2)``; both must be hyperbolic."""
    A = _check_matrix(A)
    reports = []
    for d in (d1, d2):
        d = np.asarray(d, dtype=float)
        if d.shape != (A.shape[0],) or np.any(d <= 0):
            raise ValueError("diagonal scalings must be positive vectors of matching size")
        rep = classify(A * d, tol)
        if rep.n_zero:
            raise NonHyperbolicError(f"A diag(d) has {rep.n_zero} eigenvalue(s) on the imaginary axis")
        reports.append(rep)
    counts = (reports[0].n_pos, reports[1].n_pos)
    return StabilityChange(counts[0] != counts[1], counts)


@dataclass(frozen=True)
class RankAwareCounts:
    n_neg_of_r: int
    n_pos_of_r: int
    n_zero_of_r: int
    kernel_dim: int
    nonzero: np.ndarray

    @property
    def hyperbolic(self) -> bool:
        return self.n_zero_of_r == 0


def rank_aware_counts(A, r: int, tol: float | None = None, kernel_tol: float | None = None) -> RankAwareCounts:
    """Stability counts among the ``r`` eigenvalues outside the structural kernel.

    The ``n - r`` eigenvalues of smallest modulus are taken as the kernel and
    must be numerically zero; the remaining ``r`` must not be.
    """
    A = _check_matrix(A)
    n = A.shape[0]
    if not 0 <= r <= n:
        raise ValueError(f"rank {r} out of range for dimension {n}")
    if tol is None:
        tol = default_tol(A)
    if kernel_tol is None:
        # defective zero eigenvalues are only resolved to ~sqrt(eps)
        kernel_tol = 1e-6 * max(1.0, _inf_norm(A))
    ev = spectrum(A)
    by_mod = np.argsort(np.abs(ev), kind="stable")
    kernel = ev[by_mod[: n - r]]
    rest = _sort(ev[by_mod[n - r:]])
    if kernel.size and np.max(np.abs(kernel)) > kernel_tol:
        raise RankMismatchError(f"expected {n - r} zero eigenvalues, smallest moduli {np.abs(kernel)}")
    if rest.size and np.min(np.abs(rest)) <= kernel_tol:
        raise RankMismatchError(f"more than {n - r} eigenvalues are numerically zero")
    n_pos = int(np.sum(rest.real > tol))
    n_neg = int(np.sum(rest.real < -tol))
    return RankAwareCounts(n_neg, n_pos, r - n_pos - n_neg, n - r, rest)
