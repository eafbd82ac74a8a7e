"""Two spectral certificates for Hopf points of mass action networks.

Criterion I works on the fully-open extension: uniform outflow ``beta`` and
matching inflow ``beta * x_bar`` keep ``x_bar`` stationary while shifting
the Jacobian spectrum left by ``beta``. A complex pair with positive real
part crosses the imaginary axis exactly at ``beta = Re(lambda)``.

Criterion II works in convex coordinates ``(h, j)``: if ``B(j)`` is stable
but some ``B(j) diag(d)`` is not, the curve from ``h = 1`` to ``h = d``
carries a crossing that is located by bisection.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dynamics import (
    OpenParameters,
    SteadyState,
    fit_rate_constants,
    jacobian,
    open_jacobian,
    open_rhs,
    rate_vector,
    residual_norm,
)
from .fluxcone import ExtremeRayMatrix, extreme_rays
from .network import (
    INFLOW_PREFIX,
    OUTFLOW_PREFIX,
    Network,
    fully_open_extension,
    kinetic_matrix,
    stoich_rank,
    stoichiometric_matrix,
)
from .spectral import (
    SpectralReport,
    classify,
    d_instability_search,
    pairing_tol,
    rank_aware_counts,
    theorem1_hypotheses,
)

__all__ = [
    "CERT_TOL",
    "Verdict",
    "ConvexCoordinates",
    "Criterion1Witness",
    "Criterion2Witness",
    "CriterionOutcome",
    "HopfCurve",
    "Crossing",
    "HopfScan",
    "NotSteadyStateError",
    "NoNetChangeError",
    "SignDetInconsistencyError",
    "TrivialConeError",
    "convex_jacobian",
    "realize_system",
    "criterion1",
    "criterion2_search",
    "criterion2_rank_aware",
    "hopf_scan",
    "crossing_pair",
    "search_threads",
    "verify_outcome",
]

CERT_TOL = 1e-8
J_LOG_RANGE = (-3.0, 3.0)
MAX_BISECTIONS = 200


class Verdict(str, enum.Enum):
    CERTIFIED = "certified"
    INCONCLUSIVE = "inconclusive"
    HYPOTHESES_FAILED = "hypotheses-failed"


class NotSteadyStateError(ValueError):
    pass


class NoNetChangeError(ValueError):
    pass


class SignDetInconsistencyError(RuntimeError):
    pass


class TrivialConeError(ValueError):
    pass


@dataclass(frozen=True)
class ConvexCoordinates:
    """``h``: reciprocal steady-state concentrations; ``j``: extreme-ray weights."""

    h: np.ndarray
    j: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h, dtype=float)
        j = np.asarray(self.j, dtype=float)
        if np.any(h <= 0) or not np.all(np.isfinite(h)):
            raise ValueError("h must be strictly positive")
        if np.any(j < 0) or not np.all(np.isfinite(j)):
            raise ValueError("ray weights j must be nonnegative")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "j", j)


def _ray_array(E) -> np.ndarray:
    return E.E if isinstance(E, ExtremeRayMatrix) else np.asarray(E, dtype=float)


def convex_jacobian(N, Y, E, coords: ConvexCoordinates) -> np.ndarray:
    """``G(h, j) = N diag(E j) Y^T diag(h)``."""
    N = np.asarray(N, dtype=float)
    Y = np.asarray(Y, dtype=float)
    Ea = _ray_array(E)
    if Ea.shape[1] != coords.j.size or N.shape != Y.shape or Ea.shape[0] != N.shape[1]:
        raise ValueError("dimension mismatch between N, Y, E and (h, j)")
    if coords.h.size != N.shape[0]:
        raise ValueError("h must have one entry per species")
    flux = Ea @ coords.j
    if not np.all(flux > 0):
        raise ValueError("E j must be strictly positive")
    return ((N * flux) @ Y.T) * coords.h


def realize_system(net: Network, E, coords: ConvexCoordinates) -> tuple[np.ndarray, SteadyState]:
    """Rate constants whose steady state is ``x = 1/h`` carrying flux ``E j``."""
    flux = _ray_array(E) @ coords.j
    if not np.all(flux > 0):
        raise ValueError("E j must be strictly positive")
    x = 1.0 / coords.h
    a = fit_rate_constants(net, x, flux)
    return a, SteadyState(x=x, residual=residual_norm(net, a, x))


def crossing_pair(rep: SpectralReport, tol: float, exclude_kernel: int = 0) -> list[complex]:
    """Eigenvalues with ``|Re| <= tol``, ignoring the ``exclude_kernel`` smallest in modulus."""
    ev = rep.eigenvalues
    if exclude_kernel:
        keep = np.argsort(np.abs(ev), kind="stable")[exclude_kernel:]
        ev = ev[np.sort(keep)]
    return [complex(z) for z in ev if abs(z.real) <= tol]


def _is_conjugate_pair(zs: list[complex], ptol: float) -> bool:
    return len(zs) == 2 and abs(zs[0] - np.conj(zs[1])) <= ptol and abs(zs[0].imag) > ptol


# ---------------------------------------------------------------- outcomes


@dataclass
class Criterion1Witness:
    x_bar: np.ndarray
    beta_star: float
    F: np.ndarray
    D: np.ndarray
    pair: complex
    mu: complex
    strengthened: bool
    rate_constants: dict[str, float]
    extension_rates: dict[str, float]
    report: SpectralReport

    def to_dict(self) -> dict:
        return {
            "x_bar": self.x_bar.tolist(),
            "beta_star": self.beta_star,
            "F": self.F.tolist(),
            "D": self.D.tolist(),
            "pair": [self.pair.real, self.pair.imag],
            "mu": [self.mu.real, self.mu.imag],
            "strengthened": self.strengthened,
            "rate_constants": self.rate_constants,
            "extension_rates": self.extension_rates,
            "report_at_beta_star": self.report.to_dict(),
        }


@dataclass
class Criterion2Witness:
    j_bar: np.ndarray
    h_s: np.ndarray
    h_u: np.ndarray
    beta_c: float
    h_c: np.ndarray
    rate_constants: dict[str, float]
    x_c: np.ndarray
    mu: complex
    rank: int
    rank_aware: bool
    destabilizing_sign: int
    report: SpectralReport
    counts: tuple[int, int]

    def gamma(self, beta: float) -> np.ndarray:
        return _gamma(self.h_s, self.h_u, beta)

    def to_dict(self) -> dict:
        return {
            "j_bar": self.j_bar.tolist(),
            "h_s": self.h_s.tolist(),
            "h_u": self.h_u.tolist(),
            "beta_c": self.beta_c,
            "h_c": self.h_c.tolist(),
            "rate_constants": self.rate_constants,
            "x_c": self.x_c.tolist(),
            "mu": [self.mu.real, self.mu.imag],
            "rank": self.rank,
            "rank_aware": self.rank_aware,
            "destabilizing_sign": self.destabilizing_sign,
            "endpoint_counts": list(self.counts),
            "report_at_crossing": self.report.to_dict(),
        }


@dataclass
class CriterionOutcome:
    criterion: str
    verdict: Verdict
    witness: Criterion1Witness | Criterion2Witness | None = None
    diagnostics: list[str] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.verdict is Verdict.CERTIFIED

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "verdict": self.verdict.value,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "diagnostics": list(self.diagnostics),
        }


# ------------------------------------------------------------ criterion I


def _extension_rates(net: Network, a: np.ndarray, beta: float, x_bar: np.ndarray) -> dict[str, float]:
    """Rate constants of the fully-open extension realizing ``F = beta x_bar``, ``D = beta``.

    Existing unit inflows/outflows absorb the added rate (``a_i + F_n``,
    ``a_i + D_n``); missing ones are created as ``in_X`` / ``out_X``.
    """
    ext = fully_open_extension(net)
    rates = {r.label: float(v) for r, v in zip(net.reactions, a)}
    for s in net.species:
        F_n, D_n = beta * x_bar[s.index], beta
        in_label = INFLOW_PREFIX + s.name
        out_label = OUTFLOW_PREFIX + s.name
        existing_in = next(
            (r.label for r in net.reactions if not r.reactants and r.products == {s.index: 1}), None
        )
        existing_out = next(
            (r.label for r in net.reactions if not r.products and r.reactants == {s.index: 1}), None
        )
        if existing_in is not None:
            rates[existing_in] += F_n
        else:
            rates[in_label] = F_n
        if existing_out is not None:
            rates[existing_out] += D_n
        else:
            rates[out_label] = D_n
    return {label: rates[label] for label in ext.reaction_labels}


def steady_state_scale(net: Network, a, x) -> float:
    return max(1.0, float(np.max(np.abs(rate_vector(net, a, x)))))


def criterion1(net: Network, a, x_bar, tol: float = CERT_TOL, classify_tol: float | None = None) -> CriterionOutcome:
    """Certify a Hopf point of the fully-open extension from a steady state of ``net``.

    Raises
    ------
    NotSteadyStateError
        When the residual at ``x_bar`` exceeds ``tol`` times the rate scale.
    """
    a = np.asarray(a, dtype=float)
    x_bar = np.asarray(x_bar, dtype=float)
    res = residual_norm(net, a, x_bar)
    scale = steady_state_scale(net, a, x_bar)
    if res > tol * scale:
        raise NotSteadyStateError(f"x_bar is not a steady state: residual {res:.3e} > {tol * scale:.3e}")
    diag = [f"steady-state residual {res:.3e}"]

    G = jacobian(net, a, x_bar)
    check = theorem1_hypotheses(G, classify_tol)
    if not check.holds:
        diag.append(f"Jacobian hypotheses fail: {check.reason}")
        return CriterionOutcome("I", Verdict.HYPOTHESES_FAILED, None, diag)
    diag.append(f"simple pair {check.pair:.12g} with positive real part; strengthened={check.strengthened}")

    beta = float(check.pair.real)
    params = OpenParameters.uniform(beta, x_bar)
    open_res = float(np.max(np.abs(open_rhs(net, a, params, x_bar))))
    H = open_jacobian(net, a, params, x_bar)
    rep = classify(H, classify_tol)
    on_axis = crossing_pair(rep, tol)
    diag.append(f"beta* = {beta!r}; fully-open residual {open_res:.3e}")
    if not _is_conjugate_pair(on_axis, pairing_tol(H)):
        diag.append(f"shifted Jacobian has {len(on_axis)} eigenvalue(s) with |Re| <= {tol:g}, expected one pair")
        return CriterionOutcome("I", Verdict.INCONCLUSIVE, None, diag)
    mu = max(on_axis, key=lambda z: z.imag)
    witness = Criterion1Witness(
        x_bar=x_bar,
        beta_star=beta,
        F=params.F,
        D=params.D,
        pair=check.pair,
        mu=mu,
        strengthened=check.strengthened,
        rate_constants={r.label: float(v) for r, v in zip(net.reactions, a)},
        extension_rates=_extension_rates(net, a, beta, x_bar),
        report=rep,
    )
    diag.append(f"crossing eigenvalue mu = {mu:.6g}, transversal speed |d mu/d beta| = 1")
    return CriterionOutcome("I", Verdict.CERTIFIED, witness, diag)


# ----------------------------------------------------------- criterion II


def _gamma(h_s, h_u, beta: float) -> np.ndarray:
    return np.exp((1.0 - beta) * np.log(h_s) + beta * np.log(h_u))


@dataclass
class HopfCurve:
    """Log-linear curve ``h(beta)`` from ``h_s`` (beta=0) to ``h_u`` (beta=1), with samples."""

    h_s: np.ndarray
    h_u: np.ndarray
    betas: np.ndarray
    reports: list[SpectralReport]
    counts: list[int]
    det_signs: list[int]

    def __call__(self, beta: float) -> np.ndarray:
        return _gamma(self.h_s, self.h_u, beta)


@dataclass
class Crossing:
    beta_c: float
    h_c: np.ndarray
    mu: complex
    bracket: tuple[float, float]
    counts: tuple[int, int]
    iterations: int
    report: SpectralReport


@dataclass
class HopfScan:
    curve: HopfCurve
    crossing: Crossing | None
    brackets: list[tuple[float, float]]
    diagnostics: list[str]


class _CurveModel:
    def __init__(self, N, Y, E, j, rank: int | None, classify_tol):
        self.N = np.asarray(N, dtype=float)
        self.Y = np.asarray(Y, dtype=float)
        self.E = _ray_array(E)
        self.j = np.asarray(j, dtype=float)
        self.n = self.N.shape[0]
        self.rank = self.n if rank is None else rank
        self.kernel = self.n - self.rank
        self.classify_tol = classify_tol

    def G(self, h) -> np.ndarray:
        return convex_jacobian(self.N, self.Y, self.E, ConvexCoordinates(h, self.j))

    def evaluate(self, h) -> tuple[SpectralReport, int, int, bool]:
        G = self.G(h)
        rep = classify(G, self.classify_tol)
        if self.kernel:
            rc = rank_aware_counts(G, self.rank, self.classify_tol)
            count, hyperbolic = rc.n_pos_of_r, rc.hyperbolic
            prod = np.prod(rc.nonzero)
            sign = int(np.sign(prod.real))
        else:
            count, hyperbolic = rep.n_pos, rep.hyperbolic
            sign = int(np.sign(np.linalg.det(G)))
        return rep, count, sign, hyperbolic


def hopf_scan(
    N,
    Y,
    E,
    j_bar,
    h_s,
    h_u,
    grid: int = 64,
    tol: float = CERT_TOL,
    rank: int | None = None,
    classify_tol: float | None = None,
) -> HopfScan:
    """Sample ``G(gamma(beta), j_bar)`` on a grid and bisect the first change in unstable count.

    With ``rank`` below the number of species, counts exclude the
    structural kernel and the sign of the product of the nonzero
    eigenvalues stands in for ``sign det``.

    Raises
    ------
    NoNetChangeError
        The grid shows no change in the unstable count.
    SignDetInconsistencyError
        ``sign det`` varies along the curve.
    """
    h_s = np.asarray(h_s, dtype=float)
    h_u = np.asarray(h_u, dtype=float)
    if np.any(h_s <= 0) or np.any(h_u <= 0):
        raise ValueError("curve endpoints must be positive")
    if grid < 1:
        raise ValueError("grid must be at least 1")
    model = _CurveModel(N, Y, E, j_bar, rank, classify_tol)
    betas = np.linspace(0.0, 1.0, grid + 1)
    reports, counts, signs = [], [], []
    for b in betas:
        rep, c, s, _ = model.evaluate(_gamma(h_s, h_u, b))
        reports.append(rep)
        counts.append(c)
        signs.append(s)
    curve = HopfCurve(h_s, h_u, betas, reports, counts, signs)
    diag = []
    if len(set(signs)) != 1:
        raise SignDetInconsistencyError(f"sign det G varies along the curve: {sorted(set(signs))}")
    if signs[0] == 0:
        raise SignDetInconsistencyError("G(h, j) is singular along the whole curve")
    if counts[0] == counts[-1] and len(set(counts)) == 1:
        raise NoNetChangeError(f"unstable count constant ({counts[0]}) on all {grid + 1} samples")
    brackets = [(float(betas[k]), float(betas[k + 1])) for k in range(grid) if counts[k] != counts[k + 1]]
    if counts[0] == counts[-1]:
        diag.append("unstable count returns to its initial value; refining first interior change")
    if len(brackets) > 1:
        diag.append(f"{len(brackets)} brackets with count changes; refining the first, others: {brackets[1:]}")

    lo, hi = brackets[0]
    c_lo = counts[int(round(lo * grid))]
    c_hi = counts[int(round(hi * grid))]
    crossing = None
    for it in range(1, MAX_BISECTIONS + 1):
        mid = 0.5 * (lo + hi)
        rep, c_mid, _, _ = model.evaluate(_gamma(h_s, h_u, mid))
        near = _nearest_pair(rep, model.kernel)
        if near is not None and abs(near.real) <= tol:
            on_axis = crossing_pair(rep, tol, model.kernel)
            if _is_conjugate_pair(on_axis, pairing_tol(model.G(_gamma(h_s, h_u, mid)))):
                crossing = Crossing(mid, _gamma(h_s, h_u, mid), near, (lo, hi), (c_lo, c_hi), it, rep)
                break
        if c_mid == c_lo:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4 * np.finfo(float).eps:
            break
    if crossing is None:
        diag.append(f"bisection stalled on [{lo!r}, {hi!r}] without |Re mu| <= {tol:g}")
    return HopfScan(curve, crossing, brackets, diag)


def _nearest_pair(rep: SpectralReport, kernel: int) -> complex | None:
    ev = rep.eigenvalues
    if kernel:
        keep = np.argsort(np.abs(ev), kind="stable")[kernel:]
        ev = ev[keep]
    upper = [z for z in ev if z.imag > 0]
    if not upper:
        return None
    return complex(min(upper, key=lambda z: abs(z.real)))


def search_threads() -> int:
    """Thread cap from ``HOPFNET_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("HOPFNET_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class _SampleResult:
    index: int
    lines: list[str]
    witness: Criterion2Witness | None = None


def _criterion2_sample(net, N, Y, E, rank, index, seq, budget, grid, tol, classify_tol) -> _SampleResult:
    n = N.shape[0]
    rank_aware = rank < n
    rng = np.random.default_rng(seq)
    j = 10.0 ** rng.uniform(*J_LOG_RANGE, E.p)
    out = _SampleResult(index, [])
    say = out.lines.append
    flux = E.E @ j
    if not np.all(flux > 0):
        say(f"sample {index}: E j not strictly positive, skipped")
        return out
    h_s = np.ones(n)
    B = convex_jacobian(N, Y, E, ConvexCoordinates(h_s, j))
    if rank_aware:
        rc = rank_aware_counts(B, rank, classify_tol)
        stable = rc.n_neg_of_r == rank
        summary = f"r={rank}: {rc.n_neg_of_r} negative, {rc.n_pos_of_r} positive, kernel_dim={rc.kernel_dim}"
    else:
        rep = classify(B, classify_tol)
        stable = rep.stable
        summary = f"n_pos={rep.n_pos}, n_zero={rep.n_zero}"
    if not stable:
        say(f"sample {index}: B(j) not stable ({summary})")
        return out
    search_seed = int(rng.integers(2**32))
    w = d_instability_search(B, budget=budget, seed=search_seed, tol=classify_tol)
    if w is None:
        say(f"sample {index}: B(j) stable ({summary}); no D-instability witness within budget {budget}")
        return out
    say(f"sample {index}: B(j) stable, D-unstable via {w.route} (n_pos after scaling = {w.report_after.n_pos}); h_u := d")
    try:
        scan = hopf_scan(N, Y, E, j, h_s, w.d, grid=grid, tol=tol, rank=rank if rank_aware else None,
                         classify_tol=classify_tol)
    except (NoNetChangeError, ValueError) as exc:
        say(f"sample {index}: curve scan failed: {exc}")
        return out
    out.lines.extend(f"sample {index}: {m}" for m in scan.diagnostics)
    if scan.crossing is None:
        return out
    cr = scan.crossing
    coords = ConvexCoordinates(cr.h_c, j)
    a, ss = realize_system(net, E, coords)
    c0, c1 = scan.curve.counts[0], scan.curve.counts[-1]
    out.witness = Criterion2Witness(
        j_bar=j,
        h_s=h_s,
        h_u=w.d,
        beta_c=cr.beta_c,
        h_c=cr.h_c,
        rate_constants={r.label: float(v) for r, v in zip(net.reactions, a)},
        x_c=ss.x,
        mu=cr.mu,
        rank=rank,
        rank_aware=rank_aware,
        destabilizing_sign=1 if cr.counts[1] > cr.counts[0] else -1,
        report=cr.report,
        counts=(c0, c1),
    )
    say(f"sample {index}: crossing at beta_c = {cr.beta_c!r}, mu = {cr.mu:.6g}, "
        f"{cr.iterations} bisections; sign det constant along {len(scan.curve.betas)} samples")
    return out


def criterion2_search(
    net: Network,
    samples: int = 200,
    budget: int = 1000,
    seed: int = 0,
    grid: int = 64,
    tol: float = CERT_TOL,
    classify_tol: float | None = None,
    threads: int | None = None,
    E: ExtremeRayMatrix | None = None,
) -> CriterionOutcome:
    """Randomized search for ``j`` with ``B(j)`` stable but D-unstable, then a certified crossing.

    Samples are independent streams spawned from ``seed``; the selected
    witness is always the lowest certifying sample index, whatever the
    thread count.

    Raises
    ------
    TrivialConeError
        When the flux cone is ``{0}``.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    N = stoichiometric_matrix(net)
    Y = kinetic_matrix(net)
    if E is None:
        E = extreme_rays(N)
    if E.is_empty:
        raise TrivialConeError("the steady-state flux cone is {0}; no positive steady state exists")
    rank = stoich_rank(N)
    diag = [f"p = {E.p} extreme rays"]
    if rank < net.n_species:
        diag.append(f"rank-aware mode, r = {rank}")
    threads = search_threads() if threads is None else max(1, threads)
    children = np.random.SeedSequence(seed).spawn(samples)

    def run(k):
        return _criterion2_sample(net, N, Y, E, rank, k, children[k], budget, grid, tol, classify_tol)

    chosen = None
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for start in range(0, samples, threads):
            batch = list(pool.map(run, range(start, min(start + threads, samples))))
            for res in batch:
                diag.extend(res.lines)
                if res.witness is not None:
                    chosen = res
                    break
            if chosen is not None:
                break
    if chosen is None:
        diag.append(f"no certified crossing in {samples} samples")
        return CriterionOutcome("II", Verdict.INCONCLUSIVE, None, diag)
    return CriterionOutcome("II", Verdict.CERTIFIED, chosen.witness, diag)


def criterion2_rank_aware(net: Network, samples: int = 200, budget: int = 1000, seed: int = 0, **kwargs) -> CriterionOutcome:
    """Criterion II for networks with conserved quantities (``rank N < |S|``)."""
    N = stoichiometric_matrix(net)
    if stoich_rank(N) >= net.n_species:
        raise ValueError("stoichiometric matrix has full row rank; use criterion2_search")
    return criterion2_search(net, samples=samples, budget=budget, seed=seed, **kwargs)


# ---------------------------------------------------------- verification


def _complex(pair) -> complex:
    return complex(pair[0], pair[1])


def verify_outcome(net: Network, outcome: dict, tol: float = CERT_TOL) -> list[tuple[str, bool, str]]:
    """Re-check a serialized certified outcome from scratch.

    Nothing computed during the search is trusted: matrices, rays and
    spectra are rebuilt from ``net`` and the witness numbers alone. Returns
    ``(check, passed, detail)`` triples.
    """
    checks: list[tuple[str, bool, str]] = []

    def check(name, ok, detail=""):
        checks.append((name, bool(ok), detail))

    w = outcome.get("witness")
    check("verdict certified", outcome.get("verdict") == Verdict.CERTIFIED.value, str(outcome.get("verdict")))
    if not w:
        check("witness present", False)
        return checks
    labels = net.reaction_labels
    rc = w["rate_constants"]
    check("rate constants cover reactions", sorted(rc) == sorted(labels))
    if sorted(rc) != sorted(labels):
        return checks
    a = np.array([rc[l] for l in labels], dtype=float)
    check("rate constants positive", np.all(a > 0))

    if outcome["criterion"] == "I":
        x = np.array(w["x_bar"], dtype=float)
        beta = float(w["beta_star"])
        res = residual_norm(net, a, x)
        scale = steady_state_scale(net, a, x)
        check("x_bar is a steady state", res <= tol * scale, f"residual {res:.3e}")
        G = jacobian(net, a, x)
        t1 = theorem1_hypotheses(G)
        check("Jacobian has a simple unstable complex pair", t1.holds, t1.reason)
        params = OpenParameters.uniform(beta, x)
        open_res = float(np.max(np.abs(open_rhs(net, a, params, x))))
        check("x_bar stationary for the fully-open system", open_res <= tol * scale, f"residual {open_res:.3e}")
        H = open_jacobian(net, a, params, x)
        on_axis = crossing_pair(classify(H), tol)
        detail = ", ".join(f"{z:.3e}" for z in on_axis) or "none"
        check("one conjugate pair on the imaginary axis", _is_conjugate_pair(on_axis, pairing_tol(H)), detail)
        ext = _extension_rates(net, a, beta, x)
        check("extension rates consistent", all(
            np.isclose(ext[k], v, rtol=1e-12, atol=0) for k, v in w["extension_rates"].items()
        ) and sorted(ext) == sorted(w["extension_rates"]))
        return checks

    N = stoichiometric_matrix(net)
    Y = kinetic_matrix(net)
    E = extreme_rays(N)
    rank = stoich_rank(N)
    check("rank matches", rank == w["rank"], f"rank {rank}")
    j = np.array(w["j_bar"], dtype=float)
    if j.size != E.p:
        check("ray weights match extreme rays", False, f"{j.size} weights, {E.p} rays")
        return checks
    flux = E.E @ j
    check("E j strictly positive", np.all(flux > 0))
    if not np.all(flux > 0):
        return checks
    h_s = np.array(w["h_s"], dtype=float)
    h_u = np.array(w["h_u"], dtype=float)
    beta_c = float(w["beta_c"])
    h_c = _gamma(h_s, h_u, beta_c)
    check("h(beta_c) on the curve", np.allclose(h_c, w["h_c"], rtol=1e-12, atol=0))
    model = _CurveModel(N, Y, E, j, rank if rank < net.n_species else None, None)
    rep_s, c_s, sign_s, hyp_s = model.evaluate(h_s)
    rep_u, c_u, sign_u, hyp_u = model.evaluate(h_u)
    check("endpoints hyperbolic with different unstable counts", hyp_s and hyp_u and c_s != c_u,
          f"counts {c_s} -> {c_u}")
    check("stable endpoint", c_s == 0 and hyp_s)
    check("sign det equal at endpoints", sign_s == sign_u and sign_s != 0, f"{sign_s}, {sign_u}")
    rep_c, _, sign_c, _ = model.evaluate(h_c)
    check("sign det at crossing", sign_c == sign_s, f"{sign_c}")
    on_axis = crossing_pair(rep_c, tol, model.kernel)
    detail = ", ".join(f"{z:.3e}" for z in on_axis) or "none"
    check("one conjugate pair on the imaginary axis", _is_conjugate_pair(on_axis, pairing_tol(model.G(h_c))), detail)
    x_c = 1.0 / h_c
    check("x(beta_c) = 1/h(beta_c)", np.allclose(x_c, w["x_c"], rtol=1e-12, atol=0))
    res = residual_norm(net, a, x_c)
    check("realized steady state", res <= tol * max(1.0, float(np.max(flux))), f"residual {res:.3e}")
    J = jacobian(net, a, x_c)
    Gc = model.G(h_c)
    err = float(np.max(np.abs(J - Gc)) / max(1.0, np.max(np.abs(Gc))))
    check("realized Jacobian equals G(h, j)", err <= 1e-10, f"relative {err:.3e}")
    return checks
