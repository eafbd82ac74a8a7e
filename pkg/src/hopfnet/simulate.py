"""Adaptive Dormand-Prince 5(4) integration and oscillation measurement."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from .criteria import (
    Criterion1Witness,
    Criterion2Witness,
    CriterionOutcome,
    Verdict,
    _gamma,
)
from .dynamics import MassActionSystem, OpenParameters, fit_rate_constants
from .fluxcone import extreme_rays
from .network import Network, stoichiometric_matrix
from .spectral import spectrum

__all__ = [
    "IntegrationError",
    "StiffnessError",
    "PositivityError",
    "TrajectoryTooShortError",
    "Trajectory",
    "OscillationMetrics",
    "DemoResult",
    "integrate",
    "integrate_system",
    "detect_oscillation",
    "hopf_demo",
]

# Dormand-Prince tableau
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_ERR = _B - _B4
# quartic continuous extension, coefficients of theta, theta^2, theta^3, theta^4
_P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

# PI controller (Gustafsson), exponents for an order-4 error estimate
_SAFETY = 0.9
_ALPHA = 0.7 / 5
_BETA = 0.4 / 5
_FAC_MIN, _FAC_MAX = 0.2, 10.0


class IntegrationError(RuntimeError):
    pass


class StiffnessError(IntegrationError):
    """Step size underflow; the run is reported as stiff and inconclusive."""


class PositivityError(IntegrationError):
    pass


class TrajectoryTooShortError(ValueError):
    pass


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    species: list[str]
    metadata: dict = field(default_factory=dict)

    def write_csv(self, fh) -> None:
        """Write ``t,<species...>`` rows to a path or an open text file."""
        if isinstance(fh, (str, os.PathLike)):
            with open(fh, "w", encoding="utf-8", newline="") as out:
                return self.write_csv(out)
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", *self.species])
        for t, x in zip(self.times, self.states):
            w.writerow([repr(float(t)), *(repr(float(v)) for v in x)])


def integrate_system(
    system: MassActionSystem,
    x0,
    t_end: float,
    rtol: float = 1e-8,
    atol: float = 1e-10,
    t_eval=None,
    max_steps: int = 2_000_000,
) -> Trajectory:
    """Integrate ``system`` from ``x0`` on ``[0, t_end]``.

    Without ``t_eval`` the accepted step points are returned; otherwise the
    quartic dense output is sampled at ``t_eval``.
    """
    x = np.asarray(x0, dtype=float).copy()
    if np.any(x <= 0):
        raise ValueError("initial state must be strictly positive")
    if t_end <= 0 or rtol <= 0 or atol <= 0:
        raise ValueError("t_end and tolerances must be positive")
    f = system.rhs
    if t_eval is not None:
        t_eval = np.asarray(t_eval, dtype=float)
        if np.any(np.diff(t_eval) <= 0) or t_eval[0] < 0 or t_eval[-1] > t_end:
            raise ValueError("t_eval must be strictly increasing within [0, t_end]")

    t = 0.0
    k1 = f(x)
    scale = atol + rtol * np.abs(x)
    d0, d1 = np.max(np.abs(x) / scale), np.max(np.abs(k1) / scale)
    h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h = min(h, t_end)

    times, states = [], []
    out_idx = 0
    if t_eval is None:
        times.append(t)
        states.append(x.copy())
    else:
        while out_idx < t_eval.size and t_eval[out_idx] <= 0.0:
            times.append(t_eval[out_idx])
            states.append(x.copy())
            out_idx += 1

    K = np.empty((7, x.size))
    err_prev = 1e-4
    n_steps = n_rejected = 0
    n_rhs = 1
    while t < t_end:
        if n_steps >= max_steps:
            raise IntegrationError(f"maximum number of steps ({max_steps}) reached at t={t}")
        h = min(h, t_end - t)
        if h < 16 * np.finfo(float).eps * max(1.0, abs(t)):
            raise StiffnessError(f"step size underflow at t={t!r}: stiff, inconclusive")
        K[0] = k1
        for s in range(1, 7):
            K[s] = f(x + h * (np.dot(_A[s], K[:s])))
        n_rhs += 6
        x_new = x + h * (_B @ K)
        err_vec = h * (_ERR @ K) / (atol + rtol * np.maximum(np.abs(x), np.abs(x_new)))
        err = float(np.max(np.abs(err_vec)))
        positive = bool(np.all(x_new > 0))
        dense_t, dense_x = [], []
        if err <= 1.0 and positive and t_eval is not None:
            # the interpolant can undershoot near zero even when both ends are positive
            t_next = t + h
            k = out_idx
            while k < t_eval.size and t_eval[k] <= t_next:
                theta = (t_eval[k] - t) / h
                powers = np.array([theta, theta**2, theta**3, theta**4])
                dense_t.append(t_eval[k])
                dense_x.append(x + h * ((_P @ powers) @ K))
                k += 1
            positive = all(np.all(v > 0) for v in dense_x)
        if err <= 1.0 and positive:
            times.extend(dense_t)
            states.extend(dense_x)
            out_idx += len(dense_t)
            t = t + h if t + h < t_end else t_end
            x = x_new
            k1 = K[6].copy()
            n_steps += 1
            if t_eval is None:
                times.append(t)
                states.append(x.copy())
            fac = _SAFETY * max(err, 1e-10) ** -_ALPHA * err_prev**_BETA
            h *= min(_FAC_MAX, max(_FAC_MIN, fac))
            err_prev = max(err, 1e-4)
        else:
            n_rejected += 1
            if not positive and err <= 1.0:
                h *= 0.5
            else:
                h *= max(_FAC_MIN, _SAFETY * err**-0.2)
    states_arr = np.array(states)
    if np.any(states_arr <= 0):
        raise PositivityError("dense output left the positive orthant")
    return Trajectory(
        times=np.array(times),
        states=states_arr,
        species=system.net.species_names,
        metadata={
            "method": "dormand-prince-5(4)",
            "rtol": rtol,
            "atol": atol,
            "steps": n_steps,
            "rejected": n_rejected,
            "rhs_evaluations": n_rhs,
        },
    )


def integrate(
    net: Network,
    a,
    open: OpenParameters | None,
    x0,
    t_end: float,
    rtol: float = 1e-8,
    atol: float = 1e-10,
    t_eval=None,
) -> Trajectory:
    """Integrate the closed (``open=None``) or fully-open mass action system."""
    return integrate_system(MassActionSystem(net, a, open), x0, t_end, rtol, atol, t_eval)


@dataclass
class OscillationMetrics:
    oscillating: bool
    species_index: int | None
    period_estimate: float | None
    amplitude: float
    transient_cut: float
    n_maxima: int = 0
    period_spread: float | None = None

    def to_dict(self) -> dict:
        return {
            "oscillating": self.oscillating,
            "species_index": self.species_index,
            "period_estimate": self.period_estimate,
            "amplitude": self.amplitude,
            "transient_cut": self.transient_cut,
            "n_maxima": self.n_maxima,
            "period_spread": self.period_spread,
        }


def _refined_peak_times(t: np.ndarray, y: np.ndarray, idx: np.ndarray) -> np.ndarray:
    out = []
    for i in idx:
        if 0 < i < len(y) - 1:
            t0, t1, t2 = t[i - 1], t[i], t[i + 1]
            y0, y1, y2 = y[i - 1], y[i], y[i + 1]
            denom = (t0 - t1) * (t0 - t2) * (t1 - t2)
            A = (t2 * (y1 - y0) + t1 * (y0 - y2) + t0 * (y2 - y1)) / denom
            B = (t2**2 * (y0 - y1) + t1**2 * (y2 - y0) + t0**2 * (y1 - y2)) / denom
            out.append(-B / (2 * A) if A < 0 else t1)
        else:
            out.append(t[i])
    return np.array(out)


def detect_oscillation(
    traj: Trajectory,
    transient_fraction: float = 0.5,
    threshold: float = 0.1,
    min_maxima: int = 5,
    cycles: int = 5,
    max_spread: float = 0.05,
) -> OscillationMetrics:
    """Decide whether a trajectory settled on sustained oscillations.

    After discarding the first ``transient_fraction`` of the time span,
    maxima are kept when their prominence is at least ``threshold`` times
    the species' range over the whole trajectory. A species oscillates when
    it has ``min_maxima`` such maxima and the last ``cycles`` inter-peak
    intervals agree within ``max_spread`` (relative). Peak times are refined
    by quadratic interpolation.

    Raises
    ------
    TrajectoryTooShortError
        The retained window is shorter than ten of the shortest detected
        inter-peak intervals.
    """
    t = np.asarray(traj.times)
    X = np.asarray(traj.states)
    t_cut = t[0] + transient_fraction * (t[-1] - t[0])
    keep = t >= t_cut
    tw, Xw = t[keep], X[keep]
    window = tw[-1] - tw[0] if tw.size else 0.0

    best = None
    best_amp = 0.0
    shortest = np.inf
    for n in range(X.shape[1]):
        y = Xw[:, n]
        total_range = float(np.ptp(X[:, n]))
        if total_range <= 0 or y.size < 3:
            continue
        idx, _ = find_peaks(y, prominence=threshold * total_range)
        if idx.size >= 2:
            pt = _refined_peak_times(tw, y, idx)
            intervals = np.diff(pt)
            shortest = min(shortest, float(intervals.min()))
        if idx.size < min_maxima:
            continue
        last = intervals[-cycles:]
        spread = float((last.max() - last.min()) / last.mean())
        start = np.searchsorted(tw, pt[-len(last) - 1])
        amp = float(np.ptp(y[start:]))
        if spread <= max_spread and amp > best_amp:
            best, best_amp = (n, float(last.mean()), spread, int(idx.size)), amp

    if np.isfinite(shortest) and window < 10 * shortest:
        raise TrajectoryTooShortError(
            f"retained window {window:.4g} is shorter than 10 inter-peak intervals ({shortest:.4g})"
        )
    if best is None:
        amp = float(np.max(np.ptp(Xw, axis=0))) if tw.size else 0.0
        return OscillationMetrics(False, None, None, amp, transient_fraction)
    n, period, spread, count = best
    return OscillationMetrics(True, n, period, best_amp, transient_fraction, count, spread)


@dataclass
class DemoResult:
    trajectory: Trajectory
    metrics: OscillationMetrics
    parameters: dict

    def to_dict(self) -> dict:
        return {"parameters": self.parameters, "metrics": self.metrics.to_dict(),
                "integrator": self.trajectory.metadata}


def _kick(J: np.ndarray, x_bar: np.ndarray, size: float = 0.01) -> tuple[np.ndarray, complex]:
    """Perturb ``x_bar`` along the real part of the leading complex eigenvector."""
    w, V = np.linalg.eig(J)
    upper = [i for i in range(w.size) if w[i].imag > 0]
    k = max(upper, key=lambda i: w[i].real)
    v = V[:, k].real
    if np.linalg.norm(v) == 0:
        v = V[:, k].imag
    v = v / np.linalg.norm(v)
    step = size * np.linalg.norm(x_bar)
    x0 = x_bar + step * v
    while np.any(x0 <= 0):
        step *= 0.5
        x0 = x_bar + step * v
    return x0, complex(w[k])


def hopf_demo(
    net: Network,
    outcome: CriterionOutcome,
    delta: float | None = None,
    t_end: float | None = None,
    rtol: float = 1e-9,
    atol: float = 1e-12,
    samples_per_period: int = 40,
    transient_fraction: float = 0.5,
    threshold: float = 0.1,
) -> DemoResult:
    """Simulate just past a certified Hopf point and measure the oscillation.

    Criterion I runs the fully-open system at ``beta = beta* - delta``
    (default ``delta = 0.05 beta*``). Criterion II realizes the closed
    system at ``h = gamma(beta_c + delta * sign)`` on the destabilizing side
    (default ``delta = 0.05``). The start is the steady state kicked by 1%
    of its norm along the unstable eigenplane. Absence of oscillation is a
    legitimate result: a subcritical crossing need not produce a stable orbit.
    """
    if outcome.verdict is not Verdict.CERTIFIED or outcome.witness is None:
        raise ValueError("hopf_demo needs a certified outcome")
    w = outcome.witness
    if isinstance(w, Criterion1Witness):
        if delta is None:
            delta = 0.05 * w.beta_star
        if delta <= 0:
            raise ValueError("delta must be positive: at delta = 0 the steady state is not hyperbolic")
        beta = w.beta_star - delta
        if beta <= 0:
            raise ValueError("delta must be smaller than beta* so that the outflow stays positive")
        a = np.array([w.rate_constants[l] for l in net.reaction_labels])
        x_bar = w.x_bar
        params = OpenParameters.uniform(beta, x_bar)
        system = MassActionSystem(net, a, params)
        info = {"criterion": "I", "beta": beta, "delta": delta}
    elif isinstance(w, Criterion2Witness):
        if delta is None:
            delta = 0.05
        if delta <= 0:
            raise ValueError("delta must be positive: at delta = 0 the steady state is not hyperbolic")
        beta = w.beta_c + delta * w.destabilizing_sign
        h = _gamma(w.h_s, w.h_u, beta)
        x_bar = 1.0 / h
        E = extreme_rays(stoichiometric_matrix(net))
        a = fit_rate_constants(net, x_bar, E.E @ w.j_bar)
        system = MassActionSystem(net, a)
        info = {"criterion": "II", "beta": beta, "delta": delta, "x_bar": x_bar.tolist(),
                "rate_constants": {l: float(v) for l, v in zip(net.reaction_labels, a)}}
    else:
        raise TypeError(f"unsupported witness {type(w).__name__}")

    J = system.jacobian(x_bar)
    x0, lam = _kick(J, x_bar)
    if lam.real <= 0:
        raise ValueError(f"demo point is not unstable (leading pair {lam:.4g}); increase delta")
    period = 2 * math.pi / lam.imag
    if t_end is None:
        t_end = 2.0 * math.log(100.0) / lam.real + 40.0 * period
    dt = period / samples_per_period
    t_eval = np.arange(0.0, t_end, dt)
    traj = integrate_system(system, x0, t_end, rtol, atol, t_eval)
    metrics = detect_oscillation(traj, transient_fraction, threshold)
    info.update({"t_end": t_end, "linear_period": period, "growth_rate": lam.real, "x0": x0.tolist()})
    return DemoResult(traj, metrics, info)
