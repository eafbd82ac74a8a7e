"""Mass action rates, vector fields and Jacobians for closed and fully-open systems."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .network import Network, conservation_basis, kinetic_matrix, stoichiometric_matrix

__all__ = [
    "OpenParameters",
    "SteadyState",
    "SteadyStateError",
    "MassActionSystem",
    "rate_vector",
    "rhs",
    "jacobian",
    "open_rhs",
    "open_jacobian",
    "fit_rate_constants",
    "residual_norm",
    "rate_constants_from_mapping",
    "solve_steady_state",
    "finite_difference_jacobian",
]

# above this exponent rates are evaluated as exp(log a + Y^T log x)
LOG_SPACE_EXPONENT = 8


@dataclass(frozen=True)
class OpenParameters:
    """Constant inflows ``F`` and linear outflow coefficients ``D`` (diagonal)."""

    F: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        F = np.asarray(self.F, dtype=float)
        D = np.asarray(self.D, dtype=float)
        if F.shape != D.shape or F.ndim != 1:
            raise ValueError("F and D must be vectors of equal length")
        if not (np.all(F > 0) and np.all(D > 0)):
            raise ValueError("open parameters require F > 0 and D > 0 entrywise")
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "D", D)

    @classmethod
    def uniform(cls, beta: float, x_bar) -> "OpenParameters":
        """``D = beta * Id`` and ``F = D x_bar``: keeps ``x_bar`` stationary for every beta."""
        x_bar = np.asarray(x_bar, dtype=float)
        return cls(F=beta * x_bar, D=np.full(x_bar.shape, float(beta)))


@dataclass(frozen=True)
class SteadyState:
    x: np.ndarray
    residual: float


class SteadyStateError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (final residual {residual:.3e})")
        self.residual = residual


def _positive(x, what="concentration") -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise ValueError(f"{what} must be strictly positive, got {x}")
    return x


def _monomials(Y: np.ndarray, x: np.ndarray) -> np.ndarray:
    if Y.size and Y.max() > LOG_SPACE_EXPONENT:
        return np.exp(Y.T @ np.log(x))
    return np.prod(x[:, None] ** Y, axis=0)


class MassActionSystem:
    """Precomputed ``N``, ``Y`` and rate constants; optionally fully-open.

    This is the hot path used by the integrator and the steady-state solver.
    State positivity is not checked here.
    """

    def __init__(self, net: Network, a, open: OpenParameters | None = None):
        self.net = net
        self.N = stoichiometric_matrix(net).astype(float)
        self.Y = kinetic_matrix(net)
        self.Yf = self.Y.astype(float)
        self.a = _positive(a, "rate constants")
        if self.a.shape != (net.n_reactions,):
            raise ValueError(f"expected {net.n_reactions} rate constants, got {self.a.shape}")
        if open is not None and open.F.shape != (net.n_species,):
            raise ValueError("open parameters do not match the number of species")
        self.open = open

    def rates(self, x: np.ndarray) -> np.ndarray:
        return self.a * _monomials(self.Y, x)

    def rhs(self, x: np.ndarray) -> np.ndarray:
        f = self.N @ self.rates(x)
        if self.open is not None:
            f = f + self.open.F - self.open.D * x
        return f

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        G = (self.N * self.rates(x)) @ self.Yf.T / x
        if self.open is not None:
            G = G - np.diag(self.open.D)
        return G


def rate_vector(net: Network, a, x) -> np.ndarray:
    """Mass action rates ``r_i = a_i prod_n x_n ** Y[n, i]``."""
    x = _positive(x)
    return MassActionSystem(net, a).rates(x)


def rhs(net: Network, a, x) -> np.ndarray:
    x = _positive(x)
    return MassActionSystem(net, a).rhs(x)


def jacobian(net: Network, a, x) -> np.ndarray:
    """Closed-form Jacobian ``N diag(r(x)) Y^T diag(1/x)``."""
    x = _positive(x)
    return MassActionSystem(net, a).jacobian(x)


def open_rhs(net: Network, a, open: OpenParameters, x) -> np.ndarray:
    """Vector field of the fully-open system ``N r(x) + F - D x``."""
    x = _positive(x)
    return MassActionSystem(net, a, open).rhs(x)


def open_jacobian(net: Network, a, open: OpenParameters, x) -> np.ndarray:
    x = _positive(x)
    return MassActionSystem(net, a, open).jacobian(x)


def fit_rate_constants(net: Network, x_bar, r_bar) -> np.ndarray:
    """Rate constants that realize flux ``r_bar`` at concentrations ``x_bar``."""
    x_bar = _positive(x_bar)
    r_bar = _positive(r_bar, "flux")
    if r_bar.shape != (net.n_reactions,):
        raise ValueError(f"expected {net.n_reactions} fluxes, got {r_bar.shape}")
    return r_bar / _monomials(kinetic_matrix(net), x_bar)


def residual_norm(net: Network, a, x, open: OpenParameters | None = None) -> float:
    x = _positive(x)
    return float(np.max(np.abs(MassActionSystem(net, a, open).rhs(x))))


def rate_constants_from_mapping(net: Network, mapping: Mapping[str, float]) -> np.ndarray:
    """Order a ``{label: rate}`` mapping by the network's reactions.

    Missing and unknown labels are both errors.
    """
    labels = net.reaction_labels
    missing = [l for l in labels if l not in mapping]
    extra = sorted(set(mapping) - set(labels))
    if missing:
        raise ValueError(f"missing rate constants for reactions: {', '.join(missing)}")
    if extra:
        raise ValueError(f"rate constants given for unknown reactions: {', '.join(extra)}")
    a = np.array([float(mapping[l]) for l in labels])
    return _positive(a, "rate constants")


def finite_difference_jacobian(f, x, rel_step: float = 1e-6) -> np.ndarray:
    """Central differences with step ``rel_step * max(1, |x_n|)``; test oracle only."""
    x = np.asarray(x, dtype=float)
    cols = []
    for n in range(x.size):
        h = rel_step * max(1.0, abs(x[n]))
        e = np.zeros_like(x)
        e[n] = h
        cols.append((f(x + e) - f(x - e)) / (2 * h))
    return np.column_stack(cols)


def solve_steady_state(
    net: Network,
    a,
    x0,
    open: OpenParameters | None = None,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> SteadyState:
    """Damped Newton from ``x0``, holding conserved totals at their ``x0`` values.

    Steps are taken in log-concentration so iterates stay positive.
    """
    system = MassActionSystem(net, a, open)
    x = _positive(x0, "initial guess").copy()
    L = np.zeros((0, net.n_species))
    if open is None:
        basis = conservation_basis(stoichiometric_matrix(net))
        if basis:
            L = np.array([[float(v) for v in row] for row in basis])
    totals = L @ x

    def residual(x):
        return np.concatenate([system.rhs(x), L @ x - totals])

    res = residual(x)
    norm = np.max(np.abs(res))
    for _ in range(max_iter):
        if norm <= tol:
            break
        J = np.vstack([system.jacobian(x), L]) * x  # d/d(log x)
        step, *_ = np.linalg.lstsq(J, -res, rcond=None)
        lam = 1.0
        while lam > 1e-10:
            x_new = x * np.exp(np.clip(lam * step, -5, 5))
            res_new = residual(x_new)
            norm_new = np.max(np.abs(res_new))
            if np.isfinite(norm_new) and norm_new < norm:
                break
            lam *= 0.5
        else:
            raise SteadyStateError("Newton line search stalled", norm)
        x, res, norm = x_new, res_new, norm_new
    if norm > tol:
        raise SteadyStateError("Newton iteration did not converge", norm)
    return SteadyState(x=x, residual=float(np.max(np.abs(system.rhs(x)))))
