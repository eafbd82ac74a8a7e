"""Extreme rays of the steady-state flux cone ``{r >= 0 | N r = 0}``.

Rays are enumerated with the double description method in exact integer
arithmetic, one equality row at a time, starting from the unit vectors
that generate the nonnegative orthant.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np
from scipy.optimize import nnls

__all__ = [
    "RayEnumerationError",
    "ExtremeRayMatrix",
    "Membership",
    "extreme_rays",
    "flux_from_weights",
    "membership",
]

DEFAULT_RAY_CAP = 100_000


class RayEnumerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExtremeRayMatrix:
    """Columns are normalized extreme rays (largest entry equal to 1)."""

    columns: tuple[tuple[Fraction, ...], ...]
    n_reactions: int

    @property
    def p(self) -> int:
        return len(self.columns)

    @property
    def is_empty(self) -> bool:
        return not self.columns

    @property
    def E(self) -> np.ndarray:
        if not self.columns:
            return np.zeros((self.n_reactions, 0))
        return np.array([[float(v) for v in col] for col in self.columns]).T

    def supports(self) -> list[frozenset[int]]:
        return [frozenset(i for i, v in enumerate(col) if v != 0) for col in self.columns]


def _mask(v) -> int:
    m = 0
    for i, x in enumerate(v):
        if x:
            m |= 1 << i
    return m


def _reduce(v: list[int]) -> tuple[int, ...]:
    g = 0
    for x in v:
        g = gcd(g, x)
    return tuple(x // g for x in v) if g > 1 else tuple(v)


def _normalize(v: tuple[int, ...]) -> tuple[Fraction, ...]:
    top = max(v)
    return tuple(Fraction(x, top) for x in v)


def _order_key(col: tuple[Fraction, ...]):
    support = tuple(i for i, x in enumerate(col) if x != 0)
    return (support, col)


def extreme_rays(N, cap: int = DEFAULT_RAY_CAP) -> ExtremeRayMatrix:
    """Enumerate the extreme rays of ``{r >= 0 | N r = 0}``.

    Parameters
    ----------
    N : array_like of int
        Stoichiometric matrix, species by reactions.
    cap : int
        Abort when an intermediate ray set grows beyond this size.

    Returns
    -------
    ExtremeRayMatrix
        Possibly empty when the cone is ``{0}``. Columns are sorted by
        support (as an index tuple), then by entries.
    """
    A = np.asarray(N)
    if A.ndim != 2:
        raise ValueError("N must be a 2-d matrix")
    if not np.all(A == np.round(A)):
        raise ValueError("N must have integer entries")
    rows = [[int(v) for v in row] for row in A.tolist() if any(row)]
    m = A.shape[1]

    rays: list[tuple[int, ...]] = [tuple(int(i == k) for i in range(m)) for k in range(m)]
    masks = [_mask(r) for r in rays]

    for row in rows:
        vals = [sum(c * x for c, x in zip(row, r) if c and x) for r in rays]
        zero = [k for k, v in enumerate(vals) if v == 0]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        new_rays = [rays[k] for k in zero]
        new_masks = [masks[k] for k in zero]
        for p in pos:
            for q in neg:
                union = masks[p] | masks[q]
                adjacent = True
                for k, mk in enumerate(masks):
                    if k != p and k != q and mk & ~union == 0:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                vp, vq = vals[p], vals[q]
                combo = _reduce([vp * b - vq * a for a, b in zip(rays[p], rays[q])])
                new_rays.append(combo)
                new_masks.append(_mask(combo))
                if len(new_rays) > cap:
                    raise RayEnumerationError(
                        f"intermediate ray count exceeded cap={cap}; network too large for enumeration"
                    )
        rays, masks = new_rays, new_masks
        if not rays:
            break

    columns = sorted({_normalize(r) for r in rays}, key=_order_key)
    return ExtremeRayMatrix(tuple(columns), m)


def flux_from_weights(E: ExtremeRayMatrix, j, strict: bool = False) -> np.ndarray:
    """Steady-state flux ``E j``.

    With ``strict=True`` a flux that is not entrywise positive raises
    ``ValueError`` (boundary fluxes are not admissible interior points).
    """
    j = np.asarray(j, dtype=float)
    if j.shape != (E.p,):
        raise ValueError(f"expected {E.p} ray weights, got shape {j.shape}")
    if np.any(j < 0):
        raise ValueError("ray weights must be nonnegative")
    v = E.E @ j
    if strict and not np.all(v > 0):
        raise ValueError("flux E j is not strictly positive")
    return v


class Membership(str, enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


def membership(E: ExtremeRayMatrix, v, tol: float = 1e-10) -> tuple[Membership, float]:
    """Classify ``v`` against the cone spanned by ``E``.

    Returns the class and the relative residual of the nonnegative
    least-squares reconstruction ``v ~ E j``.
    """
    v = np.asarray(v, dtype=float)
    if np.any(v < 0):
        return Membership.OUTSIDE, float("inf")
    scale = float(np.linalg.norm(v))
    if E.is_empty:
        return (Membership.BOUNDARY, 0.0) if scale == 0 else (Membership.OUTSIDE, 1.0)
    _, resid = nnls(E.E, v)
    rel = resid / scale if scale > 0 else 0.0
    if resid > tol * scale:
        return Membership.OUTSIDE, rel
    if np.all(v > 0):
        return Membership.INTERIOR, rel
    return Membership.BOUNDARY, rel
