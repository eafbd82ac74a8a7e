"""Seeded random mass action networks with positive steady states.

Used by the test-suite and by ``scripts/search_instances.py``.
"""

from __future__ import annotations

from math import comb

import numpy as np

from .dynamics import fit_rate_constants
from .fluxcone import extreme_rays
from .network import Network, Reaction, Species, stoichiometric_matrix


def _complex(rng: np.random.Generator, n_species: int, max_molecules: int) -> dict[int, int]:
    size = int(rng.integers(0, max_molecules + 1))
    out: dict[int, int] = {}
    for _ in range(size):
        s = int(rng.integers(n_species))
        out[s] = out.get(s, 0) + 1
    return out


def random_network(
    rng: np.random.Generator,
    n_species: int,
    n_reactions: int,
    max_molecules: int = 2,
    require_interior: bool = True,
    max_tries: int = 1000,
) -> Network:
    """Draw a network whose flux cone has strictly positive points (when required)."""
    n_complexes = comb(n_species + max_molecules, max_molecules)
    if n_reactions > n_complexes * (n_complexes - 1):
        raise ValueError(f"only {n_complexes * (n_complexes - 1)} distinct reactions exist")
    names = [chr(ord("A") + k) for k in range(n_species)]
    species = tuple(Species(n, i) for i, n in enumerate(names))
    for _ in range(max_tries):
        seen = set()
        reactions = []
        while len(reactions) < n_reactions:
            lhs = _complex(rng, n_species, max_molecules)
            rhs = _complex(rng, n_species, max_molecules)
            key = (tuple(sorted(lhs.items())), tuple(sorted(rhs.items())))
            if lhs == rhs or key in seen:
                continue
            seen.add(key)
            reactions.append(Reaction(f"r{len(reactions) + 1}", lhs, rhs))
        used = {i for r in reactions for i in (*r.reactants, *r.products)}
        if len(used) < n_species:
            continue
        net = Network(species, tuple(reactions))
        if not require_interior:
            return net
        E = extreme_rays(stoichiometric_matrix(net))
        if not E.is_empty and np.all(E.E.sum(axis=1) > 0):
            return net
    raise RuntimeError("could not draw a network with an interior steady-state flux")


def random_steady_state(rng: np.random.Generator, net: Network, log_range: float = 1.0):
    """Random ``x_bar`` and interior flux, with the rate constants that realize them."""
    E = extreme_rays(stoichiometric_matrix(net))
    j = 10.0 ** rng.uniform(-log_range, log_range, E.p)
    r_bar = E.E @ j
    x_bar = 10.0 ** rng.uniform(-log_range, log_range, net.n_species)
    a = fit_rate_constants(net, x_bar, r_bar)
    return a, x_bar, j, E
