from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
import sympy

from hopfnet.fluxcone import (
    Membership,
    RayEnumerationError,
    extreme_rays,
    flux_from_weights,
    membership,
)
from hopfnet.network import parse_network, stoichiometric_matrix

from .conftest import data_network, random_corpus


def brute_force_rays(N) -> set[tuple[Fraction, ...]]:
    """Support-minimal nonnegative kernel vectors, by exhaustive support search.

    A support S carries an extreme ray iff the kernel of N restricted to the
    columns in S is one-dimensional with a strictly positive generator, and
    no proper subset of S does.
    """
    N = sympy.Matrix(np.asarray(N).tolist())
    m = N.shape[1]
    found: list[tuple[frozenset, tuple]] = []
    for size in range(1, m + 1):
        for S in combinations(range(m), size):
            if any(s <= set(S) for s, _ in found):
                continue
            ker = N[:, list(S)].nullspace()
            if len(ker) != 1:
                continue
            v = ker[0]
            if all(c < 0 for c in v):
                v = -v
            if not all(c > 0 for c in v):
                continue
            full = [sympy.Integer(0)] * m
            for k, i in enumerate(S):
                full[i] = v[k]
            top = max(full)
            found.append((frozenset(S), tuple(Fraction(int((c / top).p), int((c / top).q)) for c in full)))
    return {ray for _, ray in found}


def test_cycle_has_all_ones_ray():
    E = extreme_rays(stoichiometric_matrix(data_network("cycle.net")))
    assert E.columns == ((1, 1, 1),)


def test_reversible_pair():
    E = extreme_rays(stoichiometric_matrix(parse_network("A -> B\nB -> A")))
    assert E.columns == ((1, 1),)


def test_two_ray_network():
    E = extreme_rays(stoichiometric_matrix(data_network("two_rays.net")))
    assert set(E.columns) == {(1, 1, 1, 0), (1, 0, 0, 1)}


def test_no_steady_state_flux():
    E = extreme_rays(stoichiometric_matrix(parse_network("-> A")))
    assert E.is_empty and E.p == 0


def test_double_description_matches_brute_force():
    nets = [n for n in random_corpus(40, seed=21, max_reactions=8) if n.n_reactions <= 8]
    for net in nets:
        N = stoichiometric_matrix(net)
        assert set(extreme_rays(N).columns) == brute_force_rays(N)


def test_rays_are_support_minimal_kernel_vectors():
    for net in random_corpus(30, seed=22):
        N = stoichiometric_matrix(net)
        E = extreme_rays(N)
        supports = E.supports()
        for col, s in zip(E.columns, supports):
            assert all(c >= 0 for c in col) and max(col) == 1
            assert all(sum(int(N[n, i]) * col[i] for i in range(len(col))) == 0 for n in range(N.shape[0]))
            assert not any(t < s for t in supports)


def test_kernel_points_are_in_the_cone():
    rng = np.random.default_rng(23)
    for net in random_corpus(30, seed=23):
        E = extreme_rays(stoichiometric_matrix(net))
        for _ in range(4):
            v = E.E @ rng.uniform(0, 1, E.p)
            cls, rel = membership(E, v)
            assert cls is not Membership.OUTSIDE and rel <= 1e-10


def test_ray_cap():
    with pytest.raises(RayEnumerationError):
        extreme_rays(stoichiometric_matrix(data_network("two_rays.net")), cap=1)


def test_flux_from_weights():
    E = extreme_rays(stoichiometric_matrix(data_network("two_rays.net")))
    for k in range(E.p):
        e = np.zeros(E.p)
        e[k] = 1
        np.testing.assert_array_equal(flux_from_weights(E, e), E.E[:, k])
    assert np.all(flux_from_weights(E, np.zeros(E.p)) == 0)
    with pytest.raises(ValueError):
        flux_from_weights(E, np.zeros(E.p), strict=True)
    rng = np.random.default_rng(0)
    assert np.all(flux_from_weights(E, rng.uniform(0.1, 1, E.p), strict=True) > 0)


def test_membership_cases():
    E = extreme_rays(stoichiometric_matrix(data_network("two_rays.net")))
    for k in range(E.p):
        assert membership(E, E.E[:, k])[0] is Membership.BOUNDARY
    assert membership(E, E.E.sum(axis=1))[0] is Membership.INTERIOR
    assert membership(E, np.array([1.0, -1.0, 0, 0]))[0] is Membership.OUTSIDE
    assert membership(E, np.array([1.0, 2.0, 0, 0]))[0] is Membership.OUTSIDE
    single = extreme_rays(stoichiometric_matrix(data_network("cycle.net")))
    assert membership(single, single.E[:, 0])[0] is Membership.INTERIOR
