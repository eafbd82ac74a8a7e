"""Randomized search for the frozen test instances in ``tests/data``.

Criterion I instance: a 3-species network containing the cubic
autocatalytic step ``2 A + B -> 3 A`` with a steady state whose Jacobian
has a strictly dominant, simple, unstable complex pair, and whose
fully-open demo oscillates.

Criterion II instance: a 3-species network with full-rank stoichiometry for
which ``criterion2_search`` (seed 0) certifies a 0 -> 2 crossing.

Usage::

    python scripts/search_instances.py --seed 1 --out tests/data
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

import numpy as np

from hopfnet.corpus import random_network, random_steady_state
from hopfnet.criteria import ConvexCoordinates, convex_jacobian, criterion1, criterion2_search
from hopfnet.dynamics import jacobian
from hopfnet.fluxcone import extreme_rays
from hopfnet.network import Network, Reaction, kinetic_matrix, render_network, stoich_rank, stoichiometric_matrix
from hopfnet.simulate import hopf_demo
from hopfnet.spectral import theorem1_hypotheses

AUTOCATALYSIS = Reaction("auto", {0: 2, 1: 1}, {0: 3})


def with_autocatalysis(net: Network) -> Network:
    if any(r.reactants == AUTOCATALYSIS.reactants and r.products == AUTOCATALYSIS.products
           for r in net.reactions):
        return net
    return Network(net.species, (AUTOCATALYSIS,) + net.reactions)


def search_criterion1(rng, tries: int):
    for k in range(tries):
        base = random_network(rng, 3, 4, require_interior=False)
        net = with_autocatalysis(base)
        try:
            a, x_bar, _, E = random_steady_state(rng, net)
        except ValueError:
            continue
        if E.is_empty or not np.all(E.E.sum(axis=1) > 0):
            continue
        t1 = theorem1_hypotheses(jacobian(net, a, x_bar))
        if not (t1.holds and t1.strengthened):
            continue
        out = criterion1(net, a, x_bar)
        if not out.certified:
            continue
        try:
            demo = hopf_demo(net, out)
        except Exception as exc:  # demo failures just reject the candidate
            print(f"try {k}: demo failed: {exc}")
            continue
        print(f"try {k}: beta* = {out.witness.beta_star:.4g}, oscillating = {demo.metrics.oscillating}")
        if demo.metrics.oscillating:
            return net, a, x_bar
    return None


def search_criterion2(rng, tries: int):
    for k in range(tries):
        net = with_autocatalysis(random_network(rng, 3, 4, require_interior=False))
        N = stoichiometric_matrix(net)
        if stoich_rank(N) < 3:
            continue
        try:
            out = criterion2_search(net, samples=20, budget=500, seed=0)
        except ValueError:
            continue
        if out.certified and tuple(out.witness.counts) == (0, 2):
            print(f"try {k}: certified, beta_c = {out.witness.beta_c:.4g}")
            return net, out
    return None


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--tries", type=int, default=5000)
    ap.add_argument("--out", type=Path, default=Path("tests/data"))
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)

    found = search_criterion1(rng, args.tries)
    if found is not None:
        net, a, x_bar = found
        (args.out / "criterion1.net").write_text(render_network(net))
        (args.out / "criterion1_rates.json").write_text(
            json.dumps({l: float(v) for l, v in zip(net.reaction_labels, a)}, indent=2) + "\n")
        (args.out / "criterion1_steady_state.json").write_text(
            json.dumps({n: float(v) for n, v in zip(net.species_names, x_bar)}, indent=2) + "\n")

    found = search_criterion2(rng, args.tries)
    if found is not None:
        net, out = found
        (args.out / "criterion2.net").write_text(render_network(net))
        N = stoichiometric_matrix(net)
        E = extreme_rays(N)
        B = convex_jacobian(N, kinetic_matrix(net), E, ConvexCoordinates(np.ones(3), out.witness.j_bar))
        (args.out / "d_unstable_3x3.json").write_text(json.dumps(
            {"B": B.tolist(), "j_bar": out.witness.j_bar.tolist(), "d": out.witness.h_u.tolist()}, indent=2) + "\n")


if __name__ == "__main__":
    main()
