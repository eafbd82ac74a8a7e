"""Acceptance suite: ten end-to-end checks at their stated tolerances.

Each test prints one ``ACn PASS|FAIL`` line; the lines are also collected
and repeated in the pytest terminal summary. The file also runs as a
module: ``python3 -m tests.test_acceptance``.
"""

from __future__ import annotations

import json
import os
import time

import numpy as np
import pytest
import sympy
from scipy.optimize import linear_sum_assignment

from hopfnet.cli import main as cli_main
from hopfnet.corpus import random_steady_state
from hopfnet.criteria import (
    ConvexCoordinates,
    NoNetChangeError,
    SignDetInconsistencyError,
    convex_jacobian,
    criterion1,
    criterion2_search,
    hopf_scan,
    realize_system,
)
from hopfnet.dynamics import OpenParameters, finite_difference_jacobian, jacobian, open_jacobian, open_rhs, rhs
from hopfnet.fluxcone import extreme_rays
from hopfnet.network import kinetic_matrix, stoich_rank, stoichiometric_matrix
from hopfnet.simulate import detect_oscillation, hopf_demo, integrate
from hopfnet.spectral import classify, d_instability_search, is_p0_minus, spectrum

from .conftest import DATA, criterion1_instance, data_network, random_corpus
from .test_fluxcone import brute_force_rays
from .test_spectral import first_violation_oracle

RESULTS: dict[int, tuple[bool, str]] = {}
BETAS = (0.1, 1.0, 10.0)


def record(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = (ok, detail)
    print(f"AC{n} {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def corpus_with_steady_states(n=50, seed=2024):
    rng = np.random.default_rng(seed)
    out = []
    for net in random_corpus(n, seed=seed, max_species=6):
        a, x_bar, _, _ = random_steady_state(rng, net)
        out.append((net, a, x_bar))
    return out


def test_ac1_spectrum_shift():
    t0 = time.perf_counter()
    worst = 0.0
    corpus = corpus_with_steady_states()
    for net, a, x_bar in corpus:
        lam = spectrum(jacobian(net, a, x_bar))
        for beta in BETAS:
            mu = spectrum(open_jacobian(net, a, OpenParameters.uniform(beta, x_bar), x_bar))
            cost = np.abs(mu[:, None] - (lam - beta)[None, :])
            rows, cols = linear_sum_assignment(cost)
            worst = max(worst, float(cost[rows, cols].max()))
    elapsed = time.perf_counter() - t0
    record(1, worst <= 1e-8 and elapsed < 10,
           f"spectrum shift: {len(corpus)} networks x {len(BETAS)} betas, "
           f"max eigenvalue mismatch {worst:.2e} (<= 1e-8), {elapsed:.2f}s (< 10s)")


def test_ac2_steady_state_persistence():
    worst = 0.0
    corpus = corpus_with_steady_states()
    for net, a, x_bar in corpus:
        closed = float(np.max(np.abs(rhs(net, a, x_bar))))
        bound = 1e-12 * max(1.0, closed)
        for beta in BETAS:
            res = float(np.max(np.abs(open_rhs(net, a, OpenParameters.uniform(beta, x_bar), x_bar))))
            worst = max(worst, res / bound)
    record(2, worst <= 1.0,
           f"fully-open residual at x_bar: worst ratio to 1e-12*max(1,|N r|) = {worst:.3f} (<= 1)")


def test_ac3_convex_jacobian_consistency():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    worst_rel = worst_fd = 0.0
    nets = random_corpus(50, seed=31, max_species=6)
    for net in nets:
        N, Y = stoichiometric_matrix(net), kinetic_matrix(net)
        E = extreme_rays(N)
        coords = ConvexCoordinates(10 ** rng.uniform(-1, 1, net.n_species), 10 ** rng.uniform(-1, 1, E.p))
        G = convex_jacobian(N, Y, E, coords)
        a, ss = realize_system(net, E, coords)
        J = jacobian(net, a, ss.x)
        scale = max(1.0, float(np.max(np.abs(G))))
        fd = finite_difference_jacobian(lambda z: rhs(net, a, z), ss.x)
        worst_rel = max(worst_rel, float(np.max(np.abs(G - J))) / scale)
        worst_fd = max(worst_fd, max(float(np.max(np.abs(G - fd))), float(np.max(np.abs(J - fd)))) / scale)
    elapsed = time.perf_counter() - t0
    record(3, worst_rel <= 1e-10 and worst_fd <= 1e-5 and elapsed < 20,
           f"{len(nets)} (network, h, j) triples: analytic vs realized {worst_rel:.2e} (<= 1e-10), "
           f"vs finite differences {worst_fd:.2e} (<= 1e-5), {elapsed:.2f}s (< 20s)")


def test_ac4_extreme_rays_exact():
    t0 = time.perf_counter()
    nets = [n for n in random_corpus(60, seed=41, max_species=6, max_reactions=8) if n.n_reactions <= 8]
    nets += [data_network(p.name) for p in sorted(DATA.glob("*.net"))]
    mismatches = 0
    total_rays = 0
    for net in nets:
        N = stoichiometric_matrix(net)
        got = set(extreme_rays(N).columns)
        mismatches += got != brute_force_rays(N)
        total_rays += len(got)
    elapsed = time.perf_counter() - t0
    record(4, mismatches == 0 and elapsed < 30,
           f"{len(nets)} networks, {total_rays} rays: {mismatches} mismatches against the "
           f"support-minimal oracle (exact), {elapsed:.2f}s (< 30s)")


def random_sign_pattern(rng):
    pattern = rng.choice([-1, 0, 1], size=(5, 5), p=[0.45, 0.25, 0.3])
    A = pattern * rng.integers(1, 4, size=(5, 5))
    np.fill_diagonal(A, -rng.integers(0, 5, size=5))
    if rng.random() < 0.3:
        A = np.tril(A)
    return A


def test_ac5_p0_minus_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(51)
    disagreements = positives = 0
    for _ in range(200):
        A = random_sign_pattern(rng)
        expected = first_violation_oracle(sympy.Matrix(A.tolist()))
        res = is_p0_minus(A)
        positives += res.is_p0_minus
        disagreements += res.is_p0_minus != (expected is None)
        if expected is not None and res.violating_minor is not None:
            disagreements += res.violating_minor[0] != expected
    elapsed = time.perf_counter() - t0
    record(5, disagreements == 0 and elapsed < 10,
           f"200 random 5x5 sign-pattern matrices ({positives} P0-): {disagreements} disagreements "
           f"with the all-minors oracle, {elapsed:.2f}s (< 10s)")


def _structurally_singular(B) -> bool:
    # det B = 0 exactly (e.g. rank Y < |S|) shows up as a relative determinant at rounding level
    return abs(np.linalg.det(B)) <= 1e-12 * float(np.prod(np.linalg.norm(B, axis=1)))


def scanned_curves():
    """(N, Y, E, j, h_s, h_u) for full-rank corpus networks and the frozen instance.

    Only curves whose base point has ``det B(j) != 0`` are admissible; the
    search never scans from a singular ``B`` because it starts from a stable one.
    """
    rng = np.random.default_rng(61)
    curves = []
    for net in random_corpus(60, seed=61, max_species=5):
        N, Y = stoichiometric_matrix(net), kinetic_matrix(net)
        if stoich_rank(N) < net.n_species:
            continue
        E = extreme_rays(N)
        for _ in range(3):
            j = 10 ** rng.uniform(-1, 1, E.p)
            B = convex_jacobian(N, Y, E, ConvexCoordinates(np.ones(net.n_species), j))
            if _structurally_singular(B):
                continue
            w = d_instability_search(B, budget=200, seed=int(rng.integers(2**31)))
            h_u = w.d if w is not None else 10 ** rng.uniform(-2, 2, net.n_species)
            curves.append((N, Y, E, j, np.ones(net.n_species), h_u))
    data = json.loads((DATA / "d_unstable_3x3.json").read_text())
    net = data_network("criterion2.net")
    N = stoichiometric_matrix(net)
    curves.append((N, kinetic_matrix(net), extreme_rays(N), np.array(data["j_bar"]), np.ones(3), np.array(data["d"])))
    return curves


def test_ac6_sign_det_constancy():
    violations = samples = 0
    curves = scanned_curves()
    grid = np.linspace(0.0, 1.0, 65)
    for N, Y, E, j, h_s, h_u in curves:
        # independent of hopf_scan: determinant signs straight from numpy
        signs = set()
        for b in grid:
            h = h_s ** (1 - b) * h_u ** b
            signs.add(int(np.linalg.slogdet(convex_jacobian(N, Y, E, ConvexCoordinates(h, j)))[0]))
            samples += 1
        violations += len(signs) != 1
        try:
            hopf_scan(N, Y, E, j, h_s, h_u)
        except NoNetChangeError:
            pass
        except SignDetInconsistencyError:
            violations += 1
    record(6, violations == 0,
           f"{len(curves)} scanned curves, {samples} grid samples: {violations} curves with varying sign det")


def test_ac7_criterion1_end_to_end():
    t0 = time.perf_counter()
    net, a, x_bar = criterion1_instance()
    out = criterion1(net, a, x_bar)
    w = out.witness
    H = open_jacobian(net, a, OpenParameters.uniform(w.beta_star, x_bar), x_bar)
    re_mu = min(abs(z.real) for z in spectrum(H) if z.imag > 0)
    demo = hopf_demo(net, out, delta=0.05 * w.beta_star)
    m = demo.metrics
    elapsed = time.perf_counter() - t0
    ok = (out.certified and re_mu <= 1e-8 and m.oscillating and m.period_spread is not None
          and m.period_spread <= 0.05 and elapsed < 60)
    spread = f"{m.period_spread:.2e}" if m.period_spread is not None else "n/a"
    record(7, ok, f"beta* = {w.beta_star:.6f}, |Re mu| = {re_mu:.1e} (<= 1e-8); demo oscillating={m.oscillating}, "
                  f"period {m.period_estimate}, spread {spread} (<= 5%), {elapsed:.2f}s (< 60s)")


def test_ac8_criterion2_end_to_end(tmp_path, capsys):
    t0 = time.perf_counter()
    B = np.array(json.loads((DATA / "d_unstable_3x3.json").read_text())["B"])
    stable_d_unstable = classify(B).stable and d_instability_search(B, budget=10_000) is not None
    code = cli_main(["criterion2", str(DATA / "criterion2.net"), "--samples", "200", "--seed", "0",
                     "--output", str(tmp_path)])
    report = json.loads((tmp_path / "report.json").read_text())
    w = report["outcome"]["witness"]
    verify_code = cli_main(["verify", str(tmp_path / "report.json")])
    capsys.readouterr()
    elapsed = time.perf_counter() - t0
    re_mu = abs(w["mu"][0]) if w else float("inf")
    ok = stable_d_unstable and code == 0 and re_mu <= 1e-8 and 0 < w["beta_c"] < 1 and verify_code == 0 and elapsed < 60
    record(8, ok, f"instance stable and D-unstable: {stable_d_unstable}; certified exit {code}, "
                  f"beta_c = {w['beta_c'] if w else None}, |Re mu| = {re_mu:.1e} (<= 1e-8); "
                  f"verify exit {verify_code}; {elapsed:.2f}s (< 60s)")


def test_ac9_brusselator_threshold():
    t0 = time.perf_counter()
    net = data_network("brusselator.net")

    def run(b, t_end):
        t = np.linspace(0.0, t_end, int(40 * t_end) + 1)
        return integrate(net, [1.0, b, 1.0, 1.0], None, [1.2, 1.0], t_end, t_eval=t)

    m3 = detect_oscillation(run(3.0, 200.0))
    m3_long = detect_oscillation(run(3.0, 300.0))
    low = run(1.5, 200.0)
    m15 = detect_oscillation(low)
    converged = float(np.max(np.abs(low.states[-1] - [1.0, 1.5])))
    drift = abs(m3.period_estimate - m3_long.period_estimate) / m3.period_estimate if m3.oscillating else np.inf
    elapsed = time.perf_counter() - t0
    ok = (m3.oscillating and m3.period_spread <= 0.05 and drift <= 0.05 and not m15.oscillating
          and converged <= 1e-6 and elapsed < 30)
    record(9, ok, f"b=3 oscillating={m3.oscillating} period {m3.period_estimate:.4f} spread {m3.period_spread:.1e}, "
                  f"horizon drift {drift:.1e} (<= 5%); b=1.5 oscillating={m15.oscillating}, "
                  f"distance to (1, 1.5) {converged:.1e}; {elapsed:.2f}s (< 30s)")


def test_ac10_determinism(tmp_path, capsys, monkeypatch):
    args = ["criterion2", str(DATA / "criterion2.net"), "--seed", "7", "--samples", "200"]
    blobs = []
    for k, threads in enumerate(("1", "1", "4")):
        monkeypatch.setenv("HOPFNET_THREADS", threads)
        cli_main([*args, "--output", str(tmp_path / str(k))])
        blobs.append((tmp_path / str(k) / "report.json").read_bytes())
    capsys.readouterr()
    same = blobs[0] == blobs[1]
    record(10, same and blobs[0] == blobs[2],
           f"criterion2 seed 7: repeat run byte-identical={same}, 4-thread run byte-identical={blobs[0] == blobs[2]}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
