from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from hopfnet.corpus import random_network
from hopfnet.network import read_network

DATA = Path(__file__).parent / "data"


def data_network(name: str):
    return read_network(DATA / name)


def criterion1_instance():
    net = data_network("criterion1.net")
    rates = json.loads((DATA / "criterion1_rates.json").read_text())
    ss = json.loads((DATA / "criterion1_steady_state.json").read_text())
    a = np.array([rates[l] for l in net.reaction_labels])
    x = np.array([ss[n] for n in net.species_names])
    return net, a, x


def random_corpus(n: int, seed: int, max_species: int = 6, max_reactions: int = 8):
    """Seeded random networks with interior steady-state fluxes."""
    rng = np.random.default_rng(seed)
    nets = []
    while len(nets) < n:
        s = int(rng.integers(1, max_species + 1))
        r = int(rng.integers(max(2, s), max_reactions + 1))
        try:
            nets.append(random_network(rng, s, r))
        except (RuntimeError, ValueError):
            continue
    return nets


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


def pytest_terminal_summary(terminalreporter):
    from .test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        terminalreporter.write_line(f"AC{n} {'PASS' if ok else 'FAIL'}  {detail}")
