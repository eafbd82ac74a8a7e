"""Reaction networks: parsing, rendering, stoichiometric and kinetic matrices.

A network file holds one reaction per line::

    # Brusselator
    feed: -> X
    r2:   X -> Y
    auto: 2 X + Y -> 3 X
    X ->                  # unlabeled, becomes "r5"

Species are indexed by first appearance, reactions by line order.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _rational

__all__ = [
    "NetworkSyntaxError",
    "ReactionKind",
    "Species",
    "Reaction",
    "Network",
    "parse_network",
    "read_network",
    "render_network",
    "stoichiometric_matrix",
    "kinetic_matrix",
    "product_matrix",
    "fully_open_extension",
    "conservation_basis",
    "stoich_rank",
]

INFLOW_PREFIX = "in_"
OUTFLOW_PREFIX = "out_"

_NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_LABEL_RE = re.compile(rf"^\s*({_NAME})\s*:(.*)$")
_TERM_RE = re.compile(rf"^(?:(\d+)\s*)?({_NAME})$")


class NetworkSyntaxError(ValueError):
    """Malformed network text; ``lineno`` is 1-based."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        prefix = f"line {lineno}: " if lineno is not None else ""
        super().__init__(prefix + message)


class ReactionKind(str, enum.Enum):
    INFLOW = "inflow"
    OUTFLOW = "outflow"
    INTERNAL = "internal"


@dataclass(frozen=True)
class Species:
    name: str
    index: int


@dataclass(frozen=True)
class Reaction:
    label: str
    reactants: dict[int, int]
    products: dict[int, int]

    def __post_init__(self):
        if not self.reactants and not self.products:
            raise ValueError(f"reaction {self.label!r} has both sides empty")
        for side in (self.reactants, self.products):
            for idx, c in side.items():
                if c < 1:
                    raise ValueError(f"reaction {self.label!r}: coefficient {c} for species {idx}")

    @property
    def kind(self) -> ReactionKind:
        if not self.reactants:
            return ReactionKind.INFLOW
        if not self.products:
            return ReactionKind.OUTFLOW
        return ReactionKind.INTERNAL


@dataclass(frozen=True)
class Network:
    species: tuple[Species, ...]
    reactions: tuple[Reaction, ...]
    _by_name: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "species", tuple(self.species))
        object.__setattr__(self, "reactions", tuple(self.reactions))
        if not self.species or not self.reactions:
            raise ValueError("a network needs at least one species and one reaction")
        names = [s.name for s in self.species]
        if len(set(names)) != len(names):
            raise ValueError("species names must be unique")
        for i, s in enumerate(self.species):
            if s.index != i:
                raise ValueError(f"species {s.name!r} has index {s.index}, expected {i}")
        labels = [r.label for r in self.reactions]
        if len(set(labels)) != len(labels):
            raise ValueError("reaction labels must be unique")
        n = len(self.species)
        for r in self.reactions:
            for idx in (*r.reactants, *r.products):
                if not 0 <= idx < n:
                    raise ValueError(f"reaction {r.label!r} references species index {idx}")
        object.__setattr__(self, "_by_name", {s.name: s.index for s in self.species})

    @property
    def n_species(self) -> int:
        return len(self.species)

    @property
    def n_reactions(self) -> int:
        return len(self.reactions)

    @property
    def species_names(self) -> list[str]:
        return [s.name for s in self.species]

    @property
    def reaction_labels(self) -> list[str]:
        return [r.label for r in self.reactions]

    def species_index(self, name: str) -> int:
        return self._by_name[name]

    @classmethod
    def from_reactions(cls, species_names, reactions) -> "Network":
        """Build from names and ``(label, {name: coeff}, {name: coeff})`` triples."""
        species = tuple(Species(n, i) for i, n in enumerate(species_names))
        idx = {n: i for i, n in enumerate(species_names)}
        rx = tuple(
            Reaction(label, {idx[k]: v for k, v in lhs.items()}, {idx[k]: v for k, v in rhs.items()})
            for label, lhs, rhs in reactions
        )
        return cls(species, rx)


def _parse_side(text: str, lineno: int) -> list[tuple[str, int]]:
    text = text.strip()
    if not text:
        return []
    terms = []
    for raw in text.split("+"):
        raw = raw.strip()
        m = _TERM_RE.match(raw)
        if m is None:
            raise NetworkSyntaxError(f"cannot parse term {raw!r}", lineno)
        coeff = int(m.group(1)) if m.group(1) is not None else 1
        if coeff == 0:
            raise NetworkSyntaxError(f"zero coefficient in term {raw!r}", lineno)
        terms.append((m.group(2), coeff))
    return terms


def _merge(terms: list[tuple[str, int]], lineno: int) -> dict[str, int]:
    out: dict[str, int] = {}
    for name, c in terms:
        out[name] = out.get(name, 0) + c
    return out


def _is_reserved(label: str) -> bool:
    return label.startswith(INFLOW_PREFIX) or label.startswith(OUTFLOW_PREFIX)


def parse_network(text: str) -> Network:
    """Parse network text into a :class:`Network`.

    Raises
    ------
    NetworkSyntaxError
        On malformed lines, zero coefficients, empty reactions, duplicate
        labels, or a reserved ``in_``/``out_`` label that is not the
        matching unit inflow/outflow.
    """
    names: list[str] = []
    index: dict[str, int] = {}
    parsed: list[tuple[str, dict[str, int], dict[str, int], int]] = []
    seen: set[str] = set()

    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0]
        if not line.strip():
            continue
        label = f"r{lineno}"
        m = _LABEL_RE.match(line)
        if m is not None:
            label, line = m.group(1), m.group(2)
        if line.count("->") != 1:
            raise NetworkSyntaxError("expected exactly one '->'", lineno)
        lhs_text, rhs_text = line.split("->")
        lhs = _merge(_parse_side(lhs_text, lineno), lineno)
        rhs = _merge(_parse_side(rhs_text, lineno), lineno)
        if not lhs and not rhs:
            raise NetworkSyntaxError("both sides of the reaction are empty", lineno)
        if label in seen:
            raise NetworkSyntaxError(f"duplicate reaction label {label!r}", lineno)
        seen.add(label)
        for name in (*lhs, *rhs):
            if name not in index:
                index[name] = len(names)
                names.append(name)
        parsed.append((label, lhs, rhs, lineno))

    if not parsed:
        raise NetworkSyntaxError("no reactions found")

    for label, lhs, rhs, lineno in parsed:
        if _is_reserved(label) and label not in _flow_labels(lhs, rhs):
            raise NetworkSyntaxError(
                f"label {label!r} is reserved for generated inflow/outflow reactions", lineno
            )

    species = tuple(Species(n, i) for i, n in enumerate(names))
    reactions = tuple(
        Reaction(label, {index[k]: v for k, v in lhs.items()}, {index[k]: v for k, v in rhs.items()})
        for label, lhs, rhs, _ in parsed
    )
    return Network(species, reactions)


def _flow_labels(lhs: dict[str, int], rhs: dict[str, int]) -> set[str]:
    # a reserved label is only legal on the exact unit flow it would name
    if not lhs and len(rhs) == 1 and next(iter(rhs.values())) == 1:
        return {INFLOW_PREFIX + next(iter(rhs))}
    if not rhs and len(lhs) == 1 and next(iter(lhs.values())) == 1:
        return {OUTFLOW_PREFIX + next(iter(lhs))}
    return set()


def read_network(path) -> Network:
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh.read())


def _render_side(net: Network, side: dict[int, int]) -> str:
    terms = []
    for idx in sorted(side):
        c = side[idx]
        name = net.species[idx].name
        terms.append(name if c == 1 else f"{c} {name}")
    return " + ".join(terms)


def render_network(net: Network) -> str:
    """Canonical text form; ``parse_network(render_network(net)) == net``."""
    lines = []
    for r in net.reactions:
        lhs = _render_side(net, r.reactants)
        rhs = _render_side(net, r.products)
        lines.append(f"{r.label}: {lhs} -> {rhs}".replace(":  ->", ": ->").rstrip())
    return "\n".join(lines) + "\n"


def stoichiometric_matrix(net: Network) -> np.ndarray:
    """Integer matrix ``N[n, i] = products[n] - reactants[n]`` of reaction ``i``."""
    N = np.zeros((net.n_species, net.n_reactions), dtype=np.int64)
    for i, r in enumerate(net.reactions):
        for n, c in r.products.items():
            N[n, i] += c
        for n, c in r.reactants.items():
            N[n, i] -= c
    return N


def kinetic_matrix(net: Network) -> np.ndarray:
    """Reactant coefficients ``Y[n, i]``: the mass action exponents."""
    Y = np.zeros((net.n_species, net.n_reactions), dtype=np.int64)
    for i, r in enumerate(net.reactions):
        for n, c in r.reactants.items():
            Y[n, i] = c
    return Y


def product_matrix(net: Network) -> np.ndarray:
    P = np.zeros((net.n_species, net.n_reactions), dtype=np.int64)
    for i, r in enumerate(net.reactions):
        for n, c in r.products.items():
            P[n, i] = c
    return P


def _unit_flows(net: Network) -> tuple[set[int], set[int]]:
    inflows, outflows = set(), set()
    for r in net.reactions:
        if r.kind is ReactionKind.INFLOW and len(r.products) == 1:
            (n, c), = r.products.items()
            if c == 1:
                inflows.add(n)
        elif r.kind is ReactionKind.OUTFLOW and len(r.reactants) == 1:
            (n, c), = r.reactants.items()
            if c == 1:
                outflows.add(n)
    return inflows, outflows


def fully_open_extension(net: Network) -> Network:
    """Add the missing unit inflow ``-> X`` and outflow ``X ->`` for every species.

    Existing reactions keep their order and labels; new ones are appended
    as ``in_<X>``, ``out_<X>`` in species order.
    """
    inflows, outflows = _unit_flows(net)
    added = []
    for s in net.species:
        if s.index not in inflows:
            added.append(Reaction(INFLOW_PREFIX + s.name, {}, {s.index: 1}))
        if s.index not in outflows:
            added.append(Reaction(OUTFLOW_PREFIX + s.name, {s.index: 1}, {}))
    if not added:
        return net
    return Network(net.species, net.reactions + tuple(added))


def conservation_basis(N) -> list[tuple[Fraction, ...]]:
    """Exact basis of the left kernel of ``N`` (conserved linear combinations).

    Each vector is scaled to coprime integers. The list is empty iff ``N``
    has full row rank.
    """
    N = np.asarray(N)
    rows = _rational.transpose(N.tolist())
    if not rows:
        return [tuple(Fraction(int(i == k)) for i in range(N.shape[0])) for k in range(N.shape[0])]
    # pivot from the right so that free variables are the leading species;
    # this tends to give nonnegative totals such as (1, 0, 1) for A + B <-> C
    reversed_rows = [row[::-1] for row in rows]
    basis = [v[::-1] for v in _rational.nullspace(reversed_rows, N.shape[0])]
    out = []
    for v in basis:
        ints = _rational.primitive(v)
        # first nonzero entry positive
        lead = next(x for x in ints if x != 0)
        if lead < 0:
            ints = [-x for x in ints]
        out.append(tuple(Fraction(x) for x in ints))
    return sorted(out, reverse=True)


def stoich_rank(N) -> int:
    """Exact rank of an integer matrix."""
    return _rational.rank(np.asarray(N).tolist())
