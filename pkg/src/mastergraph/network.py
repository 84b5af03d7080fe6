"""Transition networks: parsing, validation and the generator matrix."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateEdge,
    IndexOutOfRange,
    InvalidProbability,
    MalformedLine,
    NonPositiveRate,
    ParseError,
    SelfLoop,
)

FORMATS = ("edge_list", "json")

# sum-to-one slack for probability vectors
PROBABILITY_TOL = 1e-9


@dataclass(frozen=True)
class StateNetwork:
    """Labeled states plus directed edges ``(src, dst, rate)``.

    Edges are stored sorted by ``(src, dst)`` so that two networks with the
    same states and rates compare equal regardless of input order.
    """

    states: tuple[str, ...]
    edges: tuple[tuple[int, int, float], ...] = ()

    def __post_init__(self):
        states = tuple(str(s) for s in self.states)
        if not states:
            raise ParseError("a network needs at least one state")
        if len(set(states)) != len(states):
            raise ParseError("state labels must be unique")
        n = len(states)
        edges = []
        seen = set()
        for src, dst, rate in self.edges:
            src, dst, rate = int(src), int(dst), float(rate)
            if not (0 <= src < n and 0 <= dst < n):
                raise IndexOutOfRange(f"edge ({src}, {dst}) outside 0..{n - 1}")
            if src == dst:
                raise SelfLoop(f"self-loop on state {states[src]!r}")
            if not math.isfinite(rate):
                raise MalformedLine(f"rate {rate!r} is not finite")
            if rate <= 0:
                raise NonPositiveRate(f"rate {rate!r} on {states[src]!r}->{states[dst]!r}")
            if (src, dst) in seen:
                raise DuplicateEdge(f"duplicate edge {states[src]!r}->{states[dst]!r}")
            seen.add((src, dst))
            edges.append((src, dst, rate))
        edges.sort(key=lambda e: (e[0], e[1]))
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "edges", tuple(edges))

    @property
    def n(self) -> int:
        return len(self.states)

    @cached_property
    def _label_index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.states)}

    def index(self, state) -> int:
        """Resolve a label (str) or an index (int) to an index."""
        if isinstance(state, (int, np.integer)) and not isinstance(state, bool):
            if not 0 <= state < self.n:
                raise IndexOutOfRange(f"state index {state} outside 0..{self.n - 1}")
            return int(state)
        try:
            return self._label_index[str(state)]
        except KeyError:
            raise IndexOutOfRange(f"unknown state {state!r}") from None

    @cached_property
    def successors(self) -> tuple[tuple[int, ...], ...]:
        out = [[] for _ in range(self.n)]
        for src, dst, _ in self.edges:
            out[src].append(dst)
        return tuple(tuple(o) for o in out)

    @cached_property
    def predecessors(self) -> tuple[tuple[int, ...], ...]:
        inc = [[] for _ in range(self.n)]
        for src, dst, _ in self.edges:
            inc[dst].append(src)
        return tuple(tuple(sorted(i)) for i in inc)

    @cached_property
    def rates(self) -> dict[tuple[int, int], float]:
        return {(src, dst): rate for src, dst, rate in self.edges}

    def rate(self, src: int, dst: int) -> float:
        return self.rates.get((src, dst), 0.0)

    def subnetwork(self, members: Iterable[int]) -> StateNetwork:
        """Restriction to ``members`` (kept in ascending index order)."""
        members = sorted(set(int(m) for m in members))
        local = {g: k for k, g in enumerate(members)}
        edges = [
            (local[s], local[d], r)
            for s, d, r in self.edges
            if s in local and d in local
        ]
        return StateNetwork(tuple(self.states[m] for m in members), tuple(edges))

    def labels(self, indices: Iterable[int]) -> list[str]:
        return [self.states[i] for i in indices]


def from_edges(edges: Iterable[tuple], states: Sequence | None = None) -> StateNetwork:
    """Build a network from ``(src_label, dst_label, rate)`` triples.

    States not listed in ``states`` are appended in first-appearance order.
    """
    order = [str(s) for s in states] if states is not None else []
    index = {s: i for i, s in enumerate(order)}
    triples = []
    for src, dst, rate in edges:
        for label in (str(src), str(dst)):
            if label not in index:
                index[label] = len(order)
                order.append(label)
        triples.append((index[str(src)], index[str(dst)], rate))
    return StateNetwork(tuple(order), tuple(triples))


def _parse_edge_list(text: str) -> StateNetwork:
    order: list[str] = []
    index: dict[str, int] = {}
    edges: dict[tuple[int, int], float] = {}

    def intern(label, lineno):
        if not label:
            raise MalformedLine("empty state label", lineno)
        if label not in index:
            index[label] = len(order)
            order.append(label)
        return index[label]

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split("\t")]
        if len(fields) == 1:
            # bare label: declares a (possibly isolated) state
            intern(fields[0], lineno)
            continue
        if len(fields) != 3:
            raise MalformedLine(
                f"expected 'src<TAB>dst<TAB>rate', got {len(fields)} field(s)", lineno
            )
        src_label, dst_label, rate_text = fields
        try:
            rate = float(rate_text)
        except ValueError:
            raise MalformedLine(f"rate {rate_text!r} is not a number", lineno) from None
        if not math.isfinite(rate):
            raise MalformedLine(f"rate {rate_text!r} is not finite", lineno)
        if src_label == dst_label:
            raise SelfLoop(f"self-loop on state {src_label!r}", lineno)
        if rate <= 0:
            raise NonPositiveRate(f"rate must be > 0, got {rate_text}", lineno)
        key = (intern(src_label, lineno), intern(dst_label, lineno))
        if key in edges:
            raise DuplicateEdge(f"duplicate edge {src_label!r}->{dst_label!r}", lineno)
        edges[key] = rate
    if not order:
        raise ParseError("no states found")
    return StateNetwork(tuple(order), tuple((s, d, r) for (s, d), r in edges.items()))


def _parse_json(text: str) -> StateNetwork:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedLine(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("edges", []), list):
        raise ParseError("expected an object with an 'edges' list")
    explicit = doc.get("states")
    order = [str(s) for s in explicit] if explicit is not None else []
    if len(set(order)) != len(order):
        raise ParseError("duplicate label in 'states'")
    index = {s: i for i, s in enumerate(order)}
    edges: dict[tuple[int, int], float] = {}
    for k, item in enumerate(doc.get("edges", [])):
        where = f"edges[{k}]"
        try:
            src, dst, rate = str(item["src"]), str(item["dst"]), item["rate"]
        except (KeyError, TypeError):
            raise ParseError(f"{where}: needs 'src', 'dst' and 'rate'") from None
        for label in (src, dst):
            if label not in index:
                if explicit is not None:
                    raise ParseError(f"{where}: state {label!r} not in 'states'")
                index[label] = len(order)
                order.append(label)
        if isinstance(rate, bool) or not isinstance(rate, (int, float)):
            raise ParseError(f"{where}: rate must be a number")
        rate = float(rate)
        if src == dst:
            raise SelfLoop(f"{where}: self-loop on state {src!r}")
        if not math.isfinite(rate):
            raise ParseError(f"{where}: rate is not finite")
        if rate <= 0:
            raise NonPositiveRate(f"{where}: rate must be > 0, got {rate!r}")
        key = (index[src], index[dst])
        if key in edges:
            raise DuplicateEdge(f"{where}: duplicate edge {src!r}->{dst!r}")
        edges[key] = rate
    if not order:
        raise ParseError("no states found")
    return StateNetwork(tuple(order), tuple((s, d, r) for (s, d), r in edges.items()))


def parse_network(text: str, format: str = "edge_list") -> StateNetwork:
    """Parse a network from ``edge_list`` or ``json`` text.

    States are numbered in order of first appearance (or the explicit
    ``states`` list of the JSON form).
    """
    if format == "edge_list":
        return _parse_edge_list(text)
    if format == "json":
        return _parse_json(text)
    raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")


def serialize_network(net: StateNetwork, format: str = "edge_list") -> str:
    if format == "json":
        doc = {
            "states": list(net.states),
            "edges": [
                {"src": net.states[s], "dst": net.states[d], "rate": r}
                for s, d, r in net.edges
            ],
        }
        return json.dumps(doc, indent=2)
    if format != "edge_list":
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
    for label in net.states:
        if "\t" in label or "\n" in label or "\r" in label or label != label.strip() or label.startswith("#"):
            raise ValueError(f"label {label!r} cannot be written as an edge list")
    appearance = []
    for s, d, _ in net.edges:
        for i in (s, d):
            if i not in appearance:
                appearance.append(i)
    lines = []
    if appearance != list(range(net.n)):
        lines.extend(net.states)
    lines.extend(f"{net.states[s]}\t{net.states[d]}\t{r!r}" for s, d, r in net.edges)
    return "\n".join(lines) + "\n"


def build_generator(net: StateNetwork) -> np.ndarray:
    """Generator with ``G[i, j] = rate(j -> i)`` off the diagonal.

    The diagonal is the negated column sum of the off-diagonal entries, so
    every column sums to zero.
    """
    G = np.zeros((net.n, net.n))
    for src, dst, rate in net.edges:
        G[dst, src] = rate
    G[np.diag_indices(net.n)] = -G.sum(axis=0)
    return G


def adjacency_matrix(net: StateNetwork) -> np.ndarray:
    """0/1 matrix with ``A[i, j] = 1`` iff there is an edge j -> i."""
    A = np.zeros((net.n, net.n), dtype=np.int64)
    for src, dst, _ in net.edges:
        A[dst, src] = 1
    return A


def as_probability_vector(values, n: int | None = None) -> np.ndarray:
    """Validate and return a nonnegative, L1-normalized float vector."""
    p = np.asarray(values, dtype=float)
    if p.ndim != 1 or (n is not None and p.shape[0] != n):
        raise InvalidProbability(f"expected a vector of length {n}, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise InvalidProbability("probability vector has non-finite entries")
    if np.any(p < -1e-12) or np.any(p > 1 + 1e-12):
        raise InvalidProbability("probability entries must lie in [0, 1]")
    if abs(p.sum() - 1.0) > PROBABILITY_TOL:
        raise InvalidProbability(f"probabilities sum to {p.sum()!r}, not 1")
    return np.clip(p, 0.0, 1.0)


def point_mass(net: StateNetwork, state) -> np.ndarray:
    p = np.zeros(net.n)
    p[net.index(state)] = 1.0
    return p


def initial_distribution(net: StateNetwork, spec: str) -> np.ndarray:
    """Resolve an initial-condition spec.

    ``uniform``, ``state:LABEL``, or a path to a JSON file holding either a
    list of N probabilities or a ``{label: probability}`` mapping (missing
    labels get 0).
    """
    if spec == "uniform":
        return np.full(net.n, 1.0 / net.n)
    if spec.startswith("state:"):
        return point_mass(net, spec[len("state:"):])
    try:
        with open(spec, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise InvalidProbability(f"no such initial-condition file: {spec!r}") from None
    except json.JSONDecodeError as exc:
        raise InvalidProbability(f"{spec}: invalid JSON ({exc.msg})") from None
    if isinstance(doc, dict):
        p = np.zeros(net.n)
        for label, value in doc.items():
            p[net.index(str(label))] = float(value)
        return as_probability_vector(p, net.n)
    return as_probability_vector(doc, net.n)
