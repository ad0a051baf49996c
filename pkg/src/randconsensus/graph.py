"""Candidate communication graphs and the leader/follower test topologies.

A :class:`CandidateGraph` is the fixed undirected graph whose edges are the
potential directed channels. Each node ``v`` carries a listen probability
``p_v``: every candidate edge pointing *into* ``v`` is active in a time slot
independently with probability ``p_v``.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import (
    DimensionMismatch,
    DisconnectedGraph,
    DuplicateEdge,
    InvalidProbability,
    SelfLoop,
    ValidationError,
)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class CandidateGraph:
    """Connected undirected graph with per-node listen probabilities.

    Use :func:`build_graph` rather than the constructor; it validates input
    and computes degrees.
    """

    adjacency: np.ndarray
    probs: np.ndarray
    degrees: np.ndarray
    relaxed: bool = False

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    def edges(self) -> list[tuple[int, int]]:
        """Undirected edges as ``(u, v)`` with ``u < v``, sorted."""
        u, v = np.nonzero(np.triu(self.adjacency))
        return [(int(a), int(b)) for a, b in zip(u, v)]

    def directed_edges(self) -> np.ndarray:
        """All candidate directed pairs ``(u, v)`` in lexicographic order, shape (m, 2)."""
        u, v = np.nonzero(self.adjacency)
        return np.column_stack([u, v]).astype(np.intp)

    def to_dict(self) -> dict:
        return {
            "nodes": self.n,
            "edges": [list(e) for e in self.edges()],
            "probs": [float(p) for p in self.probs],
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CandidateGraph):
            return NotImplemented
        return (
            np.array_equal(self.adjacency, other.adjacency)
            and np.array_equal(self.probs, other.probs)
            and self.relaxed == other.relaxed
        )

    __hash__ = None  # type: ignore[assignment]


def _check_probs(probs: np.ndarray, relaxed: bool) -> None:
    for v, p in enumerate(probs):
        if not math.isfinite(p) or p <= 0.0 or p > 1.0 or (p == 1.0 and not relaxed):
            allowed = "(0, 1]" if relaxed else "(0, 1)"
            raise InvalidProbability(f"node {v}: listen probability {p!r} not in {allowed}")


def build_graph(
    edges: Iterable[Sequence[int]],
    probs: Sequence[float],
    *,
    n: int | None = None,
    relaxed: bool = False,
) -> CandidateGraph:
    """Validate an undirected edge list and listen probabilities.

    Parameters
    ----------
    edges : iterable of pairs
        Unordered node pairs, 0-based.
    probs : sequence of float
        One listen probability per node; its length fixes ``n`` unless ``n``
        is given explicitly.
    relaxed : bool
        Permit ``p == 1`` (deterministic limit, used by tests and the oracle).

    Raises
    ------
    SelfLoop, DuplicateEdge, InvalidProbability, DisconnectedGraph, ValidationError
    """
    probs = np.asarray(probs, dtype=float)
    if probs.ndim != 1:
        raise ValidationError("probs must be a flat list")
    if n is None:
        n = probs.shape[0]
    elif probs.shape[0] != n:
        raise DimensionMismatch(f"{probs.shape[0]} probabilities for {n} nodes")
    if n < 2:
        raise ValidationError("need at least two nodes (every degree must be >= 1)")

    adjacency = np.zeros((n, n), dtype=np.int8)
    for pair in edges:
        if len(pair) != 2:
            raise ValidationError(f"edge {pair!r} is not a pair")
        u, v = (int(x) for x in pair)
        if not (0 <= u < n and 0 <= v < n):
            raise ValidationError(f"edge ({u}, {v}) has a node outside [0, {n})")
        if u == v:
            raise SelfLoop(f"self-loop at node {u}")
        if adjacency[u, v]:
            raise DuplicateEdge(f"edge {{{u}, {v}}} listed twice")
        adjacency[u, v] = adjacency[v, u] = 1

    _check_probs(probs, relaxed)

    ncomp, _ = connected_components(adjacency, directed=False)
    if ncomp != 1:
        raise DisconnectedGraph(f"candidate graph has {ncomp} components")

    col = adjacency.sum(axis=0, dtype=np.int64)
    row = adjacency.sum(axis=1, dtype=np.int64)
    assert np.array_equal(col, row)

    return CandidateGraph(_frozen(adjacency), _frozen(probs), _frozen(col), relaxed)


@dataclass(frozen=True)
class LeaderProb:
    """Listen probability rule for leaders: ``p_v = scale / count_v``.

    ``basis="degree"`` counts every neighbour of the leader; ``basis="followers"``
    counts only its followers (the star degree). Rules that produce ``p >= 1``
    are rejected, never clamped.
    """

    scale: float = 1.0
    basis: str = "degree"

    def __post_init__(self):
        if self.basis not in ("degree", "followers"):
            raise ValidationError(f"unknown leader probability basis {self.basis!r}")
        if not self.scale > 0:
            raise ValidationError("leader probability scale must be positive")


def inverse_degree(basis: str = "degree") -> LeaderProb:
    return LeaderProb(1.0, basis)


def scaled_inverse_degree(c: float, basis: str = "degree") -> LeaderProb:
    return LeaderProb(float(c), basis)


def _leader_graph(
    follower_counts: Sequence[int],
    p_follower: float,
    leader_prob: LeaderProb | str,
    ring: bool,
    ordering: str,
) -> CandidateGraph:
    counts = [int(c) for c in follower_counts]
    if len(counts) != 3 or min(counts) < 1:
        raise ValidationError("follower_counts must be three positive integers")
    if isinstance(leader_prob, str):
        if leader_prob != "inverse_degree":
            raise ValidationError(f"unknown leader probability rule {leader_prob!r}")
        leader_prob = inverse_degree()
    if not 0.0 < p_follower < 1.0:
        raise InvalidProbability(f"follower probability {p_follower!r} not in (0, 1)")

    if ordering == "leaders_first":
        leaders = [0, 1, 2]
        blocks, nxt = [], 3
        for c in counts:
            blocks.append(list(range(nxt, nxt + c)))
            nxt += c
    elif ordering == "interleaved":
        leaders, blocks, nxt = [], [], 0
        for c in counts:
            leaders.append(nxt)
            blocks.append(list(range(nxt + 1, nxt + 1 + c)))
            nxt += c + 1
    else:
        raise ValidationError(f"unknown node ordering {ordering!r}")

    n = 3 + sum(counts)
    edges = [(leaders[0], leaders[1]), (leaders[1], leaders[2])]
    if ring:
        edges.append((leaders[0], leaders[2]))
    for lead, block in zip(leaders, blocks):
        edges.extend((lead, f) for f in block)

    degree = np.zeros(n, dtype=np.int64)
    for u, v in edges:
        degree[u] += 1
        degree[v] += 1

    probs = np.full(n, float(p_follower))
    for lead, c in zip(leaders, counts):
        base = degree[lead] if leader_prob.basis == "degree" else c
        p = leader_prob.scale / base
        if not 0.0 < p < 1.0:
            raise InvalidProbability(
                f"leader {lead}: rule {leader_prob.scale}/{base} gives p={p!r} outside (0, 1)"
            )
        probs[lead] = p
    return build_graph(sorted(tuple(sorted(e)) for e in edges), probs)


def leader_follower_chain(
    follower_counts: Sequence[int],
    p_follower: float,
    leader_prob: LeaderProb | str = "inverse_degree",
    *,
    ordering: str = "leaders_first",
) -> CandidateGraph:
    """Three stars whose centres (leaders) form the path 1-2-3.

    With ``ordering="leaders_first"`` nodes are ``[leader1, leader2, leader3,
    followers of 1, followers of 2, followers of 3]``. ``"interleaved"`` puts
    each leader directly before its own followers.
    """
    return _leader_graph(follower_counts, p_follower, leader_prob, False, ordering)


def leader_follower_ring(
    follower_counts: Sequence[int],
    p_follower: float,
    leader_prob: LeaderProb | str = "inverse_degree",
    *,
    ordering: str = "leaders_first",
) -> CandidateGraph:
    """Same as :func:`leader_follower_chain` with the extra leader edge 1-3."""
    return _leader_graph(follower_counts, p_follower, leader_prob, True, ordering)


def leader_nodes(follower_counts: Sequence[int], ordering: str = "leaders_first") -> list[int]:
    """Indices of the three leaders under a builder ordering."""
    if ordering == "leaders_first":
        return [0, 1, 2]
    out, nxt = [], 0
    for c in follower_counts:
        out.append(nxt)
        nxt += int(c) + 1
    return out


@dataclass(frozen=True, eq=False)
class Scenario:
    graph: CandidateGraph
    initial: np.ndarray
    trials: int
    master_seed: int
    tol: float = 1e-10
    max_steps: int = 100_000
    bins: int = 20
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        x0 = np.asarray(self.initial, dtype=float)
        if x0.shape != (self.graph.n,):
            raise DimensionMismatch(f"initial has shape {x0.shape}, expected ({self.graph.n},)")
        if not np.all(np.isfinite(x0)):
            raise ValidationError("initial values must be finite")
        if int(self.trials) < 1:
            raise ValidationError(f"trials must be positive, got {self.trials}")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")
        if not self.tol > 0:
            raise ValidationError("tol must be positive")
        if int(self.max_steps) < 1:
            raise ValidationError("max_steps must be positive")
        if int(self.bins) < 1:
            raise ValidationError("bins must be positive")
        object.__setattr__(self, "initial", _frozen(x0))
