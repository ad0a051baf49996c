"""Directed realizations of the candidate graph and their consensus weights.

Randomness contract
-------------------
* One realization consumes exactly ``m`` uniforms, where ``m`` is the number
  of candidate directed pairs, visited in lexicographic ``(u, v)`` order.
  Pair ``(u, v)`` is active iff its uniform is ``< p_v``.
* Trial ``t`` of an ensemble seeded with ``master_seed`` draws from
  ``PCG64(SeedSequence(master_seed, spawn_key=(t,)))`` (see :func:`trial_stream`).
  Distinct ``t`` give distinct spawn keys, hence non-colliding streams.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import CandidateGraph


def trial_stream(master_seed: int, trial: int) -> np.random.Generator:
    """Independent generator for one trial, derived from ``(master_seed, trial)``."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(trial),))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True, eq=False)
class DirectedRealization:
    adjacency: np.ndarray  # adjacency[u, v] == 1 iff u -> v is active
    in_degrees: np.ndarray


def realization_from_mask(graph: CandidateGraph, active: np.ndarray) -> DirectedRealization:
    """Realization whose active directed pairs are selected by a boolean mask
    over :meth:`CandidateGraph.directed_edges`."""
    pairs = graph.directed_edges()
    adj = np.zeros((graph.n, graph.n), dtype=np.int8)
    sel = pairs[np.asarray(active, dtype=bool)]
    adj[sel[:, 0], sel[:, 1]] = 1
    return DirectedRealization(adj, adj.sum(axis=0, dtype=np.int64))


def sample_realization(graph: CandidateGraph, stream: np.random.Generator) -> DirectedRealization:
    """Draw one directed graph; each candidate pair ``u -> v`` independently w.p. ``p_v``."""
    pairs = graph.directed_edges()
    u = stream.random(pairs.shape[0])
    return realization_from_mask(graph, u < graph.probs[pairs[:, 1]])


def weight_matrix(realization: DirectedRealization) -> np.ndarray:
    """Row-stochastic ``W = (D + I)^-1 (A + I)^T`` of a realization.

    Row ``i`` averages node ``i`` with its active in-neighbours.
    """
    adj = realization.adjacency
    n = adj.shape[0]
    m = (adj.T + np.eye(n)).astype(float)
    return m / (realization.in_degrees + 1.0)[:, None]


def write_edge_list(realization: DirectedRealization, path: str | Path) -> None:
    """Dump active directed edges as ``u v`` lines in lexicographic order."""
    u, v = np.nonzero(realization.adjacency)
    lines = "".join(f"{a} {b}\n" for a, b in zip(u, v))
    Path(path).write_text(lines, encoding="utf-8", newline="\n")


class BatchUpdater:
    """Vectorized ``x <- W_k x`` for a batch of independent trajectories.

    Draws are supplied by the caller as an ``(batch, m)`` array of uniforms in
    lexicographic pair order; the arithmetic for each trajectory depends only
    on its own row, so results do not depend on how trials are batched.
    """

    def __init__(self, graph: CandidateGraph):
        pairs = graph.directed_edges()
        self.m = pairs.shape[0]
        self.n = graph.n
        by_head = np.lexsort((pairs[:, 0], pairs[:, 1]))
        self.by_head = by_head
        self.thresholds = graph.probs[pairs[by_head, 1]]
        self.tails = pairs[by_head, 0]
        heads = pairs[by_head, 1]
        # every node has in-degree >= 1 in a connected graph, so no empty segment
        self.starts = np.searchsorted(heads, np.arange(self.n))

    def step(self, x: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
        active = (uniforms[:, self.by_head] < self.thresholds).astype(np.float64)
        incoming = np.add.reduceat(active * x[:, self.tails], self.starts, axis=1)
        count = np.add.reduceat(active, self.starts, axis=1)
        count += 1.0
        incoming += x
        return incoming / count
