"""Exhaustive-enumeration oracle for the closed-form moments.

Every subset of the ``m`` candidate directed pairs is one realization; bit
``b`` of the realization counter switches pair ``b`` (lexicographic order)
on. Expectations are probability-weighted sums over all ``2**m`` subsets,
with no sampling and no use of the closed forms being checked.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .analysis import exact_variance, expected_consensus_value, stationary_distribution
from .errors import TooLarge, VerificationFailure
from .graph import CandidateGraph, build_graph
from .moments import expected_weight_matrix, kron_expected_product, kron_expected_square, s_values

MAX_DIRECTED_EDGES = 20
GRID = (0.25, 0.5, 0.75)


class _Neumaier:
    """Compensated running sum of equally shaped arrays."""

    def __init__(self, shape):
        self.s = np.zeros(shape)
        self.c = np.zeros(shape)

    def add(self, x):
        t = self.s + x
        big = np.abs(self.s) >= np.abs(x)
        self.c += np.where(big, (self.s - t) + x, (x - t) + self.s)
        self.s = t

    @property
    def value(self):
        return self.s + self.c


@dataclass(frozen=True, eq=False)
class Enumeration:
    ew: np.ndarray
    r: np.ndarray
    weight_sum: float
    cases: int
    support: int  # realizations with nonzero probability


def enumerate_law(graph: CandidateGraph, *, max_directed_edges: int = MAX_DIRECTED_EDGES) -> Enumeration:
    pairs = graph.directed_edges()
    m = pairs.shape[0]
    if m > max_directed_edges:
        raise TooLarge(f"{m} directed candidate edges; enumeration budget is {max_directed_edges}")
    n = graph.n
    p_head = graph.probs[pairs[:, 1]]
    total = 1 << m
    chunk = max(1, min(total, 2_000_000 // (n**4 + n * n)))

    ew_acc = _Neumaier((n, n))
    r_acc = _Neumaier((n, n, n, n))
    w_acc = _Neumaier(())
    support = 0
    bit = np.arange(m)
    eye = np.eye(n)
    for start in range(0, total, chunk):
        ids = np.arange(start, min(start + chunk, total), dtype=np.int64)
        on = ((ids[:, None] >> bit) & 1).astype(bool)
        weight = np.prod(np.where(on, p_head, 1.0 - p_head), axis=1)
        support += int(np.count_nonzero(weight))
        adj = np.zeros((ids.size, n, n))
        adj[:, pairs[:, 0], pairs[:, 1]] = on
        indeg = adj.sum(axis=1)
        w = (np.swapaxes(adj, 1, 2) + eye) / (indeg + 1.0)[:, :, None]
        ew_acc.add(np.einsum("k,kij->ij", weight, w))
        r_acc.add(np.einsum("k,kij,krs->irjs", weight, w, w))
        w_acc.add(weight.sum())
    return Enumeration(
        ew=ew_acc.value,
        r=r_acc.value.reshape(n * n, n * n),
        weight_sum=float(w_acc.value),
        cases=total,
        support=support,
    )


def enumerate_expectations(graph: CandidateGraph, *, max_directed_edges: int = MAX_DIRECTED_EDGES):
    """Exact ``(E W, E[W (x) W])`` by summing over every realization."""
    law = enumerate_law(graph, max_directed_edges=max_directed_edges)
    return law.ew, law.r


@dataclass(frozen=True)
class OracleReport:
    graph_id: str
    max_err_ew: float
    max_err_q: float
    max_err_r: float
    max_err_delta: float
    max_err_delta_norm: float
    max_err_mean: float
    max_err_variance: float
    cases_checked: int
    passed: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def graph_id(graph: CandidateGraph) -> str:
    edges = ",".join(f"{u}-{v}" for u, v in graph.edges())
    probs = ",".join(f"{p:g}" for p in graph.probs)
    return f"n={graph.n};E={edges};p={probs}"


def _worst(check, closed, exact, tol):
    closed = np.atleast_1d(np.asarray(closed, dtype=float))
    exact = np.atleast_1d(np.asarray(exact, dtype=float))
    err = np.abs(closed - exact)
    k = int(np.argmax(err))
    worst = float(err.flat[k])
    if not worst <= tol:
        idx = np.unravel_index(k, err.shape)
        raise VerificationFailure(check, tuple(int(i) for i in idx), float(closed.flat[k]), float(exact.flat[k]), tol)
    return worst


def verify_closed_forms(graph: CandidateGraph, tol: float = 1e-12, x0=None) -> OracleReport:
    """Compare every closed form against the enumerated law.

    Checked: ``E W``, ``Q``, ``R``, ``R - Q``, ``max S_i`` against the
    enumerated ``||R - Q||_inf``, and the mean and variance of ``x*`` for
    ``x0`` (default ``x_i = (i + 1) / n``) via stationary distributions of
    the enumerated matrices.

    Raises
    ------
    VerificationFailure
        At the first check whose worst entry exceeds ``tol``.
    """
    n = graph.n
    x = np.arange(1, n + 1) / n if x0 is None else np.asarray(x0, dtype=float)
    law = enumerate_law(graph)
    if abs(law.weight_sum - 1.0) > 1e-12:
        raise VerificationFailure("weight_sum", (), law.weight_sum, 1.0, 1e-12)

    q_exact = np.kron(law.ew, law.ew)
    delta_exact = law.r - q_exact
    q = kron_expected_product(graph)
    r = kron_expected_square(graph)

    e_ew = _worst("ew", expected_weight_matrix(graph), law.ew, tol)
    e_q = _worst("q", q, q_exact, tol)
    e_r = _worst("r", r, law.r, tol)
    e_d = _worst("delta", r - q, delta_exact, tol)
    e_dn = _worst("delta_norm", np.max(s_values(graph)), np.max(np.abs(delta_exact).sum(axis=1)), tol)

    pi_ew = stationary_distribution(law.ew)
    mean_exact = float(x @ pi_ew)
    e_mean = _worst("mean", expected_consensus_value(graph, x), mean_exact, tol)
    var_exact = float(np.kron(x, x) @ stationary_distribution(law.r) - mean_exact**2)
    e_var = _worst("variance", exact_variance(graph, x).exact_variance_raw, var_exact, tol)

    return OracleReport(graph_id(graph), e_ew, e_q, e_r, e_d, e_dn, e_mean, e_var, law.cases, True)


def connected_edge_sets(n: int):
    """Every connected labelled simple graph on ``n`` nodes, as sorted edge lists."""
    pairs = list(itertools.combinations(range(n), 2))
    for k in range(n - 1, len(pairs) + 1):
        for edges in itertools.combinations(pairs, k):
            seen = {0}
            frontier = [0]
            while frontier:
                u = frontier.pop()
                for a, b in edges:
                    v = b if a == u else a if b == u else None
                    if v is not None and v not in seen:
                        seen.add(v)
                        frontier.append(v)
            if len(seen) == n:
                yield list(edges)


def small_graph_corpus(max_nodes: int = 4, grid=GRID):
    """Connected graphs with ``2 <= n <= max_nodes`` under uniform and mixed
    probability assignments drawn from ``grid``."""
    for n in range(2, max_nodes + 1):
        assignments = [(p,) * n for p in grid]
        assignments += [tuple(grid[(v + shift) % len(grid)] for v in range(n)) for shift in range(len(grid))]
        for edges in connected_edge_sets(n):
            for probs in assignments:
                yield build_graph(edges, probs)


def verify_corpus(graphs, tol: float = 1e-12) -> list[OracleReport]:
    return [verify_closed_forms(g, tol) for g in graphs]
