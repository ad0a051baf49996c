"""Closed-form first and second moments of the random consensus weights.

Notation: ``z_i = 1 / (din_i + 1)`` with ``din_i ~ Binomial(d_i, p_i)`` the
random in-degree of node ``i``. ``m1_i = E z_i`` and ``m2_i = E z_i**2``.

Kronecker indexing lives in :func:`kron_index`: entry ``((i, r), (j, s))`` of
``W (x) W`` is ``w_ij * w_rs`` and sits at row ``i*n + r``, column ``j*n + s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.stats import binom

from .errors import BudgetExceeded, DomainError
from .graph import CandidateGraph

DEFAULT_MAX_NODES = 45


def _check_pd(p: float, d: int) -> None:
    if not (p > 0.0 and p <= 1.0):
        raise DomainError(f"probability {p!r} not in (0, 1]")
    if d < 0 or int(d) != d:
        raise DomainError(f"degree {d!r} is not a non-negative integer")


def moment_m1(p: float, d: int) -> float:
    """``E[1 / (1 + Binomial(d, p))] = (1 - q**(d+1)) / (p (d+1))``."""
    _check_pd(p, d)
    if p == 1.0:
        return 1.0 / (d + 1)
    # 1 - q**(d+1) without cancellation for small p
    return -math.expm1((d + 1) * math.log1p(-p)) / (p * (d + 1))


def moment_m2(p: float, d: int) -> float:
    """``E[1 / (1 + Binomial(d, p))**2]`` by the finite binomial sum."""
    _check_pd(p, d)
    k = np.arange(d + 1)
    return float(np.sum(binom.pmf(k, d, p) / (k + 1.0) ** 2))


@dataclass(frozen=True, eq=False)
class MomentTable:
    m1: np.ndarray
    m2: np.ndarray


def moment_table(graph: CandidateGraph) -> MomentTable:
    m1 = np.array([moment_m1(p, d) for p, d in zip(graph.probs, graph.degrees)])
    m2 = np.array([moment_m2(p, d) for p, d in zip(graph.probs, graph.degrees)])
    return MomentTable(m1, m2)


def expected_weight_matrix(graph: CandidateGraph) -> np.ndarray:
    """``E W = S + (I - S) D^-1 A^T`` with ``S = diag(m1)``."""
    m1 = moment_table(graph).m1
    a = graph.adjacency.astype(float)
    ew = ((1.0 - m1) / graph.degrees)[:, None] * a.T
    ew[np.diag_indices(graph.n)] = m1
    return ew


def kron_index(i, r, n: int):
    """Row (or column) of the Kronecker matrix holding the index pair ``(i, r)``."""
    return i * n + r


def case_pattern(n: int) -> np.ndarray:
    """Entry class (1..7) of every position of an ``n**2 x n**2`` Kronecker moment.

    1. ``w_ii w_ii``
    2. ``w_ii w_rr``, ``r != i``
    3. ``w_ii w_is`` or ``w_is w_ii``, ``s != i``
    4. ``w_ij w_ij``, ``j != i``
    5. one diagonal and one off-diagonal factor from distinct rows
    6. ``w_ij w_is``, ``j != s``, both ``!= i``
    7. two off-diagonal factors from distinct rows
    """
    i, r, j, s = np.ix_(*(np.arange(n),) * 4)
    same_row = i == r
    jd = j == i
    sd = s == r
    code = np.select(
        [
            same_row & jd & sd,
            ~same_row & jd & sd,
            same_row & (jd ^ sd),
            same_row & ~jd & (j == s),
            ~same_row & (jd ^ sd),
            same_row & ~jd & ~sd & (j != s),
        ],
        [1, 2, 3, 4, 5, 6],
        default=7,
    )
    return code.reshape(n * n, n * n).astype(np.int8)


def _check_budget(graph: CandidateGraph, max_nodes: int | None) -> None:
    cap = DEFAULT_MAX_NODES if max_nodes is None else max_nodes
    if graph.n > cap:
        raise BudgetExceeded(
            f"n={graph.n} exceeds the Kronecker node cap {cap} "
            f"({graph.n ** 2}x{graph.n ** 2} matrices); raise the cap to proceed"
        )


def _grids(graph: CandidateGraph):
    n = graph.n
    tab = moment_table(graph)
    a = graph.adjacency.astype(float)
    d = graph.degrees.astype(float)
    # off[i, j] = E w_ij for j != i, i.e. a_ji (1 - m1_i) / d_i
    off = ((1.0 - tab.m1) / d)[:, None] * a.T
    idx = np.arange(n)
    I, R, J, S = idx[:, None, None, None], idx[None, :, None, None], idx[None, None, :, None], idx[None, None, None, :]
    code = case_pattern(n).reshape(n, n, n, n)
    return n, tab, a, d, off, (I, R, J, S), code


def _cross_row_products(n, tab, off, grids, code, out):
    """Cases 2, 5 and 7: factors from distinct rows, always a product of means."""
    I, R, J, S = grids
    ew = off.copy()
    ew[np.diag_indices(n)] = tab.m1
    full = ew[I, J] * ew[R, S]
    mask = (code == 2) | (code == 5) | (code == 7)
    out[mask] = np.broadcast_to(full, out.shape)[mask]


def kron_expected_product(graph: CandidateGraph, *, max_nodes: int | None = None) -> np.ndarray:
    """``Q = E W (x) E W`` assembled entry class by entry class."""
    _check_budget(graph, max_nodes)
    n, tab, a, d, off, grids, code = _grids(graph)
    I, R, J, S = grids
    m1 = tab.m1
    out = np.zeros((n, n, n, n))
    shape = out.shape

    def put(case, values):
        mask = code == case
        out[mask] = np.broadcast_to(values, shape)[mask]

    put(1, m1[I] ** 2)
    # case 3: one factor is w_ii, the other w_ik with k the off-diagonal column
    k = np.where(J == I, S, J)
    put(3, a[k, I] / d[I] * m1[I] * (1.0 - m1[I]))
    put(4, a[J, I] / d[I] ** 2 * (1.0 - m1[I]) ** 2)
    put(6, a[J, I] * a[S, I] / d[I] ** 2 * (1.0 - m1[I]) ** 2)
    _cross_row_products(n, tab, off, grids, code, out)
    return out.reshape(n * n, n * n)


def kron_expected_square(graph: CandidateGraph, *, max_nodes: int | None = None) -> np.ndarray:
    """``R = E[W (x) W]`` assembled entry class by entry class.

    Rows ``(i, r)`` with ``i != r`` involve two rows of ``W`` that depend on
    disjoint sets of directed edges, so they factor into products of means.
    """
    _check_budget(graph, max_nodes)
    n, tab, a, d, off, grids, code = _grids(graph)
    I, R, J, S = grids
    m1, m2 = tab.m1, tab.m2
    out = np.zeros((n, n, n, n))
    shape = out.shape

    def put(case, values):
        mask = code == case
        out[mask] = np.broadcast_to(values, shape)[mask]

    put(1, m2[I])
    k = np.where(J == I, S, J)
    put(3, a[k, I] / d[I] * (m1[I] - m2[I]))
    put(4, a[J, I] / d[I] * (m1[I] - m2[I]))
    di = d[I]
    with np.errstate(divide="ignore", invalid="ignore"):
        r6 = np.where(di > 1, a[J, I] * a[S, I] * (1.0 + 2.0 * m2[I] - 3.0 * m1[I]) / (di * (di - 1.0)), 0.0)
    put(6, r6)
    _cross_row_products(n, tab, off, grids, code, out)
    return out.reshape(n * n, n * n)


def s_values(graph: CandidateGraph) -> np.ndarray:
    """Closed-form absolute row sum of ``R - Q`` on row ``(i, i)``:
    ``2 (1 - m1) [m1 + (m1 - 1) / d]``."""
    m1 = moment_table(graph).m1
    d = graph.degrees.astype(float)
    s = 2.0 * (1.0 - m1) * (m1 + (m1 - 1.0) / d)
    # an absolute row sum; rounding can push it a hair below zero at p = 1
    return np.maximum(s, 0.0)


def delta_and_norm(
    graph: CandidateGraph,
    *,
    max_nodes: int | None = None,
    q: np.ndarray | None = None,
    r: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Perturbation ``R - Q``, closed-form ``S_i``, and ``||R - Q||_inf``.

    The norm returned is the directly computed maximum absolute row sum, an
    independent route to ``max(S_i)``.
    """
    if q is None:
        q = kron_expected_product(graph, max_nodes=max_nodes)
    if r is None:
        r = kron_expected_square(graph, max_nodes=max_nodes)
    delta = r - q
    norm = float(np.max(np.abs(delta).sum(axis=1)))
    return delta, s_values(graph), norm


@dataclass(frozen=True, eq=False)
class ExpectedOperators:
    ew: np.ndarray
    sigma: np.ndarray
    q_kron: np.ndarray
    r_kron: np.ndarray
    delta: np.ndarray
    s_values: np.ndarray
    delta_inf_norm: float


def expected_operators(graph: CandidateGraph, *, max_nodes: int | None = None) -> ExpectedOperators:
    ew = expected_weight_matrix(graph)
    q = kron_expected_product(graph, max_nodes=max_nodes)
    r = kron_expected_square(graph, max_nodes=max_nodes)
    delta, s, norm = delta_and_norm(graph, q=q, r=r)
    return ExpectedOperators(ew, np.diag(np.diag(ew)), q, r, delta, s, norm)


def write_matrix_csv(matrix: np.ndarray, path: str | Path) -> None:
    """Row-major CSV at full precision (``%.17g``)."""
    np.savetxt(path, np.atleast_2d(matrix), fmt="%.17g", delimiter=",", newline="\n", encoding="utf-8")
