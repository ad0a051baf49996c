"""Mean, exact variance and the three-factor variance bound of the consensus value."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import BudgetExceeded, DegenerateSpectrum, DimensionMismatch, EigensolveFailure, SingularChain
from .graph import CandidateGraph
from .moments import (
    delta_and_norm,
    expected_weight_matrix,
    kron_expected_product,
    kron_expected_square,
    moment_table,
    s_values,
)


def _as_x0(graph: CandidateGraph, x0) -> np.ndarray:
    x = np.asarray(x0, dtype=float)
    if x.shape != (graph.n,):
        raise DimensionMismatch(f"initial condition has shape {x.shape}, expected ({graph.n},)")
    return x


@dataclass(frozen=True, eq=False)
class MeanWeights:
    w: np.ndarray
    rho: float
    v1_ew: np.ndarray
    sigma_norm: float


def influence_weight(p: float, d: int) -> float:
    """Unnormalized weight ``p (d+1) d / (p (d+1) - 1 + q**(d+1))`` of one node."""
    if p == 1.0:
        qd = 0.0
    else:
        qd = math.exp((d + 1) * math.log1p(-p))
    t = p * (d + 1)
    return t * d / (t - 1.0 + qd)


def dominant_left_eigvec_closed(graph: CandidateGraph) -> MeanWeights:
    """Stationary distribution of ``E W`` in closed form.

    Two parameterizations are computed: ``rho * w_i`` from the per-node
    weights and ``sigma * d_i / (1 - m1_i)``; they agree to rounding.
    """
    w = np.array([influence_weight(p, d) for p, d in zip(graph.probs, graph.degrees)])
    rho = 1.0 / w.sum()
    m1 = moment_table(graph).m1
    raw = graph.degrees / (1.0 - m1)
    sigma = 1.0 / raw.sum()
    return MeanWeights(w=w, rho=rho, v1_ew=sigma * raw, sigma_norm=sigma)


def expected_consensus_value(graph: CandidateGraph, x0) -> float:
    x = _as_x0(graph, x0)
    return float(x @ dominant_left_eigvec_closed(graph).v1_ew)


def reweight_initial(graph: CandidateGraph, x0) -> np.ndarray:
    """Initial condition whose expected consensus value is ``mean(x0)``.

    ``y_i = x_i / (n rho w_i)``; without the ``1/n`` the expectation would be
    ``sum(x0)`` instead of the average.
    """
    x = _as_x0(graph, x0)
    mw = dominant_left_eigvec_closed(graph)
    return x / (graph.n * mw.rho * mw.w)


def stationary_distribution(P: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Stationary distribution of a row-stochastic matrix by a direct solve.

    The last balance equation of ``(P^T - I) pi = 0`` is replaced with
    ``sum(pi) = 1``. A couple of refinement sweeps are applied if the residual
    exceeds ``tol``.

    Raises
    ------
    SingularChain
        If the system is singular, i.e. the stationary distribution is not
        unique.
    """
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    A = P.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
        try:
            lu = scipy.linalg.lu_factor(A, check_finite=True)
            pi = scipy.linalg.lu_solve(lu, b)
        except (scipy.linalg.LinAlgError, scipy.linalg.LinAlgWarning, ValueError) as exc:
            raise SingularChain(f"stationary distribution is not unique: {exc}") from exc
    if not np.all(np.isfinite(pi)):
        raise SingularChain("stationary solve produced non-finite values")
    for _ in range(3):
        res = pi @ P - pi
        if np.max(np.abs(res)) <= tol:
            break
        corr = b - A @ pi
        pi = pi + scipy.linalg.lu_solve(lu, corr)
    pi = pi / pi.sum()
    if np.max(np.abs(pi @ P - pi)) > max(tol, 1e-8):
        raise SingularChain("stationary solve did not reach the requested residual")
    return pi


@dataclass(frozen=True)
class SpectralSummary:
    eigenvalues: np.ndarray  # complex, sorted by |1 - lambda|
    slem: float


def sort_by_distance_to_one(lam: np.ndarray) -> np.ndarray:
    """Order by ``|1 - lambda|``; ties by descending real, then imaginary part."""
    lam = np.asarray(lam, dtype=complex)
    order = np.lexsort((-lam.imag, -lam.real, np.abs(1.0 - lam)))
    return lam[order]


def spectral_summary(graph: CandidateGraph) -> SpectralSummary:
    ew = expected_weight_matrix(graph)
    try:
        lam = scipy.linalg.eigvals(ew)
    except scipy.linalg.LinAlgError as exc:
        raise EigensolveFailure(str(exc)) from exc
    lam = sort_by_distance_to_one(lam)
    return SpectralSummary(lam, float(np.max(np.abs(lam[1:]))) if lam.size > 1 else 0.0)


def meyer_log_bound(eigenvalues) -> float:
    """Natural log of ``2 (n^2 - 1) / prod_{(i,j) != (1,1)} (1 - l_i l_j)``.

    ``eigenvalues`` must start with the unit eigenvalue. Computed in log space
    because the product spans ``n^2 - 1`` factors.
    """
    lam = np.asarray(eigenvalues, dtype=complex)
    n = lam.size
    mu = np.multiply.outer(lam, lam).ravel()[1:]
    gap = 1.0 - mu
    if np.any(np.abs(gap) <= 1e-12):
        raise DegenerateSpectrum("an eigenvalue product equals 1; the spectral bound is infinite")
    logs = np.log(gap)
    total = logs.sum()
    # the product of a real matrix's conjugate-closed spectrum is real and positive
    wrapped = math.remainder(total.imag, 2 * math.pi)
    if abs(wrapped) > 1e-9 * max(1.0, abs(total.real)):
        raise DegenerateSpectrum(f"eigenvalue product is not real positive (phase {wrapped!r})")
    return math.log(2.0 * (n * n - 1)) - total.real


def meyer_bound(spectral: SpectralSummary | np.ndarray) -> float:
    """Upper bound on the condition number of the chain ``E W (x) E W``.

    Returns ``inf`` when the bound overflows double precision.
    """
    lam = spectral.eigenvalues if isinstance(spectral, SpectralSummary) else spectral
    log_c = meyer_log_bound(lam)
    return math.exp(log_c) if log_c < 709.0 else math.inf


def group_inverse(P: np.ndarray, pi: np.ndarray | None = None) -> np.ndarray:
    """Group inverse of ``G = I - P`` via ``(I - P + 1 pi^T)^-1 - 1 pi^T``."""
    n = P.shape[0]
    if pi is None:
        pi = stationary_distribution(P)
    one_pi = np.outer(np.ones(n), pi)
    try:
        z = scipy.linalg.inv(np.eye(n) - P + one_pi)
    except scipy.linalg.LinAlgError as exc:
        raise SingularChain(str(exc)) from exc
    return z - one_pi


def exact_condition_number(graph: CandidateGraph, *, max_nodes: int | None = None) -> float:
    """``max |g#_ij|`` for the group inverse of ``I - E W (x) E W``."""
    q = kron_expected_product(graph, max_nodes=max_nodes)
    return float(np.max(np.abs(group_inverse(q))))


@dataclass(frozen=True, eq=False)
class VarianceReport:
    mean: float
    exact_variance: float | None = None
    exact_variance_raw: float | None = None
    v1_r: np.ndarray | None = None
    v1_q: np.ndarray | None = None
    stationary_gap: float | None = None  # ||v1(R) - v1(Q)||_inf
    delta_inf_norm: float | None = None
    bound_term_a: float = 0.0
    bound_term_b: float = 0.0
    bound_term_c: float = 0.0
    log_bound_term_c: float = 0.0
    bound_total: float = 0.0
    kappa_exact: float | None = None


def exact_variance(graph: CandidateGraph, x0, *, max_nodes: int | None = None) -> VarianceReport:
    """Exact ``var(x*) = (x0 (x) x0)^T v1(R) - (x0^T v1(E W))^2``."""
    x = _as_x0(graph, x0)
    r = kron_expected_square(graph, max_nodes=max_nodes)
    pi_r = stationary_distribution(r)
    mean = expected_consensus_value(graph, x)
    raw = float(np.kron(x, x) @ pi_r - mean**2)
    return VarianceReport(mean=mean, exact_variance=max(raw, 0.0), exact_variance_raw=raw, v1_r=pi_r)


def _terms(graph: CandidateGraph, x: np.ndarray, spectral: SpectralSummary | None):
    term_a = float(np.abs(x).sum() ** 2)
    term_b = float(np.max(s_values(graph)))
    if spectral is None:
        spectral = spectral_summary(graph)
    log_c = meyer_log_bound(spectral.eigenvalues)
    term_c = math.exp(log_c) if log_c < 709.0 else math.inf
    if term_a == 0.0 or term_b == 0.0:
        total = 0.0
    else:
        total = term_a * term_b * term_c
    return term_a, term_b, term_c, log_c, total


def variance_upper_bound(
    graph: CandidateGraph,
    x0,
    *,
    spectral: SpectralSummary | None = None,
    exact: bool = True,
    max_nodes: int | None = None,
) -> VarianceReport:
    """Three-factor bound ``A * B * C`` on ``var(x*)``.

    ``A = ||x0 (x) x0||_1`` (initial conditions), ``B = max_i S_i`` (node
    properties), ``C`` the spectral factor of :func:`meyer_bound`. With
    ``exact=True`` the exact variance, both stationary distributions, the
    condition number and the intermediate links of the bound are filled in;
    this needs the Kronecker matrices and so respects ``max_nodes``.
    """
    x = _as_x0(graph, x0)
    a, b, c, log_c, total = _terms(graph, x, spectral)
    mean = expected_consensus_value(graph, x)
    if not exact:
        return VarianceReport(
            mean=mean, bound_term_a=a, bound_term_b=b, bound_term_c=c, log_bound_term_c=log_c, bound_total=total
        )
    q = kron_expected_product(graph, max_nodes=max_nodes)
    r = kron_expected_square(graph, max_nodes=max_nodes)
    _, _, norm = delta_and_norm(graph, q=q, r=r)
    pi_r = stationary_distribution(r)
    pi_q = stationary_distribution(q)
    raw = float(np.kron(x, x) @ pi_r - mean**2)
    kappa = float(np.max(np.abs(group_inverse(q, pi_q))))
    return VarianceReport(
        mean=mean,
        exact_variance=max(raw, 0.0),
        exact_variance_raw=raw,
        v1_r=pi_r,
        v1_q=pi_q,
        stationary_gap=float(np.max(np.abs(pi_r - pi_q))),
        delta_inf_norm=norm,
        bound_term_a=a,
        bound_term_b=b,
        bound_term_c=c,
        log_bound_term_c=log_c,
        bound_total=total,
        kappa_exact=kappa,
    )


@dataclass(frozen=True, eq=False)
class AnalysisReport:
    graph: CandidateGraph
    mean_weights: MeanWeights
    spectral: SpectralSummary
    variance: VarianceReport
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        v = self.variance
        return {
            "nodes": self.graph.n,
            "probs": [float(p) for p in self.graph.probs],
            "degrees": [int(d) for d in self.graph.degrees],
            "mean": v.mean,
            "exact_variance": v.exact_variance,
            "bound_term_a": v.bound_term_a,
            "bound_term_b": v.bound_term_b,
            "bound_term_c": v.bound_term_c,
            "log_bound_term_c": v.log_bound_term_c,
            "bound_total": v.bound_total,
            "kappa_exact": v.kappa_exact,
            "stationary_gap": v.stationary_gap,
            "delta_inf_norm": v.delta_inf_norm,
            "slem": self.spectral.slem,
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.spectral.eigenvalues],
            "weights": [float(w) for w in self.mean_weights.v1_ew],
            "notes": list(self.notes),
        }


def analyze(graph: CandidateGraph, x0, *, max_nodes: int | None = None) -> AnalysisReport:
    """Everything the library can say about ``x*`` without sampling.

    Over the Kronecker budget the exact variance and condition number are
    left as ``None`` and a note is recorded.
    """
    spectral = spectral_summary(graph)
    notes = []
    try:
        var = variance_upper_bound(graph, x0, spectral=spectral, max_nodes=max_nodes)
    except BudgetExceeded as exc:
        var = variance_upper_bound(graph, x0, spectral=spectral, exact=False)
        notes.append(str(exc))
    return AnalysisReport(graph, dominant_left_eigvec_closed(graph), spectral, var, notes)
