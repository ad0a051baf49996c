"""
How loose is the variance bound?
================================

The variance of the consensus value is bounded by a product of three
factors: one from the initial condition, one from the listen
probabilities, one from the spectrum of the expected chain. Here we walk
the chain of inequalities on a small graph and watch each link.
"""

import numpy as np

from randconsensus import build_graph, variance_upper_bound

g = build_graph([(0, 1), (0, 2), (1, 2), (2, 3), (3, 4)], [0.3, 0.5, 0.7, 0.4, 0.6])
x0 = np.linspace(0.0, 1.0, g.n)
rep = variance_upper_bound(g, x0)

a = rep.bound_term_a
links = {
    "exact variance": rep.exact_variance,
    "A * |v1(R) - v1(Q)|": a * rep.stationary_gap,
    "A * kappa * |R - Q|": a * rep.kappa_exact * rep.delta_inf_norm,
    "A * B * C": rep.bound_total,
}
for name, value in links.items():
    print(f"{name:>22s}  {value:.3e}")

###############################################################################
# Almost all of the slack comes from the spectral factor, which replaces the
# exact condition number by an eigenvalue product.
print(f"kappa {rep.kappa_exact:.3g}  vs  C {rep.bound_term_c:.3g}")

###############################################################################
# Making every node listen more reliably shrinks B, and with it the bound.
for p in (0.3, 0.6, 0.9):
    h = build_graph(g.edges(), [p] * g.n)
    r = variance_upper_bound(h, x0)
    print(f"p={p}: B={r.bound_term_b:.4f}  var={r.exact_variance:.2e}  bound={r.bound_total:.2e}")
