"""
Expected consensus on a chain of leaders
========================================

Three leaders are wired in a path and each leads a star of followers
(4, 8 and 16 of them). Followers listen with probability 1/2; a leader
listens with probability one over its number of followers, so the big
leader rarely hears anyone and ends up with a lot of influence.

We compare the closed-form expectation of the consensus value with a
Monte Carlo ensemble.
"""

import numpy as np

from randconsensus import Scenario, expected_consensus_value, leader_follower_chain, run_ensemble
from randconsensus import scaled_inverse_degree, spectral_summary
from randconsensus.analysis import dominant_left_eigvec_closed
from randconsensus.graph import leader_nodes

counts = (4, 8, 16)
g = leader_follower_chain(counts, 0.5, scaled_inverse_degree(1.0, "followers"), ordering="interleaved")
x0 = np.arange(1, g.n + 1) / g.n
print(f"{g.n} nodes, {len(g.edges())} edges")

###############################################################################
# The slowest modes of the expected weight matrix. The 0.75 belongs to the
# followers, which average with their leader half of the time.
lam = spectral_summary(g).eigenvalues
print("eigenvalues nearest 1:", np.round(lam[:4].real, 4))

###############################################################################
# Stationary weights of the expected matrix decide where consensus lands.
v1 = dominant_left_eigvec_closed(g).v1_ew
for k, v in enumerate(leader_nodes(counts, "interleaved")):
    print(f"leader {k + 1} (node {v}): weight {v1[v]:.4f}")
print(f"a single follower of leader 1: weight {v1[1]:.4f}")

###############################################################################
# Closed form against 2000 sampled trajectories.
mean = expected_consensus_value(g, x0)
stats = run_ensemble(Scenario(g, x0, trials=2000, master_seed=1))
print(f"closed form {mean:.4f}; simulated {stats.mean:.4f} +/- {stats.standard_error:.4f}")
print(f"plain average of x0 would be {x0.mean():.4f}")
