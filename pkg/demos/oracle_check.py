"""
Checking the closed forms by brute force
========================================

On a triangle with a tail there are 8 directed candidate edges, so only
256 possible realizations. Summing over all of them gives the exact first
and second moments of the weight matrix with no formula involved.
"""

import numpy as np

from randconsensus import build_graph, enumerate_expectations, verify_closed_forms
from randconsensus.moments import expected_weight_matrix, kron_expected_square

g = build_graph([(0, 1), (0, 2), (1, 2), (2, 3)], [0.3, 0.5, 0.7, 0.25])
ew, r = enumerate_expectations(g)

print("E W by enumeration:")
print(np.round(ew, 4))
print("max deviation of closed-form E W:", np.max(np.abs(expected_weight_matrix(g) - ew)))
print("max deviation of closed-form E[W (x) W]:", np.max(np.abs(kron_expected_square(g) - r)))

###############################################################################
# The same comparison, plus the mean and variance of the consensus value,
# packaged as one report.
rep = verify_closed_forms(g)
for key, value in rep.to_dict().items():
    print(f"{key:>20s}: {value}")
