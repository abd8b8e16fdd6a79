"""Numerical rank of the map from (map jet, model) to order-k germ.

At k = 10 the germ space has 282 real coordinates but only 266 parameters
feed it, so the Jacobian cannot have full row rank.  Generic points show
a clear drop well below 266.  Expect about two minutes per point.

Run: python demos/rank_at_crossover.py [k]
"""
import sys

import numpy as np

from crjets import CrSignature
from crjets.experiments import ExperimentConfig, jacobian_rank

k = int(sys.argv[1]) if len(sys.argv) > 1 else 10
config = ExperimentConfig(CrSignature(1, 1, 1, 2, k), seed=0, coefficient_bound=3)
report = jacobian_rank(config)

sv = np.array(report.singular_values)
print(f"Jacobian {report.jacobian_rows} x {report.jacobian_cols}")
print(f"numerical rank {report.numerical_rank} (raw, unscaled: {report.raw_numerical_rank})")
gap = report.numerical_rank
if 0 < gap < len(sv):
    print(f"singular values around the cut: {sv[gap - 2:gap + 2] / sv[0]}")
print("rank deficient:", report.rank_deficient)
