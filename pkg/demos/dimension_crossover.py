"""Compare the number of free parameters with the size of the germ space.

The germ space grows like k^3 while map jets grow like k^2, so past some
order most germs cannot come from any map.  For one complex and one real
CR direction into C^2 with quadratic models the crossover sits at k = 10.

Run: python demos/dimension_crossover.py
"""
from crjets.dimension import crossover_order, dim_source_maps, dim_source_models, dim_target

m, d, mprime, nu = 1, 1, 1, 2
models = dim_source_models(d, mprime, nu)

print(f"{'k':>3} {'germs':>7} {'maps':>6} {'models':>7} {'surplus':>8}")
for k in range(2, 16):
    germs, maps = dim_target(m, d, k), dim_source_maps(m, d, mprime, k)
    print(f"{k:>3} {germs:>7} {maps:>6} {models:>7} {germs - maps - models:>8}")

report = crossover_order(m, d, mprime, nu, 100)
print()
print(f"first order with more germ coordinates than parameters: k* = {report.k}")
print(report.to_table())
