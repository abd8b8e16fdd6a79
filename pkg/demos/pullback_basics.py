"""Pull a model back through a map jet and read off the graph germ.

Run: python demos/pullback_basics.py
"""
from crjets import CrSignature, MapJet, AlgebraicModel, heisenberg_model, identity_map, pullback
from crjets.parser import parse_series
from crjets.series import SeriesVector

sig = CrSignature(m=1, d=1, mprime=1, nu=2, k=6)

# The identity map sends the sphere-like model Im w' = |z'|^2 to itself,
# so the germ is the model's own graph.
result = pullback(identity_map(sig), heisenberg_model(sig))
print("identity into Im w' = |z'|^2:   v =", result.germ.to_text())

# A map with a quadratic term in z.  The germ picks up the extra terms
# that f = z + z^2 feeds into |f|^2.
src = sig.source_space
F = MapJet(sig, SeriesVector([parse_series("z1 + z1^2", src, sig.k)]), SeriesVector([parse_series("w1", src, sig.k)]))
print("f = z + z^2:                    v =", pullback(F, heisenberg_model(sig)).germ.to_text())

# Scaling w by 2 halves the germ: normalization divides g by B = 2 and
# rescales the model to match.
F = MapJet(sig, SeriesVector([parse_series("z1", src, sig.k)]), SeriesVector([parse_series("2*w1", src, sig.k)]))
print("g = 2w:                         v =", pullback(F, heisenberg_model(sig)).germ.to_text())

# A model whose equation involves v itself needs the fixed-point
# iteration: v = x^2 + v^2 is solved by the Catalan generating function.
sig12 = CrSignature(m=1, d=1, mprime=1, nu=2, k=12)
model = AlgebraicModel(sig12, SeriesVector([parse_series("-(z1 + ~z1)^2/4 + (w1 - ~w1)^2/4", sig12.target_space, 2)]))
result = pullback(identity_map(sig12), model)
print("v = x^2 + v^2 at order 12:      v =", result.germ.to_text())
print("iterations until stable:", result.iterations_used)
