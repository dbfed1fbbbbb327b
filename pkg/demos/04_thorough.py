"""
Comparing implementation sets
=============================

The thorough distance asks how far the worst implementation of one
specification is from the best-matching implementation of another.
"""

# %%
from wmts_quant import fixtures, modal_dist
from wmts_quant.thorough import UnrollBudget, enum_implementations, in_extended_semantics, thorough_dist_approx

# %%
# Implementations are enumerated as trees up to a depth.
s1, s2 = fixtures.incompleteness_pair()
for impl in enum_implementations(s1, UnrollBudget(depth=1)):
    print(sorted((k.action, k.lo) for _, k, _ in impl.must))

# %%
# The estimate is an interval that shrinks with the depth.
for depth in (1, 2, 4):
    print(depth, thorough_dist_approx(s1, s2, budget=UnrollBudget(depth=depth)))

# %%
# The modal distance is only an upper bound on it.
print(modal_dist(s1, s2)[0])

# %%
# Extended semantics: implementations within eps of refining.
s, i = fixtures.widening_example()
print(in_extended_semantics(i, s, 10), in_extended_semantics(i, s, 5))
