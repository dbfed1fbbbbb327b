"""
Building specifications from pieces
===================================
"""

# %%
from wmts_quant import fixtures, modal_dist
from wmts_quant.operators import compose, conjoin, determinize, is_relaxation, quotient, widen

# %%
# Widening loosens every interval; the result is a relaxation whose distance
# back to the original is bounded by delta / (1 - lambda).
s, i = fixtures.widening_example()
wide = widen(s, 1)
print(wide)
print(modal_dist(wide, s)[0], is_relaxation(s, wide, 10))

# %%
# Composition adds weights of synchronised steps.
s1, s2, s3 = fixtures.quotient_triple()
print(compose(s2, s3))

# %%
# The quotient is the most general missing component, when it exists.
# Here it is a single state with no transitions.
print(quotient(s1, s2))

# %%
# Determinization merges same-action branches into one hull.
s, d = fixtures.determinization_pair()
ds = determinize(s)
print(ds)
print(modal_dist(s, d)[0], modal_dist(ds, d)[0])

# %%
# Conjunction of deterministic specifications intersects intervals.
s, a, b = fixtures.conjunction_triple()
c = conjoin(a, b)
print(c)
print(modal_dist(s, a)[0], modal_dist(s, b)[0], modal_dist(s, c)[0])
