"""
Refinement distances
====================

How far is an implementation from a specification?
"""

# %%
# A small mail server: receive, then deliver, with an optional check step.
# Every transition carries an interval of admissible weights.
from wmts_quant import fixtures, modal_dist, impl_dist, refines_eps

spec = fixtures.email_spec()
print(spec)

# %%
# Four candidate implementations.  The first one checks forever, the second
# takes too long to receive, the third detours through a check that is a bit
# too fast, the fourth is fine.
impls = fixtures.email_impls()
for name, impl in impls.items():
    d, table = modal_dist(impl, spec, lam=0.9, exact=True)
    print(name, d, table.exact_value)

# %%
# Every finite value comes with a certified error bound from value iteration.
d, table = modal_dist(impls["I3"], spec)
print(table.error_bound, table.iterations)

# %%
# Discounting matters: with a smaller lambda the future weighs less.
for lam in (0.5, 0.9, 0.99):
    print(lam, modal_dist(impls["I2"], spec, lam)[0])

# %%
# Between two implementations the distance is a pseudometric.
i1, i2 = fixtures.branching_pair()
print(impl_dist(i1, i2)[0], impl_dist(i2, i1)[0])

# %%
# A yes/no question with a budget.
print(refines_eps(impls["I2"], spec, 5.3), refines_eps(impls["I2"], spec, 5.0))
