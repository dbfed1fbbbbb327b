"""
Quantitative modal logic
========================

Formulas take values in [0, inf]: zero means satisfied, larger means further
from it.
"""

# %%
from wmts_quant import fixtures, modal_dist
from wmts_quant.logic import evaluate, evaluate_at, format_formula, parse_formula

spec = fixtures.email_spec()
impls = fixtures.email_impls()

# %%
# "A receive step with weight in [1,3] is guaranteed."
phi = parse_formula("<receive[1,3]> tt")
for name, impl in impls.items():
    print(name, evaluate_at(phi, impl))

# %%
# Boxes bound every possible step; conjunction takes the worst part.
psi = parse_formula("[receive[1,3]] <deliver[1,4]> tt & <receive[1,3]> tt")
print(format_formula(psi))
print(evaluate(psi, spec))

# %%
# A formula cannot tell apart systems closer than their distance.
d = modal_dist(impls["I2"], spec)[0]
print(evaluate_at(psi, impls["I2"]), "<=", evaluate_at(psi, spec), "+", d)
