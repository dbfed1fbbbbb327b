import itertools
import math
import random
from fractions import Fraction

import pytest

from wmts_quant import fixtures
from wmts_quant.distance import (
    RefinementFamily,
    check_lambda,
    check_refinement_family,
    family_from_table,
    finite_pairs,
    impl_dist,
    impl_label_dist,
    label_dist,
    modal_dist,
    refines_eps,
)
from wmts_quant.model import ImplLabel, Wmts, label, label_refines

from generators import perturb, random_impl, random_wmts, rngs
from oracles import bisimilar, kleene_modal

INF = math.inf
LAM = 0.9
TOL = 1e-9


def test_impl_label_dist():
    assert impl_label_dist(ImplLabel("a", 3), ImplLabel("a", 7)) == 4
    assert impl_label_dist(ImplLabel("a", 5), ImplLabel("a", 5)) == 0
    assert impl_label_dist(ImplLabel("a", 0), ImplLabel("b", 0)) == INF


def test_label_dist_examples():
    assert label_dist(label("a", 4, 4), label("a", 1, 3)) == 1
    assert label_dist(label("a", 1, 3), label("a", 1, 3)) == 0
    assert label_dist(label("a", 3, 6), label("a", 2, 3)) == 3
    assert label_dist(label("a", 1, 3), label("b", 1, 3)) == INF


def test_label_dist_infinite_bounds():
    assert label_dist(label("a", -INF, 0), label("a", -INF, 2)) == 0
    assert label_dist(label("a", -INF, 0), label("a", -5, 2)) == INF
    assert label_dist(label("a", 0, INF), label("a", 0, 9)) == INF
    assert label_dist(label("a", 3, 4), label("a", -INF, INF)) == 0
    assert label_dist(label("a", -INF, INF), label("a", -INF, INF)) == 0


BOUND_LO = [-INF] + list(range(-4, 5))
BOUND_HI = list(range(-4, 5)) + [INF]
GRID = [label("a", lo, hi) for lo in BOUND_LO for hi in BOUND_HI if lo <= hi]


def test_label_dist_triangle_exhaustive():
    d = {(k, l): label_dist(k, l) for k in GRID for l in GRID}
    for k, l, m in itertools.product(GRID, repeat=3):
        assert d[(k, m)] <= d[(k, l)] + d[(l, m)]


def test_label_dist_zero_iff_refines():
    for k, l in itertools.product(GRID, repeat=2):
        assert (label_dist(k, l) == 0) == label_refines(k, l)
        assert label_dist(k, k) == 0


def test_check_lambda():
    for bad in (0, 1, -0.5, 1.5):
        with pytest.raises(ValueError):
            check_lambda(bad)
    assert check_lambda(0.5) == 0.5


# --------------------------------------------------------------------------
# figure regressions


def test_branching_distance_example():
    i1, i2 = fixtures.branching_pair()
    d, table = impl_dist(i1, i2, LAM, exact=True)
    assert d == pytest.approx(18, abs=1e-6)
    assert table[("k1", "i2")] == pytest.approx(20, abs=1e-6)
    assert table.exact_value == 18
    assert table.exact[("k1", "i2")] == 20


def test_branching_pair_infinite_entries():
    i1, i2 = fixtures.branching_pair()
    fp = finite_pairs(i1, i2, all_pairs=True)
    for p in [("i1", "j2"), ("j1", "i2"), ("k1", "j2")]:
        assert p not in fp
    _, table = impl_dist(i1, i2, LAM, all_pairs=True)
    assert table[("i1", "j2")] == INF
    assert table[("j1", "j2")] == 0


def test_impl_dist_rejects_specs():
    with pytest.raises(ValueError):
        impl_dist(fixtures.email_spec(), fixtures.email_spec())


def test_determinization_example_distances():
    s, d = fixtures.determinization_pair()
    v, table = modal_dist(s, d, LAM, exact=True)
    assert v == pytest.approx(3, abs=1e-6)
    assert table.exact_value == 3


def test_conjunction_example_distances():
    s, s1, s2 = fixtures.conjunction_triple()
    assert modal_dist(s, s1, LAM)[0] == pytest.approx(1, abs=1e-6)
    assert modal_dist(s, s2, LAM)[0] == pytest.approx(1, abs=1e-6)


def test_email_implementations():
    spec = fixtures.email_spec()
    impls = fixtures.email_impls()
    values = {k: modal_dist(i, spec, LAM, exact=True)[1] for k, i in impls.items()}
    assert values["I1"].value == INF
    assert values["I2"].exact_value == Fraction(100, 19)
    assert values["I3"].exact_value == Fraction(810, 271)
    assert values["I4"].value == 0
    assert values["I2"].value == pytest.approx(1 / (1 - LAM**2), abs=1e-9)
    assert values["I3"].value == pytest.approx(LAM**2 / (1 - LAM**3), abs=1e-9)


def test_email_values_match_naive_iteration():
    spec = fixtures.email_spec()
    for k, i in fixtures.email_impls().items():
        ref = kleene_modal(i, spec, LAM)[(i.initial, spec.initial)]
        got = modal_dist(i, spec, LAM)[0]
        assert got == ref or abs(got - ref) < 1e-9, k


def test_incompleteness_pair_has_finite_modal_distance():
    # each half of the [0,1] step is matched by one branch at label distance 1
    s1, s2 = fixtures.incompleteness_pair()
    assert ("s1", "s2") in finite_pairs(s1, s2)
    d, table = modal_dist(s1, s2, LAM, exact=True)
    assert table.exact_value == 1


def test_refines_eps():
    spec = fixtures.email_spec()
    impls = fixtures.email_impls()
    assert refines_eps(impls["I4"], spec, 0)
    assert not refines_eps(impls["I1"], spec, 1e12)
    assert refines_eps(spec, spec, 0)
    assert refines_eps(impls["I2"], spec, 5.27)
    assert not refines_eps(impls["I2"], spec, 5.26)


def test_identity_distance_and_full_finite_diagonal():
    spec = fixtures.email_spec()
    _, table = modal_dist(spec, spec, LAM, all_pairs=True)
    for x in spec.states:
        assert table[(x, x)] == 0
    assert {(x, x) for x in spec.states} <= finite_pairs(spec, spec, all_pairs=True)


def test_empty_conventions():
    lonely = Wmts.build(["x"], "x")
    stepper = Wmts.build(["y", "z"], "y", may=[("y", "a", 0, "z")])
    needy = Wmts.build(["y", "z"], "y", may=[("y", "a", 0, "z")], must=[("y", "a", 0, "z")])
    assert modal_dist(lonely, stepper)[0] == 0
    assert modal_dist(stepper, lonely)[0] == INF
    assert modal_dist(lonely, needy)[0] == INF


# --------------------------------------------------------------------------
# refinement families


def test_identity_family_is_valid():
    s = fixtures.email_spec()
    ident = frozenset((x, x) for x in s.states)
    fam = RefinementFamily({0.0: ident, 1.0: ident, 5.0: ident})
    assert check_refinement_family(fam, s, s, LAM).ok


def test_family_from_table_is_valid():
    spec = fixtures.email_spec()
    for i in fixtures.email_impls().values():
        _, table = modal_dist(i, spec, LAM)
        diag = check_refinement_family(family_from_table(table), i, spec, LAM, slack=1e-8)
        assert diag.ok, [str(e) for e in diag.errors]
        assert not diag.warnings


def test_family_too_small_is_rejected():
    s, d = fixtures.determinization_pair()
    fam = RefinementFamily({0.0: frozenset({("s0", "d0")})})
    diag = check_refinement_family(fam, s, d, LAM)
    assert not diag.ok
    first = diag.errors[0]
    assert first.code == "may-unmatched"
    assert any(e.ref[2][1] == label("a", 5, 6) for e in diag.errors)


def test_family_not_upward_closed_warns():
    s = fixtures.email_spec()
    fam = RefinementFamily({0.0: frozenset({("s0", "s0")}), 1.0: frozenset()})
    assert [w.code for w in check_refinement_family(fam, s, s, LAM).warnings] == ["not-upward-closed"]


# --------------------------------------------------------------------------
# properties on random instances


def test_agrees_with_naive_iteration_on_all_pairs():
    for rng in rngs(150, 11):
        a = random_wmts(rng, max_states=5, n_actions=2, p_inf=0.1)
        b = perturb(rng, a) if rng.random() < 0.5 else random_wmts(rng, max_states=5, prefix="t", p_inf=0.1)
        _, table = modal_dist(a, b, LAM, all_pairs=True)
        ref = kleene_modal(a, b, LAM)
        for p, v in ref.items():
            assert table[p] == v or abs(table[p] - v) < 1e-7


def test_hemimetric_laws():
    finite = 0
    for rng in rngs(200, 12):
        s1 = random_wmts(rng, max_states=6, n_actions=3)
        s2 = perturb(rng, s1, "t")
        s3 = perturb(rng, s2, "u") if rng.random() < 0.7 else random_wmts(rng, max_states=6, n_actions=3, prefix="u")
        assert modal_dist(s1, s1, LAM)[0] == 0
        d12, d23, d13 = modal_dist(s1, s2)[0], modal_dist(s2, s3)[0], modal_dist(s1, s3)[0]
        assert d12 + d23 >= d13 - 2 * TOL
        finite += d12 + d23 < INF
    assert finite > 50


def test_pseudometric_laws():
    for rng in rngs(200, 13):
        i1, i2, i3 = (random_impl(rng, max_states=4, n_actions=1, prefix=p) for p in "ijk")
        d12, d21 = impl_dist(i1, i2)[0], impl_dist(i2, i1)[0]
        assert d12 == d21 or abs(d12 - d21) <= 2 * TOL
        assert impl_dist(i1, i1)[0] == 0
        assert d12 + impl_dist(i2, i3)[0] >= impl_dist(i1, i3)[0] - 2 * TOL


def test_impl_dist_equals_modal_dist_on_implementations():
    for rng in rngs(100, 14):
        i1, i2 = random_impl(rng, prefix="i"), random_impl(rng, prefix="j")
        a, b = impl_dist(i1, i2)[0], modal_dist(i1, i2)[0]
        assert a == b or abs(a - b) < 2 * TOL


def test_certified_error_bound():
    for rng in rngs(100, 15):
        a = random_wmts(rng, max_states=6)
        b = perturb(rng, a)
        for tol in (1e-3, 1e-6, 1e-9):
            d, table = modal_dist(a, b, LAM, tol)
            assert table.error_bound <= tol
            if d < INF:
                exact = modal_dist(a, b, LAM, exact=True)[1].exact_value
                assert abs(d - float(exact)) <= tol + 1e-12


def test_finite_pairs_match_threshold():
    for rng in rngs(150, 16):
        a = random_wmts(rng, max_states=5, p_inf=0.1)
        b = random_wmts(rng, max_states=5, prefix="t", p_inf=0.1)
        fp = finite_pairs(a, b, all_pairs=True)
        _, table = modal_dist(a, b, LAM, all_pairs=True)
        ref = kleene_modal(a, b, LAM, rounds=400)
        bound = table.finite_threshold()
        for p, v in table.entries.items():
            assert (p in fp) == (v < INF)
            # plain iteration from zero stays below the bound exactly on finite pairs
            assert (ref[p] <= bound + 1e-9) == (p in fp)


def _split_copy(rng, impl):
    """A bisimilar implementation: every state doubled, successors picked at random."""
    states = [f"{x}{c}" for x in impl.states for c in "LR"]
    trans = []
    for x in impl.states:
        for k, t in impl.must_from(x):
            for c in "LR":
                trans.append((f"{x}{c}", k.action, k.lo, f"{t}{rng.choice('LR')}"))
    return Wmts.implementation(states, impl.initial + "L", trans)


def test_zero_both_ways_iff_bisimilar():
    seen = {True: 0, False: 0}
    for rng in rngs(200, 17):
        i1 = random_impl(rng, max_states=3, n_actions=1, lo=0, hi=1)
        i2 = _split_copy(rng, i1) if rng.random() < 0.4 else random_impl(rng, max_states=3, n_actions=1, lo=0, hi=1, prefix="j")
        zero = modal_dist(i1, i2)[0] == 0 and modal_dist(i2, i1)[0] == 0
        assert zero == bisimilar(i1, i2)
        seen[zero] += 1
    assert min(seen.values()) > 20


def test_exact_mode_on_random_instances():
    for rng in rngs(80, 18):
        a = random_wmts(rng, max_states=5)
        b = perturb(rng, a)
        lam = random.Random(rng.random()).choice([0.5, 0.75, 0.9, 0.99])
        d, table = modal_dist(a, b, lam, exact=True)
        if d < INF:
            assert isinstance(table.exact_value, Fraction)
            assert abs(float(table.exact_value) - d) < 1e-7
        else:
            assert table.exact_value == INF
