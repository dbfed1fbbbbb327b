import json
import math
import random

import pytest

from wmts_quant import fixtures
from wmts_quant.distance import modal_dist
from wmts_quant.games import (
    SINK1,
    GameGraph,
    Strategy,
    discounted_value,
    game_modal_dist,
    reduce_to_game,
    replay,
    rescale,
)
from wmts_quant.model import Wmts

from generators import perturb, random_wmts, rngs

INF = math.inf


def _cycle(c):
    return GameGraph(frozenset({"u"}), frozenset({"v"}), (("u", 0.0, "v"), ("v", c, "u")), "u")


@pytest.mark.parametrize("lam_g", [0.3, 0.9, 0.99])
def test_two_vertex_cycle_closed_form(lam_g):
    values, _, _ = discounted_value(_cycle(2.0), lam_g, 1e-12)
    assert values["u"] == pytest.approx(2 * lam_g / (1 - lam_g**2), abs=1e-9)
    assert values["v"] == pytest.approx(2 / (1 - lam_g**2), abs=1e-9)


def test_zero_game():
    g = GameGraph(frozenset({"u", "w"}), frozenset({"v"}), (("u", 0.0, "v"), ("w", 0.0, "v"), ("v", 0.0, "u"), ("v", 0.0, "w")), "u")
    values, th1, th2 = discounted_value(g, 0.5)
    assert set(values.values()) == {0.0}
    assert replay(g, "u", th1, th2, 0.5) == 0


def test_players_pick_their_best_edges():
    g = GameGraph(
        frozenset({"u", "x", "y"}),
        frozenset({"v", "w"}),
        (("u", 1.0, "v"), ("u", 0.0, "w"), ("v", 0.0, "x"), ("v", 5.0, "y"), ("w", 3.0, "x"), ("x", 0.0, "w"), ("y", 0.0, "w")),
        "u",
    )
    values, th1, th2 = discounted_value(g, 0.5, 1e-12)
    assert th2.choice["v"] == (0.0, "x")
    assert replay(g, "u", th1, th2, 0.5) == pytest.approx(values["u"], abs=1e-9)


def test_graph_validation():
    with pytest.raises(ValueError):
        GameGraph(frozenset({"u"}), frozenset({"v"}), (("u", 0.0, "v"),), "u")
    with pytest.raises(ValueError):
        GameGraph(frozenset({"u"}), frozenset({"v"}), (("u", 0.0, "u"), ("v", 0.0, "u")), "u")
    with pytest.raises(ValueError):
        GameGraph(frozenset({"u"}), frozenset({"v"}), (("u", 0.0, "v"), ("v", 0.0, "u")), "v")
    with pytest.raises(ValueError):
        Strategy(1, {"u": (1.0, "v")}).check(_cycle(0.0))
    Strategy(1, {"u": (0.0, "v")}).check(_cycle(0.0))


def test_branching_example_through_the_game():
    i1, i2 = fixtures.branching_pair()
    d, _, g = game_modal_dist(i1, i2, 0.9)
    assert d == pytest.approx(18, abs=1e-6)
    assert g.meta["game_lambda"] == pytest.approx(math.sqrt(0.9))


def test_disjoint_actions_reach_the_sink():
    s1 = Wmts.build(["x"], "x", may=[("x", "a", 0, "x")])
    s2 = Wmts.build(["y"], "y", may=[("y", "b", 0, "y")])
    g, start = reduce_to_game(s1, s2)
    assert SINK1 in g.v1
    assert game_modal_dist(s1, s2)[0] == INF
    assert modal_dist(s1, s2)[0] == INF


def test_no_challenge_means_zero():
    s1 = Wmts.build(["x"], "x")
    s2 = Wmts.build(["y"], "y", may=[("y", "b", 0, "y")])
    assert game_modal_dist(s1, s2)[0] == 0


def test_to_dict_is_json():
    g, _ = reduce_to_game(*fixtures.determinization_pair())
    data = json.loads(json.dumps(g.to_dict()))
    assert data["start"] == "(s0,d0)"
    assert data["game_lambda"] == pytest.approx(math.sqrt(0.9))
    names = set(data["player1"]) | set(data["player2"])
    assert all(e["src"] in names and e["dst"] in names for e in data["edges"])


def _mix(count, seed):
    out = []
    for i, rng in enumerate(rngs(count, seed)):
        if i % 2 == 0:
            a = random_wmts(rng, max_states=6, n_actions=3)
            out.append((a, perturb(rng, a)))
        else:
            a = random_wmts(rng, max_states=6, n_actions=1)
            out.append((a, random_wmts(rng, max_states=6, n_actions=1, prefix="t")))
    return out


def test_game_agrees_with_fixed_point_and_fixes_the_rescaling():
    plain_ok = root_ok = finite = 0
    for a, b in _mix(100, 21):
        d = modal_dist(a, b, 0.9, 1e-9)[0]
        g, v0 = reduce_to_game(a, b, 0.9)
        values, _, _ = discounted_value(g, g.meta["game_lambda"], 1e-10)
        got, _, _ = game_modal_dist(a, b, 0.9, 1e-10)
        if d == INF:
            assert got == INF
            continue
        finite += 1
        assert abs(got - d) <= 2e-6
        root_ok += abs(rescale(values[v0], 0.9) - d) <= 2e-6
        plain_ok += abs(values[v0] - d) <= 2e-6
    assert finite >= 50 and root_ok == finite
    # reading the game value unscaled is wrong whenever the distance is positive
    assert plain_ok < finite


def test_strategies_are_optimal():
    lam_g = math.sqrt(0.9)
    for (a, b), rng in zip(_mix(40, 22), rngs(40, 23)):
        g, v0 = reduce_to_game(a, b, 0.9)
        values, th1, th2 = discounted_value(g, lam_g, 1e-11)
        th1.check(g)
        th2.check(g)
        scale = max(1.0, abs(values[v0]))
        assert replay(g, v0, th1, th2, lam_g) == pytest.approx(values[v0], abs=1e-7 * scale)
        # deviating never helps the deviator
        alt1 = Strategy(1, {v: rng.choice(g.out(v)) for v in g.v1})
        alt2 = Strategy(2, {v: rng.choice(g.out(v)) for v in g.v2})
        assert replay(g, v0, alt1, th2, lam_g) <= values[v0] + 1e-7 * scale
        assert replay(g, v0, th1, alt2, lam_g) >= values[v0] - 1e-7 * scale


def test_values_are_a_fixed_point():
    lam_g = 0.8
    for a, b in _mix(30, 24):
        g, _ = reduce_to_game(a, b, 0.64)
        values, _, _ = discounted_value(g, lam_g, 1e-10)
        for v in g.vertices:
            opts = [w + lam_g * values[t] for w, t in g.out(v)]
            target = max(opts) if v in g.v1 else min(opts)
            assert values[v] == pytest.approx(target, rel=1e-8, abs=1e-8)


def test_raising_weights_never_lowers_values():
    for a, b in _mix(30, 25):
        g, v0 = reduce_to_game(a, b, 0.9)
        bumped = GameGraph(g.v1, g.v2, tuple((u, w + (1.0 if u in g.v2 else 0.0), v) for u, w, v in g.edges), g.start)
        lo = discounted_value(g, 0.9, 1e-9)[0]
        hi = discounted_value(bumped, 0.9, 1e-9)[0]
        assert all(hi[v] >= lo[v] - 1e-6 for v in g.vertices)


def test_random_lambda_matches():
    for (a, b), rng in zip(_mix(20, 26), rngs(20, 27)):
        lam = random.Random(rng.random()).choice([0.5, 0.8, 0.95])
        d = modal_dist(a, b, lam)[0]
        got = game_modal_dist(a, b, lam, 1e-10)[0]
        assert (d == got == INF) or abs(d - got) <= 2e-6
