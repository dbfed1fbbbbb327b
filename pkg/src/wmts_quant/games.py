"""Two-player discounted games and the game view of modal refinement distance.

Player 1 maximizes and Player 2 minimizes the discounted sum of edge weights.
In the game built by :func:`reduce_to_game`, Player 1 picks a transition to
challenge (weight 0) and Player 2 answers it (weight = label distance).  One
round therefore spans two edges, so the game is played with discount
``sqrt(lam)`` and its start value equals ``sqrt(lam) * d_m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distance import DEFAULT_LAMBDA, DEFAULT_TOL, check_lambda, label_dist
from .model import Wmts

SINK1 = ("#sink", 1)
SINK2 = ("#sink", 2)


def _key(v) -> str:
    return vertex_name(v)


def vertex_name(v) -> str:
    if v == SINK1:
        return "sink1"
    if v == SINK2:
        return "sink2"
    return "(" + ",".join(str(x) for x in v) + ")"


@dataclass(frozen=True)
class GameGraph:
    v1: frozenset
    v2: frozenset
    edges: tuple  # (src, weight, dst)
    start: object
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.v1 & self.v2:
            raise ValueError("player vertex sets overlap")
        if self.start not in self.v1:
            raise ValueError("start vertex must belong to Player 1")
        for u, _, v in self.edges:
            if not ((u in self.v1 and v in self.v2) or (u in self.v2 and v in self.v1)):
                raise ValueError(f"edge {u} -> {v} does not cross the partition")
        srcs = {u for u, _, _ in self.edges}
        blocked = (self.v1 | self.v2) - srcs
        if blocked:
            raise ValueError(f"blocked vertices: {sorted(map(_key, blocked))}")

    @property
    def vertices(self) -> list:
        return sorted(self.v1 | self.v2, key=_key)

    def out(self, v) -> list:
        return self._out.get(v, [])

    @property
    def _out(self) -> dict:
        cache = self.__dict__.get("_out_cache")
        if cache is None:
            cache = {}
            for u, w, v in self.edges:
                cache.setdefault(u, []).append((w, v))
            for u in cache:
                cache[u].sort(key=lambda e: (_key(e[1]), e[0]))
            object.__setattr__(self, "_out_cache", cache)
        return cache

    def to_dict(self) -> dict:
        return {
            "start": vertex_name(self.start),
            "player1": [vertex_name(v) for v in sorted(self.v1, key=_key)],
            "player2": [vertex_name(v) for v in sorted(self.v2, key=_key)],
            "edges": [
                {"src": vertex_name(u), "weight": w, "dst": vertex_name(v)}
                for u, w, v in sorted(self.edges, key=lambda e: (_key(e[0]), _key(e[2]), e[1]))
            ],
            **{k: v for k, v in self.meta.items()},
        }


@dataclass(frozen=True)
class Strategy:
    player: int
    choice: dict  # vertex -> (weight, successor)

    def check(self, g: GameGraph) -> None:
        own = g.v1 if self.player == 1 else g.v2
        for v, e in self.choice.items():
            if v not in own or e not in g.out(v):
                raise ValueError(f"strategy move {v} -> {e} is not an edge of player {self.player}")


def discounted_value(g: GameGraph, lam_g: float, tol: float = DEFAULT_TOL) -> tuple:
    """Values of all vertices and a pair of optimal positional strategies.

    Value iteration from zero with the certified stopping rule; ties in the
    strategies go to the first edge in (successor, weight) order.
    """
    lam_g = check_lambda(lam_g)
    verts = g.vertices
    idx = {v: i for i, v in enumerate(verts)}
    n = len(verts)
    w, dst, starts = [], [], []
    for v in verts:
        starts.append(len(w))
        for wt, t in g.out(v):
            w.append(wt)
            dst.append(idx[t])
    w = np.asarray(w, dtype=float)
    dst = np.asarray(dst, dtype=np.intp)
    starts = np.asarray(starts, dtype=np.intp)
    is1 = np.array([v in g.v1 for v in verts])
    vals = np.zeros(n)
    threshold = tol * (1.0 - lam_g) / lam_g
    iterations = 0
    while True:
        iterations += 1
        r = w + lam_g * vals[dst]
        new = np.where(is1, np.maximum.reduceat(r, starts), np.minimum.reduceat(r, starts))
        delta = float(np.max(np.abs(new - vals)))
        vals = new
        if delta <= threshold:
            break
        if iterations > 10_000_000:
            raise RuntimeError("value iteration failed to converge")
    values = {v: float(vals[i]) for v, i in idx.items()}
    choices = {1: {}, 2: {}}
    for v in verts:
        cands = [(wt + lam_g * values[t], (wt, t)) for wt, t in g.out(v)]
        if v in g.v1:
            best = max(c for c, _ in cands)
            choices[1][v] = next(e for c, e in cands if c >= best - tol)
        else:
            best = min(c for c, _ in cands)
            choices[2][v] = next(e for c, e in cands if c <= best + tol)
    return values, Strategy(1, choices[1]), Strategy(2, choices[2])


def replay(g: GameGraph, start, th1: Strategy, th2: Strategy, lam_g: float) -> float:
    """Discounted payoff of the unique play where both players follow their strategies."""
    seq = []
    pos = {}
    v = start
    while v not in pos:
        pos[v] = len(seq)
        wt, t = (th1 if v in g.v1 else th2).choice[v]
        seq.append(wt)
        v = t
    loop_at = pos[v]
    total = sum(lam_g ** i * wt for i, wt in enumerate(seq[:loop_at]))
    cycle = sum(lam_g ** i * wt for i, wt in enumerate(seq[loop_at:]))
    total += lam_g ** loop_at * cycle / (1.0 - lam_g ** (len(seq) - loop_at))
    return total


def reduce_to_game(s1: Wmts, s2: Wmts, lam: float = DEFAULT_LAMBDA) -> tuple:
    """Build the game for ``d_m(s1, s2)``; returns ``(game, start)``.

    Only vertices reachable from the initial pair are built.  A pair with no
    challenge gets a 0-edge into a 0-weight sink loop.  A response that is
    missing or has infinite label distance becomes an edge of weight
    ``meta["w_inf"]`` into the sink; this weight is large enough that any play
    forced through it ends above ``meta["cutoff"]`` after rescaling.
    """
    lam = check_lambda(lam)
    start = (s1.initial, s2.initial)
    v1, v2 = {start}, set()
    edges = []
    pending_inf = []
    bound = 0.0
    stack = [start]
    while stack:
        p = stack.pop()
        a, b = p
        moves = []
        for k1, t1 in s1.may_from(a):
            moves.append(((t1, b, k1, "may"), [(label_dist(k1, k2), (t1, t2)) for k2, t2 in s2.may_from(b)]))
        for k2, t2 in s2.must_from(b):
            moves.append(((a, t2, k2, "must"), [(label_dist(k1, k2), (t1, t2)) for k1, t1 in s1.must_from(a)]))
        if not moves:
            edges.append((p, 0.0, SINK2))
            v2.add(SINK2)
        for q, responses in moves:
            edges.append((p, 0.0, q))
            if q in v2:
                continue
            v2.add(q)
            finite = [(c, t) for c, t in responses if c != math.inf]
            if len(finite) < len(responses) or not responses:
                pending_inf.append(q)
            for c, t in finite:
                bound = max(bound, c)
                edges.append((q, c, t))
                if t not in v1:
                    v1.add(t)
                    stack.append(t)
    n = len(v1)
    try:
        w_inf = (bound + 1.0) / ((1.0 - lam) * lam ** n)
    except OverflowError:
        raise ValueError("game too large for the escape-weight surrogate") from None
    if not math.isfinite(w_inf):
        raise ValueError("game too large for the escape-weight surrogate")
    if pending_inf:
        edges += [(q, w_inf, SINK1) for q in sorted(pending_inf, key=_key)]
    if pending_inf or SINK2 in v2:
        v1.add(SINK1)
        v2.add(SINK2)
        edges += [(SINK1, 0.0, SINK2), (SINK2, 0.0, SINK1)]
    meta = {
        "lambda": lam,
        "game_lambda": math.sqrt(lam),
        "max_label_dist": bound,
        "w_inf": w_inf,
        "cutoff": (bound + 0.5) / (1.0 - lam),
    }
    return GameGraph(frozenset(v1), frozenset(v2), tuple(edges), start, meta), start


def rescale(game_value: float, lam: float) -> float:
    """Map a start value of the reduced game back to distance units."""
    return game_value / math.sqrt(lam)


def game_modal_dist(s1: Wmts, s2: Wmts, lam: float = DEFAULT_LAMBDA, tol: float = DEFAULT_TOL) -> tuple:
    """``d_m`` via the game; returns ``(value, game_values, game)`` with ``inf`` above the cutoff."""
    g, v0 = reduce_to_game(s1, s2, lam)
    lam_g = g.meta["game_lambda"]
    values, th1, th2 = discounted_value(g, lam_g, tol * lam_g)
    d = rescale(values[v0], lam)
    if d > g.meta["cutoff"]:
        d = math.inf
    return d, values, g
