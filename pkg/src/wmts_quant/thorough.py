"""Bounded implementation enumeration and certified thorough-distance bounds.

Implementations are enumerated as finite trees obtained by unrolling a
specification to a fixed depth.  At every node each must is realised once
(with any integer weight of its interval) and each may is either dropped or
realised once.

For the thorough distance we use that, for an implementation ``I``, the best
implementation of ``S2`` sits at distance ``d_m(I, S2)``.  The supremum over
implementations of ``S1`` is then computed bottom-up over the unrolling,
keeping for each (state, remaining depth) the Pareto-maximal vectors of
``d_m(tree, s2)`` indexed by the states ``s2`` of ``S2``.  Past the depth
bound a subtree may behave like any implementation of the current ``S1``
state ``x``, so its value lies between 0 and ``d_m(x, s2)``; using the two
ends gives a lower and an upper bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .distance import DEFAULT_LAMBDA, DEFAULT_TOL, check_lambda, label_dist, modal_dist
from .model import Wmts, is_implementation, label

INF = math.inf


@dataclass(frozen=True)
class UnrollBudget:
    depth: int = 6
    max_weight_choices: int = 8
    max_combinations: int = 200_000

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        if self.max_weight_choices < 1:
            raise ValueError("max_weight_choices must be at least 1")


@dataclass(frozen=True)
class DistEstimate:
    lower: float
    upper: float
    depth: int

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"empty estimate [{self.lower}, {self.upper}]")

    def __contains__(self, x) -> bool:
        return self.lower <= x <= self.upper

    @property
    def width(self) -> float:
        if self.upper == INF:
            return 0.0 if self.lower == INF else INF
        return self.upper - self.lower


def _weights(k, budget: UnrollBudget) -> range:
    if not k.interval.is_finite:
        raise ValueError(f"cannot enumerate the unbounded interval of {k}")
    n = k.hi - k.lo + 1
    if n > budget.max_weight_choices:
        raise ValueError(f"interval of {k} has {n} weights, above the budget of {budget.max_weight_choices}")
    return range(k.lo, k.hi + 1)


def _choices(s: Wmts, x: str, budget: UnrollBudget, child):
    """Per-transition option lists at ``x``: musts are required, mays optional."""
    groups = []
    for k, t in s.must_from(x):
        groups.append([(k.action, w, c) for w in _weights(k, budget) for c in child(t)])
    for k, t in s.may_from(x):
        groups.append([None] + [(k.action, w, c) for w in _weights(k, budget) for c in child(t)])
    total = 1
    for g in groups:
        total *= len(g)
    if total > budget.max_combinations:
        raise ValueError(f"{total} combinations at state {x}, above the budget of {budget.max_combinations}")
    return groups


def _trees(s: Wmts, budget: UnrollBudget) -> frozenset:
    memo = {}

    def trees(x, d):
        key = (x, d)
        if key not in memo:
            if d == 0:
                memo[key] = [frozenset()]
            else:
                out = set()
                groups = _choices(s, x, budget, lambda t: trees(t, d - 1))
                for combo in itertools.product(*groups):
                    out.add(frozenset(c for c in combo if c is not None))
                memo[key] = sorted(out, key=_tree_key)
        return memo[key]

    return trees(s.initial, budget.depth)


def _tree_key(tree):
    return sorted((a, w, _tree_key(c)) for a, w, c in tree)


def tree_to_wmts(tree) -> Wmts:
    states, trans = [], []

    def walk(node):
        name = f"n{len(states)}"
        states.append(name)
        for a, w, child in sorted(node, key=lambda e: (e[0], e[1], _tree_key(e[2]))):
            trans.append((name, a, w, walk(child)))
        return name

    walk(tree)
    return Wmts.implementation(states, "n0", trans)


def enum_implementations(s: Wmts, budget: UnrollBudget) -> list:
    """All tree implementations of ``s`` up to ``budget.depth``, without duplicates."""
    return [tree_to_wmts(t) for t in _trees(s, budget)]


def truncate(s: Wmts, depth: int) -> Wmts:
    """Unfold ``s`` into a tree and cut it after ``depth`` steps."""
    states, may, must = [], [], []
    names = {}

    def unfold(x, d, path):
        name = f"{x}.{path}" if path else x
        states.append(name)
        if d > 0:
            succ = sorted({t for _, t in s.may_from(x)} | {t for _, t in s.must_from(x)})
            for i, t in enumerate(succ):
                child = unfold(t, d - 1, f"{path}{i}" if path else str(i))
                names[(name, t)] = child
            for k, t in s.may_from(x):
                may.append((name, k, names[(name, t)]))
            for k, t in s.must_from(x):
                must.append((name, k, names[(name, t)]))
        return name

    unfold(s.initial, depth, "")
    return Wmts.build(states, s.initial, may, must)


def _pareto(vectors) -> list:
    vs = sorted(set(vectors), reverse=True)
    out = []
    for v in vs:
        if not any(all(a >= b for a, b in zip(u, v)) for u in out):
            out.append(v)
    return out


def thorough_dist_approx(
    s1: Wmts,
    s2: Wmts,
    lam: float = DEFAULT_LAMBDA,
    budget: UnrollBudget = UnrollBudget(),
    tol: float = DEFAULT_TOL,
) -> DistEstimate:
    """Certified bounds on the thorough distance from ``s1`` to ``s2``.

    ``s1`` must have finite intervals within the weight budget on every
    transition reachable within the depth; ``s2`` is not enumerated.
    """
    lam = check_lambda(lam)
    order = s2.sorted_states()
    col = {x: i for i, x in enumerate(order)}
    _, table = modal_dist(s1, s2, lam, tol, all_pairs=True)

    def frontier_upper(x):
        return tuple(table.entries[(x, y)] + (tol if table.entries[(x, y)] != INF else 0.0) for y in order)

    zero = tuple(0.0 for _ in order)

    def node_value(picks):
        # picks: list of (SpecLabel, child_vector)
        vec = []
        for y in order:
            best = 0.0
            for k, cv in picks:
                resp = min((label_dist(k, k2) + lam * cv[col[t2]] for k2, t2 in s2.may_from(y)), default=INF)
                best = max(best, resp)
                if best == INF:
                    break
            if best != INF:
                for k2, t2 in s2.must_from(y):
                    resp = min((label_dist(k, k2) + lam * cv[col[t2]] for k, cv in picks), default=INF)
                    best = max(best, resp)
                    if best == INF:
                        break
            vec.append(best)
        return tuple(vec)

    def solve(frontier):
        memo = {}

        def vals(x, d):
            key = (x, d)
            if key not in memo:
                if d == 0:
                    memo[key] = [frontier(x)]
                else:
                    groups = _choices(s1, x, budget, lambda t: vals(t, d - 1))
                    out = set()
                    for combo in itertools.product(*groups):
                        picks = [(label(a, w), cv) for a, w, cv in (c for c in combo if c is not None)]
                        out.add(node_value(picks))
                    memo[key] = _pareto(out)
            return memo[key]

        return max(v[col[s2.initial]] for v in vals(s1.initial, budget.depth))

    lower = solve(lambda x: zero)
    upper = solve(frontier_upper)
    return DistEstimate(lower, max(lower, upper), budget.depth)


def in_extended_semantics(i: Wmts, s: Wmts, eps: float, lam: float = DEFAULT_LAMBDA, tol: float = DEFAULT_TOL) -> bool:
    """Whether implementation ``i`` lies within ``eps`` of refining ``s``."""
    if not is_implementation(i):
        raise ValueError("first argument is not an implementation")
    d, _ = modal_dist(i, s, lam, tol)
    return d <= eps + tol
