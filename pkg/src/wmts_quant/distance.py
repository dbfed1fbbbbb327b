"""Label distances and the discounted refinement / implementation distances.

Both system distances are least fixed points of a max-over-challenges,
min-over-responses operator.  They are computed in two stages:

1. :func:`finite_pairs` finds, as a greatest fixed point over booleans, the
   pairs whose distance is finite.  Everything else is exactly ``inf``.
2. Value iteration from the zero table on the finite pairs.  Iteration stops
   once the sup-norm change is at most ``tol * (1 - lam) / lam``, which bounds
   the remaining error by ``tol``.

An optional exact pass rebuilds rational values from the optimal choices of
the converged table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .model import Diagnostics, ImplLabel, Issue, SpecLabel, Wmts, is_implementation

INF = math.inf
DEFAULT_LAMBDA = 0.9
DEFAULT_TOL = 1e-9


def check_lambda(lam) -> float:
    lam_f = float(lam)
    if not 0.0 < lam_f < 1.0:
        raise ValueError(f"discount factor must lie strictly between 0 and 1, got {lam}")
    return lam_f


def _check_tol(tol) -> float:
    tol = float(tol)
    if not tol > 0.0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    return tol


def _gap(a, b):
    # a - b on extended integers; equal infinities give 0
    if a == b:
        return 0
    return a - b


def impl_label_dist(k: ImplLabel, l: ImplLabel) -> float:
    if k.action != l.action:
        return INF
    return float(abs(k.weight - l.weight))


def label_dist(k: SpecLabel, l: SpecLabel) -> float:
    """Distance from label ``k`` to label ``l``: ``max(l.lo - k.lo, k.hi - l.hi, 0)``.

    Infinite when the actions differ, or when ``k`` reaches an infinite bound
    that ``l`` does not.
    """
    if k.action != l.action:
        return INF
    return float(max(_gap(l.lo, k.lo), _gap(k.hi, l.hi), 0))


# --------------------------------------------------------------------------
# the shared game-like problem structure


@dataclass
class _Problem:
    """Pairs, each with a list of challenges; each challenge a list of responses.

    A response is ``(cost, next_pair, tag)``; a challenge is ``(tag, responses)``.
    Responses with infinite cost are dropped at construction.
    """

    start: tuple
    pairs: list
    challenges: dict


def _explore(start, moves, all_pairs=()) -> _Problem:
    seen = {start}
    order = [start]
    for p in all_pairs:
        if p not in seen:
            seen.add(p)
            order.append(p)
    challenges = {}
    i = 0
    while i < len(order):
        p = order[i]
        i += 1
        chals = moves(p)
        challenges[p] = chals
        for _, responses in chals:
            for _, q, _ in responses:
                if q not in seen:
                    seen.add(q)
                    order.append(q)
    return _Problem(start, order, challenges)


def _modal_moves(s1: Wmts, s2: Wmts):
    def moves(pair):
        a, b = pair
        out = []
        for k1, t1 in s1.may_from(a):
            resp = []
            for k2, t2 in s2.may_from(b):
                c = label_dist(k1, k2)
                if c != INF:
                    resp.append((c, (t1, t2), k2))
            out.append((("may", k1, t1), resp))
        for k2, t2 in s2.must_from(b):
            resp = []
            for k1, t1 in s1.must_from(a):
                c = label_dist(k1, k2)
                if c != INF:
                    resp.append((c, (t1, t2), k1))
            out.append((("must", k2, t2), resp))
        return out

    return moves


def _impl_moves(i1: Wmts, i2: Wmts):
    def moves(pair):
        a, b = pair
        out = []
        for k1, j1 in i1.must_from(a):
            resp = [(label_dist(k1, k2), (j1, j2), k2) for k2, j2 in i2.must_from(b) if k1.action == k2.action]
            out.append((("left", k1, j1), resp))
        for k2, j2 in i2.must_from(b):
            resp = [(label_dist(k1, k2), (j1, j2), k1) for k1, j1 in i1.must_from(a) if k1.action == k2.action]
            out.append((("right", k2, j2), resp))
        return out

    return moves


def _greatest_finite(problem: _Problem) -> set:
    alive = set(problem.pairs)
    changed = True
    while changed:
        changed = False
        for p in list(alive):
            for _, responses in problem.challenges[p]:
                if not any(q in alive for _, q, _ in responses):
                    alive.discard(p)
                    changed = True
                    break
    return alive


# --------------------------------------------------------------------------
# tables and value iteration


@dataclass
class DistTable:
    """Per-pair distances with the data needed to interpret them.

    ``entries`` maps ``(state1, state2)`` to a float (``inf`` exact).  Finite
    entries are lower approximations of the least fixed point, within
    ``error_bound <= tol``.  ``exact`` is filled by the rational post-solve.
    """

    start: tuple
    entries: dict
    lam: float
    tol: float
    error_bound: float
    iterations: int
    max_label_dist: float
    choices: dict = field(default_factory=dict, repr=False)
    exact: Optional[dict] = None

    @property
    def value(self) -> float:
        return self.entries[self.start]

    @property
    def exact_value(self):
        if self.exact is None:
            return None
        return self.exact.get(self.start, INF)

    def __getitem__(self, pair) -> float:
        return self.entries[pair]

    def __contains__(self, pair) -> bool:
        return pair in self.entries

    def finite_threshold(self) -> float:
        """No finite entry can exceed this."""
        return self.max_label_dist / (1.0 - self.lam)


def _solve(problem: _Problem, lam: float, tol: float, exact: bool) -> DistTable:
    alive = _greatest_finite(problem)
    live = [p for p in problem.pairs if p in alive]
    idx = {p: i for i, p in enumerate(live)}
    n = len(live)

    costs, nexts, chal_starts, chal_owner = [], [], [], []
    pair_has = np.zeros(n, dtype=bool)
    pair_first_chal = []
    max_c = 0.0
    for i, p in enumerate(live):
        chals = problem.challenges[p]
        if chals:
            pair_has[i] = True
            pair_first_chal.append(len(chal_starts))
        for _, responses in chals:
            chal_starts.append(len(costs))
            chal_owner.append(i)
            for c, q, _ in responses:
                if q in idx:
                    costs.append(c)
                    nexts.append(idx[q])
                    max_c = max(max_c, c)
    for p in problem.pairs:
        for _, responses in problem.challenges[p]:
            for c, _, _ in responses:
                max_c = max(max_c, c)

    cost = np.asarray(costs, dtype=float)
    nxt = np.asarray(nexts, dtype=np.intp)
    cstart = np.asarray(chal_starts, dtype=np.intp)
    pstart = np.asarray(pair_first_chal, dtype=np.intp)

    def bellman(v):
        r = cost + lam * v[nxt]
        out = np.zeros(n)
        out[pair_has] = np.maximum.reduceat(np.minimum.reduceat(r, cstart), pstart)
        return out

    vals = np.zeros(n)
    threshold = tol * (1.0 - lam) / lam
    iterations = 0
    error_bound = 0.0
    if len(cost):
        while True:
            iterations += 1
            new = bellman(vals)
            delta = float(np.max(np.abs(new - vals)))
            vals = new
            if delta <= threshold:
                break
            if iterations > 10_000_000:
                raise RuntimeError("value iteration failed to converge")
        error_bound = lam / (1.0 - lam) * delta
        # evaluate the greedy policy exactly; keep it if its certificate is tighter
        tmp = {p: INF for p in problem.pairs}
        for p, i in idx.items():
            tmp[p] = float(vals[i])
        ch = _extract_choices(problem, tmp, lam, tol)
        succ = {p: (None if ch[p] is None else ch[p][2]) for p in live}
        pc = {p: (0.0 if ch[p] is None else ch[p][1]) for p in live}
        pol = _solve_functional(succ, pc, lam)
        polished = np.array([float(pol[p]) for p in live])
        resid = float(np.max(np.abs(bellman(polished) - polished)))
        if resid / (1.0 - lam) <= error_bound:
            vals = polished
            error_bound = resid / (1.0 - lam)

    entries = {p: INF for p in problem.pairs}
    for p, i in idx.items():
        entries[p] = float(vals[i])
    table = DistTable(
        start=problem.start,
        entries=entries,
        lam=lam,
        tol=tol,
        error_bound=error_bound,
        iterations=iterations,
        max_label_dist=max_c,
    )
    table.choices = _extract_choices(problem, entries, lam, tol)
    if exact:
        table.exact = _exact_values(problem, entries, lam, table)
    return table


def _extract_choices(problem: _Problem, values: dict, lam, tol) -> dict:
    """Optimal challenge and response per finite pair.

    Ties within ``tol`` go to the first candidate in (target, label) order.
    Returns ``pair -> (challenge_tag, cost, next_pair, response_tag)`` or
    ``pair -> None`` for pairs without challenges.
    """
    choices = {}
    for p in problem.pairs:
        if values[p] == INF:
            continue
        best = None
        for tag, responses in problem.challenges[p]:
            live = [(c + lam * values[q], c, q, rt) for c, q, rt in responses if values[q] != INF]
            m = min(v for v, *_ in live)
            pick = next(r for r in live if r[0] <= m + tol)
            if best is None or pick[0] > best[0] + tol:
                best = (pick[0], tag, pick[1], pick[2], pick[3])
        choices[p] = None if best is None else best[1:]
    return choices


def _solve_functional(succ: dict, cost: dict, lam: Fraction) -> dict:
    """Solve v[p] = cost[p] + lam * v[succ[p]] exactly (succ[p] None: v = 0)."""
    val = {}
    for p0 in succ:
        if p0 in val:
            continue
        path = []
        on_path = {}
        p = p0
        while p not in val and p not in on_path:
            on_path[p] = len(path)
            path.append(p)
            if succ[p] is None:
                break
            p = succ[p]
        if p in on_path and succ[path[-1]] is not None:
            cyc = path[on_path[p]:]
            total = Fraction(0)
            for i, x in enumerate(cyc):
                total += lam ** i * cost[x]
            val[cyc[0]] = total / (1 - lam ** len(cyc))
            for x in reversed(cyc[1:]):
                val[x] = cost[x] + lam * val[succ[x]]
            path = path[: on_path[p]]
        elif succ[path[-1]] is None:
            val[path[-1]] = Fraction(0)
            path = path[:-1]
        for x in reversed(path):
            val[x] = cost[x] + lam * val[succ[x]]
    return val


def _exact_values(problem: _Problem, values: dict, lam_f: float, table: DistTable, rounds: int = 50) -> dict:
    lam = Fraction(str(lam_f)) if isinstance(lam_f, float) else Fraction(lam_f)
    finite = [p for p in problem.pairs if values[p] != INF]
    choices = table.choices
    for _ in range(rounds):
        succ, cost = {}, {}
        for p in finite:
            ch = choices[p]
            if ch is None:
                succ[p], cost[p] = None, Fraction(0)
            else:
                succ[p], cost[p] = ch[2], Fraction(ch[1])
        exact = _solve_functional(succ, cost, lam)
        # exact Bellman check; re-pick choices from the exact values on failure
        stable = True
        new_choices = {}
        for p in finite:
            best = None
            for tag, responses in problem.challenges[p]:
                live = [(Fraction(c) + lam * exact[q], c, q, rt) for c, q, rt in responses if q in exact]
                m = min(v for v, *_ in live)
                pick = next(r for r in live if r[0] == m)
                if best is None or pick[0] > best[0]:
                    best = (pick[0], tag, pick[1], pick[2], pick[3])
            target = Fraction(0) if best is None else best[0]
            new_choices[p] = None if best is None else best[1:]
            if target != exact[p]:
                stable = False
        if stable:
            return exact
        choices = new_choices
    raise RuntimeError("exact reconstruction did not stabilise")


def finite_pairs(s1: Wmts, s2: Wmts, *, all_pairs: bool = False) -> frozenset:
    """Pairs (reachable from the initial pair) with finite modal refinement distance."""
    extra = [(a, b) for a in s1.sorted_states() for b in s2.sorted_states()] if all_pairs else ()
    problem = _explore((s1.initial, s2.initial), _modal_moves(s1, s2), extra)
    return frozenset(_greatest_finite(problem))


def modal_dist(
    s1: Wmts,
    s2: Wmts,
    lam: float = DEFAULT_LAMBDA,
    tol: float = DEFAULT_TOL,
    *,
    exact: bool = False,
    all_pairs: bool = False,
) -> tuple:
    """Modal refinement distance from ``s1`` to ``s2``.

    Returns ``(value, table)``.  ``table`` has an entry for every pair reachable
    from the initial pair (every pair of ``S1 x S2`` with ``all_pairs``).
    """
    lam_f = check_lambda(lam)
    tol = _check_tol(tol)
    extra = [(a, b) for a in s1.sorted_states() for b in s2.sorted_states()] if all_pairs else ()
    problem = _explore((s1.initial, s2.initial), _modal_moves(s1, s2), extra)
    table = _solve(problem, lam_f, tol, exact)
    return table.value, table


def impl_dist(
    i1: Wmts,
    i2: Wmts,
    lam: float = DEFAULT_LAMBDA,
    tol: float = DEFAULT_TOL,
    *,
    exact: bool = False,
    all_pairs: bool = False,
) -> tuple:
    """Symmetric implementation distance; both arguments must be implementations."""
    for name, i in (("first", i1), ("second", i2)):
        if not is_implementation(i):
            raise ValueError(f"{name} argument is not an implementation")
    lam_f = check_lambda(lam)
    tol = _check_tol(tol)
    extra = [(a, b) for a in i1.sorted_states() for b in i2.sorted_states()] if all_pairs else ()
    problem = _explore((i1.initial, i2.initial), _impl_moves(i1, i2), extra)
    table = _solve(problem, lam_f, tol, exact)
    return table.value, table


def refines_eps(s1: Wmts, s2: Wmts, eps: float, lam: float = DEFAULT_LAMBDA, tol: float = DEFAULT_TOL) -> bool:
    d, _ = modal_dist(s1, s2, lam, tol)
    return d <= eps + tol


# --------------------------------------------------------------------------
# refinement families


@dataclass(frozen=True)
class RefinementFamily:
    """Finitely many thresholds, each with a relation between states."""

    relations: dict

    def threshold(self, pair) -> float:
        """Least listed threshold whose relation contains ``pair``."""
        return min((eps for eps, rel in self.relations.items() if pair in rel), default=INF)


def family_from_table(table: DistTable) -> RefinementFamily:
    finite = sorted({v for v in table.entries.values() if v != INF})
    rels = {}
    for eps in finite:
        rels[eps] = frozenset(p for p, v in table.entries.items() if v <= eps)
    return RefinementFamily(rels)


def check_refinement_family(
    fam: RefinementFamily, s1: Wmts, s2: Wmts, lam: float = DEFAULT_LAMBDA, slack: float = 0.0
) -> Diagnostics:
    """Check both transfer conditions for every listed threshold and pair.

    A successor pair counts as related at level ``e'`` when some listed
    threshold ``<= e'`` contains it.  ``slack`` absorbs float round-off when the
    family comes from an approximate table.
    """
    lam = check_lambda(lam)
    diag = Diagnostics()
    eps_sorted = sorted(fam.relations)
    for a, b in zip(eps_sorted, eps_sorted[1:]):
        if not fam.relations[a] <= fam.relations[b]:
            diag.warnings.append(Issue("not-upward-closed", (a, b), f"relation at {a} is not contained in relation at {b}"))

    def matched(k_from, t_from, options, eps, flip):
        for k_to, t_to in options:
            kd = label_dist(k_from, k_to) if not flip else label_dist(k_to, k_from)
            if kd > eps + slack:
                continue
            nxt = (t_from, t_to) if not flip else (t_to, t_from)
            if kd + lam * fam.threshold(nxt) <= eps + slack:
                return True
        return False

    for eps in eps_sorted:
        for p1, p2 in sorted(fam.relations[eps]):
            for k1, t1 in s1.may_from(p1):
                if not matched(k1, t1, s2.may_from(p2), eps, False):
                    diag.errors.append(
                        Issue("may-unmatched", (eps, (p1, p2), (p1, k1, t1)),
                              f"at level {eps}: may {p1} {k1} {t1} has no may of {p2} within the level")
                    )
            for k2, t2 in s2.must_from(p2):
                if not matched(k2, t2, s1.must_from(p1), eps, True):
                    diag.errors.append(
                        Issue("must-unmatched", (eps, (p1, p2), (p2, k2, t2)),
                              f"at level {eps}: must {p2} {k2} {t2} has no must of {p1} within the level")
                    )
    return diag
