"""Label arithmetic and the operators of the specification algebra.

Operators that can fail return ``None`` for "undefined" (an inconsistent
result), which is an ordinary outcome rather than an error.  Product states
are named ``(a,b)``, subset states ``{a,b}`` and the universal quotient state
``u`` (primed until fresh if the name is taken).
"""

from __future__ import annotations

from collections import defaultdict
from typing import Callable, Iterable, Optional

from .distance import DEFAULT_LAMBDA, DEFAULT_TOL, modal_dist
from .model import NEG_INF, POS_INF, SpecLabel, WeightInterval, Wmts, is_deterministic

LabelSync = Callable[[SpecLabel, SpecLabel], Optional[SpecLabel]]


class NotDeterministicError(ValueError):
    """An operator that needs a deterministic argument got a non-deterministic one."""


def _make(action, lo, hi) -> Optional[SpecLabel]:
    if lo > hi:
        return None
    return SpecLabel(action, WeightInterval(lo, hi))


def label_plus(k1: SpecLabel, k2: SpecLabel) -> Optional[SpecLabel]:
    if k1.action != k2.action:
        return None
    return _make(k1.action, k1.lo + k2.lo, k1.hi + k2.hi)


def label_minus(k1: SpecLabel, k2: SpecLabel) -> Optional[SpecLabel]:
    """Interval difference ``[x1 - x2, y1 - y2]``, the partial inverse of ``label_plus``."""
    if k1.action != k2.action:
        return None
    if k1.lo == NEG_INF:
        lo = NEG_INF
    elif k2.lo == NEG_INF:
        return None
    else:
        lo = k1.lo - k2.lo
    if k1.hi == POS_INF:
        hi = POS_INF
    elif k2.hi == POS_INF:
        return None
    else:
        hi = k1.hi - k2.hi
    return _make(k1.action, lo, hi)


def label_conj(k1: SpecLabel, k2: SpecLabel) -> Optional[SpecLabel]:
    if k1.action != k2.action:
        return None
    return _make(k1.action, max(k1.lo, k2.lo), min(k1.hi, k2.hi))


def hull(labels: Iterable[SpecLabel]) -> SpecLabel:
    labels = list(labels)
    actions = {k.action for k in labels}
    if len(actions) != 1:
        raise ValueError("hull needs a non-empty set of labels over one action")
    return SpecLabel(actions.pop(), WeightInterval(min(k.lo for k in labels), max(k.hi for k in labels)))


def _pair(a: str, b: str) -> str:
    return f"({a},{b})"


def _subset(states) -> str:
    return "{" + ",".join(sorted(states)) + "}"


# --------------------------------------------------------------------------
# widening, relaxation, pruning


def widen(s: Wmts, delta: int) -> Wmts:
    if isinstance(delta, bool) or not isinstance(delta, int) or delta < 0:
        raise ValueError(f"widening amount must be a non-negative integer, got {delta!r}")

    def w(t):
        src, k, dst = t
        return (src, SpecLabel(k.action, WeightInterval(k.lo - delta, k.hi + delta)), dst)

    return Wmts(s.states, s.initial, frozenset(map(w, s.may)), frozenset(map(w, s.must)))


def is_relaxation(s: Wmts, s_prime: Wmts, eps: float, lam: float = DEFAULT_LAMBDA, tol: float = DEFAULT_TOL) -> bool:
    """``s_prime`` refines-from-above ``s`` exactly and is within ``eps`` of it the other way."""
    down, _ = modal_dist(s, s_prime, lam, tol)
    up, _ = modal_dist(s_prime, s, lam, tol)
    return down <= tol and up <= eps + tol


def must_pre_star(s: Wmts, bad: Iterable[str]) -> frozenset:
    preds = defaultdict(set)
    for src, _, dst in s.must:
        preds[dst].add(src)
    seen = set(bad)
    stack = list(seen)
    while stack:
        t = stack.pop()
        for p in preds[t]:
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return frozenset(seen)


def prune(s: Wmts, bad: Iterable[str]) -> Optional[Wmts]:
    """Remove the bad states and everything that must-reaches them; ``None`` if the initial state goes."""
    bad = frozenset(bad)
    if not bad <= s.states:
        raise ValueError("inconsistent set is not a subset of the states")
    gone = must_pre_star(s, bad)
    if s.initial in gone:
        return None
    return s.restrict(s.states - gone)


def _trim(s: Optional[Wmts]) -> Optional[Wmts]:
    return None if s is None else s.restrict(s.reachable())


# --------------------------------------------------------------------------
# composition and quotient


def compose(s1: Wmts, s2: Wmts, sync: LabelSync = label_plus) -> Wmts:
    """Synchronized product; ``sync`` combines labels and returns ``None`` to block."""
    start = (s1.initial, s2.initial)
    seen = {start}
    stack = [start]
    may, must = set(), set()
    while stack:
        a, b = stack.pop()
        for rel, out, edges in (("may", s1.may_from, s2.may_from), ("must", s1.must_from, s2.must_from)):
            for k1, t1 in out(a):
                for k2, t2 in edges(b):
                    k = sync(k1, k2)
                    if k is None:
                        continue
                    (may if rel == "may" else must).add((_pair(a, b), k, _pair(t1, t2)))
                    if (t1, t2) not in seen:
                        seen.add((t1, t2))
                        stack.append((t1, t2))
    names = {_pair(a, b) for a, b in seen}
    return Wmts(frozenset(names), _pair(*start), frozenset(may), frozenset(must))


def _universal(s1: Wmts, s2: Wmts) -> str:
    u = "u"
    taken = {_pair(a, b) for a in s1.states for b in s2.states}
    while u in taken:
        u += "'"
    return u


def quotient(s1: Wmts, s2: Wmts, alphabet: Optional[Iterable[str]] = None) -> Optional[Wmts]:
    """Largest ``X`` with ``s2 || X`` close to ``s1``; ``None`` when inconsistent.

    ``s2`` must be deterministic.  The universal state is reached by one
    ``[-inf,inf]`` may-edge per action of ``alphabet`` that the current
    ``s2`` state cannot perform at all, and loops on every action of the
    alphabet.  The alphabet defaults to the actions of both arguments; pass a
    larger one when the quotient will be compared against systems using
    other actions.
    """
    if not is_deterministic(s2):
        raise NotDeterministicError("the divisor must be deterministic")
    sigma = sorted(set(alphabet) if alphabet is not None else (s1.actions | s2.actions))
    u = _universal(s1, s2)
    top = {a: SpecLabel(a, WeightInterval(NEG_INF, POS_INF)) for a in sigma}

    start = (s1.initial, s2.initial)
    seen = {start}
    stack = [start]
    may, must, bad = set(), set(), set()
    uses_u = False

    def visit(p):
        if p not in seen:
            seen.add(p)
            stack.append(p)

    while stack:
        a, b = stack.pop()
        src = _pair(a, b)
        for k1, t1 in s1.may_from(a):
            for k2, t2 in s2.may_from(b):
                k = label_minus(k1, k2)
                if k is not None:
                    may.add((src, k, _pair(t1, t2)))
                    visit((t1, t2))
        for k1, t1 in s1.must_from(a):
            matched = False
            for k2, t2 in s2.must_from(b):
                k = label_minus(k1, k2)
                if k is not None:
                    matched = True
                    must.add((src, k, _pair(t1, t2)))
                    visit((t1, t2))
            if not matched:
                bad.add(src)
        b_actions = {k.action for k, _ in s2.may_from(b)}
        for act in sigma:
            if act not in b_actions:
                may.add((src, top[act], u))
                uses_u = True
    states = {_pair(a, b) for a, b in seen}
    if uses_u:
        states.add(u)
        may |= {(u, top[act], u) for act in sigma}
    raw = Wmts(frozenset(states), _pair(*start), frozenset(may), frozenset(must))
    return _trim(prune(raw, bad))


# --------------------------------------------------------------------------
# determinization and conjunction


def determinize(s: Wmts) -> Wmts:
    """Subset construction merging all same-action may-steps into one hull-labelled step.

    A merged step is also a must when every member state has a must on that
    action; its must label is the hull of those must labels.
    """
    start = frozenset({s.initial})
    seen = {start}
    stack = [start]
    may, must = set(), set()
    while stack:
        T = stack.pop()
        by_action = defaultdict(list)
        for x in sorted(T):
            for k, t in s.may_from(x):
                by_action[k.action].append((k, t))
        for act, steps in sorted(by_action.items()):
            target = frozenset(t for _, t in steps)
            k = hull(k for k, _ in steps)
            may.add((_subset(T), k, _subset(target)))
            musts = [[k2 for k2, t2 in s.must_from(x) if k2.action == act and t2 in target] for x in sorted(T)]
            if all(musts):
                must.add((_subset(T), hull(k2 for ks in musts for k2 in ks), _subset(target)))
            if target not in seen:
                seen.add(target)
                stack.append(target)
    return Wmts(frozenset(_subset(T) for T in seen), _subset(start), frozenset(may), frozenset(must))


def conjoin(s1: Wmts, s2: Wmts) -> Optional[Wmts]:
    """Pruned product under interval intersection; both arguments deterministic."""
    for name, s in (("first", s1), ("second", s2)):
        if not is_deterministic(s):
            raise NotDeterministicError(f"{name} argument of conjunction must be deterministic")
    start = (s1.initial, s2.initial)
    seen = {start}
    stack = [start]
    may, must, bad = set(), set(), set()

    def visit(p):
        if p not in seen:
            seen.add(p)
            stack.append(p)

    while stack:
        a, b = stack.pop()
        src = _pair(a, b)
        for k1, t1 in s1.may_from(a):
            for k2, t2 in s2.may_from(b):
                k = label_conj(k1, k2)
                if k is not None:
                    may.add((src, k, _pair(t1, t2)))
                    visit((t1, t2))
        for mine, theirs, flip in ((s1.must_from(a), s2.may_from(b), False), (s2.must_from(b), s1.may_from(a), True)):
            for k1, t1 in mine:
                hit = False
                for k2, t2 in theirs:
                    k = label_conj(k1, k2)
                    if k is not None:
                        hit = True
                        tgt = (t2, t1) if flip else (t1, t2)
                        must.add((src, k, _pair(*tgt)))
                        visit(tgt)
                if not hit:
                    bad.add(src)
    raw = Wmts(frozenset(_pair(a, b) for a, b in seen), _pair(*start), frozenset(may), frozenset(must))
    return _trim(prune(raw, bad))
