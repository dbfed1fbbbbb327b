"""Weighted modal transition systems: labels, systems and shape predicates.

Interval bounds are Python ints, except for the two infinite bounds which are
``-math.inf`` (lower) and ``math.inf`` (upper).  Intervals never hold finite
float bounds.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Optional, Union

Bound = Union[int, float]

NEG_INF = -math.inf
POS_INF = math.inf


def _check_bound(x, *, lower: bool) -> Bound:
    if isinstance(x, bool):
        raise TypeError("interval bound must be an integer or an infinity, not bool")
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        if lower and x == NEG_INF:
            return NEG_INF
        if not lower and x == POS_INF:
            return POS_INF
        if math.isfinite(x) and x.is_integer():
            return int(x)
    raise ValueError(f"invalid {'lower' if lower else 'upper'} bound {x!r}")


def format_bound(x: Bound) -> str:
    if x == POS_INF:
        return "inf"
    if x == NEG_INF:
        return "-inf"
    return str(x)


def parse_bound(text: str) -> Bound:
    text = text.strip()
    if text in ("inf", "+inf"):
        return POS_INF
    if text == "-inf":
        return NEG_INF
    return int(text)


@dataclass(frozen=True, order=True)
class WeightInterval:
    """Closed interval ``[lo, hi]`` over the extended integers."""

    lo: Bound
    hi: Bound

    def __post_init__(self):
        lo = _check_bound(self.lo, lower=True)
        hi = _check_bound(self.hi, lower=False)
        if lo > hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def __str__(self):
        return f"[{format_bound(self.lo)},{format_bound(self.hi)}]"


@dataclass(frozen=True, order=True)
class SpecLabel:
    """An action together with an interval of admissible weights."""

    action: str
    interval: WeightInterval

    def __post_init__(self):
        if not isinstance(self.action, str) or not self.action:
            raise ValueError(f"action must be a non-empty string, got {self.action!r}")
        if any(c.isspace() for c in self.action):
            raise ValueError(f"action {self.action!r} contains whitespace")

    @property
    def lo(self) -> Bound:
        return self.interval.lo

    @property
    def hi(self) -> Bound:
        return self.interval.hi

    def __str__(self):
        return f"{self.action}{self.interval}"


@dataclass(frozen=True, order=True)
class ImplLabel:
    action: str
    weight: int

    def as_spec(self) -> SpecLabel:
        return SpecLabel(self.action, WeightInterval(self.weight, self.weight))


def label(action: str, lo: Bound, hi: Optional[Bound] = None) -> SpecLabel:
    """Shorthand: ``label("a", 1, 3)`` or ``label("a", 4)`` for a point label."""
    return SpecLabel(action, WeightInterval(lo, lo if hi is None else hi))


Transition = tuple  # (source, SpecLabel, target)


def _as_transition(t) -> Transition:
    if len(t) == 3:
        src, lab, dst = t
        if not isinstance(lab, SpecLabel):
            raise TypeError(f"expected SpecLabel in transition {t!r}")
        return (src, lab, dst)
    if len(t) == 4:
        src, action, bounds, dst = t
        if isinstance(bounds, WeightInterval):
            return (src, SpecLabel(action, bounds), dst)
        if isinstance(bounds, (tuple, list)):
            return (src, label(action, *bounds), dst)
        return (src, label(action, bounds), dst)
    raise ValueError(f"cannot interpret transition {t!r}")


@dataclass(frozen=True)
class Wmts:
    """A finite weighted modal transition system.

    Instances are immutable.  Construction checks only that states and
    endpoints are well-formed; the must/may consistency condition is reported
    by :func:`validate` rather than enforced here.
    """

    states: frozenset
    initial: str
    may: frozenset
    must: frozenset

    def __post_init__(self):
        states = frozenset(self.states)
        for s in states:
            if not isinstance(s, str) or not s or any(c.isspace() for c in s):
                raise ValueError(f"state identifiers must be non-empty tokens, got {s!r}")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "may", frozenset(_as_transition(t) for t in self.may))
        object.__setattr__(self, "must", frozenset(_as_transition(t) for t in self.must))
        if not states:
            raise ValueError("a WMTS needs at least one state")
        if self.initial not in states:
            raise ValueError(f"initial state {self.initial!r} is not a state")
        for kind in ("may", "must"):
            for src, _, dst in getattr(self, kind):
                if src not in states or dst not in states:
                    raise ValueError(f"{kind} transition {src}->{dst} leaves the state set")

    @classmethod
    def build(cls, states: Iterable[str], initial: str, may=(), must=()) -> "Wmts":
        """Build from loose transition tuples.

        Transitions may be given as ``(src, SpecLabel, dst)`` or as
        ``(src, action, (lo, hi), dst)``; a bare integer instead of the pair
        means a point interval.
        """
        return cls(frozenset(states), initial, frozenset(may), frozenset(must))

    @classmethod
    def implementation(cls, states: Iterable[str], initial: str, transitions) -> "Wmts":
        """Build an implementation from ``(src, action, weight, dst)`` tuples."""
        ts = frozenset((s, label(a, w), t) for s, a, w, t in transitions)
        return cls(frozenset(states), initial, ts, ts)

    def with_initial(self, state: str) -> "Wmts":
        return Wmts(self.states, state, self.may, self.must)

    @cached_property
    def may_out(self) -> dict:
        return _index(self.may)

    @cached_property
    def must_out(self) -> dict:
        return _index(self.must)

    def may_from(self, s: str) -> list:
        return self.may_out.get(s, [])

    def must_from(self, s: str) -> list:
        return self.must_out.get(s, [])

    @cached_property
    def actions(self) -> frozenset:
        return frozenset(lab.action for _, lab, _ in self.may | self.must)

    def sorted_states(self) -> list:
        return sorted(self.states)

    def reachable(self) -> frozenset:
        seen = {self.initial}
        stack = [self.initial]
        while stack:
            s = stack.pop()
            for _, t in self.may_from(s) + self.must_from(s):
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return frozenset(seen)

    def restrict(self, keep: Iterable[str]) -> "Wmts":
        keep = frozenset(keep)
        return Wmts(
            keep,
            self.initial,
            frozenset(t for t in self.may if t[0] in keep and t[2] in keep),
            frozenset(t for t in self.must if t[0] in keep and t[2] in keep),
        )

    def __str__(self):
        from .io import dumps

        return dumps(self)


def _index(transitions) -> dict:
    out = defaultdict(list)
    for src, lab, dst in transitions:
        out[src].append((lab, dst))
    # (target, label) order keeps strategy extraction reproducible
    return {s: sorted(v, key=lambda p: (p[1], p[0])) for s, v in out.items()}


@dataclass(frozen=True)
class Issue:
    code: str
    ref: object
    message: str

    def __str__(self):
        return f"{self.code}: {self.message}"


@dataclass
class Diagnostics:
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def __bool__(self):
        return self.ok

    def __iter__(self) -> Iterator[Issue]:
        yield from self.errors
        yield from self.warnings


def label_refines(k: SpecLabel, l: SpecLabel) -> bool:
    """``k ⊑ l``: same action and ``k``'s interval inside ``l``'s."""
    return k.action == l.action and l.lo <= k.lo and k.hi <= l.hi


def validate(s: Wmts) -> Diagnostics:
    diag = Diagnostics()
    for src, k, dst in sorted(s.must):
        if not any(t == dst and label_refines(k, l) for l, t in s.may_from(src)):
            diag.errors.append(
                Issue(
                    "must-not-covered",
                    (src, k, dst),
                    f"must {src} {k} {dst} has no may {src} -> {dst} with a wider label",
                )
            )
    unreachable = s.states - s.reachable()
    if unreachable:
        diag.warnings.append(
            Issue("unreachable", tuple(sorted(unreachable)), f"unreachable states: {' '.join(sorted(unreachable))}")
        )
    return diag


def is_deterministic(s: Wmts) -> bool:
    seen = {}
    for src, lab, dst in s.may:
        key = (src, lab.action)
        val = (lab.interval, dst)
        if seen.setdefault(key, val) != val:
            return False
    return True


def is_implementation(s: Wmts) -> bool:
    return s.may == s.must and all(lab.interval.is_point and lab.interval.is_finite for _, lab, _ in s.may)


def is_locally_consistent(s: Wmts) -> bool:
    """Every state's musts are covered by its mays (no state needs pruning)."""
    return validate(s).ok


def add_covering_mays(s: Wmts) -> Wmts:
    """Insert a may-copy of every must that lacks a covering may."""
    extra = {t for t in s.must if not any(d == t[2] and label_refines(t[1], l) for l, d in s.may_from(t[0]))}
    if not extra:
        return s
    return Wmts(s.states, s.initial, s.may | extra, s.must)
