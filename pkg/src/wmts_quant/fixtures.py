"""Small reference systems used by the tests, demos and shipped spec files."""

from __future__ import annotations

from .model import Wmts


def _spec(states, initial, both=(), may_only=()):
    both = list(both)
    return Wmts.build(states, initial, may=both + list(may_only), must=both)


def email_spec() -> Wmts:
    """Mail server: receive, then deliver or (optionally) check before delivering."""
    return _spec(
        ["s0", "s1", "s2"],
        "s0",
        both=[
            ("s0", "receive", (1, 3), "s1"),
            ("s1", "deliver", (1, 4), "s0"),
            ("s2", "deliver", (1, 2), "s0"),
        ],
        may_only=[("s1", "check", (0, 5), "s2")],
    )


def email_impls() -> dict:
    """Four implementations of increasing quality against :func:`email_spec`."""
    return {
        "I1": Wmts.implementation(
            ["i0", "i1"], "i0", [("i0", "receive", 2, "i1"), ("i1", "deliver", 3, "i0"), ("i1", "check", 1, "i1")]
        ),
        "I2": Wmts.implementation(["i0", "i1"], "i0", [("i0", "receive", 4, "i1"), ("i1", "deliver", 3, "i0")]),
        "I3": Wmts.implementation(
            ["i0", "i1", "i2"],
            "i0",
            [
                ("i0", "receive", 3, "i1"),
                ("i1", "deliver", 3, "i0"),
                ("i1", "check", 1, "i2"),
                ("i2", "deliver", 3, "i0"),
            ],
        ),
        "I4": Wmts.implementation(["i0", "i1"], "i0", [("i0", "receive", 2, "i1"), ("i1", "deliver", 3, "i0")]),
    }


def branching_pair() -> tuple:
    """Two implementations whose branching distance at 0.9 is 18."""
    i1 = Wmts.implementation(
        ["i1", "j1", "k1"],
        "i1",
        [("i1", "a", 3, "j1"), ("i1", "a", 7, "k1"), ("k1", "a", 6, "j1"), ("k1", "a", 9, "k1")],
    )
    i2 = Wmts.implementation(["i2", "j2"], "i2", [("i2", "a", 6, "j2"), ("i2", "a", 7, "i2")])
    return i1, i2


def determinization_pair() -> tuple:
    """A non-deterministic ``S`` and a deterministic ``D``; ``D'(S)`` is farther from ``D`` than ``S``."""
    s = Wmts.build(
        ["s0", "s1", "s2", "s3", "s4"],
        "s0",
        may=[
            ("s0", "a", (3, 3), "s1"),
            ("s0", "a", (5, 6), "s2"),
            ("s1", "a", (3, 3), "s3"),
            ("s2", "a", (0, 0), "s4"),
        ],
    )
    d = Wmts.build(["d0", "d1", "d2"], "d0", may=[("d0", "a", (2, 3), "d1"), ("d1", "a", (0, 0), "d2")])
    return s, d


def conjunction_triple() -> tuple:
    """``S`` is at distance 1 from both ``S1`` and ``S2`` but their conjunction is empty."""
    s = Wmts.build(["s", "t"], "s", may=[("s", "a", (1, 2), "t")])
    s1 = Wmts.build(["s1", "t1"], "s1", may=[("s1", "a", (0, 1), "t1")])
    s2 = Wmts.build(["s2", "t2"], "s2", may=[("s2", "a", (2, 3), "t2")])
    return s, s1, s2


def quotient_triple() -> tuple:
    s1 = Wmts.build(["s1", "t1"], "s1", may=[("s1", "a", (0, 0), "t1")])
    s2 = Wmts.build(["s2", "t2"], "s2", may=[("s2", "a", (0, 1), "t2")])
    s3 = Wmts.build(["s3", "t3"], "s3", may=[("s3", "a", (0, 0), "t3")])
    return s1, s2, s3


def incompleteness_pair() -> tuple:
    s1 = Wmts.build(["s1", "t1"], "s1", may=[("s1", "a", (0, 1), "t1")])
    s2 = Wmts.build(["s2", "t2", "t3"], "s2", may=[("s2", "a", (0, 0), "t2"), ("s2", "a", (1, 1), "t3")])
    return s1, s2


def widening_example() -> tuple:
    """A two-step point specification and an implementation overshooting the first weight by 10."""
    s = _spec(["s", "t", "u"], "s", both=[("s", "a", (5, 5), "t"), ("t", "a", (5, 5), "u")])
    i = Wmts.implementation(["i", "j", "k"], "i", [("i", "a", 15, "j"), ("j", "a", 5, "k")])
    return s, i
