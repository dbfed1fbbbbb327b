"""Reading and writing WMTS files.

Two encodings are supported.  The line-oriented text format::

    wmts
    states: s0 s1
    initial: s0
    must s0 receive [1,3] s1
    may  s0 receive [1,3] s1

or, for implementations, header ``impl`` and lines ``SRC ACTION W DST``.
The structured format is a single JSON object with keys ``states``,
``initial``, ``may`` and ``must``; each transition is an object with
``src``, ``action``, ``lo``, ``hi`` and ``dst`` (``"-inf"``/``"inf"`` allowed).
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from .model import SpecLabel, WeightInterval, Wmts, format_bound, parse_bound

TEXT = "text"
STRUCTURED = "structured"


class WmtsParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0, source: str = "<string>"):
        self.line = line
        self.col = col
        self.source = source
        where = f"{source}:{line}:{col}: " if line else f"{source}: "
        super().__init__(where + message)


_SPEC_LINE = re.compile(r"^(may|must)\s+(\S+)\s+([^\s\[]+)\s*\[\s*([^,\]\s]+)\s*,\s*([^\]\s]+)\s*\]\s+(\S+)$")
_IMPL_LINE = re.compile(r"^(\S+)\s+(\S+)\s+(-?\d+)\s+(\S+)$")


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def _loads_text(text: str, source: str) -> tuple:
    kind = None
    states = None
    initial = None
    may, must = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        col = raw.find(line[0]) + 1

        def fail(msg):
            raise WmtsParseError(msg, lineno, col, source)

        if kind is None:
            if line not in ("wmts", "impl"):
                fail(f"expected header 'wmts' or 'impl', got {line!r}")
            kind = line
            continue
        if line.startswith("states:"):
            if states is not None:
                fail("duplicate 'states:' line")
            states = line[len("states:"):].split()
            if not states:
                fail("empty states list")
            continue
        if line.startswith("initial:"):
            if initial is not None:
                fail("duplicate 'initial:' line")
            parts = line[len("initial:"):].split()
            if len(parts) != 1:
                fail("'initial:' takes exactly one state")
            initial = parts[0]
            continue
        try:
            if kind == "wmts":
                m = _SPEC_LINE.match(line)
                if not m:
                    fail(f"cannot parse transition {line!r}")
                rel, src, action, lo, hi, dst = m.groups()
                lab = SpecLabel(action, WeightInterval(parse_bound(lo), parse_bound(hi)))
                (may if rel == "may" else must).append((src, lab, dst))
            else:
                m = _IMPL_LINE.match(line)
                if not m:
                    fail(f"cannot parse implementation transition {line!r}")
                src, action, w, dst = m.groups()
                lab = SpecLabel(action, WeightInterval(int(w), int(w)))
                may.append((src, lab, dst))
                must.append((src, lab, dst))
        except WmtsParseError:
            raise
        except ValueError as exc:
            fail(str(exc))
    if kind is None:
        raise WmtsParseError("missing header", source=source)
    if states is None:
        raise WmtsParseError("missing 'states:' line", source=source)
    if initial is None:
        raise WmtsParseError("missing 'initial:' line", source=source)
    try:
        return Wmts(frozenset(states), initial, frozenset(may), frozenset(must)), kind
    except ValueError as exc:
        raise WmtsParseError(str(exc), source=source) from None


def _bound_from_json(x, lower: bool):
    if isinstance(x, str):
        return parse_bound(x)
    return x


def _loads_structured(text: str, source: str) -> tuple:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise WmtsParseError(exc.msg, exc.lineno, exc.colno, source) from None
    try:
        states = obj["states"]
        if not states:
            raise WmtsParseError("empty states list", source=source)
        rels = {}
        for rel in ("may", "must"):
            rels[rel] = frozenset(
                (
                    t["src"],
                    SpecLabel(t["action"], WeightInterval(_bound_from_json(t["lo"], True), _bound_from_json(t["hi"], False))),
                    t["dst"],
                )
                for t in obj.get(rel, [])
            )
        s = Wmts(frozenset(states), obj["initial"], rels["may"], rels["must"])
    except WmtsParseError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise WmtsParseError(f"malformed structured system: {exc}", source=source) from None
    return s, obj.get("kind", "wmts")


def detect_format(text: str) -> str:
    return STRUCTURED if text.lstrip().startswith("{") else TEXT


def loads_with_kind(text: str, source: str = "<string>") -> tuple:
    """Parse either encoding; returns ``(system, kind)`` with kind ``wmts`` or ``impl``."""
    if detect_format(text) == STRUCTURED:
        return _loads_structured(text, source)
    return _loads_text(text, source)


def loads(text: str) -> Wmts:
    return loads_with_kind(text)[0]


def load(path) -> Wmts:
    path = Path(path)
    return loads_with_kind(path.read_text(encoding="utf-8"), str(path))[0]


def _sorted(ts):
    return sorted(ts, key=lambda t: (t[0], t[1], t[2]))


def dumps(s: Wmts, fmt: str = TEXT, kind: str = "wmts") -> str:
    """Canonical encoding: states, then may and must lines, all sorted."""
    if kind == "impl" and not (s.may == s.must and all(l.interval.is_point for _, l, _ in s.may)):
        raise ValueError("system is not an implementation")
    if fmt == STRUCTURED:
        def enc(x):
            return x if isinstance(x, int) else format_bound(x)

        obj = {"kind": kind, "states": s.sorted_states(), "initial": s.initial}
        for rel in ("may", "must"):
            obj[rel] = [
                {"src": a, "action": l.action, "lo": enc(l.lo), "hi": enc(l.hi), "dst": b}
                for a, l, b in _sorted(getattr(s, rel))
            ]
        return json.dumps(obj, indent=2) + "\n"
    if fmt != TEXT:
        raise ValueError(f"unknown format {fmt!r}")
    lines = [kind, "states: " + " ".join(s.sorted_states()), f"initial: {s.initial}"]
    if kind == "impl":
        lines += [f"{a} {l.action} {l.lo} {b}" for a, l, b in _sorted(s.must)]
    else:
        for rel in ("must", "may"):
            lines += [f"{rel} {a} {l.action} {l.interval} {b}" for a, l, b in _sorted(getattr(s, rel))]
    return "\n".join(lines) + "\n"


def dump(s: Wmts, path, fmt: str = TEXT, kind: str = "wmts") -> None:
    Path(path).write_text(dumps(s, fmt, kind), encoding="utf-8")
