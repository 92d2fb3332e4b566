"""JSON game files, schedule files and Graphviz export.

A game file looks like::

    {
      "vertices": [{"id": 0, "owner": "random", "priority": 0, "label": "v0"}, ...],
      "edges": [{"from": 0, "to": 1, "prob": "1/10"}, ...],
      "objective": {"type": "parity"}
    }

Probabilities are strings (``"1/10"`` or ``"0.1"``) and are read exactly.
JSON numbers are refused for probabilities so no value goes through a
binary float.
"""

from __future__ import annotations

import json
from decimal import Context, Decimal
from fractions import Fraction

from .game import Arena, MarkovChain, Owner, Parity, Reachability, validate
from .reduction import AlphaSchedule

__all__ = [
    "GameSyntaxError",
    "SemanticError",
    "parse",
    "load",
    "serialize",
    "to_document",
    "dump",
    "parse_alpha",
    "load_alpha",
    "serialize_alpha",
    "chain_document",
    "to_dot",
    "approx",
    "fmt_exact",
]


class GameSyntaxError(ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"{message}{where}")


class SemanticError(ValueError):
    def __init__(self, message, violations=()):
        self.violations = list(violations)
        super().__init__(message)


def approx(value: Fraction, digits: int = 12) -> str:
    """Decimal rendering with ``digits`` significant digits; works far below float range."""
    value = Fraction(value)
    ctx = Context(prec=digits)
    d = ctx.divide(Decimal(value.numerator), Decimal(value.denominator))
    if d:
        # pad to exactly ``digits`` significant digits, e.g. 0.1 -> 0.100000000000
        d = d.quantize(Decimal(1).scaleb(d.adjusted() - digits + 1), context=ctx)
    return format(d, f".{digits}g")


def fmt_exact(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator} (~{approx(value)})"


def _loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameSyntaxError(exc.msg, exc.lineno, exc.colno) from None


def _prob(raw, where: str) -> Fraction:
    if not isinstance(raw, str):
        raise SemanticError(f"{where}: probability must be a string such as \"1/10\", got {raw!r}")
    try:
        return Fraction(raw.strip())
    except (ValueError, ZeroDivisionError):
        raise SemanticError(f"{where}: {raw!r} is not an exact rational") from None


def _int(raw, where: str) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise SemanticError(f"{where}: expected an integer, got {raw!r}")
    return raw


def parse(text: str, check: bool = True) -> tuple:
    """Parse a game document into ``(Arena, objective)``."""
    doc = _loads(text)
    if not isinstance(doc, dict):
        raise SemanticError("top level must be an object")
    for key in ("vertices", "edges", "objective"):
        if key not in doc:
            raise SemanticError(f"missing key {key!r}")

    vertices = doc["vertices"]
    if not isinstance(vertices, list):
        raise SemanticError("'vertices' must be a list")
    by_id = {}
    for pos, v in enumerate(vertices):
        where = f"vertices[{pos}]"
        if not isinstance(v, dict):
            raise SemanticError(f"{where}: expected an object")
        vid = _int(v.get("id"), f"{where}.id")
        if vid in by_id:
            raise SemanticError(f"{where}: duplicate id {vid}")
        try:
            owner = Owner(v.get("owner"))
        except ValueError:
            raise SemanticError(f"{where}: owner must be eve, adam or random, got {v.get('owner')!r}") from None
        priority = v.get("priority")
        if priority is not None:
            priority = _int(priority, f"{where}.priority")
        by_id[vid] = (owner, priority, v.get("label"))
    n = len(by_id)
    if sorted(by_id) != list(range(n)):
        raise SemanticError(f"vertex ids must be exactly 0..{n - 1}")

    edges, delta, seen = [], {}, set()
    if not isinstance(doc["edges"], list):
        raise SemanticError("'edges' must be a list")
    for pos, e in enumerate(doc["edges"]):
        where = f"edges[{pos}]"
        if not isinstance(e, dict):
            raise SemanticError(f"{where}: expected an object")
        u = _int(e.get("from"), f"{where}.from")
        v = _int(e.get("to"), f"{where}.to")
        if u not in by_id or v not in by_id:
            raise SemanticError(f"{where}: unknown vertex in ({u}, {v})")
        if (u, v) in seen:
            raise SemanticError(f"{where}: duplicate edge ({u}, {v})")
        seen.add((u, v))
        edges.append((u, v))
        random_source = by_id[u][0] is Owner.RANDOM
        if "prob" in e:
            if not random_source:
                raise SemanticError(f"{where}: probability on an edge leaving a non-random vertex")
            delta[(u, v)] = _prob(e["prob"], where)
        elif random_source:
            raise SemanticError(f"{where}: edge from a random vertex needs 'prob'")

    owners = [by_id[i][0] for i in range(n)]
    labels = [by_id[i][2] if by_id[i][2] is not None else f"v{i}" for i in range(n)]
    arena = Arena(owners, edges, delta, labels)

    obj = doc["objective"]
    if not isinstance(obj, dict) or obj.get("type") not in ("parity", "reachability"):
        raise SemanticError("objective must be {\"type\": \"parity\"} or {\"type\": \"reachability\", ...}")
    if obj["type"] == "parity":
        missing = [i for i in range(n) if by_id[i][1] is None]
        if missing:
            raise SemanticError(f"parity objective but no priority for vertices {missing}")
        objective = Parity([by_id[i][1] for i in range(n)])
    else:
        target = obj.get("target")
        if not isinstance(target, list):
            raise SemanticError("reachability objective needs a 'target' list")
        objective = Reachability([_int(t, "objective.target") for t in target])

    if check:
        violations = validate(arena, objective)
        if violations:
            raise SemanticError("; ".join(map(str, violations)), violations)
    return arena, objective


def load(path) -> tuple:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def _frac_str(p: Fraction) -> str:
    return str(p.numerator) if p.denominator == 1 else f"{p.numerator}/{p.denominator}"


def to_document(arena: Arena, objective, approx_hints: bool = False) -> dict:
    priorities = objective.priorities if isinstance(objective, Parity) else None
    vertices = []
    for i, owner in enumerate(arena.owners):
        v = {"id": i, "owner": owner.value}
        if priorities is not None:
            v["priority"] = priorities[i]
        v["label"] = arena.labels[i]
        vertices.append(v)
    edges = []
    for u, v in arena.edges:
        e = {"from": u, "to": v}
        if arena.owners[u] is Owner.RANDOM:
            p = arena.delta[(u, v)]
            e["prob"] = _frac_str(p)
            if approx_hints:
                e["approx"] = approx(p)
        edges.append(e)
    if isinstance(objective, Parity):
        obj = {"type": "parity"}
    else:
        obj = {"type": "reachability", "target": sorted(objective.target)}
    return {"vertices": vertices, "edges": edges, "objective": obj}


def serialize(arena: Arena, objective, approx_hints: bool = False, indent: int | None = 1) -> str:
    return json.dumps(to_document(arena, objective, approx_hints), indent=indent)


def dump(path, arena: Arena, objective, approx_hints: bool = False) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(arena, objective, approx_hints))
        fh.write("\n")


def chain_document(mc: MarkovChain, target) -> str:
    return serialize(mc.as_arena(), Reachability(target))


def parse_alpha(text: str) -> AlphaSchedule:
    """Schedule file: ``{"type": "geometric", "first": "1/8", "ratio": "1/8"}``,
    ``{"type": "constant", "value": "1/2"}`` or
    ``{"type": "table", "values": {"0": "1/8", "1": "1/64"}}``."""
    doc = _loads(text)
    if not isinstance(doc, dict):
        raise SemanticError("alpha file must hold an object")
    kind = doc.get("type")
    if kind == "geometric":
        return AlphaSchedule.geometric(_prob(doc.get("first"), "first"), _prob(doc.get("ratio"), "ratio"))
    if kind == "constant":
        return AlphaSchedule.constant(_prob(doc.get("value"), "value"))
    if kind == "table":
        values = doc.get("values")
        if not isinstance(values, dict):
            raise SemanticError("table schedule needs a 'values' object")
        try:
            return AlphaSchedule.from_table({int(k): _prob(v, f"values[{k}]") for k, v in values.items()})
        except ValueError as exc:
            if isinstance(exc, SemanticError):
                raise
            raise SemanticError(f"table keys must be integers: {exc}") from None
    raise SemanticError(f"unknown alpha type {kind!r}")


def load_alpha(path) -> AlphaSchedule:
    with open(path, encoding="utf-8") as fh:
        return parse_alpha(fh.read())


def serialize_alpha(alpha: AlphaSchedule) -> str:
    if alpha.kind == "geometric":
        doc = {"type": "geometric", "first": _frac_str(alpha.first), "ratio": _frac_str(alpha.ratio)}
    else:
        doc = {"type": "table", "values": {str(k): _frac_str(a) for k, a in alpha.table}}
    return json.dumps(doc)


_SHAPES = {Owner.EVE: "square", Owner.ADAM: "pentagon", Owner.RANDOM: "circle"}


def _quote(s: str) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(arena: Arena, objective=None, sinks: tuple = ()) -> str:
    """Graphviz source; owners map to shapes, winning sinks are green and losing ones red.

    ``sinks`` is ``(win, lose)``. Without it, targets of a reachability
    objective are drawn as winning sinks.
    """
    win = set()
    lose = set()
    if sinks:
        win.add(sinks[0])
        lose.add(sinks[1])
    elif isinstance(objective, Reachability):
        win |= objective.target
    priorities = objective.priorities if isinstance(objective, Parity) else None
    lines = ["digraph G {", "  rankdir=LR;"]
    for i, owner in enumerate(arena.owners):
        label = arena.labels[i]
        if priorities is not None:
            label = f"{label}\\np={priorities[i]}"
        attrs = [f"label={_quote(label)}", f"shape={_SHAPES[owner]}"]
        if i in win:
            attrs.append('style=filled, fillcolor="palegreen"')
        elif i in lose:
            attrs.append('style=filled, fillcolor="lightcoral"')
        lines.append(f"  n{i} [{', '.join(attrs)}];")
    for u, v in arena.edges:
        if arena.owners[u] is Owner.RANDOM:
            lines.append(f"  n{u} -> n{v} [label={_quote(_frac_str(arena.delta[(u, v)]))}];")
        else:
            lines.append(f"  n{u} -> n{v};")
    lines.append("}")
    return "\n".join(lines) + "\n"
