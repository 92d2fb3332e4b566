import json
from fractions import Fraction as F
from pathlib import Path

import pytest

from spg2ssg import io
from spg2ssg.cli import main
from spg2ssg.game import Arena, Owner, Parity, Reachability
from spg2ssg.generators import running_example
from spg2ssg.reduction import AlphaSchedule, default_alpha, reduce

DATA = Path(__file__).parent / "data"


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


MINIMAL = '{"vertices": [{"id": 0, "owner": "random", "priority": 0}], "edges": [{"from": 0, "to": 0, "prob": "1"}], "objective": {"type": "parity"}}'


def test_minimal_file():
    arena, obj = io.parse(MINIMAL)
    assert arena.n == 1 and obj == Parity([0])


def test_decimal_probability_is_exact():
    doc = json.loads(MINIMAL)
    doc["vertices"].append({"id": 1, "owner": "random", "priority": 1})
    doc["edges"] = [
        {"from": 0, "to": 0, "prob": "0.9"},
        {"from": 0, "to": 1, "prob": "0.1"},
        {"from": 1, "to": 1, "prob": "1"},
    ]
    arena, _ = io.parse(json.dumps(doc))
    assert arena.prob(0, 1) == F(1, 10)


def test_round_trip_running_example():
    arena, parity = running_example()
    back = io.parse(io.serialize(arena, parity))
    assert back == (arena, parity)


def test_round_trip_reduced_game_keeps_huge_fractions():
    arena, parity = running_example()
    red = reduce(arena, parity, default_alpha(6, 10))
    text = io.serialize(red.arena, red.objective, approx_hints=True)
    assert "e+" not in text.split('"approx"')[0]
    back, obj = io.parse(text)
    assert back == red.arena and obj == red.objective
    assert '"approx"' in text


def test_syntax_error_position():
    with pytest.raises(io.GameSyntaxError) as info:
        io.parse('{\n  "vertices": [,]\n}')
    assert info.value.line == 2 and info.value.column > 1


@pytest.mark.parametrize(
    "mutate, fragment",
    [
        (lambda d: d["edges"][0].update(prob=1), "must be a string"),
        (lambda d: d["edges"][0].update(prob=0.5), "must be a string"),
        (lambda d: d["edges"][0].update(prob="x"), "not an exact rational"),
        (lambda d: d["edges"][0].pop("prob"), "needs 'prob'"),
        (lambda d: d["vertices"][0].update(owner="nature"), "owner"),
        (lambda d: d["vertices"][0].update(id=4), "ids"),
        (lambda d: d["vertices"][0].pop("priority"), "no priority"),
        (lambda d: d.pop("edges"), "missing key"),
        (lambda d: d["edges"][0].update(to=7), "unknown vertex"),
        (lambda d: d["edges"][0].update(prob="1/2"), "sums to 1/2"),
        (lambda d: d.update(objective={"type": "reachability", "target": []}), "empty"),
    ],
)
def test_semantic_errors(mutate, fragment):
    doc = json.loads(MINIMAL)
    mutate(doc)
    with pytest.raises(io.SemanticError) as info:
        io.parse(json.dumps(doc))
    assert fragment in str(info.value)


def test_alpha_files():
    assert io.parse_alpha('{"type": "constant", "value": "1/2"}') == AlphaSchedule.constant(F(1, 2))
    g = io.parse_alpha('{"type": "geometric", "first": "1/8", "ratio": "1/4"}')
    assert g[2] == F(1, 128)
    t = io.parse_alpha('{"type": "table", "values": {"0": "1/8", "3": "1/64"}}')
    assert t[3] == F(1, 64) and not t.defined_at(1)
    assert io.parse_alpha(io.serialize_alpha(g)) == g
    with pytest.raises(io.SemanticError):
        io.parse_alpha('{"type": "constant", "value": 0.5}')


def test_dot_export_is_deterministic_and_styled():
    arena, parity = running_example()
    red = reduce(arena, parity, AlphaSchedule.constant(F(1, 8)))
    a = io.to_dot(red.arena, red.objective, red.sinks)
    assert a == io.to_dot(red.arena, red.objective, red.sinks)
    assert "shape=square" in a and "shape=pentagon" in a and "shape=circle" in a
    assert 'n12 [label="win", shape=circle, style=filled, fillcolor="palegreen"]' in a
    assert "lightcoral" in a
    assert 'n0 -> n1 [label="9/10"]' in a


def test_approx_formatting():
    assert io.approx(F(1, 3)) == "0.333333333333"
    assert io.approx(F(1, 10**400)) == "1.00000000000e-400"
    assert io.fmt_exact(F(1, 10)) == "1/10 (~0.100000000000)"


@pytest.fixture
def fig1(tmp_path):
    arena, parity = running_example()
    path = tmp_path / "fig1.json"
    io.dump(path, arena, parity)
    return str(path)


def test_cli_validate(fig1, tmp_path, capsys):
    assert main(["validate", fig1]) == 0
    bad = write(tmp_path, "bad.json", MINIMAL.replace('"prob": "1"', '"prob": "1/2"'))
    assert main(["validate", bad]) == 1
    assert "sums to 1/2" in capsys.readouterr().out
    assert main(["validate", write(tmp_path, "x.json", "{")]) == 2
    assert main(["validate", str(tmp_path / "missing.json")]) == 2
    assert main(["no-such-command"]) == 2


def test_cli_bounds(fig1, capsys):
    assert main(["bounds", fig1]) == 0
    out = capsys.readouterr().out
    assert "M = 10" in out and "n = 6" in out
    assert "delta_min = 1/10 (~0.100000000000)" in out
    assert f"epsilon = 1/{518400 * 10**72} (~1.92901234568e-78)" in out


def test_cli_reduce_and_solve(fig1, tmp_path, capsys):
    out = str(tmp_path / "red.json")
    assert main(["reduce", fig1, "--out", out]) == 0
    arena, obj = io.load(out)
    assert arena.n == 14 and isinstance(obj, Reachability)
    assert main(["solve", out, "--method", "si"]) == 0
    text = capsys.readouterr().out
    assert "method: si" in text
    assert main(["solve", out, "--method", "vi"]) == 0
    assert "meaningless" in capsys.readouterr().err
    assert main(["solve", fig1, "--method", "vi"]) == 2


def test_cli_solve_oracle_one_strategy(tmp_path, capsys):
    path = write(tmp_path, "one.json", MINIMAL)
    assert main(["solve", path, "--method", "oracle"]) == 0
    assert "v0: 1/1 (~1.00000000000)" in capsys.readouterr().out


def test_cli_verify_exit_codes(fig1, capsys):
    assert main(["verify", fig1]) == 0
    assert "transfer: holds" in capsys.readouterr().out
    bad = str(DATA / "flat_counterexample.json")
    assert main(["verify", bad]) == 0
    assert main(["verify", bad, "--alpha", str(DATA / "flat_half.json")]) == 1
    assert "FAILS" in capsys.readouterr().out


def test_cli_separation_and_worst_case(fig1, tmp_path, capsys):
    assert main(["separation", fig1]) == 0
    out = str(tmp_path / "wc.json")
    assert main(["worst-case", "--m", "3", "--s", "1/4", "--alpha", "1/8", "--out", out]) == 0
    assert "tight" in capsys.readouterr().out
    arena, obj = io.load(out)
    assert arena.n == 6 and obj == Reachability([4])
    assert main(["worst-case", "--m", "3", "--s", "0.9", "--alpha", "1/8"]) == 2


def test_cli_export_dot(fig1, tmp_path, capsys):
    assert main(["export-dot", fig1]) == 0
    assert capsys.readouterr().out.startswith("digraph G {")
    red = str(tmp_path / "red.json")
    main(["reduce", fig1, "--out", red])
    dot = str(tmp_path / "g.dot")
    assert main(["export-dot", red, "--out", dot]) == 0
    assert "palegreen" in Path(dot).read_text()
