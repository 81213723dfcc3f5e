"""Tests for the emitters."""

from coopguards.emitter import (
    format_guards,
    format_polygon,
    format_trace,
    write_guards,
    write_polygon,
)
from coopguards.generators import gen_random_polygon, gen_ring_polygon
from coopguards.guards import GuardSet, solve
from coopguards.parser import parse_guards_file, parse_polygon_file, parse_polygon_text
from coopguards.sim import Prox, Round, SimTrace, simulate
from tests.polygons import SQH_TEXT, square, square_with_hole


# ─── Polygons ────────────────────────────────────────────────────────────────

def test_format_polygon_matches_input_format():
    assert format_polygon(square_with_hole()) == SQH_TEXT.replace("4 4\n8 4\n8 8\n4 8\n",
                                                                  "4 4\n4 8\n8 8\n8 4\n")


def test_polygon_round_trip(tmp_path):
    path = tmp_path / "ring.poly"
    poly = gen_ring_polygon(3)
    write_polygon(poly, str(path), note="ring-of-holes")

    text = path.read_text(encoding="utf-8")
    assert text.startswith("# coopguards polygon\n# ring-of-holes\n")
    assert parse_polygon_file(str(path)) == poly


def test_random_polygon_round_trip():
    poly = gen_random_polygon(24, 2, seed=7)
    assert parse_polygon_text(format_polygon(poly)) == poly


# ─── Guards ──────────────────────────────────────────────────────────────────

def test_format_guards_summary_line():
    poly = square()
    text = format_guards(solve(poly).guards, poly)
    assert text == "guard 0 0 0\nguards 1 bound 1\n"


def test_write_guards_round_trip(tmp_path):
    poly = square_with_hole()
    guards = solve(poly).guards
    path = tmp_path / "sqh.guards"
    write_guards(guards, poly, str(path), source="sqh.poly")

    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "# coopguards guards"
    assert lines[1] == "# Source: sqh.poly"
    assert lines[-1] == f"guards {len(guards)} bound 4"
    assert parse_guards_file(str(path), poly) == guards


def test_write_guards_is_byte_identical_across_runs(tmp_path):
    poly = square_with_hole()
    guards = solve(poly).guards
    first, second = tmp_path / "a.guards", tmp_path / "b.guards"
    write_guards(guards, poly, str(first), source="sqh.poly")
    write_guards(guards, poly, str(second), source="sqh.poly")
    assert first.read_bytes() == second.read_bytes()
    assert not any(line.startswith("# Date") for line in first.read_text(encoding="utf-8").splitlines())


def test_format_guards_non_vertex():
    text = format_guards(GuardSet((square().vertices[2],)), square())
    assert text.splitlines()[0] == "guard - 10 10"


# ─── Traces ──────────────────────────────────────────────────────────────────

def test_format_trace_header_and_memory_lines():
    _, trace = simulate(square(), 1)
    lines = format_trace(trace).splitlines()
    aid = trace.agent_ids[0]
    assert lines[0].startswith("TRACE 1 poly ")
    assert lines[0].endswith(f"mode small-memory seed 0 agents {aid}")
    assert lines[1] == f"R 1 LOOK {aid} 0 0"
    assert lines[2] == f"R 1 BCAST {aid} ID:{aid} -> -"
    assert lines[-1] == f"MEM {aid} peak {trace.peak_memory[aid]} budget 128"


def test_format_trace_prox_lines():
    trace = SimTrace(mode="proximity", polygon_digest="abc", seed=0, agent_ids=())
    trace.rounds = [Round(0, [Prox("TRIANGLE", (0, -1, 0, 1, 2))]),
                    Round(12, [Prox("VALIDATE", (2, 3, 1, 1))])]
    assert format_trace(trace) == (
        "TRACE 1 poly abc mode proximity seed 0 agents -\n"
        "R 0 PROX TRIANGLE 0 -1 0 1 2\n"
        "R 12 PROX VALIDATE 2 3 1 1\n"
    )
