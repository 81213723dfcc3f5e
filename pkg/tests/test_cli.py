"""End-to-end tests for the command-line interface."""

import openpyxl

from coopguards.cli import EXIT_INVALID, EXIT_OK, EXIT_VERIFY, main
from coopguards.parser import parse_guards_file, parse_polygon_file, parse_trace_file
from tests.polygons import SQH_TEXT

SQ_TEXT = "POLY 1\nouter 4\n0 0\n10 0\n10 10\n0 10\n"


def _write(tmp_path, name: str, content: str) -> str:
    path = tmp_path / name
    path.write_text(content, encoding="utf-8")
    return str(path)


# ─── gen ─────────────────────────────────────────────────────────────────────

def test_gen_comb_to_file(tmp_path):
    out = str(tmp_path / "comb.poly")
    assert main(["gen", "comb", "--teeth", "8", "-o", out]) == EXIT_OK
    poly = parse_polygon_file(out)
    assert poly.h == 0
    assert poly.n == 20


def test_gen_random_is_reproducible(capsys):
    assert main(["gen", "random", "--n", "20", "--holes", "1", "--seed", "3"]) == EXIT_OK
    first = capsys.readouterr().out
    assert main(["gen", "random", "--n", "20", "--holes", "1", "--seed", "3"]) == EXIT_OK
    assert capsys.readouterr().out == first
    assert first.startswith("POLY 1")


def test_gen_seed_from_environment(capsys, monkeypatch):
    main(["gen", "random", "--n", "20", "--holes", "1", "--seed", "7"])
    explicit = capsys.readouterr().out
    monkeypatch.setenv("GW_SEED", "7")
    main(["gen", "random", "--n", "20", "--holes", "1"])
    assert capsys.readouterr().out == explicit


def test_non_integer_seed_in_environment(monkeypatch):
    monkeypatch.setenv("GW_SEED", "abc")
    assert main(["gen", "comb"]) == EXIT_INVALID


# ─── guards / verify ─────────────────────────────────────────────────────────

def test_guards_on_square(tmp_path, capsys):
    poly = _write(tmp_path, "sq.poly", SQ_TEXT)
    assert main(["guards", "-i", poly]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "guards 1 bound 1"
    guards = parse_guards_file(str(tmp_path / "sq.guards"), parse_polygon_file(poly))
    assert guards.vertices == (0,)


def test_guards_writes_svg(tmp_path):
    poly = _write(tmp_path, "sqh.poly", SQH_TEXT)
    svg = tmp_path / "sqh.svg"
    assert main(["guards", "-i", poly, "--svg", str(svg)]) == EXIT_OK
    assert "triangle" in svg.read_text(encoding="utf-8")


def test_verify_square(tmp_path, capsys):
    poly = _write(tmp_path, "sq.poly", SQ_TEXT)
    guards = _write(tmp_path, "sq.guards", "guard 0 0 0\n")
    assert main(["verify", "-i", poly, "-g", guards, "--samples", "200"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[0] == "coverage 1.0 connected yes bound ok"


def test_verify_disconnected_guards(tmp_path, capsys):
    poly = _write(tmp_path, "sqh.poly", SQH_TEXT)
    guards = _write(tmp_path, "sqh.guards", "guard 0 0 0\nguard 2 12 12\n")
    assert main(["verify", "-i", poly, "-g", guards, "--samples", "200"]) == EXIT_VERIFY
    out = capsys.readouterr().out
    assert "connected no" in out
    assert out.count("component ") == 2


def test_invalid_polygon(tmp_path):
    poly = _write(tmp_path, "bad.poly", "POLY 1\nouter 3\n0 0\n1 0\n")
    assert main(["guards", "-i", poly]) == EXIT_INVALID


def test_missing_input_file(tmp_path):
    assert main(["guards", "-i", str(tmp_path / "nope.poly")]) == EXIT_INVALID


# ─── simulate ────────────────────────────────────────────────────────────────

def test_simulate_depth(tmp_path, capsys):
    poly = _write(tmp_path, "sqh.poly", SQH_TEXT)
    assert main(["simulate", "-i", poly, "--agents", "4", "--seed", "2"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("rounds ")
    trace = parse_trace_file(str(tmp_path / "sqh.trace"))
    assert trace.total_rounds > 0
    assert (tmp_path / "sqh.sim.guards").exists()


def test_simulate_insufficient_agents(tmp_path):
    poly = _write(tmp_path, "sqh.poly", SQH_TEXT)
    assert main(["simulate", "-i", poly, "--agents", "1"]) == EXIT_INVALID


def test_simulate_requires_agents(tmp_path):
    poly = _write(tmp_path, "sq.poly", SQ_TEXT)
    assert main(["simulate", "-i", poly]) == EXIT_INVALID


def test_simulate_proximity(tmp_path, capsys):
    poly = _write(tmp_path, "sq.poly", SQ_TEXT)
    trace = tmp_path / "sq.log"
    assert main(["simulate", "-i", poly, "--model", "proximity", "--trace", str(trace)]) == EXIT_OK
    assert capsys.readouterr().out.startswith("rounds ")
    replayed = parse_trace_file(str(trace))
    assert replayed.mode == "proximity"
    assert replayed.total_rounds > 0
    kinds = {ev.kind for rnd in replayed.rounds for ev in rnd.events}
    assert kinds == {"TRIANGLE", "VALIDATE"}


# ─── render / scaling ────────────────────────────────────────────────────────

def test_render_writes_svg(tmp_path):
    poly = _write(tmp_path, "sqh.poly", SQH_TEXT)
    assert main(["render", "-i", poly, "--overlay", "triangulation", "--overlay", "dual"]) == EXIT_OK
    assert (tmp_path / "sqh.svg").read_text(encoding="utf-8").startswith("<svg")


def test_render_trace_overlay_without_trace(tmp_path):
    poly = _write(tmp_path, "sq.poly", SQ_TEXT)
    assert main(["render", "-i", poly, "--overlay", "trace"]) == EXIT_INVALID


def test_scaling_workbook(tmp_path, capsys):
    out = str(tmp_path / "scaling.xlsx")
    assert main(["scaling", "--model", "small-memory", "--sizes", "8,12", "-o", out]) == EXIT_OK
    assert capsys.readouterr().out.strip() == f"Output written to: {out}"
    wb = openpyxl.load_workbook(out)
    assert wb.sheetnames == ["small-memory", "constants"]
    wb.close()


def test_scaling_bad_sizes(tmp_path):
    assert main(["scaling", "--sizes", "8,x", "-o", str(tmp_path / "s.xlsx")]) == EXIT_INVALID
