"""Tests for the scaling report."""

import openpyxl
import pytest

from coopguards.errors import InvalidInputError
from coopguards.report import COLUMNS, ScalingRow, fit_constants, run_scaling, write_workbook


def _row(n: int, rounds: int, broadcasts: int) -> ScalingRow:
    return ScalingRow(n=n, h=0, agents=1, rounds=rounds, broadcasts=broadcasts, peak_mem=0, guards=1)


def test_fit_constants_power_law():
    fits = fit_constants([_row(10, 100, 30), _row(20, 400, 60), _row(40, 1600, 120)])
    exponent, constant = fits["rounds"]
    assert exponent == pytest.approx(2.0)
    assert constant == pytest.approx(1.0)
    assert fits["broadcasts"][0] == pytest.approx(1.0)


def test_fit_constants_needs_two_rows():
    assert fit_constants([_row(10, 100, 30)]) == {}


def test_run_scaling_small_memory_comb():
    rows = run_scaling("small-memory", [8, 12], family="comb")
    assert [r.n for r in rows] == [8, 12]
    assert rows[0].ratios == (None, None)
    assert rows[1].ratios[0] == pytest.approx(rows[1].rounds / rows[0].rounds)


def test_run_scaling_rejects_unknown_model():
    with pytest.raises(InvalidInputError, match="not supported"):
        run_scaling("telepathy", [8])


def test_write_workbook(tmp_path):
    rows = {"warmup": [_row(10, 100, 30), _row(20, 400, 60)]}
    output = write_workbook(rows, str(tmp_path / "scaling.xlsx"))

    wb = openpyxl.load_workbook(output)
    assert wb.sheetnames == ["warmup", "constants"]
    ws = wb["warmup"]
    assert [c.value for c in ws[1]] == COLUMNS
    assert ws.cell(row=3, column=1).value == 20
    assert ws["A1"].font.bold is True
    constants = wb["constants"]
    assert constants.cell(row=2, column=1).value == "warmup"
    assert constants.cell(row=2, column=3).value == pytest.approx(2.0)
    wb.close()


def test_write_workbook_default_name(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    output = write_workbook({"proximity": []}, stem="comb")
    assert output == "comb_scaling.xlsx"
    assert (tmp_path / output).exists()


@pytest.mark.slow
def test_warmup_doubling():
    rows = run_scaling("warmup", [16, 32, 64, 128], family="comb")
    for row in rows[1:]:
        assert row.ratios[0] <= 3
        assert row.ratios[1] <= 3


@pytest.mark.slow
def test_small_memory_doubling():
    rows = run_scaling("small-memory", [16, 32, 64, 128], family="comb")
    for row in rows[1:]:
        assert row.ratios[1] <= 5


@pytest.mark.slow
def test_proximity_doubling():
    rows = run_scaling("proximity", [16, 32, 64], family="comb")
    for row in rows[1:]:
        assert row.ratios[0] <= 17
