"""Scaling report: run a model over a polygon family of growing size and
write the measurements to an Excel workbook.

Workbook layout
---------------
One sheet per model, one row per size:

    n | h | agents | rounds | broadcasts | peak_mem | guards | rounds/n | broadcasts/n | ...

followed by doubling ratios against the previous row. A final
``constants`` sheet holds least-squares fits ``log y = e log n + log c``
for rounds and broadcasts of every model.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import openpyxl
from openpyxl.styles import Font
from openpyxl.utils import get_column_letter

from coopguards.errors import InvalidInputError
from coopguards.generators import gen_comb_polygon, gen_random_polygon
from coopguards.geometry import PolygonWithHoles
from coopguards.proximity import proximity_explore
from coopguards.sim import Mode, simulate
from coopguards.triangulation import expected_triangle_count

logger = logging.getLogger(__name__)

SUPPORTED_MODELS: tuple[str, ...] = ('warmup', 'small-memory', 'proximity')
SUPPORTED_FAMILIES: tuple[str, ...] = ('comb', 'random')

COLUMNS = ['n', 'h', 'agents', 'rounds', 'broadcasts', 'peak_mem', 'guards',
           'rounds/n', 'broadcasts/n', 'broadcasts/n^2', 'rounds ratio', 'broadcasts ratio']


@dataclass
class ScalingRow:
    n: int
    h: int
    agents: int
    rounds: int
    broadcasts: int
    peak_mem: int
    guards: int
    ratios: tuple[float | None, float | None] = field(default=(None, None))

    def values(self) -> list:
        return [self.n, self.h, self.agents, self.rounds, self.broadcasts, self.peak_mem,
                self.guards, self.rounds / self.n, self.broadcasts / self.n,
                self.broadcasts / self.n ** 2, *self.ratios]


def family_polygon(family: str, n: int, seed: int = 0) -> PolygonWithHoles:
    """A member of ``family`` with (close to) n vertices."""
    if family == 'comb':
        return gen_comb_polygon(max(1, n // 2 - 2))
    if family == 'random':
        holes = 1 if n >= 12 else 0
        return gen_random_polygon(n, holes, seed)
    raise InvalidInputError(
        f"Family '{family}' is not supported. Supported: {', '.join(SUPPORTED_FAMILIES)}"
    )


def run_scaling(model: str, sizes: list[int], family: str = 'comb',
                seed: int = 0) -> list[ScalingRow]:
    """Measure ``model`` on one polygon of ``family`` per size."""
    if model not in SUPPORTED_MODELS:
        raise InvalidInputError(
            f"Model '{model}' is not supported. Supported: {', '.join(SUPPORTED_MODELS)}"
        )
    rows: list[ScalingRow] = []
    for n in sizes:
        polygon = family_polygon(family, n, seed)
        triangles = expected_triangle_count(polygon)
        if model == 'proximity':
            result = proximity_explore(polygon)
            row = ScalingRow(polygon.n, polygon.h, 0, result.cost.total_rounds,
                             result.cost.validations, 0, len(result.guards))
        else:
            agents = math.ceil(triangles / 2)
            guards, trace = simulate(polygon, agents, mode=Mode(model), seed=seed)
            row = ScalingRow(polygon.n, polygon.h, agents, trace.total_rounds,
                             trace.total_broadcasts, trace.max_peak_memory, len(guards))
        if rows:
            prev = rows[-1]
            row.ratios = (row.rounds / prev.rounds if prev.rounds else None,
                          row.broadcasts / prev.broadcasts if prev.broadcasts else None)
        logger.debug('%s n=%d: rounds=%d broadcasts=%d', model, row.n, row.rounds, row.broadcasts)
        rows.append(row)
    logger.info('Measured %s on %d %s polygons', model, len(rows), family)
    return rows


def fit_constants(rows: list[ScalingRow]) -> dict[str, tuple[float, float]]:
    """Exponent and constant of a power-law fit for rounds and broadcasts."""
    out: dict[str, tuple[float, float]] = {}
    if len(rows) < 2:
        return out
    log_n = np.log([r.n for r in rows])
    for metric in ('rounds', 'broadcasts'):
        values = np.array([getattr(r, metric) for r in rows], dtype=float)
        if np.any(values <= 0):
            continue
        exponent, intercept = np.polyfit(log_n, np.log(values), 1)
        out[metric] = (float(exponent), float(np.exp(intercept)))
    return out


def _autosize(ws) -> None:
    for col in range(1, ws.max_column + 1):
        width = max(len(str(ws.cell(row=r, column=col).value or ''))
                    for r in range(1, ws.max_row + 1))
        ws.column_dimensions[get_column_letter(col)].width = min(width + 2, 40)


def write_workbook(rows_by_model: dict[str, list[ScalingRow]], output_path: str | None = None,
                   stem: str = 'coopguards') -> str:
    """Write one sheet per model plus a ``constants`` sheet.

    Returns:
        The path written; defaults to ``<stem>_scaling.xlsx``.
    """
    if output_path is None:
        output_path = str(Path(f'{stem}_scaling.xlsx'))

    wb = openpyxl.Workbook()
    wb.remove(wb.active)
    bold = Font(bold=True)

    for model, rows in rows_by_model.items():
        ws = wb.create_sheet(title=model[:31])
        ws.append(COLUMNS)
        for cell in ws[1]:
            cell.font = bold
        for row in rows:
            ws.append(row.values())
        _autosize(ws)

    ws = wb.create_sheet(title='constants')
    ws.append(['model', 'metric', 'exponent', 'constant'])
    for cell in ws[1]:
        cell.font = bold
    for model, rows in rows_by_model.items():
        for metric, (exponent, constant) in fit_constants(rows).items():
            ws.append([model, metric, round(exponent, 4), round(constant, 4)])
    _autosize(ws)

    wb.save(output_path)
    wb.close()
    logger.info('Wrote scaling workbook (%d models) → %s', len(rows_by_model), output_path)
    return output_path
