"""Write polygons, guard sets and traces in the formats read by
:mod:`coopguards.parser`.

Every file starts with a short ``#`` header; the parser skips it.
"""

import logging

from coopguards.geometry import PolygonWithHoles
from coopguards.guards import GuardSet
from coopguards.sim import Broadcast, Halt, Look, Move, Prox, SimTrace
from coopguards.utils import format_number, guard_bound

logger = logging.getLogger(__name__)


def format_polygon(polygon: PolygonWithHoles) -> str:
    lines = ['POLY 1', f'outer {len(polygon.outer)}']
    lines += [str(p) for p in polygon.outer]
    for ring in polygon.holes:
        lines.append(f'hole {len(ring)}')
        lines += [str(p) for p in ring]
    return '\n'.join(lines) + '\n'


def write_polygon(polygon: PolygonWithHoles, output_path: str, note: str | None = None) -> None:
    with open(output_path, 'w', encoding='utf-8') as f:
        f.write('# coopguards polygon\n')
        if note:
            f.write(f'# {note}\n')
        f.write(f'# n={polygon.n} h={polygon.h}\n')
        f.write(format_polygon(polygon))
    logger.info('Wrote polygon (n=%d, h=%d) → %s', polygon.n, polygon.h, output_path)


def format_guards(guards: GuardSet, polygon: PolygonWithHoles) -> str:
    indices = guards.vertices or (None,) * len(guards)
    lines = []
    for idx, p in zip(indices, guards.points):
        lines.append(f'guard {"-" if idx is None else idx} {p}')
    lines.append(f'guards {len(guards)} bound {guard_bound(polygon.n, polygon.h)}')
    return '\n'.join(lines) + '\n'


def write_guards(guards: GuardSet, polygon: PolygonWithHoles, output_path: str,
                 source: str | None = None) -> None:
    with open(output_path, 'w', encoding='utf-8') as f:
        f.write('# coopguards guards\n')
        if source:
            f.write(f'# Source: {source}\n')
        f.write(format_guards(guards, polygon))
    logger.info('Wrote %d guards → %s', len(guards), output_path)


def _event_line(index: int, ev) -> str:
    if isinstance(ev, Look):
        return f'R {index} LOOK {ev.agent} {ev.position}'
    if isinstance(ev, Broadcast):
        payload = ':'.join([ev.kind, *(format_number(w) for w in ev.words)])
        receivers = ','.join(str(r) for r in ev.receivers) or '-'
        return f'R {index} BCAST {ev.sender} {payload} -> {receivers}'
    if isinstance(ev, Halt):
        return f'R {index} HALT {ev.agent}'
    if isinstance(ev, Move):
        return f'R {index} MOVE {ev.agent} {ev.origin} {ev.target}'
    if isinstance(ev, Prox):
        return ' '.join(['R', str(index), 'PROX', ev.kind, *(format_number(w) for w in ev.words)])
    raise TypeError(f'unknown event {ev!r}')


def format_trace(trace: SimTrace) -> str:
    agents = ','.join(str(a) for a in trace.agent_ids) or '-'
    lines = [f'TRACE 1 poly {trace.polygon_digest} mode {trace.mode} '
             f'seed {trace.seed} agents {agents}']
    for rnd in trace.rounds:
        lines += [_event_line(rnd.index, ev) for ev in rnd.events]
    for aid in sorted(trace.peak_memory):
        lines.append(f'MEM {aid} peak {trace.peak_memory[aid]} budget {trace.budgets[aid]}')
    return '\n'.join(lines) + '\n'


def write_trace(trace: SimTrace, output_path: str) -> None:
    with open(output_path, 'w', encoding='utf-8') as f:
        f.write(format_trace(trace))
    logger.info('Wrote trace with %d rounds, %d broadcasts → %s',
                trace.total_rounds, trace.total_broadcasts, output_path)

