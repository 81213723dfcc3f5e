"""Parse coopguards text formats.

Polygon files
-------------
    POLY 1
    outer 4
    0 0
    10 0
    10 10
    0 10
    hole 3
    4 4
    6 4
    5 6

Guard files
-----------
    guard <vertex-index> <x> <y>      one line per guard, ``-`` for non-vertex
    guards <count> bound <bound>      optional summary line

Trace files
-----------
    TRACE 1 poly <digest> mode <mode> seed <seed> agents <id,id,...|->
    R <round> LOOK <id> <x> <y>
    R <round> BCAST <id> <KIND:w1:w2> -> <id,id,...|->
    R <round> HALT <id>
    R <round> MOVE <id> <x0> <y0> <x1> <y1>
    R <round> PROX <KIND> <w1> <w2> ...   proximity exploration steps
    MEM <id> peak <words> budget <words>

Lines starting with '#' are comments and empty lines are skipped in
every format. Coordinates are integers or exact fractions ``p/q``.
"""

import logging
import re
from pathlib import Path

from coopguards.errors import InvalidInputError
from coopguards.geometry import Point, PolygonWithHoles
from coopguards.guards import GuardSet
from coopguards.sim import Broadcast, Halt, Look, Move, Prox, Round, SimTrace
from coopguards.utils import parse_number

logger = logging.getLogger(__name__)

_NUM = r'-?\d+(?:/\d+)?'

HEADER_PATTERN = re.compile(r'^POLY\s+1$')
RING_PATTERN = re.compile(r'^(outer|hole)\s+(\d+)$')
COORD_PATTERN = re.compile(r'^(-?\d+)\s+(-?\d+)$')
GUARD_PATTERN = re.compile(rf'^guard\s+(\d+|-)\s+({_NUM})\s+({_NUM})$')
SUMMARY_PATTERN = re.compile(r'^guards\s+(\d+)\s+bound\s+(\d+)$')

TRACE_HEADER = re.compile(
    r'^TRACE\s+1\s+poly\s+(\w+)\s+mode\s+([\w-]+)\s+seed\s+(-?\d+)\s+agents\s+([\d,]*|-)$'
)
TRACE_LINE = re.compile(r'^R\s+(\d+)\s+(LOOK|BCAST|HALT|MOVE)\s+(\d+)\s*(.*)$')
PROX_LINE = re.compile(rf'^R\s+(\d+)\s+PROX\s+([A-Z_]+)((?:\s+{_NUM})*)$')
MEM_LINE = re.compile(r'^MEM\s+(\d+)\s+peak\s+(\d+)\s+budget\s+(\d+)$')


def _lines(text: str):
    for line_num, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith('#'):
            continue
        yield line_num, line


# ── Polygons ─────────────────────────────────────────────────────────


def parse_polygon_text(text: str, source: str = '<string>') -> PolygonWithHoles:
    """Parse polygon text; every error carries the offending line number."""
    rings: list[list[tuple[int, int]]] = []
    expected = 0
    seen_header = False
    last_line = 0
    for line_num, line in _lines(text):
        last_line = line_num
        if not seen_header:
            if not HEADER_PATTERN.match(line):
                raise InvalidInputError(f'expected "POLY 1" header, got {line!r}', line=line_num)
            seen_header = True
            continue

        if expected:
            match = COORD_PATTERN.match(line)
            if not match:
                raise InvalidInputError(f'expected "x y" coordinates, got {line!r}', line=line_num)
            rings[-1].append((int(match.group(1)), int(match.group(2))))
            expected -= 1
            continue

        match = RING_PATTERN.match(line)
        if not match:
            raise InvalidInputError(f'expected "outer k" or "hole k", got {line!r}', line=line_num)
        kind, count = match.group(1), int(match.group(2))
        if (kind == 'outer') != (not rings):
            raise InvalidInputError('the outer ring must come first and only once', line=line_num)
        if count < 3:
            raise InvalidInputError(f'{kind} ring needs at least 3 vertices', line=line_num)
        rings.append([])
        expected = count

    if not seen_header:
        raise InvalidInputError(f'{source} is empty')
    if expected:
        raise InvalidInputError(f'ring ended after {len(rings[-1])} vertices', line=last_line)
    if not rings:
        raise InvalidInputError(f'{source} has no outer ring')

    polygon = PolygonWithHoles.from_rings(rings[0], rings[1:])
    logger.info('Parsed polygon from %s  (n=%d, h=%d)', source, polygon.n, polygon.h)
    return polygon


def parse_polygon_file(file_path: str) -> PolygonWithHoles:
    text = Path(file_path).read_text(encoding='utf-8')
    return parse_polygon_text(text, source=str(file_path))


# ── Guards ───────────────────────────────────────────────────────────


def parse_guards_file(file_path: str, polygon: PolygonWithHoles | None = None) -> GuardSet:
    """Read a guard file. With ``polygon`` given, vertex indices are checked against it."""
    points: list[Point] = []
    indices: list[int | None] = []
    text = Path(file_path).read_text(encoding='utf-8')
    for line_num, line in _lines(text):
        if SUMMARY_PATTERN.match(line):
            continue
        match = GUARD_PATTERN.match(line)
        if not match:
            raise InvalidInputError(f'invalid guard line {line!r}', line=line_num)
        idx_token, x, y = match.groups()
        point = Point(parse_number(x), parse_number(y))
        idx = None if idx_token == '-' else int(idx_token)
        if polygon is not None and idx is not None:
            if idx >= polygon.n or polygon.vertices[idx] != point:
                raise InvalidInputError(f'guard {idx} is not at vertex {idx}', line=line_num)
        points.append(point)
        indices.append(idx)
    logger.info('Parsed %d guards from %s', len(points), file_path)
    return GuardSet(tuple(points), tuple(indices))


# ── Traces ───────────────────────────────────────────────────────────


def _point(tokens: list[str]) -> Point:
    return Point(parse_number(tokens[0]), parse_number(tokens[1]))


def _event(kind: str, agent: int, rest: str, line_num: int):
    tokens = rest.split()
    try:
        if kind == 'LOOK':
            return Look(agent, _point(tokens))
        if kind == 'HALT':
            return Halt(agent)
        if kind == 'MOVE':
            return Move(agent, _point(tokens[0:2]), _point(tokens[2:4]))
        payload, arrow, receivers = tokens
        if arrow != '->':
            raise ValueError(arrow)
        tag, *words = payload.split(':')
        ids = () if receivers == '-' else tuple(int(r) for r in receivers.split(','))
        return Broadcast(agent, tag, tuple(parse_number(w) for w in words), ids)
    except (ValueError, IndexError) as exc:
        raise InvalidInputError(f'malformed {kind} event: {exc}', line=line_num) from exc


def _round(trace: SimTrace, index: int, line_num: int) -> Round:
    """The round ``index`` of ``trace``, opened if it is new."""
    if not trace.rounds or trace.rounds[-1].index != index:
        if trace.rounds and index < trace.rounds[-1].index:
            raise InvalidInputError(f'round {index} out of order', line=line_num)
        trace.rounds.append(Round(index))
    return trace.rounds[-1]


def parse_trace_text(text: str, source: str = '<string>') -> SimTrace:
    trace = None
    for line_num, line in _lines(text):
        if trace is None:
            match = TRACE_HEADER.match(line)
            if not match:
                raise InvalidInputError('expected TRACE header', line=line_num)
            digest, mode, seed, agents = match.groups()
            ids = tuple(int(a) for a in agents.split(',') if a and a != '-')
            trace = SimTrace(mode=mode, polygon_digest=digest, seed=int(seed), agent_ids=ids)
            continue

        match = TRACE_LINE.match(line)
        if match:
            index, kind, agent, rest = match.groups()
            _round(trace, int(index), line_num).events.append(_event(kind, int(agent), rest, line_num))
            continue

        match = PROX_LINE.match(line)
        if match:
            index, kind, words = match.groups()
            words = tuple(parse_number(w) for w in words.split())
            _round(trace, int(index), line_num).events.append(Prox(kind, words))
            continue

        match = MEM_LINE.match(line)
        if match:
            aid, peak, budget = (int(g) for g in match.groups())
            trace.peak_memory[aid] = peak
            trace.budgets[aid] = budget
            continue
        raise InvalidInputError(f'unrecognised trace line {line!r}', line=line_num)

    if trace is None:
        raise InvalidInputError(f'{source} is empty')
    logger.info('Parsed trace from %s  (%d rounds, %d broadcasts)',
                source, trace.total_rounds, trace.total_broadcasts)
    return trace


def parse_trace_file(file_path: str) -> SimTrace:
    text = Path(file_path).read_text(encoding='utf-8')
    return parse_trace_text(text, source=str(file_path))
