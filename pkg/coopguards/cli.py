"""CLI entry point for coopguards."""

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from coopguards.emitter import (
    format_polygon,
    write_guards,
    write_polygon,
    write_trace,
)
from coopguards.errors import (
    CoopGuardsError,
    InsufficientAgentsError,
    InvalidInputError,
    MemoryBudgetExceeded,
    ModelViolation,
)
from coopguards.generators import gen_comb_polygon, gen_random_polygon, gen_ring_polygon
from coopguards.geometry import Point
from coopguards.guards import solve
from coopguards.parser import parse_guards_file, parse_polygon_file, parse_trace_file
from coopguards.proximity import proximity_explore
from coopguards.render import SUPPORTED_OVERLAYS, render_svg, write_svg
from coopguards.report import SUPPORTED_FAMILIES, SUPPORTED_MODELS, run_scaling, write_workbook
from coopguards.sim import model_check, simulate
from coopguards.triangulation import triangulate
from coopguards.utils import parse_number
from coopguards.verify import verify_guards

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_VERIFY = 3
EXIT_MODEL = 4

DEFAULT_SAMPLES = 10000


def default_seed() -> int:
    value = os.environ.get('GW_SEED', '0')
    try:
        return int(value)
    except ValueError as exc:
        raise InvalidInputError(f'GW_SEED must be an integer, got {value!r}') from exc


@dataclass
class RunConfig:
    """One invocation's settings, gathered from argparse."""

    command: str
    input: str | None = None
    output: str | None = None
    seed: int = 0
    agents: int | None = None
    model: str = 'depth'
    mode: str = 'small-memory'
    samples: int = DEFAULT_SAMPLES
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> 'RunConfig':
        known = {'command', 'input', 'output', 'seed', 'agents', 'model', 'mode', 'samples'}
        values = {k: v for k, v in vars(args).items() if k in known and v is not None}
        extra = {k: v for k, v in vars(args).items() if k not in known and k != 'verbose'}
        return cls(**values, extra=extra)

    def output_for(self, suffix: str) -> str:
        """``--output`` if given, else the input path with ``suffix``."""
        if self.output:
            return self.output
        return str(Path(self.input).with_suffix(suffix))


# ── commands ─────────────────────────────────────────────────────────


def cmd_gen(cfg: RunConfig) -> int:
    kind = cfg.extra['kind']
    if kind == 'comb':
        polygon = gen_comb_polygon(cfg.extra['teeth'])
    elif kind == 'ring-of-holes':
        polygon = gen_ring_polygon(cfg.extra['holes'])
    else:
        polygon = gen_random_polygon(cfg.extra['n'], cfg.extra['holes'], cfg.seed)
    if cfg.output:
        write_polygon(polygon, cfg.output, note=f'{kind} seed={cfg.seed}')
    else:
        sys.stdout.write(format_polygon(polygon))
    return EXIT_OK


def cmd_guards(cfg: RunConfig) -> int:
    polygon = parse_polygon_file(cfg.input)
    solution = solve(polygon)
    output = cfg.output_for('.guards')
    write_guards(solution.guards, polygon, output, source=Path(cfg.input).name)
    print(f'guards {len(solution.guards)} bound {solution.bound}')
    if cfg.extra.get('svg'):
        svg = render_svg(polygon, ('triangulation', 'guards'), solution=solution)
        write_svg(svg, cfg.extra['svg'])
    return EXIT_OK


def _parse_start(text: str | None) -> Point | None:
    if text is None:
        return None
    try:
        x, y = text.split(',')
        return Point(parse_number(x.strip()), parse_number(y.strip()))
    except ValueError as exc:
        raise InvalidInputError(f'start must look like "x,y", got {text!r}') from exc


def cmd_simulate(cfg: RunConfig) -> int:
    polygon = parse_polygon_file(cfg.input)
    guards_out = str(Path(cfg.input).with_suffix('.sim.guards'))
    trace_out = cfg.extra.get('trace') or str(Path(cfg.input).with_suffix('.trace'))

    if cfg.model == 'proximity':
        result = proximity_explore(polygon)
        write_trace(result.trace(), trace_out)
        write_guards(result.guards, polygon, guards_out, source=Path(cfg.input).name)
        cost = result.cost
        print(f'rounds {cost.total_rounds} steps {cost.validation_steps} '
              f'waits {cost.wait_rounds} guards {len(result.guards)}')
        return EXIT_OK

    if cfg.agents is None:
        raise InvalidInputError('--agents is required for the depth model')
    guards, trace = simulate(polygon, cfg.agents, start=_parse_start(cfg.extra.get('start')),
                             mode=cfg.mode, seed=cfg.seed)
    write_trace(trace, trace_out)
    write_guards(guards, polygon, guards_out, source=Path(cfg.input).name)
    check = model_check(trace, polygon)
    print(f'rounds {trace.total_rounds} broadcasts {trace.total_broadcasts} '
          f'peak_mem {trace.max_peak_memory} guards {len(guards)}')
    if not check:
        logger.error('Model check failed: %s in round %s', check.rule, check.round)
        return EXIT_MODEL
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    polygon = parse_polygon_file(cfg.input)
    guards = parse_guards_file(cfg.extra['guards'], polygon)
    report = verify_guards(polygon, guards, cfg.samples, cfg.seed,
                           triangulation=triangulate(polygon))
    print(f'coverage {float(round(report.coverage.fraction, 4))} '
          f'connected {"yes" if report.connectivity.connected else "no"} '
          f'bound {"ok" if report.bound_ok else "exceeded"}')
    if report.coverage.witnesses:
        print(f'witness {report.coverage.witnesses[0]}')
    if not report.connectivity.connected:
        for comp in report.connectivity.components:
            print('component ' + ' '.join(str(guards.points[i]).replace(' ', ',') for i in comp))
    failed = report.coverage.witnesses or not report.connectivity.connected or not report.bound_ok
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_render(cfg: RunConfig) -> int:
    polygon = parse_polygon_file(cfg.input)
    overlays = tuple(cfg.extra.get('overlay') or ())
    guards = parse_guards_file(cfg.extra['guards'], polygon) if cfg.extra.get('guards') else None
    trace = parse_trace_file(cfg.extra['trace']) if cfg.extra.get('trace') else None
    svg = render_svg(polygon, overlays, guards=guards, trace=trace)
    write_svg(svg, cfg.output_for('.svg'))
    return EXIT_OK


def cmd_scaling(cfg: RunConfig) -> int:
    try:
        sizes = [int(s) for s in cfg.extra['sizes'].split(',')]
    except ValueError as exc:
        raise InvalidInputError(f'--sizes must be comma-separated integers: {exc}') from exc
    models = cfg.extra.get('scale_model') or ['warmup', 'small-memory']
    rows = {m: run_scaling(m, sizes, family=cfg.extra['family'], seed=cfg.seed) for m in models}
    output = write_workbook(rows, cfg.output, stem=cfg.extra['family'])
    print(f'Output written to: {output}')
    return EXIT_OK


COMMANDS = {
    'gen': cmd_gen,
    'guards': cmd_guards,
    'simulate': cmd_simulate,
    'verify': cmd_verify,
    'render': cmd_render,
    'scaling': cmd_scaling,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coopguards",
        description="Place cooperative guards in polygons with holes and simulate mobile agents deploying them.",
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Enable verbose logging")
    subparsers = parser.add_subparsers(dest="command", required=True)
    seed = default_seed()

    # gen
    p_gen = subparsers.add_parser("gen", help="Generate a polygon file")
    p_gen.add_argument("kind", choices=["comb", "ring-of-holes", "random"])
    p_gen.add_argument("--teeth", type=int, default=8, help="Comb size (default: 8)")
    p_gen.add_argument("--holes", type=int, default=0, help="Number of holes (default: 0)")
    p_gen.add_argument("--n", type=int, default=40, help="Total vertex count for random polygons")
    p_gen.add_argument("--seed", type=int, default=seed, help="Random seed (default: $GW_SEED or 0)")
    p_gen.add_argument("--output", "-o", default=None, help="Output polygon file (default: stdout)")

    # guards
    p_guards = subparsers.add_parser("guards", help="Compute cooperative guards")
    p_guards.add_argument("--input", "-i", required=True, help="Polygon file")
    p_guards.add_argument("--output", "-o", default=None, help="Guards file (default: <input>.guards)")
    p_guards.add_argument("--svg", default=None, help="Also write an SVG with triangulation and guards")

    # simulate
    p_sim = subparsers.add_parser("simulate", help="Simulate agents deploying as guards")
    p_sim.add_argument("--input", "-i", required=True, help="Polygon file")
    p_sim.add_argument("--model", choices=["depth", "proximity"], default="depth")
    p_sim.add_argument("--mode", choices=["warmup", "small-memory"], default="small-memory")
    p_sim.add_argument("--agents", "-k", type=int, default=None, help="Number of agents")
    p_sim.add_argument("--start", default=None, help='Common start point "x,y" (default: vertex 0)')
    p_sim.add_argument("--seed", type=int, default=seed, help="Seed for agent IDs (default: $GW_SEED or 0)")
    p_sim.add_argument("--trace", default=None, help="Trace file (default: <input>.trace)")

    # verify
    p_verify = subparsers.add_parser("verify", help="Check a guard file against a polygon")
    p_verify.add_argument("--input", "-i", required=True, help="Polygon file")
    p_verify.add_argument("--guards", "-g", required=True, help="Guards file")
    p_verify.add_argument("--samples", type=int, default=DEFAULT_SAMPLES, help="Coverage samples")
    p_verify.add_argument("--seed", type=int, default=seed, help="Sampling seed (default: $GW_SEED or 0)")

    # render
    p_render = subparsers.add_parser("render", help="Render a polygon and overlays as SVG")
    p_render.add_argument("--input", "-i", required=True, help="Polygon file")
    p_render.add_argument("--overlay", action="append", choices=list(SUPPORTED_OVERLAYS),
                          help="Overlay to draw (repeatable)")
    p_render.add_argument("--guards", "-g", default=None, help="Guards file for the guards overlay")
    p_render.add_argument("--trace", default=None, help="Trace file for the trace overlay")
    p_render.add_argument("--output", "-o", default=None, help="SVG file (default: <input>.svg)")

    # scaling
    p_scale = subparsers.add_parser("scaling", help="Write a scaling workbook")
    p_scale.add_argument("--model", dest="scale_model", action="append",
                         choices=list(SUPPORTED_MODELS), help="Model to measure (repeatable)")
    p_scale.add_argument("--sizes", default="16,32,64,128", help="Comma-separated vertex counts")
    p_scale.add_argument("--family", choices=list(SUPPORTED_FAMILIES), default="comb")
    p_scale.add_argument("--seed", type=int, default=seed)
    p_scale.add_argument("--output", "-o", default=None, help="Workbook (default: <family>_scaling.xlsx)")
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        parser = build_parser()
    except InvalidInputError as exc:
        logging.basicConfig(format="%(levelname)s: %(message)s")
        logger.error('%s', exc)
        return EXIT_INVALID
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s: %(message)s",
    )

    cfg = RunConfig.from_args(args)
    try:
        return COMMANDS[cfg.command](cfg)
    except (InvalidInputError, InsufficientAgentsError) as exc:
        logger.error('%s', exc)
        return EXIT_INVALID
    except (ModelViolation, MemoryBudgetExceeded) as exc:
        logger.error('Model violation: %s', exc)
        return EXIT_MODEL
    except CoopGuardsError as exc:
        logger.error('%s', exc)
        return EXIT_VERIFY
    except OSError as exc:
        logger.error('%s', exc)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
