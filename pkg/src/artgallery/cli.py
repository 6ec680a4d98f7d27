"""Command-line interface: validate, gen, perturb, visibility, verify,
solve, experiment, render.

Exit codes: 0 success, 1 domain failure (polygon invalid, guards do not
cover, search exhausted), 2 usage or parse errors.  Diagnostics go to
stderr; results go to stdout or the requested output file.
"""

from __future__ import annotations

import argparse
import sys

from .coverage import GuardSet, coverage_sampling_oracle, verify_guard_set
from .errors import (
    GalleryError,
    PolygonSyntaxError,
    ValidityError,
)
from .experiments import (
    EXPERIMENT_KINDS,
    ExperimentConfig,
    default_exact_corpus,
    run_experiment,
    worker_count,
)
from .generators import GENERATOR_KINDS, gen_polygon
from .geometry import Polygon, validate_polygon
from .perturb import (
    Model,
    PerturbationSpec,
    edge_inflate,
    edge_perturb,
    sample,
    vertex_perturb,
)
from .polyfile import (
    emit_polygon,
    format_guards,
    parse_fraction,
    parse_guards,
    parse_polygon,
)
from .solve import (
    CandidateGrid,
    guard_bits,
    naive_algorithm,
    solve_polygon,
)
from .svgout import emit_svg
from .visibility import visibility_polygon

_MODELS = {
    "edge-inflate": Model.EDGE_INFLATE,
    "edge-perturb": Model.EDGE_PERTURB,
    "vertex-perturb": Model.VERTEX_PERTURB,
}


def _read_polygon(path: str, validate: bool = True) -> Polygon:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_polygon(fh.read(), validate=validate)


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _cmd_validate(args) -> int:
    poly = _read_polygon(args.polygon, validate=False)
    report = validate_polygon(poly)
    print(report)
    return 0 if report.ok else 1


def _cmd_gen(args) -> int:
    poly = gen_polygon(args.kind, n=args.n, k=args.k, h=args.holes,
                       pythagorean=args.pythagorean, seed=args.seed)
    _write_text(args.out, emit_polygon(poly))
    return 0


def _cmd_perturb(args) -> int:
    poly = _read_polygon(args.polygon)
    if args.t is not None:
        t = parse_fraction(args.t)
        if args.model == "edge-inflate":
            result = edge_inflate(poly, t, exact=not args.approx)
        else:
            raise GalleryError("--t applies to edge-inflate only; "
                               "use --delta/--seed to sample other models")
        print(f"t {t}", file=sys.stderr)
    else:
        if args.delta is None:
            raise GalleryError("either --t or --delta is required")
        spec = PerturbationSpec(model=_MODELS[args.model],
                                delta=parse_fraction(args.delta),
                                q=args.q, seed=args.seed)
        result, record = sample(poly, spec)
        if record.t is not None:
            print(f"t {record.t}", file=sys.stderr)
        print(f"attempt {record.attempt}", file=sys.stderr)
    _write_text(args.out, emit_polygon(result))
    return 0


def _cmd_visibility(args) -> int:
    poly = _read_polygon(args.polygon)
    guards = parse_guards(args.guard)
    if len(guards) != 1:
        raise GalleryError("--guard takes exactly one point")
    region = visibility_polygon(poly, guards[0])
    ring = Polygon(tuple(region.boundary), (), poly.L)
    if args.svg:
        _write_text(args.svg, emit_svg(poly, guards=guards,
                                       visibility=[region]))
    _write_text(args.out, emit_polygon(ring))
    return 0


def _cmd_verify(args) -> int:
    poly = _read_polygon(args.polygon)
    guards = GuardSet.of(parse_guards(args.guards))
    report = verify_guard_set(poly, guards)
    if report.covered:
        if args.oracle:
            ok = coverage_sampling_oracle(poly, guards, args.oracle, args.seed)
            print(f"oracle {'accepts' if ok else 'rejects'}", file=sys.stderr)
        print("covered")
        return 0
    print(f"uncovered {format_guards([report.uncovered_witness])}")
    return 1


def _cmd_solve(args) -> int:
    poly = _read_polygon(args.polygon)
    if args.grid is not None:
        grid = CandidateGrid(parse_fraction(args.grid))
        res = solve_polygon(poly, grid=grid, include_vertices=args.vertices,
                            mode=args.mode)
        guards = res.guards
    else:
        if args.mode != "exact":
            raise GalleryError("bit-budget search uses --mode exact; "
                               "pass --grid for greedy solving")
        res = naive_algorithm(poly, max_bits=args.max_bits)
        if res.exhausted:
            print("grid search exhausted", file=sys.stderr)
            return 1
        guards = res.guards
    cost = guard_bits(guards)
    print(f"guards {len(guards)}")
    print(format_guards(guards.guards))
    print(f"bits per-guard {','.join(str(b) for b in cost.per_guard)} "
          f"max {cost.max_per_guard} total {cost.total}")
    return 0


def _parse_gen_spec(spec: str):
    kind, _, rest = spec.partition(":")
    kwargs = {}
    for item in filter(None, rest.split(",")):
        if "=" not in item:
            raise GalleryError(f"malformed generator spec {spec!r}")
        key, value = item.split("=", 1)
        if key in ("n", "k", "h", "seed", "L"):
            kwargs[key] = int(value)
        elif key in ("pythagorean", "pyth"):
            kwargs["pythagorean"] = value not in ("0", "false", "no")
        else:
            raise GalleryError(f"unknown generator key {key!r}")
    return kind, kwargs


def _experiment_polygons(args):
    entries = []
    for path in args.polygon or []:
        entries.append((path, _read_polygon(path)))
    for spec in args.gen or []:
        kind, kwargs = _parse_gen_spec(spec)
        entries.append((spec, gen_polygon(kind, **kwargs)))
    if args.corpus or not entries:
        entries.extend(default_exact_corpus())
    return tuple(entries)


def _cmd_experiment(args) -> int:
    deltas = tuple(parse_fraction(d) for d in args.deltas.split(",")) \
        if args.deltas else ()
    cfg = ExperimentConfig(
        experiment=args.type,
        polygons=_experiment_polygons(args),
        deltas=deltas,
        samples=args.samples,
        seed=args.seed,
        q=args.q,
        p=parse_fraction(args.p) if args.p else None,
        grid_w=parse_fraction(args.grid_w),
        max_bits=args.max_bits,
        steps=args.steps,
        timing=not args.no_timing,
    )
    result = run_experiment(cfg, out=args.out, agg_out=args.agg,
                            workers=args.workers)
    for key, value in result.aggregates:
        print(f"{key} {value}")
    if result.skips:
        print(f"skips {result.skips}", file=sys.stderr)
    return 0


def _cmd_render(args) -> int:
    poly = _read_polygon(args.polygon)
    guards = parse_guards(args.guards) if args.guards else []
    regions = []
    if args.visibility:
        regions = [visibility_polygon(poly, g) for g in guards]
    grid = CandidateGrid(parse_fraction(args.grid)) if args.grid else None
    inflated = None
    if args.inflate:
        inflated = edge_inflate(poly, parse_fraction(args.inflate),
                                exact=not args.approx)
    witnesses = []
    if args.witnesses and guards:
        from .coverage import witness_points

        witnesses = witness_points(poly, regions or [
            visibility_polygon(poly, g) for g in guards])
    svg = emit_svg(poly, guards=guards, visibility=regions, grid=grid,
                   witnesses=witnesses, inflated=inflated)
    _write_text(args.out, svg)
    return 0


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="gallery",
        description="Exact art-gallery guarding toolkit")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a polygon file")
    p.add_argument("--polygon", required=True)
    p.set_defaults(fn=_cmd_validate)

    p = sub.add_parser("gen", help="generate a corpus polygon")
    p.add_argument("--kind", required=True, choices=GENERATOR_KINDS)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--holes", type=int, default=0)
    p.add_argument("--pythagorean", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("perturb", help="apply or sample a perturbation")
    p.add_argument("--polygon", required=True)
    p.add_argument("--model", choices=sorted(_MODELS), default="edge-inflate")
    p.add_argument("--t", help="explicit inflation magnitude (edge-inflate)")
    p.add_argument("--delta", help="perturbation magnitude for sampling")
    p.add_argument("--q", type=int, help="granularity (discrete edge-inflate)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--approx", action="store_true",
                   help="allow irrational edge norms via rational bounds")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_perturb)

    p = sub.add_parser("visibility", help="visibility polygon of one guard")
    p.add_argument("--polygon", required=True)
    p.add_argument("--guard", required=True, help="point as x/den,y/den")
    p.add_argument("--svg", help="also render a scene to this file")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_visibility)

    p = sub.add_parser("verify", help="check whether guards cover the polygon")
    p.add_argument("--polygon", required=True)
    p.add_argument("--guards", required=True,
                   help="space-separated points, each x/den,y/den")
    p.add_argument("--oracle", type=int, default=0,
                   help="also run the sampling oracle with this many samples")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("solve", help="find a small guard set")
    p.add_argument("--polygon", required=True)
    p.add_argument("--mode", choices=("exact", "greedy"), default="exact")
    p.add_argument("--grid", help="fixed grid width (rational)")
    p.add_argument("--vertices", action="store_true",
                   help="add polygon vertices to the candidates")
    p.add_argument("--max-bits", type=int, default=48,
                   help="per-guard bit budget for the deepening search")
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("experiment", help="run a measurement campaign")
    p.add_argument("--type", required=True, choices=EXPERIMENT_KINDS)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--deltas", help="comma-separated rationals")
    p.add_argument("--polygon", action="append")
    p.add_argument("--gen", action="append",
                   help="generator spec kind:key=value,...")
    p.add_argument("--corpus", action="store_true",
                   help="use the built-in exact-mode corpus")
    p.add_argument("--q", type=int)
    p.add_argument("--p", help="failure budget (rational)")
    p.add_argument("--grid-w", default="1/4")
    p.add_argument("--max-bits", type=int, default=48)
    p.add_argument("--steps", type=int, default=16)
    p.add_argument("--workers", type=int, default=None,
                   help="override GALLERY_WORKERS")
    p.add_argument("--no-timing", action="store_true",
                   help="blank the wall-time column for byte-identical output")
    p.add_argument("--out", help="per-trial CSV path")
    p.add_argument("--agg", help="aggregate CSV path")
    p.set_defaults(fn=_cmd_experiment)

    p = sub.add_parser("render", help="emit an SVG scene")
    p.add_argument("--polygon", required=True)
    p.add_argument("--guards")
    p.add_argument("--visibility", action="store_true")
    p.add_argument("--witnesses", action="store_true")
    p.add_argument("--grid")
    p.add_argument("--inflate")
    p.add_argument("--approx", action="store_true")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_render)

    return top


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (PolygonSyntaxError, ValidityError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except GalleryError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (FileNotFoundError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
