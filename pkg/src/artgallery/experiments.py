"""Experiment drivers: draw perturbations, solve, measure, stream CSV rows.

Five experiment types:

* bits-vs-delta: inflate by t ~ U[0, delta], run the iterative-deepening
  search, record per-guard bit costs.  Smaller delta should push the search
  to finer grids, growing bits per guard additively in log2(1/delta).
  Draws share the underlying uniform across delta cells (common random
  numbers), so the per-cell means are monotone rather than noisy.

* grid-containment: random verified guard set, random t in (0, 1/4], grid
  width w = t; rounding the guards to the grid must still cover the
  inflated polygon (the constructive rounding guarantee, exercised end to
  end with the exact verifier).

* opt-monotonicity: sweep inflation magnitudes with a fixed fine grid; the
  grid-restricted optimum must be non-increasing.

* discrete-high-prob: sample s from the granular inflation space
  {i*delta/q}, and test the constructive containment event: with
  tau = delta*p/2n, the optimum of the tau-less-inflated polygon, rounded
  to the tau-grid, covers P_s at reference-optimal size.  The event fails
  only when s lands within tau of a breakpoint of the restricted optimum,
  which has probability at most p for q > 2n/p.

* pointedness-lemma: vertex-perturb by delta0, inflate by
  gamma = beta*(delta - delta0), and check each vertex moved at most delta.

Rows stream to CSV as they are produced, ordered by trial index no matter
how many workers run (GALLERY_WORKERS), so output is reproducible; the
wall-time column is the one field excluded from the byte-identity guarantee.
"""

from __future__ import annotations

import csv
import math
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .coverage import GuardSet, verify_guard_set
from .errors import GalleryError, InvalidResult
from .generators import (
    comb_polygon,
    convex_polygon,
    holes_polygon,
    staircase_polygon,
)
from .geometry import Location, Point, Polygon, point_in_polygon
from .perturb import check_pointedness_lemma, edge_inflate, pointedness
from .polyfile import format_fraction
from .solve import (
    CandidateGrid,
    check_rounding_lemma,
    guard_bits,
    naive_algorithm,
    round_to_grid,
    solve_polygon,
)

EXPERIMENT_KINDS = (
    "bits-vs-delta",
    "grid-containment",
    "opt-monotonicity",
    "discrete-high-prob",
    "pointedness-lemma",
)


def default_exact_corpus() -> list[tuple[str, Polygon]]:
    """Small exact-offset corpus: every edge direction has a rational norm."""
    lpoly = Polygon.of([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)], L=2)
    entries = [
        ("convex4", convex_polygon(4, pythagorean=True, seed=11)),
        ("convex6", convex_polygon(6, pythagorean=True, seed=12)),
        ("convex8", convex_polygon(8, pythagorean=True, seed=13)),
        ("lpoly", lpoly),
        ("staircase6", staircase_polygon(6, seed=21)),
        ("staircase8", staircase_polygon(8, seed=22)),
        ("staircase10", staircase_polygon(10, seed=23)),
        ("staircase12", staircase_polygon(12, seed=24)),
        ("comb2", comb_polygon(2)),
        ("comb3", comb_polygon(3)),
        ("holes1", holes_polygon(4, 1, seed=31)),
        ("holes1b", holes_polygon(4, 1, seed=33)),
    ]
    return entries


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    polygons: tuple[tuple[str, Polygon], ...]
    deltas: tuple[Fraction, ...]
    samples: int
    seed: int
    q: Optional[int] = None
    p: Optional[Fraction] = None
    grid_w: Fraction = Fraction(1, 4)
    max_bits: int = 48
    steps: int = 16
    timing: bool = True

    def __post_init__(self):
        if self.experiment not in EXPERIMENT_KINDS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        if not self.polygons:
            raise ValueError("at least one polygon is required")
        if any(d <= 0 for d in self.deltas):
            raise ValueError("perturbation magnitudes must be positive")
        if self.experiment == "discrete-high-prob":
            if not self.q or not self.p or not self.deltas:
                raise ValueError("discrete-high-prob needs q, p and a delta")
            n = self.polygons[0][1].n_vertices
            if self.q <= 2 * n / self.p:
                raise ValueError(
                    f"granularity q={self.q} must exceed 2n/p = {2 * n / self.p}")
        if self.experiment in ("bits-vs-delta", "grid-containment",
                               "pointedness-lemma") and not self.deltas:
            raise ValueError("at least one delta is required")


@dataclass
class ExperimentResult:
    experiment: str
    columns: tuple[str, ...]
    rows: list[tuple]
    aggregates: list[tuple[str, str]]
    skips: int


# ---------------------------------------------------------------------------
# Random verified guard sets (used by grid-containment and the test suite)

def random_interior_point(P: Polygon, rng: random.Random,
                          resolution: int = 64) -> Point:
    minx, miny, maxx, maxy = P.bbox()
    for _ in range(4096):
        x = minx + (maxx - minx) * Fraction(rng.randrange(resolution + 1),
                                            resolution)
        y = miny + (maxy - miny) * Fraction(rng.randrange(resolution + 1),
                                            resolution)
        p = Point(x, y)
        if point_in_polygon(p, P) is Location.INTERIOR:
            return p
    raise GalleryError("could not sample an interior point")


def random_covering_guard_set(P: Polygon, rng: random.Random,
                              start_size: int = 1) -> GuardSet:
    """Random interior seeds, then repair with verifier witnesses until the
    set covers; the result is verified by construction."""
    guards = [random_interior_point(P, rng)
              for _ in range(max(1, start_size))]
    for _ in range(64):
        rep = verify_guard_set(P, GuardSet.of(guards))
        if rep.covered:
            return GuardSet.of(guards)
        guards.append(rep.uncovered_witness)
    raise GalleryError("failed to repair a covering guard set")


def random_non_covering_guard_set(P: Polygon,
                                  rng: random.Random) -> Optional[GuardSet]:
    """A single-guard set that fails coverage, or None if P is covered by
    every single interior point (it has a full kernel)."""
    for _ in range(64):
        g = GuardSet.of([random_interior_point(P, rng)])
        if not verify_guard_set(P, g).covered:
            return g
    return None


# ---------------------------------------------------------------------------
# Per-trial work functions (module level: picklable for worker pools)

def _trial_seed(cfg: ExperimentConfig, index: int) -> int:
    return cfg.seed * 1_000_003 + index


_BITS_UNIT = 1 << 64


def _bits_trial(cfg: ExperimentConfig, index: int) -> tuple:
    cell = index // cfg.samples
    k = index % cfg.samples
    delta = cfg.deltas[cell]
    name, P = cfg.polygons[0]
    # The uniform draw is keyed by the sample number only, shared across
    # delta cells (common random numbers).
    rng = random.Random(cfg.seed * 1_000_003 + k)
    u = Fraction(rng.getrandbits(64), _BITS_UNIT)
    t = u * delta
    started = time.perf_counter()
    skip = ""
    opt = ""
    max_bits = ""
    mean_bits = ""
    total_bits = ""
    level = ""
    ok = False
    try:
        inflated = edge_inflate(P, t, exact=True) if t > 0 else P
        res = naive_algorithm(inflated, max_bits=cfg.max_bits)
        if res.exhausted:
            skip = "exhausted"
        else:
            ok = True
            opt = len(res.guards)
            cost = res.bit_cost
            max_bits = cost.max_per_guard
            mean_bits = f"{cost.total / len(cost.per_guard):.3f}"
            total_bits = cost.total
            level = res.grid_level
    except InvalidResult:
        skip = "invalid-perturbation"
    wall = time.perf_counter() - started
    return (index, name, format_fraction(delta), _trial_seed(cfg, index),
            format_fraction(t), opt, max_bits, mean_bits, total_bits, level,
            int(ok), skip, _fmt_wall(cfg, wall))


def _containment_trial(cfg: ExperimentConfig, index: int) -> tuple:
    name, P = cfg.polygons[index % len(cfg.polygons)]
    rng = random.Random(_trial_seed(cfg, index))
    started = time.perf_counter()
    guards = random_covering_guard_set(P, rng, start_size=1 + rng.randrange(3))
    t = Fraction(1 + rng.randrange(256), 1024)  # random rational in (0, 1/4]
    rep = check_rounding_lemma(P, guards, t, t, precheck=False)
    wall = time.perf_counter() - started
    witness = ("" if rep.witness is None
               else f"{format_fraction(rep.witness.x)},{format_fraction(rep.witness.y)}")
    return (index, name, _trial_seed(cfg, index), format_fraction(t),
            format_fraction(t), len(guards), int(rep.passed), witness,
            _fmt_wall(cfg, wall))


def _monotonicity_trial(cfg: ExperimentConfig, index: int) -> list[tuple]:
    name, P = cfg.polygons[index % len(cfg.polygons)]
    delta = cfg.deltas[0]
    rows = []
    prev_opt: Optional[int] = None
    for step in range(cfg.steps):
        started = time.perf_counter()
        s = delta * step / (cfg.steps - 1) if cfg.steps > 1 else Fraction(0)
        inflated = edge_inflate(P, s, exact=True) if s > 0 else P
        res = solve_polygon(inflated, grid=CandidateGrid(cfg.grid_w),
                            mode="exact")
        opt = len(res.guards)
        ok = prev_opt is None or opt <= prev_opt
        wall = time.perf_counter() - started
        rows.append((index, name, step, format_fraction(s), opt, int(ok),
                     _fmt_wall(cfg, wall)))
        prev_opt = opt
    return rows


def _discrete_trial(cfg: ExperimentConfig, index: int) -> tuple:
    name, P = cfg.polygons[0]
    delta = cfg.deltas[0]
    q = cfg.q
    n = P.n_vertices
    tau = delta * cfg.p / (2 * n)
    rng = random.Random(_trial_seed(cfg, index))
    kbits = (q - 1).bit_length()
    while True:
        i = rng.getrandbits(kbits)
        if i < q:
            break
    s = Fraction(i) * delta / q
    started = time.perf_counter()
    ref_opt = ""
    shifted_opt = ""
    covers = ""
    success = False
    reason = ""
    inflated = edge_inflate(P, s, exact=True) if s > 0 else P
    ref = naive_algorithm(inflated, max_bits=cfg.max_bits)
    if ref.exhausted:
        reason = "reference-exhausted"
    else:
        ref_opt = len(ref.guards)
        if s < tau:
            reason = "below-margin"
        else:
            shifted = edge_inflate(P, s - tau, exact=True) if s > tau else P
            res = naive_algorithm(shifted, max_bits=cfg.max_bits)
            if res.exhausted:
                reason = "shifted-exhausted"
            else:
                shifted_opt = len(res.guards)
                rounded = round_to_grid(res.guards, tau)
                rep = verify_guard_set(inflated, rounded)
                covers = int(rep.covered)
                success = rep.covered and shifted_opt == ref_opt
                if not rep.covered:
                    reason = "rounded-uncovered"
                elif shifted_opt != ref_opt:
                    reason = "breakpoint"
    wall = time.perf_counter() - started
    return (index, name, _trial_seed(cfg, index), i, format_fraction(s),
            format_fraction(tau), ref_opt, shifted_opt, covers, int(success),
            reason, _fmt_wall(cfg, wall))


def _pointedness_trial(cfg: ExperimentConfig, index: int) -> tuple:
    name, P = cfg.polygons[index % len(cfg.polygons)]
    delta = cfg.deltas[index % len(cfg.deltas)]
    rng = random.Random(_trial_seed(cfg, index))
    delta0 = delta * Fraction(rng.randrange(2, 7), 8)  # in [delta/4, 3*delta/4]
    beta = pointedness(P).beta
    gamma = beta * (delta - delta0)
    started = time.perf_counter()
    skip = ""
    passed = ""
    max_disp = ""
    try:
        rep = check_pointedness_lemma(P, delta, delta0, gamma,
                                      seed=_trial_seed(cfg, index))
        passed = int(rep.passed)
        max_disp = format_fraction(rep.max_displacement_sq)
    except InvalidResult:
        skip = "invalid-perturbation"
    wall = time.perf_counter() - started
    return (index, name, _trial_seed(cfg, index), format_fraction(delta),
            format_fraction(delta0), format_fraction(gamma),
            format_fraction(beta), max_disp, passed, skip,
            _fmt_wall(cfg, wall))


def _fmt_wall(cfg: ExperimentConfig, wall: float) -> str:
    return f"{wall:.3f}" if cfg.timing else ""


_SCHEMAS: dict[str, tuple[str, ...]] = {
    "bits-vs-delta": ("trial", "polygon", "delta", "seed", "t", "opt_size",
                       "max_bits_per_guard", "mean_bits_per_guard",
                       "total_bits", "grid_level", "pass", "skip",
                       "wall_time_s"),
    "grid-containment": ("trial", "polygon", "seed", "t", "w", "guards",
                          "pass", "witness", "wall_time_s"),
    "opt-monotonicity": ("trial", "polygon", "step", "s", "opt_size", "pass",
                          "wall_time_s"),
    "discrete-high-prob": ("trial", "polygon", "seed", "i", "s", "tau",
                            "ref_opt", "shifted_opt", "rounded_covers",
                            "success", "reason", "wall_time_s"),
    "pointedness-lemma": ("trial", "polygon", "seed", "delta", "delta0",
                           "gamma", "beta", "max_displacement_sq", "pass",
                           "skip", "wall_time_s"),
}

_TRIAL_FN: dict[str, Callable] = {
    "bits-vs-delta": _bits_trial,
    "grid-containment": _containment_trial,
    "opt-monotonicity": _monotonicity_trial,
    "discrete-high-prob": _discrete_trial,
    "pointedness-lemma": _pointedness_trial,
}


def _worker(payload: tuple[ExperimentConfig, int]):
    cfg, index = payload
    return _TRIAL_FN[cfg.experiment](cfg, index)


def worker_count() -> int:
    value = os.environ.get("GALLERY_WORKERS", "1")
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def _trial_count(cfg: ExperimentConfig) -> int:
    if cfg.experiment == "bits-vs-delta":
        return len(cfg.deltas) * cfg.samples
    if cfg.experiment == "opt-monotonicity":
        return len(cfg.polygons)
    return cfg.samples


def _iter_rows(cfg: ExperimentConfig, workers: int) -> Iterable[tuple]:
    payloads = [(cfg, i) for i in range(_trial_count(cfg))]
    if workers <= 1:
        for payload in payloads:
            result = _worker(payload)
            yield from result if isinstance(result, list) else (result,)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for result in pool.map(_worker, payloads):
            yield from result if isinstance(result, list) else (result,)


# ---------------------------------------------------------------------------
# Aggregation

def _linear_fit(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    """Least-squares slope and R^2 of ys against xs."""
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    syy = sum((y - my) ** 2 for y in ys)
    if sxx == 0:
        return 0.0, 1.0
    slope = sxy / sxx
    r2 = 1.0 if syy == 0 else (sxy * sxy) / (sxx * syy)
    return slope, r2


def _aggregate(cfg: ExperimentConfig, rows: list[tuple]) -> tuple[list, int]:
    agg: list[tuple[str, str]] = []
    cols = _SCHEMAS[cfg.experiment]
    idx = {c: i for i, c in enumerate(cols)}
    skips = 0
    if cfg.experiment == "bits-vs-delta":
        xs, ys = [], []
        for delta in cfg.deltas:
            key = format_fraction(delta)
            cell = [r for r in rows if r[idx["delta"]] == key]
            done = [r for r in cell if r[idx["pass"]] == 1]
            skips += sum(1 for r in cell if r[idx["skip"]])
            if not done:
                continue
            bits = sorted(r[idx["max_bits_per_guard"]] for r in done)
            mean = sum(bits) / len(bits)
            median = bits[len(bits) // 2]
            agg.append((f"mean_max_bits[{key}]", f"{mean:.4f}"))
            agg.append((f"median_max_bits[{key}]", f"{median}"))
            xs.append(math.log2(1.0 / float(delta)))
            ys.append(mean)
        if len(xs) >= 2:
            slope, r2 = _linear_fit(xs, ys)
            agg.append(("bits_slope_per_halving", f"{slope:.4f}"))
            agg.append(("bits_fit_r2", f"{r2:.4f}"))
    else:
        flag = "success" if cfg.experiment == "discrete-high-prob" else "pass"
        counted = [r for r in rows if r[idx[flag]] != ""]
        passed = sum(1 for r in counted if r[idx[flag]] == 1)
        skips = len(rows) - len(counted)
        agg.append((f"{flag}_count", str(passed)))
        agg.append(("trials", str(len(rows))))
        agg.append(("skips", str(skips)))
        if counted:
            agg.append((f"{flag}_rate", f"{passed / len(rows):.4f}"))
    return agg, skips


def run_experiment(cfg: ExperimentConfig, out: Optional[str] = None,
                   agg_out: Optional[str] = None,
                   workers: Optional[int] = None) -> ExperimentResult:
    """Run all trials, streaming rows to `out` as they complete (in trial
    order); aggregates land in `agg_out` (default: out + '.agg.csv')."""
    workers = worker_count() if workers is None else max(1, workers)
    cols = _SCHEMAS[cfg.experiment]
    rows: list[tuple] = []
    writer = None
    handle = None
    if out:
        handle = open(out, "w", encoding="utf-8", newline="")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(cols)
        handle.flush()
    try:
        for row in _iter_rows(cfg, workers):
            rows.append(row)
            if writer is not None:
                writer.writerow(row)
                handle.flush()
    finally:
        if handle is not None:
            handle.close()

    aggregates, skips = _aggregate(cfg, rows)
    if out and agg_out is None:
        agg_out = out + ".agg.csv"
    if agg_out:
        with open(agg_out, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("metric", "value"))
            w.writerows(aggregates)
    return ExperimentResult(experiment=cfg.experiment, columns=cols,
                            rows=rows, aggregates=aggregates, skips=skips)
