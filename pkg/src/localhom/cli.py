"""Command-line interface: ``estimate``, ``gen``, ``centers`` and ``verify``.

Exit status is 0 on success, 1 on a usage or configuration error and 2 when
an estimate finishes without a dimension (no valid base point or a tie).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import datagen
from .complexes import DEFAULT_BUDGET
from .geometry import build_neighborhood_graph, component_centers
from .pipeline import (ScheduleError, Strategy, estimate_dimension, manual_schedule, parameter_schedule,
                       relaxed_schedule, repeated_center_estimate)
from .pointio import PointFormatError, format_points, read_points, write_manifest
from .verify import run_checks

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NO_ESTIMATE = 2


class ConfigError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out and out != "-":
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load(path: str, header: bool):
    try:
        if path == "-":
            return read_points(sys.stdin, header)
        return read_points(path, header)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except (PointFormatError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def schedule_from_args(args):
    manual = {k: getattr(args, k) for k in ("eta1", "eta2", "r")}
    strict = args.rho is not None
    given = [k for k, v in manual.items() if v is not None]
    if strict and given:
        raise ConfigError(f"--rho selects the strict schedule and conflicts with --{', --'.join(given)}")
    if strict:
        if args.epsilon is None:
            raise ConfigError("--rho needs --epsilon")
        return parameter_schedule(args.epsilon, args.rho, args.alpha, args.kmax)
    if len(given) < 3 or args.alpha is None:
        raise ConfigError("give either --alpha --eta1 --eta2 --r or --rho --epsilon [--alpha]")
    if args.epsilon is not None:
        return relaxed_schedule(args.alpha, args.eta1, args.eta2, args.r, args.epsilon, args.kmax)
    return manual_schedule(args.alpha, args.eta1, args.eta2, args.r, args.kmax)


def cmd_estimate(args) -> int:
    schedule = schedule_from_args(args)
    cloud = _load(args.input, args.header)
    try:
        strategy = Strategy.parse(args.base)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    budget = None if args.budget == 0 else args.budget

    if args.trials is not None:
        if args.trials < 1:
            raise ConfigError("--trials must be >= 1")
        center = args.center
        if center is None:
            picks = strategy.select(cloud, args.seed)
            if not picks:
                raise ConfigError("base-point strategy selected nothing to use as center")
            center = picks[0]
        if not 0 <= center < cloud.n:
            raise ConfigError(f"--center {center} out of range")
        size = args.subsample if args.subsample is not None else cloud.n
        rep = repeated_center_estimate(cloud, schedule, center, size, args.trials, args.seed, budget=budget)
        doc = rep.to_dict()
        doc["schedule"] = schedule.to_dict()
        doc["seed"] = args.seed
        doc["subsample"] = size
        _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
        return EXIT_OK if rep.estimated_dimension is not None else EXIT_NO_ESTIMATE

    try:
        report = estimate_dimension(cloud, schedule, strategy, seed=args.seed, budget=budget,
                                    truth=args.truth, workers=args.workers)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    _emit(report.to_csv() if args.csv else report.to_json(args.timings), args.out)
    if report.estimated_dimension is None:
        why = "tie between dimensions" if report.ambiguous else "no valid base point"
        print(f"no estimate: {why}", file=sys.stderr)
        return EXIT_NO_ESTIMATE
    return EXIT_OK


def cmd_gen(args) -> int:
    kind = args.generator
    if kind == "sphere-cap":
        params = {"n": args.n, "cap_angle": args.cap_angle, "epsilon": args.epsilon}
        cloud = datagen.sphere_cap(args.n, args.cap_angle, args.epsilon, seed=args.seed)
    elif kind == "shift":
        params = {"image_w": args.image_w, "image_h": args.image_h, "patch_w": args.patch_w,
                  "patch_h": args.patch_h, "stride": args.stride}
        cloud = datagen.shift_images(**params)
    elif kind == "torus":
        params = {"density": args.density, "noise": args.noise}
        cloud = datagen.parametric_noisy(datagen.flat_torus, datagen.torus_grid(args.density),
                                         args.noise, seed=args.seed)
    elif kind == "circle":
        params = {"count": args.count, "radius": args.radius}
        cloud = datagen.circle(args.count, args.radius)
    else:  # argparse restricts the choices
        raise ConfigError(f"unknown generator {kind!r}")
    _emit(format_points(cloud), args.out)
    manifest = args.manifest
    if manifest is None and args.out and args.out != "-":
        manifest = str(args.out) + ".manifest.json"
    if manifest:
        write_manifest(manifest, kind, params, args.seed, cloud)
    return EXIT_OK


def cmd_centers(args) -> int:
    cloud = _load(args.input, args.header)
    if not args.edge_len > 0:
        raise ConfigError("--edge-len must be positive")
    graph = build_neighborhood_graph(cloud, args.edge_len)
    centers = component_centers(graph, cloud, args.min_size)
    _emit("".join(f"{int(c)}\n" for c in centers), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    count, failures = run_checks(args.instances, args.seed)
    for i, res in failures:
        print(f"instance {i}: image {res.image} cone {res.cone} pruned {res.pruned} "
              f"betti {res.betti} dense {res.dense_betti}", file=sys.stderr)
    print(f"{count - len(failures)}/{count} instances agree")
    return EXIT_OK if not failures else EXIT_CONFIG


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="localhom", description="Intrinsic dimension from local homology of Rips pairs.")
    sub = ap.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="estimate intrinsic dimension of a point cloud")
    est.add_argument("input", nargs="?", default="-", help="point file, '-' for stdin")
    est.add_argument("--header", action="store_true", help="skip the first row")
    est.add_argument("--alpha", type=float)
    est.add_argument("--eta1", type=float)
    est.add_argument("--eta2", type=float)
    est.add_argument("--r", type=float)
    est.add_argument("--rho", type=float, help="reach; with --epsilon selects the strict schedule")
    est.add_argument("--epsilon", type=float,
                     help="sampling bound; with the manual flags checks the relaxed bounds")
    est.add_argument("--kmax", type=_positive_int, help="highest homology dimension")
    est.add_argument("--base", default="all", help="sparse:<d> | centers:<len>[,<size>] | all | list:<file>")
    est.add_argument("--seed", type=int, default=0)
    est.add_argument("--budget", type=_positive_int, default=DEFAULT_BUDGET,
                     help="simplex budget per base point, 0 for none")
    est.add_argument("--out", help="report file (default stdout)")
    est.add_argument("--truth", type=int, help="true dimension, adds the correct ratio")
    est.add_argument("--trials", type=int, help="repeated random-subsample estimates at one center")
    est.add_argument("--subsample", type=int, help="points per trial in --trials mode")
    est.add_argument("--center", type=int, help="center index in --trials mode")
    est.add_argument("--csv", action="store_true", help="write the summary table instead of JSON")
    est.add_argument("--timings", action="store_true", help="include per-point milliseconds")
    est.add_argument("--workers", type=int, default=1)
    est.set_defaults(func=cmd_estimate)

    gen = sub.add_parser("gen", help="generate a synthetic point cloud")
    gen.add_argument("generator", choices=datagen.GENERATORS)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", help="point file (default stdout)")
    gen.add_argument("--manifest", help="manifest JSON path (default <out>.manifest.json)")
    gen.add_argument("-n", type=int, default=2, help="sphere dimension")
    gen.add_argument("--cap-angle", type=float, default=1.43)
    gen.add_argument("--epsilon", type=float, default=0.05)
    gen.add_argument("--image-w", type=int, default=60)
    gen.add_argument("--image-h", type=int, default=84)
    gen.add_argument("--patch-w", type=int, default=21)
    gen.add_argument("--patch-h", type=int, default=29)
    gen.add_argument("--stride", type=int, default=1)
    gen.add_argument("--density", type=int, default=30)
    gen.add_argument("--noise", type=float, default=0.0)
    gen.add_argument("--count", type=int, default=60)
    gen.add_argument("--radius", type=float, default=1.0)
    gen.set_defaults(func=cmd_gen)

    cen = sub.add_parser("centers", help="centers of the components of the neighborhood graph")
    cen.add_argument("input", nargs="?", default="-")
    cen.add_argument("--header", action="store_true")
    cen.add_argument("--edge-len", type=float, required=True)
    cen.add_argument("--min-size", type=int, default=1)
    cen.add_argument("--out")
    cen.set_defaults(func=cmd_centers)

    ver = sub.add_parser("verify", help="cross-check the rank computations on random small instances")
    ver.add_argument("--instances", type=int, default=200)
    ver.add_argument("--seed", type=int, default=0)
    ver.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except (ConfigError, ScheduleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
