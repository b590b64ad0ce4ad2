"""Command-line front end.

Subcommands cover direct copy-set work (count, enumerate), the six
experiment drivers, and report maintenance (validate or recompute a
written report).  Exit codes: 0 success, 1 at least one named check
failed, 2 configuration or usage errors.  Diagnostics go to stderr;
check outcomes and requested data go to stdout.
"""

from __future__ import annotations

import argparse
import importlib.resources
import json
import logging
import sys
from pathlib import Path

from .averages import EmptyCopySetError
from .cache import CopySetCache, rows_checksum
from .config import ConfigError, ExperimentConfig, load_config
from .experiments import EXPERIMENTS, recompute_aggregates
from .lattice import (
    SimplexConfig,
    copyset_to_text,
    count_representations,
    count_simplex_copies,
    enumerate_simplex_copies,
)
from .report import report_from_json, validate_report, write_report_products

log = logging.getLogger(__name__)

_EXPERIMENT_HELP = {
    "scaling": "copy counts against the predicted dilation power",
    "variation": "variation-norm growth under dilation-set extension",
    "jump": "jump counts against the square-function bound",
    "multiplier-check": "square sums of multiplier increments",
    "local-sup": "restricted-spectrum local maximal averages",
    "decay": "smoothed averages against cube expectations",
}


def _setup_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(
        stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s"
    )


def _load_cfg(args: argparse.Namespace) -> ExperimentConfig:
    if getattr(args, "config", None) is not None:
        return load_config(args.config)
    res = importlib.resources.files("simplexvar") / "configs" / "default.toml"
    with importlib.resources.as_file(res) as p:
        return load_config(p)


def _parse_vertices(text: str) -> tuple[tuple[int, ...], ...]:
    vecs = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        try:
            vecs.append(tuple(int(c) for c in part.replace(",", " ").split()))
        except ValueError as exc:
            raise ConfigError(f"vertices: {exc}") from exc
    if not vecs:
        raise ConfigError("vertices: no vectors given")
    return tuple(vecs)


def _simplex_from_args(args: argparse.Namespace) -> SimplexConfig:
    if args.n is not None or args.vertices is not None:
        if args.n is None or args.vertices is None:
            raise ConfigError("give both --n and --vertices, or neither")
        try:
            return SimplexConfig(n=args.n, vertices=_parse_vertices(args.vertices))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    cfg = _load_cfg(args)
    return cfg.simplex("common")


def _cache_from_args(args: argparse.Namespace, cfg: ExperimentConfig | None):
    if getattr(args, "no_cache", False):
        return None
    directory = getattr(args, "cache_dir", None)
    if directory is None and cfg is not None and cfg.has_section("common"):
        directory = cfg.get("common", "cache_dir", str, default=None)
    return CopySetCache(directory)


def _cmd_count(args: argparse.Namespace) -> int:
    if args.m_max is not None:
        if args.lambda_sq is not None:
            raise ConfigError("count: give either --lambda-sq or --m-max, not both")
        if args.n is None:
            raise ConfigError("count: --m-max needs --n (sphere dimension)")
        if args.m_max < 1:
            raise ConfigError("count: --m-max must be at least 1")
        sys.stdout.write("m,count\n")
        for m in range(1, args.m_max + 1):
            sys.stdout.write(f"{m},{count_representations(args.n, m)}\n")
        return 0
    if args.lambda_sq is None:
        raise ConfigError("count: one of --lambda-sq or --m-max is required")
    simplex = _simplex_from_args(args)
    print(count_simplex_copies(simplex, args.lambda_sq))
    return 0


def _cmd_enumerate(args: argparse.Namespace) -> int:
    simplex = _simplex_from_args(args)
    cache = _cache_from_args(args, None)
    if cache is not None:
        cs = cache.get_or_enumerate(simplex, args.lambda_sq)
    else:
        cs = enumerate_simplex_copies(simplex, args.lambda_sq)
    text = copyset_to_text(cs, checksum=rows_checksum(cs))
    if args.output and args.output != "-":
        Path(args.output).write_text(text)
        log.info("wrote %d copies to %s", cs.count, args.output)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_experiment(args: argparse.Namespace) -> int:
    name = args.experiment_name
    cfg = _load_cfg(args)
    cache = _cache_from_args(args, cfg)
    provider = cache.provider if cache is not None else None
    report = EXPERIMENTS[name](cfg, provider=provider)
    if args.output is not None:
        outdir = Path(args.output)
    else:
        root = "simplexvar-out"
        if cfg.has_section("common"):
            root = cfg.get("common", "output_dir", str, default=root)
        outdir = Path(root) / name
    write_report_products(
        report, outdir, stable=args.stable_output, render=not args.no_figures
    )
    for chk in report.checks:
        status = "PASS" if chk["passed"] else "FAIL"
        print(f"{status} {chk['name']}: {chk['detail']}")
    for note in report.flags:
        print(f"NOTE {note}")
    print(f"report written to {outdir}")
    if cache is not None:
        log.info(
            "copy-set cache: %d hits, %d misses, %d rejected",
            cache.hits,
            cache.misses,
            cache.rejected,
        )
    return 0 if report.passed else 1


def _cmd_report(args: argparse.Namespace) -> int:
    path = Path(args.report)
    if not path.exists():
        raise ConfigError(f"report file {path} does not exist")
    try:
        doc = report_from_json(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"report file {path} is not valid JSON: {exc}") from exc
    problems = validate_report(doc)
    if not problems and args.check == "recompute":
        problems = recompute_aggregates(doc)
    if problems:
        for p in problems:
            print(f"FAIL {p}")
        return 1
    print(f"PASS report {args.check} clean ({doc.get('experiment')})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simplexvar",
        description="Averages over dilated lattice simplices: operators, "
        "experiments, and reports.",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="log more to stderr (-v info, -vv debug)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_simplex_opts(p: argparse.ArgumentParser, lambda_required: bool) -> None:
        p.add_argument("--config", help="TOML config path (default: bundled)")
        p.add_argument("--n", type=int, help="ambient dimension")
        p.add_argument(
            "--vertices",
            help="semicolon-separated integer vectors, e.g. '1,0;0,1'",
        )
        p.add_argument(
            "--lambda-sq",
            type=int,
            required=lambda_required,
            help="squared dilation parameter",
        )

    p_count = sub.add_parser("count", help="count isometric copies at a dilation")
    add_simplex_opts(p_count, lambda_required=False)
    p_count.add_argument(
        "--m-max",
        type=int,
        help="emit a CSV of sphere counts for radii-squared 1..M instead",
    )
    p_count.set_defaults(func=_cmd_count)

    p_enum = sub.add_parser("enumerate", help="enumerate and serialize copies")
    add_simplex_opts(p_enum, lambda_required=True)
    p_enum.add_argument("--output", "-o", help="output file ('-' for stdout)")
    p_enum.add_argument("--no-cache", action="store_true", help="skip the copy cache")
    p_enum.add_argument("--cache-dir", help="copy cache directory")
    p_enum.set_defaults(func=_cmd_enumerate)

    for name, blurb in _EXPERIMENT_HELP.items():
        p_exp = sub.add_parser(name, help=blurb)
        p_exp.add_argument("--config", help="TOML config path (default: bundled)")
        p_exp.add_argument("--output", "-o", help="report directory")
        p_exp.add_argument(
            "--stable-output",
            action="store_true",
            help="fixed provenance stamp for byte-identical reruns",
        )
        p_exp.add_argument(
            "--no-figures", action="store_true", help="skip image rendering"
        )
        p_exp.add_argument(
            "--no-cache", action="store_true", help="skip the copy cache"
        )
        p_exp.add_argument("--cache-dir", help="copy cache directory")
        p_exp.set_defaults(func=_cmd_experiment, experiment_name=name)

    p_rep = sub.add_parser("report", help="validate or recompute a report")
    p_rep.add_argument("report", help="path to a report.json")
    p_rep.add_argument(
        "--check",
        choices=["validate", "recompute"],
        default="validate",
        help="structural validation or full aggregate recomputation",
    )
    p_rep.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _setup_logging(args.verbose)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"simplexvar: error: config: {exc}", file=sys.stderr)
        return 2
    except EmptyCopySetError as exc:
        print(f"simplexvar: error: data: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OverflowError) as exc:
        print(f"simplexvar: error: value: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"simplexvar: error: io: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
