"""Command-line front end.

Exit codes: 0 when every expectation is met, 1 on a verification surprise,
2 on a usage or domain error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Sequence

from meanforge import __version__
from meanforge.chains import builtin_chains, export_registry, select_chains, verify_chains
from meanforge.convexity import DEFAULT_GRID, FD_MISMATCH_TOLERANCE, GridSpec, certify_convexity
from meanforge.generating import CONVEX_KINDS, DifferenceKind, difference, generating_function
from meanforge.means import (
    DEFAULT_TOLERANCE,
    MeanforgeError,
    MeanKind,
    PositivePair,
    ToleranceConfig,
    mean,
    power_mean,
)
from meanforge.ratios import PUBLISHED_PAIRS, RATIO_GRID, RatioPair
from meanforge.report import (
    build_report,
    chain_text,
    chains_markdown,
    constants_markdown,
    fmt15,
    ratio_rows,
    ratio_text,
    to_json,
)
from meanforge.sampling import DEFAULT_SAMPLING, SamplingSpec

EXIT_OK = 0
EXIT_SURPRISE = 1
EXIT_USAGE = 2

FORMATS = ("text", "json", "markdown")
LIST_TOPICS = ("chains", "means", "differences", "pairs")


class UsageError(Exception):
    pass


# Config keys with their parsers; the file is flat ``key = value`` lines.
CONFIG_KEYS: dict[str, Callable[[str], Any]] = {
    "format": str,
    "rel_tol": float,
    "abs_floor": float,
    "samples": int,
    "seed": int,
    "ratio_min": float,
    "ratio_max": float,
    "edge_cases": lambda v: _parse_bool(v),
    "threads": int,
    "grid_min": float,
    "grid_max": float,
    "grid_points": int,
    "fd_tolerance": float,
}


def _parse_bool(v: str) -> bool:
    low = v.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def load_config(path: str | None) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
    try:
        parser.read_string("[meanforge]\n" + text)
    except configparser.Error as exc:
        raise UsageError(f"malformed config {path}: {exc}") from None
    out: dict[str, Any] = {}
    for key, raw in parser["meanforge"].items():
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise UsageError(f"unknown config key {key!r} in {path}")
        try:
            out[key] = CONFIG_KEYS[key](raw.strip().strip('"'))
        except ValueError as exc:
            raise UsageError(f"bad value for {key} in {path}: {exc}") from None
    return out


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings: flags over config file over defaults."""

    command: str
    output_format: str
    output: str | None
    tolerance: ToleranceConfig
    sampling: SamplingSpec
    grid: GridSpec
    fd_tolerance: float
    threads: int | None


def resolve(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config)

    def pick(name: str, default):
        flag = getattr(args, name, None)
        if flag is not None:
            return flag
        return cfg.get(name, default)

    fmt = pick("format", "text")
    if fmt not in FORMATS:
        raise UsageError(f"format must be one of {', '.join(FORMATS)}, got {fmt!r}")
    tol = ToleranceConfig(pick("rel_tol", DEFAULT_TOLERANCE.rel), pick("abs_floor", DEFAULT_TOLERANCE.abs_floor))
    edge = DEFAULT_SAMPLING.include_edge_cases
    if getattr(args, "no_edge_cases", False):
        edge = False
    elif "edge_cases" in cfg:
        edge = cfg["edge_cases"]
    sampling = SamplingSpec(
        count=pick("samples", DEFAULT_SAMPLING.count),
        seed=pick("seed", DEFAULT_SAMPLING.seed),
        ratio_min=pick("ratio_min", DEFAULT_SAMPLING.ratio_min),
        ratio_max=pick("ratio_max", DEFAULT_SAMPLING.ratio_max),
        include_edge_cases=edge,
    )
    default_grid = RATIO_GRID if args.command == "ratio" else DEFAULT_GRID
    grid = GridSpec(
        pick("grid_min", default_grid.x_min),
        pick("grid_max", default_grid.x_max),
        pick("grid_points", default_grid.points),
    )
    return RunConfig(
        command=args.command,
        output_format=fmt,
        output=args.output,
        tolerance=tol,
        sampling=sampling,
        grid=grid,
        fd_tolerance=pick("fd_tolerance", FD_MISMATCH_TOLERANCE),
        threads=pick("threads", None),
    )


def emit(cfg: RunConfig, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if cfg.output is None:
        sys.stdout.write(text)
        return
    try:
        Path(cfg.output).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {cfg.output}: {exc.strerror}") from None


# commands

def cmd_eval(args, cfg: RunConfig) -> int:
    p = PositivePair(args.a, args.b)
    if args.mean is not None:
        kind = MeanKind.parse(args.mean)
        label, value = kind.value, mean(kind, p)
    else:
        label, value = f"B_{fmt15(args.order)}", power_mean(args.order, p)
    if cfg.output_format == "json":
        emit(cfg, to_json({"mean": label, "a": p.a, "b": p.b, "value": value}))
    else:
        emit(cfg, fmt15(value))
    return EXIT_OK


def cmd_diff(args, cfg: RunConfig) -> int:
    kind = DifferenceKind.parse(args.kind)
    p = PositivePair(args.a, args.b)
    value = difference(kind, p)
    gf = generating_function(kind)
    x = p.ratio
    data: dict[str, Any] = {"kind": kind.value, "a": p.a, "b": p.b, "value": value, "f": float(gf.f(x))}
    if gf.has_closed_forms:
        data["f1"] = float(gf.f1(x))
        data["f2"] = float(gf.f2(x))
    if cfg.output_format == "json":
        emit(cfg, to_json(data))
    else:
        lines = [f"M_{kind.value}({fmt15(p.a)}, {fmt15(p.b)}) = {fmt15(value)}"]
        lines.append(f"f({fmt15(x)}) = {fmt15(data['f'])}")
        if gf.has_closed_forms:
            lines.append(f"f'({fmt15(x)}) = {fmt15(data['f1'])}")
            lines.append(f"f''({fmt15(x)}) = {fmt15(data['f2'])}")
        emit(cfg, "\n".join(lines))
    return EXIT_OK


def cmd_convexity(args, cfg: RunConfig) -> int:
    kinds = [DifferenceKind.parse(k) for k in args.kind] if args.kind else list(CONVEX_KINDS)
    certs = [certify_convexity(k, cfg.grid, cfg.fd_tolerance) for k in kinds]
    if cfg.output_format == "json":
        emit(cfg, to_json({
            "tool_version": __version__,
            "grid": {"x_min": cfg.grid.x_min, "x_max": cfg.grid.x_max, "points": cfg.grid.points},
            "fd_tolerance": cfg.fd_tolerance,
            "evidence": "numerical evidence",
            "certificates": [
                {
                    "kind": c.kind.value,
                    "min_f2": c.min_f2,
                    "min_f2_at": c.min_f2_at,
                    "max_fd_mismatch": c.max_fd_mismatch,
                    "max_fd_mismatch_at": c.max_fd_mismatch_at,
                    "passed": c.passed,
                }
                for c in certs
            ],
        }))
    elif cfg.output_format == "markdown":
        rows = ["| M | min f'' | at x | max FD mismatch | at x | result |", "|---|---|---|---|---|---|"]
        rows += [
            f"| {c.kind.value} | {c.min_f2:.6e} | {c.min_f2_at:.6g} | {c.max_fd_mismatch:.3e} | "
            f"{c.max_fd_mismatch_at:.6g} | {'pass' if c.passed else 'fail'} |"
            for c in certs
        ]
        emit(cfg, "\n".join(rows))
    else:
        emit(cfg, "\n".join(c.summary() for c in certs))
    return EXIT_OK if all(c.passed for c in certs) else EXIT_SURPRISE


def cmd_ratio(args, cfg: RunConfig) -> int:
    if args.all:
        pairs = None
    else:
        if args.num is None or args.den is None:
            raise UsageError("ratio needs --num and --den, or --all")
        pairs = [RatioPair(DifferenceKind.parse(args.num), DifferenceKind.parse(args.den))]
    rows = ratio_rows(pairs, cfg.grid)
    if cfg.output_format == "json":
        emit(cfg, to_json(build_report(__version__, None, cfg.tolerance, ratios=rows)))
    elif cfg.output_format == "markdown":
        emit(cfg, constants_markdown(rows))
    else:
        emit(cfg, "\n".join(ratio_text(r) for r in rows))
    return EXIT_OK


def _render_chains(cfg: RunConfig, reports) -> None:
    if cfg.output_format == "json":
        emit(cfg, to_json(build_report(__version__, cfg.sampling.seed, cfg.tolerance, chains=reports)))
    elif cfg.output_format == "markdown":
        emit(cfg, chains_markdown(reports))
    else:
        emit(cfg, "\n".join(chain_text(r) for r in reports))


def cmd_verify(args, cfg: RunConfig) -> int:
    try:
        chains = select_chains(args.chain)
    except KeyError as exc:
        known = ", ".join(c.id for c in builtin_chains())
        raise UsageError(f"unknown chain {exc.args[0]!r}; known: all, {known}") from None
    reports = verify_chains(chains, cfg.sampling, cfg.tolerance, scale=args.scale, threads=cfg.threads)
    _render_chains(cfg, reports)
    return EXIT_OK if all(r.meets_expectation for r in reports) else EXIT_SURPRISE


def cmd_report(args, cfg: RunConfig) -> int:
    reports = verify_chains(builtin_chains(), cfg.sampling, cfg.tolerance, threads=cfg.threads)
    rows = ratio_rows()
    if cfg.output_format == "json":
        emit(cfg, to_json(build_report(__version__, cfg.sampling.seed, cfg.tolerance, reports, rows)))
    elif cfg.output_format == "markdown":
        emit(cfg, "## Optimal constants\n\n" + constants_markdown(rows)
             + "\n## Inequality chains\n\n" + chains_markdown(reports))
    else:
        emit(cfg, "\n".join([chain_text(r) for r in reports] + [ratio_text(r) for r in rows]))
    return EXIT_OK if all(r.meets_expectation for r in reports) else EXIT_SURPRISE


def cmd_list(args, cfg: RunConfig) -> int:
    topic = args.topic
    if topic == "chains":
        chains = builtin_chains()
        if cfg.output_format == "json":
            emit(cfg, export_registry(chains))
        else:
            emit(cfg, "\n".join(f"{c.id}\t{c.expectation.value}\t{c}" for c in chains))
    elif topic == "means":
        items = [k.value for k in MeanKind]
        emit(cfg, json.dumps(items) if cfg.output_format == "json" else "\n".join(items))
    elif topic == "differences":
        kinds = list(DifferenceKind)
        if cfg.output_format == "json":
            emit(cfg, json.dumps([{"kind": k.value, "closed_forms": k.has_closed_forms} for k in kinds]))
        else:
            emit(cfg, "\n".join(f"{k.value}\t{'closed-form' if k.has_closed_forms else 'chain-only'}"
                                for k in kinds))
    else:
        if cfg.output_format == "json":
            emit(cfg, json.dumps([{"num": pc.pair.numerator.value, "den": pc.pair.denominator.value,
                                   "constant": str(pc.constant)} for pc in PUBLISHED_PAIRS]))
        else:
            emit(cfg, "\n".join(f"{pc.pair.label}\t{pc.constant}" for pc in PUBLISHED_PAIRS))
    return EXIT_OK


COMMANDS = {
    "eval": cmd_eval,
    "diff": cmd_diff,
    "convexity": cmd_convexity,
    "ratio": cmd_ratio,
    "verify": cmd_verify,
    "report": cmd_report,
    "list": cmd_list,
}


# parser

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("output and tolerance")
    g.add_argument("--format", choices=FORMATS, default=None, help="output format (default: text)")
    g.add_argument("--output", "-o", default=None, help="write to this file instead of stdout")
    g.add_argument("--config", default=None, help="flat key = value settings file")
    g.add_argument("--rel-tol", dest="rel_tol", type=float, default=None,
                   help=f"relative tolerance (default: {DEFAULT_TOLERANCE.rel:g})")
    g.add_argument("--abs-floor", dest="abs_floor", type=float, default=None,
                   help=f"absolute tolerance floor (default: {DEFAULT_TOLERANCE.abs_floor:g})")
    return p


def _sampling() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("sampling")
    g.add_argument("--samples", type=int, default=None,
                   help=f"random samples (default: {DEFAULT_SAMPLING.count})")
    g.add_argument("--seed", type=int, default=None, help=f"seed (default: {DEFAULT_SAMPLING.seed})")
    g.add_argument("--ratio-min", dest="ratio_min", type=float, default=None,
                   help=f"smallest b/a (default: {DEFAULT_SAMPLING.ratio_min:g})")
    g.add_argument("--ratio-max", dest="ratio_max", type=float, default=None,
                   help=f"largest b/a (default: {DEFAULT_SAMPLING.ratio_max:g})")
    g.add_argument("--no-edge-cases", dest="no_edge_cases", action="store_true",
                   help="omit the deterministic edge ratios")
    g.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: MEANFORGE_THREADS or CPU count)")
    return p


def _grid() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("grid")
    g.add_argument("--grid-min", dest="grid_min", type=float, default=None)
    g.add_argument("--grid-max", dest="grid_max", type=float, default=None)
    g.add_argument("--grid-points", dest="grid_points", type=int, default=None)
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meanforge",
        description="Evaluate two-variable means, certify convexity of their differences, "
                    "derive optimal constants and verify inequality chains.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    common, sampling, grid = _common(), _sampling(), _grid()

    p = sub.add_parser("eval", parents=[common], help="evaluate a named mean or a power mean")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--mean", help="one of " + ", ".join(k.value for k in MeanKind))
    which.add_argument("--order", type=float, help="order t of the power mean B_t")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)

    p = sub.add_parser("diff", parents=[common], help="evaluate a difference measure M_XY")
    p.add_argument("--kind", required=True, help="difference tag such as SA or N2G")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)

    p = sub.add_parser("convexity", parents=[common, grid], help="certify convexity on a grid")
    p.add_argument("--kind", action="append", help="difference tag (repeatable; default: all eleven)")
    p.add_argument("--fd-tolerance", dest="fd_tolerance", type=float, default=None,
                   help=f"finite-difference mismatch bound (default: {FD_MISMATCH_TOLERANCE:g})")

    p = sub.add_parser("ratio", parents=[common, grid], help="profile g = f1''/f2''")
    p.add_argument("--num", help="numerator difference tag")
    p.add_argument("--den", help="denominator difference tag")
    p.add_argument("--all", action="store_true", help="profile all published pairs")

    p = sub.add_parser("verify", parents=[common, sampling], help="verify inequality chains by sampling")
    p.add_argument("--chain", default="all", help="chain id, group, comma list or 'all' (default)")
    p.add_argument("--scale", type=float, default=1.0, help="pairs are (scale, scale*x)")

    sub.add_parser("report", parents=[common, sampling], help="full chains and constants report")

    p = sub.add_parser("list", parents=[common], help="list registered objects")
    p.add_argument("topic", choices=LIST_TOPICS)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        return COMMANDS[args.command](args, cfg)
    except (UsageError, MeanforgeError) as exc:
        print(f"meanforge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
