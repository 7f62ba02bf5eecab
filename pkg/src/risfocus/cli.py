"""Command-line entry point: ``risfocus <command> ...``.

Commands::

    scenario gen --paper --seed S --nx NX --nz NZ --delta-a-deg D [--out F]
    codebook build --scenario F --source J --method {linear,opt,both} [--out F]
    evaluate gains   --scenario F --codebook F --source J --focus I [--out-dir D]
    evaluate leakage --scenario F --codebook F --source J --focus I --leak K [--out-dir D]
    aggregate --seeds 1..20 --nx NX --nz NZ --delta-a-deg D [--method M] [--out F]

Exit status is 0 on success and 2 on any error, with a diagnostic on stderr.
"""

from __future__ import annotations

import argparse
import logging
import math
import shlex
import sys
from pathlib import Path

from . import __version__
from .evaluation import aggregate, codebook, gain_map, leakage
from .fileio import (
    FormatError,
    atomic_write,
    codebook_to_dict,
    csv_text,
    dumps,
    grid_text,
    load_codebook,
    load_scenario,
    map_rows,
    provenance,
    save_scenario,
)
from .scenario import paper_scenario
from .sdr import DEFAULT_TOL, SolverError, opt_codebook

log = logging.getLogger("risfocus")

AGG_FIELDS = ["method", "delta_a_deg", "nx", "nz", "mean_intended_gain", "mean_leakage",
              "mean_min_gain", "mean_combined", "seed_count"]


def parse_seeds(tokens: list[str]) -> list[int]:
    """Accept ``3 5 8``, ``1,2,3`` and inclusive ranges ``1..20``."""
    seeds = []
    for tok in tokens:
        for part in tok.split(","):
            if not part:
                continue
            if ".." in part:
                lo, hi = part.split("..", 1)
                lo, hi = int(lo), int(hi)
                if hi < lo:
                    raise argparse.ArgumentTypeError(f"empty seed range {part!r}")
                seeds.extend(range(lo, hi + 1))
            else:
                seeds.append(int(part))
    if not seeds:
        raise argparse.ArgumentTypeError("seed list is empty")
    return seeds


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _method_list(method: str) -> list[str]:
    return ["linear", "opt"] if method == "both" else [method]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="risfocus", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"risfocus {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    scn = sub.add_parser("scenario", help="generate scenario files")
    scn_sub = scn.add_subparsers(dest="action", required=True)
    gen = scn_sub.add_parser("gen", help="write a scenario file")
    gen.add_argument("--paper", action="store_true", required=True,
                     help="use the 4-RIS reference layout")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--nx", type=int, default=7)
    gen.add_argument("--nz", type=int, default=7)
    gen.add_argument("--delta-a-deg", type=float, default=10.0,
                     help="NLoS azimuth half-width around the LoS azimuth")
    gen.add_argument("--out", default="scenario.json")

    cb = sub.add_parser("codebook", help="build codebooks")
    cb_sub = cb.add_subparsers(dest="action", required=True)
    build = cb_sub.add_parser("build", help="write the codebook of one RIS")
    build.add_argument("--scenario", required=True)
    build.add_argument("--source", type=int, required=True)
    build.add_argument("--method", choices=["linear", "opt", "both"], default="both")
    build.add_argument("--sdr-tol", type=_positive, default=DEFAULT_TOL)
    build.add_argument("--out", default=None,
                       help="default: codebook_ris<source>.json")

    ev = sub.add_parser("evaluate", help="gain and leakage maps")
    ev.add_argument("kind", choices=["gains", "leakage"])
    ev.add_argument("--scenario", required=True)
    ev.add_argument("--codebook", required=True)
    ev.add_argument("--source", type=int, required=True)
    ev.add_argument("--focus", type=int, required=True)
    ev.add_argument("--leak", type=int)
    ev.add_argument("--out-dir", default=".")

    agg = sub.add_parser("aggregate", help="seed-averaged gains over the reference layout")
    agg.add_argument("--seeds", nargs="+", required=True)
    agg.add_argument("--nx", type=int, default=7)
    agg.add_argument("--nz", type=int, default=7)
    agg.add_argument("--delta-a-deg", type=float, default=10.0)
    agg.add_argument("--method", choices=["linear", "opt", "both"], default="both")
    agg.add_argument("--sdr-tol", type=_positive, default=DEFAULT_TOL)
    agg.add_argument("--out", default="aggregate.csv")
    return p


def cmd_scenario(args, command):
    if args.delta_a_deg < 0:
        raise ValueError("--delta-a-deg must be non-negative")
    scn = paper_scenario(args.seed, (args.nx, args.nz), math.radians(args.delta_a_deg))
    path = save_scenario(scn, args.out, command)
    log.info("wrote %s (%d links)", path, len(scn.links))


def cmd_codebook(args, command):
    scn = load_scenario(args.scenario)
    node = scn.ris_node(args.source)
    books, extras = {}, {}
    for m in _method_list(args.method):
        if m == "opt":
            sols = opt_codebook(scn, args.source, args.sdr_tol, with_solutions=True)
            books[m] = {t: s.codeword for t, s in sols.items()}
            extras[m] = {t: {"gamma_relaxed": s.gamma_relaxed,
                             "gamma_restored": s.gamma_restored} for t, s in sols.items()}
        else:
            books[m] = codebook(scn, args.source, m)
    doc = codebook_to_dict(args.source, books, node.geometry, command, scn.seed, extras)
    path = atomic_write(args.out or f"codebook_ris{args.source}.json", dumps(doc))
    log.info("wrote %s", path)


def cmd_evaluate(args, command):
    scn = load_scenario(args.scenario)
    node = scn.ris_node(args.source)
    source, books = load_codebook(args.codebook, node.geometry)
    if source != args.source:
        raise FormatError(f"codebook.source: file is for RIS {source}, "
                          f"--source is {args.source}")
    if args.kind == "leakage" and args.leak is None:
        raise ValueError("evaluate leakage requires --leak")
    prov = provenance(command, scn.seed)
    stem = f"{args.kind}_s{args.source}_f{args.focus}"
    if args.kind == "leakage":
        stem += f"_l{args.leak}"
    out_dir = Path(args.out_dir)
    rows = []
    for method, book in books.items():
        if args.focus not in book:
            raise FormatError(f"codebook.codebooks.{method}: no codeword for target {args.focus}")
        code = book[args.focus]
        if args.kind == "gains":
            entries = gain_map(scn, code, args.source, args.focus, method).entries
        else:
            entries = leakage(scn, code, args.source, args.focus, args.leak, method).entries
        rows += map_rows(entries, args.source, args.focus, args.leak, method, scn.seed)
        label = f"method={method} source={args.source} focus={args.focus}"
        if args.leak is not None:
            label += f" leak={args.leak}"
        atomic_write(out_dir / f"{stem}_{method}.grid.txt", grid_text(entries, prov, label))
    atomic_write(out_dir / f"{stem}.csv", csv_text(rows, prov=prov))
    log.info("wrote %s", out_dir / f"{stem}.csv")


def cmd_aggregate(args, command):
    seeds = parse_seeds(args.seeds)
    reports = aggregate(seeds, _method_list(args.method), (args.nx, args.nz),
                        math.radians(args.delta_a_deg), args.sdr_tol)
    rows = [[r.method, f"{args.delta_a_deg:g}", args.nx, args.nz,
             *(f"{v:.12g}" for v in (r.mean_intended_gain, r.mean_leakage,
                                     r.mean_min_gain, r.mean_combined)),
             r.seed_count] for r in reports]
    prov = provenance(command, " ".join(map(str, seeds)))
    atomic_write(args.out, csv_text(rows, AGG_FIELDS, prov))
    log.info("wrote %s", args.out)


COMMANDS = {"scenario": cmd_scenario, "codebook": cmd_codebook,
            "evaluate": cmd_evaluate, "aggregate": cmd_aggregate}


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    command = shlex.join(["risfocus", *argv])
    try:
        COMMANDS[args.command](args, command)
    except (FormatError, SolverError, ValueError, KeyError, OSError,
            argparse.ArgumentTypeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"risfocus: error: {msg}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
