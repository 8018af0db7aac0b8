"""Command-line interface.

    ternok [--config FILE] [model flags] <command> [command flags]

Commands: energy, optimize, search, phasediag, matrix, balls.  Results are
JSON on stdout (or in a file for search); every JSON document carries the
fully resolved configuration under ``"config"``.

Exit status: 0 success, 2 invalid input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import collections
import json
import logging
import os
import sys

import jsonschema
import numpy as np

from . import __version__, balls, config, interaction, phasediag
from .energy import ConfigurationError, free_energy, uniform_widths
from .optimizer import optimize_repeats, optimize_widths
from .pattern import InvalidPattern, validate
from .search import global_search

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3
log = logging.getLogger("ternok")


class NumericalFailure(RuntimeError):
    pass


def _num(x: float, digits: int | None = None):
    x = float(x)
    if not np.isfinite(x):
        return None
    return float(f"{x:.{digits}g}") if digits else x


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _emit(doc: dict, path: str | None = None) -> None:
    config.validate_output(doc)
    text = _dump(doc)
    if path:
        _write(path, text)
    else:
        sys.stdout.write(text)


def _threads(args) -> int:
    return args.threads if args.threads else (os.cpu_count() or 1)


def _flag_config(args) -> dict:
    cfg: dict = {}
    if args.omega:
        cfg["omega"] = list(args.omega)
    if args.tensions:
        cfg["tensions"] = dict(zip(("c12", "c13", "c23"), args.tensions))
    m = {"family": args.family, "gamma": args.gamma}
    if args.gamma_tilde:
        m["gamma_tilde"] = [args.gamma_tilde[:2], args.gamma_tilde[2:]]
    cfg["matrix"] = {k: v for k, v in m.items() if v is not None}
    tol = {"optimality_tol": args.optimality_tol, "constraint_tol": args.constraint_tol,
           "step_tol": args.step_tol, "max_iters": args.max_iters,
           "symmetry_mode": args.symmetry_mode}
    cfg["tolerances"] = {k: v for k, v in tol.items() if v is not None}
    out = {"csv_path": getattr(args, "csv", None), "svg_path": getattr(args, "svg", None),
           "json_path": getattr(args, "json", None)}
    cfg["output"] = {k: v for k, v in out.items() if v is not None}
    return cfg


# --- commands ------------------------------------------------------------------

def cmd_energy(args, cfg) -> int:
    params = config.model_params(cfg)
    pattern = validate(args.pattern)
    doc = {"command": "energy", "config": cfg, "pattern": pattern}
    if args.widths is not None:
        widths = np.asarray(args.widths, dtype=float)
        mode = "given"
    elif args.uniform:
        widths = uniform_widths(pattern, params.omega)
        mode = "uniform"
    else:
        res = optimize_widths(pattern, params, config.optimizer_options(cfg))
        if not res.converged:
            raise NumericalFailure(
                f"width optimization of {pattern} did not converge "
                f"(KKT residual {res.kkt_residual:.3g} after {res.iterations} iterations)")
        widths = res.widths
        mode = "optimized"
        doc["converged"] = True
        doc["degenerate_layers"] = res.degenerate_layers
    e = free_energy(pattern, widths, params)
    doc.update(widths_mode=mode, widths=[_num(x, 15) for x in widths],
               energy={k: _num(v, 15) for k, v in e.as_dict().items()})
    _emit(doc)
    return EXIT_OK


def cmd_optimize(args, cfg) -> int:
    params = config.model_params(cfg)
    opts = config.optimizer_options(cfg)
    doc = {"command": "optimize", "config": cfg}
    if args.n_max:
        rep = optimize_repeats(args.pattern, params, args.n_max, opts)
        res = rep.result
        doc["repeats"] = {"repetend": validate(args.pattern), "n": rep.n,
                          "at_boundary": rep.at_boundary,
                          "energies": [_num(x) for x in rep.energies]}
        if rep.at_boundary:
            log.warning("best repeat count sits at n_max=%d; larger n may be lower", args.n_max)
    else:
        res = optimize_widths(args.pattern, params, opts)
    doc["result"] = res.as_dict()
    _emit(doc, cfg["output"].get("json_path"))
    if not res.converged:
        raise NumericalFailure(f"width optimization of {res.pattern} did not converge")
    return EXIT_OK


def cmd_search(args, cfg) -> int:
    params = config.model_params(cfg)
    report = global_search(params, args.max_len, config.optimizer_options(cfg), _threads(args))
    doc = {"command": "search", "config": cfg, "report": report.as_dict()}
    path = cfg["output"].get("json_path") or "search.json"
    _emit(doc, path)
    csv_path = cfg["output"].get("csv_path")
    if csv_path:
        _write(csv_path, report.to_csv())
    b = report.best
    print(f"best: {b.scored_as} (length {len(b.scored_as)}) energy {b.energy!r}")
    print(f"evaluated {report.evaluated_count} patterns up to length {args.max_len}; "
          f"{len(report.failures)} failures")
    if report.frontier_stopped:
        print("warning: best pattern has the maximum length; longer patterns may be lower",
              file=sys.stderr)
    print(f"report written to {path}")
    if not b.converged:
        raise NumericalFailure(f"optimization of the best pattern {b.pattern} did not converge")
    return EXIT_OK


def cmd_phasediag(args, cfg) -> int:
    # --family before the command picks the model matrix; the diagram has its own
    family = args.pd_family
    grid = phasediag.sweep(args.section, family, args.resolution,
                           config.optimizer_options(cfg), _threads(args))
    stem = f"phasediag_{args.section}_{family}"
    csv_path = cfg["output"].get("csv_path") or stem + ".csv"
    svg_path = cfg["output"].get("svg_path") or stem + ".svg"
    _write(csv_path, phasediag.emit_csv(grid))
    _write(svg_path, phasediag.emit_svg(grid, args.section,
                                        title=f"{args.section} section, {family} matrix"))
    counts = collections.Counter(c.winner for c in grid)
    doc = {"command": "phasediag", "config": cfg, "section": args.section,
           "family": family, "resolution": args.resolution, "cells": len(grid),
           "counts": {str(phasediag.CANDIDATES[k - 1] if k else "failed"): v
                      for k, v in sorted(counts.items())},
           "csv_path": csv_path, "svg_path": svg_path}
    _emit(doc, cfg["output"].get("json_path"))
    if counts.get(phasediag.FAILED):
        raise NumericalFailure(f"{counts[phasediag.FAILED]} cells failed to evaluate")
    return EXIT_OK


def _matrix_input(args, cfg):
    if args.gamma_matrix:
        g = np.asarray(json.loads(args.gamma_matrix), dtype=float)
        if g.shape != (3, 3):
            raise ValueError(f"--gamma-matrix must be 3x3, got shape {g.shape}")
        return g
    return config.gamma_matrix(cfg)


def cmd_matrix(args, cfg) -> int:
    omega = interaction.check_omega(cfg["omega"])
    g = _matrix_input(args, cfg)
    doc = {"command": "matrix", "config": cfg, "gamma": g.tolist()}
    if args.check:
        adm = interaction.is_admissible(g, omega, args.tol)
        doc["check"] = {"admissible": adm.admissible, "null_residual": adm.null_residual,
                        "min_eigenvalue": adm.min_eigenvalue, "asymmetry": adm.asymmetry,
                        "tol": args.tol}
    if args.canonicalize:
        doc["canonical"] = interaction.canonicalize_gamma(g, omega).tolist()
    if args.decompose:
        f = interaction.f_from_gamma(g, omega)
        d = interaction.decompose_f(f, args.tol)
        doc["decompose"] = {"f": f.tolist(), "f12": d.f12, "f13": d.f13, "f23": d.f23,
                            "psd": d.psd, "n_positive": d.n_positive}
    _emit(doc, cfg["output"].get("json_path"))
    return EXIT_OK


def cmd_balls(args, cfg) -> int:
    doc = {"command": "balls", "config": cfg, "mode": args.mode}
    if args.mode == "binary":
        r = balls.brute_force_optimal(args.n, mode="binary")
        doc.update(n=args.n, minimizers=list(r.minimizers), energy=r.energy)
    elif args.mode == "ternary":
        omega = interaction.check_omega(cfg["omega"])
        f = interaction.f_from_gamma(config.gamma_matrix(cfg), omega)
        r = balls.brute_force_optimal(args.n, omega, f)
        doc.update(n=args.n, f=f.tolist(), minimizers=list(r.minimizers), energy=r.energy,
                   spread=r.spread, count=r.count,
                   cyclic_is_minimizer=balls.cyclic_word(args.n) in r.minimizers)
    else:
        cases = balls.conjecture_sweep(ns=(args.n,), workers=_threads(args))
        fails = [c for c in cases if not c.holds]
        for c in cases:
            fp = ",".join(f"{x:.6f}" for x in c.f_pair)
            om = ",".join(f"{x:.6f}" for x in c.omega)
            print(f"{'PASS' if c.holds else 'FAIL'} n={c.n} f=({fp}) omega=({om})", file=sys.stderr)
        if fails:
            print(f"COUNTEREXAMPLES FOUND: {len(fails)} of {len(cases)} cases", file=sys.stderr)
        doc.update(n=args.n, cases=len(cases), counterexamples=[
            {"omega": list(c.omega), "f": list(c.f_pair), "minimizers": list(c.minimizers)}
            for c in fails])
    _emit(doc, cfg["output"].get("json_path"))
    return EXIT_OK


COMMANDS = {"energy": cmd_energy, "optimize": cmd_optimize, "search": cmd_search,
            "phasediag": cmd_phasediag, "matrix": cmd_matrix, "balls": cmd_balls}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ternok", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--omega", type=float, nargs=3, metavar=("W1", "W2", "W3"))
    p.add_argument("--tensions", type=float, nargs=3, metavar=("C12", "C13", "C23"))
    p.add_argument("--family", choices=["ren", "ohta", "blend", "general"])
    p.add_argument("--gamma", type=float, help="overall long-range strength")
    p.add_argument("--gamma-tilde", type=float, nargs=4, metavar="G",
                   help="reduced 2x2 matrix, row major (family 'general')")
    p.add_argument("--optimality-tol", type=float)
    p.add_argument("--constraint-tol", type=float)
    p.add_argument("--step-tol", type=float)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--symmetry-mode", choices=["free", "paper-symmetric"])
    p.add_argument("--threads", type=int, help="worker processes (default: all CPUs)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("energy", help="free energy of one pattern")
    e.add_argument("--pattern", required=True)
    g = e.add_mutually_exclusive_group()
    g.add_argument("--widths", type=float, nargs="+")
    g.add_argument("--uniform", action="store_true", help="per-species uniform widths")
    g.add_argument("--optimize", action="store_true", help="optimized widths (default)")

    o = sub.add_parser("optimize", help="optimize layer widths")
    o.add_argument("--pattern", required=True)
    o.add_argument("--n-max", type=int, help="also optimize the repeat count 1..N")
    o.add_argument("--json")

    s = sub.add_parser("search", help="exhaustive pattern search")
    s.add_argument("--max-len", type=int, required=True)
    s.add_argument("--json", help="report path (default ./search.json)")
    s.add_argument("--csv", help="optional per-pattern dump")

    d = sub.add_parser("phasediag", help="large-gamma phase diagram")
    d.add_argument("--section", choices=phasediag.SECTIONS, required=True)
    d.add_argument("--family", dest="pd_family", choices=phasediag.SECTION_FAMILIES, default="ren")
    d.add_argument("--resolution", type=int, default=phasediag.DEFAULT_RESOLUTION)
    d.add_argument("--csv")
    d.add_argument("--svg")
    d.add_argument("--json")

    m = sub.add_parser("matrix", help="admissibility / canonical form / pair decomposition")
    m.add_argument("--check", action="store_true")
    m.add_argument("--canonicalize", action="store_true")
    m.add_argument("--decompose", action="store_true")
    m.add_argument("--gamma-matrix", help="explicit 3x3 matrix as JSON")
    m.add_argument("--tol", type=float, default=interaction.DEFAULT_TOL)
    m.add_argument("--json")

    b = sub.add_parser("balls", help="discrete charged-ball model")
    b.add_argument("--mode", choices=["binary", "ternary", "conjecture-sweep"], required=True)
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--json")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        file_cfg = config.load_file(args.config) if args.config else {}
        cfg = config.resolve(file_cfg, _flag_config(args))
        if args.command == "matrix" and not (args.check or args.canonicalize or args.decompose):
            args.check = True
        return COMMANDS[args.command](args, cfg)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(x) for x in exc.absolute_path) or "<root>"
        print(f"error: invalid config at {where}: {exc.message}", file=sys.stderr)
        return EXIT_INVALID
    except InvalidPattern as exc:
        print(f"error: invalid pattern ({exc.reason.replace('-', ' ')}): {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ConfigurationError, interaction.MatrixError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericalFailure, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
