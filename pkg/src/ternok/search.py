"""Exhaustive search over all canonical patterns up to a length bound.

Each pattern's widths are optimized from the uniform start.  A result with
zero-width layers really describes a shorter pattern, so it is re-scored as
that merged pattern: short-range of the merged pattern plus the (unchanged)
long-range term.

Selection is schedule independent: among records within ``ENERGY_TOL`` of the
lowest energy, the shortest pattern wins, then the lexicographically least.
"""
from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import energy as E
from .optimizer import OptimizationResult, OptimizerOptions, optimize_widths
from .pattern import canonicalize, enumerate_patterns, merge_degenerate, validate

log = logging.getLogger(__name__)

ENERGY_TOL = 1e-9
CHUNK = 256


@dataclass(frozen=True)
class PatternRecord:
    pattern: str          # pattern as optimized
    scored_as: str        # canonical pattern after merging zero-width layers
    energy: float
    converged: bool
    widths: tuple


@dataclass
class SearchReport:
    best: PatternRecord
    per_length_best: dict[int, PatternRecord]
    frontier_stopped: bool
    evaluated_count: int
    max_len: int
    failures: list[tuple[str, str]] = field(default_factory=list)
    records: list[PatternRecord] = field(default_factory=list, repr=False)

    def as_dict(self) -> dict:
        def rec(r: PatternRecord) -> dict:
            return {"pattern": r.scored_as, "optimized_pattern": r.pattern,
                    "energy": r.energy, "converged": r.converged,
                    "widths": list(r.widths)}
        return {
            "best": rec(self.best),
            "per_length_best": {str(k): {"pattern": v.scored_as, "energy": v.energy}
                                for k, v in sorted(self.per_length_best.items())},
            "frontier_stopped": self.frontier_stopped,
            "evaluated_count": self.evaluated_count,
            "max_len": self.max_len,
            "failures": [{"pattern": p, "error": e} for p, e in self.failures],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["pattern", "length", "energy", "converged"])
        for r in self.records:
            w.writerow([r.pattern, len(r.pattern), repr(r.energy), str(r.converged).lower()])
        return buf.getvalue()


def rescore(result: OptimizationResult, params: E.ModelParams, tol: float) -> PatternRecord:
    """Attribute a result to its merged pattern when some layers vanished."""
    if result.degenerate_layers:
        merged, _ = merge_degenerate(result.pattern, result.widths, tol)
        merged = validate(merged)
        energy = E.short_range(merged, params) + result.energy.long_range
        scored = canonicalize(merged)
    else:
        energy = result.energy.total
        scored = result.pattern
    return PatternRecord(result.pattern, scored, float(energy), result.converged,
                         tuple(float(x) for x in result.widths))


def select_best(records) -> PatternRecord:
    """Lowest energy, then shortest, then lexicographic (within ``ENERGY_TOL``)."""
    records = list(records)
    lo = min(r.energy for r in records)
    near = [r for r in records if r.energy <= lo + ENERGY_TOL]
    return min(near, key=lambda r: (len(r.scored_as), r.scored_as, r.pattern))


def _run_chunk(args):
    patterns, params, opts = args
    out, failed = [], []
    for p in patterns:
        try:
            res = optimize_widths(p, params, opts)
            out.append(rescore(res, params, opts.constraint_tol))
        except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
            failed.append((p, f"{type(exc).__name__}: {exc}"))
    return out, failed


def global_search(params: E.ModelParams, max_len: int,
                  opts: OptimizerOptions | None = None, workers: int = 1) -> SearchReport:
    opts = opts or OptimizerOptions()
    patterns = enumerate_patterns(max_len)
    chunks = [(patterns[i:i + CHUNK], params, opts) for i in range(0, len(patterns), CHUNK)]
    log.info("searching %d patterns up to length %d on %d worker(s)",
             len(patterns), max_len, workers)
    if workers <= 1:
        results = map(_run_chunk, chunks)
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        results = pool.map(_run_chunk, chunks)
    records: list[PatternRecord] = []
    failures: list[tuple[str, str]] = []
    try:
        # map preserves submission order, so the record list is schedule independent
        for recs, failed in results:
            records.extend(recs)
            failures.extend(failed)
    finally:
        if workers > 1:
            pool.shutdown()
    if not records:
        raise RuntimeError("every pattern failed to optimize")
    by_len: dict[int, list[PatternRecord]] = {}
    for r in records:
        by_len.setdefault(len(r.scored_as), []).append(r)
    per_length = {k: select_best(v) for k, v in sorted(by_len.items())}
    best = select_best(records)
    return SearchReport(best, per_length, len(best.scored_as) == max_len,
                        len(records) + len(failures), max_len, failures, records)
