"""Large-gamma phase diagrams over two barycentric cross-sections.

Each cell of a triangular grid is assigned the candidate repetend with the
smallest asymptotic coefficient ``C``.

* ``omega`` section: volume fractions vary, all three tensions equal 2/3.
* ``tension`` section: equal volume fractions,
  ``(c12, c13, c23) = l1*(1,1,0) + l2*(1,0,1) + l3*(0,1,1)``.

Long-range coefficients ``K`` depend only on the volume fractions and the
matrix family, so they are cached; the whole tension section needs a single
set of 19 optimizations.
"""
from __future__ import annotations

import colorsys
import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from xml.sax.saxutils import escape

import numpy as np

from . import energy as E
from .analytic import coefficient_from
from .interaction import build_family
from .optimizer import OptimizerOptions, optimize_widths
from .pattern import canonicalize, validate

# legend order; numbering in output is 1-based
CANDIDATES = (
    "ABC", "ABAC", "BABC", "CACB", "ABACBABC", "CACBACAB", "CBCABCBA",
    "BABAC", "CACAB", "CBCBA", "BABABC", "ABABAC", "ACACAB", "CACACB",
    "CBCBCA", "BCBCBA", "BCBCBACBCBCA", "BABABCABABAC", "ACACABCACACB",
)
SECTIONS = ("omega", "tension")
SECTION_FAMILIES = ("ren", "ohta")
DEFAULT_RESOLUTION = 60
MAX_RESOLUTION = 200
TIE_TOL = 1e-9
FAILED = 0          # sentinel winner index
EQUAL_TENSION = 2.0 / 3.0


def candidate_canonical() -> list[str]:
    return [canonicalize(c) for c in CANDIDATES]


def _check_lambda(lam, tol: float = 1e-12) -> tuple[float, float, float]:
    lam = tuple(float(x) for x in lam)
    if len(lam) != 3 or any(x < -tol for x in lam) or abs(sum(lam) - 1.0) > tol:
        raise ValueError(f"barycentric coordinates must be nonnegative and sum to 1, got {lam}")
    return lam


def section_values(section: str, lam) -> tuple[tuple, tuple]:
    """``(omega, (c12, c13, c23))`` at a barycentric point."""
    l1, l2, l3 = _check_lambda(lam)
    if section == "omega":
        if min(l1, l2, l3) <= 0.0:
            raise ValueError(f"omega-section point {lam} has a vanishing volume fraction")
        return (l1, l2, l3), (EQUAL_TENSION,) * 3
    if section == "tension":
        return (1 / 3, 1 / 3, 1 / 3), (l1 + l2, l1 + l3, l2 + l3)
    raise ValueError(f"section must be one of {SECTIONS}, got {section!r}")


def params_from_barycentric(section: str, lam, family: str = "ren") -> E.ModelParams:
    """Model parameters at a section point with the unit-strength family matrix."""
    omega, c = section_values(section, lam)
    return E.ModelParams(omega, *c, build_family(family, omega, 1.0))


def tension_barycentric(c12: float, c13: float, c23: float) -> tuple[float, float, float]:
    """Inverse of the tension-section map."""
    return ((c12 + c13 - c23) / 2.0, (c12 - c13 + c23) / 2.0, (-c12 + c13 + c23) / 2.0)


@dataclass(frozen=True)
class PhaseCell:
    barycentric: tuple[float, float, float]
    vertices: tuple          # three barycentric corners of the cell
    winner: int              # 1-based candidate index, FAILED on error
    coefficient: float
    coefficients: tuple      # C of every candidate, legend order
    runner_up_gap: float

    @property
    def winner_pattern(self) -> str:
        return CANDIDATES[self.winner - 1] if self.winner != FAILED else ""


def grid_cells(resolution: int) -> list[tuple[tuple, tuple]]:
    """``resolution**2`` triangles as ``(centroid, corners)`` in barycentric coordinates."""
    if int(resolution) != resolution or resolution < 1:
        raise ValueError(f"resolution must be a positive integer, got {resolution!r}")
    r = int(resolution)
    out = []
    for i in range(r):
        for j in range(r - i):
            k = r - 1 - i - j
            corners = ((i + 1, j, k), (i, j + 1, k), (i, j, k + 1))
            out.append(corners)
            if k >= 1:
                # downward cell sharing the edge opposite (i, j, k+1)
                out.append(((i + 1, j + 1, k - 1), (i + 1, j, k), (i, j + 1, k)))
    cells = []
    for corners in out:
        bary = tuple(tuple(x / r for x in c) for c in corners)
        centroid = tuple(sum(c[m] for c in corners) / (3.0 * r) for m in range(3))
        cells.append((centroid, bary))
    return cells


@lru_cache(maxsize=4096)
def _k_values(omega: tuple, family: str, opts: OptimizerOptions) -> tuple:
    """Optimized long-range term of every candidate at unit strength (cached)."""
    gamma = build_family(family, omega, 1.0)
    params = E.ModelParams(omega, 1.0, 1.0, 1.0, gamma)
    return tuple(float(optimize_widths(c, params, opts).energy.long_range) for c in CANDIDATES)


def _short_ranges(tensions) -> list[float]:
    c12, c13, c23 = tensions
    tm = {frozenset("AB"): c12, frozenset("AC"): c13, frozenset("BC"): c23}
    return [math.fsum(tm[frozenset((p[k - 1], p[k]))] for k in range(len(p)))
            for p in CANDIDATES]


def evaluate_point(section: str, lam, family: str,
                   opts: OptimizerOptions | None = None) -> tuple[int, tuple]:
    """Winner index (1-based) and all coefficients at one barycentric point."""
    opts = opts or OptimizerOptions()
    omega, tensions = section_values(section, lam)
    Ks = _k_values(tuple(float(x) for x in omega), family, opts)
    Cs = tuple(coefficient_from(S, K) for S, K in zip(_short_ranges(tensions), Ks))
    lo = min(Cs)
    winner = next(i for i, c in enumerate(Cs) if c <= lo + TIE_TOL)
    return winner + 1, Cs


def _cell(section, family, opts, centroid, corners) -> PhaseCell:
    try:
        winner, Cs = evaluate_point(section, centroid, family, opts)
    except (ValueError, ArithmeticError, np.linalg.LinAlgError):
        return PhaseCell(centroid, corners, FAILED, math.nan, (), math.nan)
    others = [c for i, c in enumerate(Cs) if i != winner - 1]
    gap = min(others) - Cs[winner - 1] if others else math.inf
    return PhaseCell(centroid, corners, winner, Cs[winner - 1], Cs, gap)


def _run_cells(args):
    section, family, opts, cells = args
    return [_cell(section, family, opts, c, v) for c, v in cells]


def sweep(section: str, family: str, resolution: int = DEFAULT_RESOLUTION,
          opts: OptimizerOptions | None = None, workers: int = 1) -> list[PhaseCell]:
    if section not in SECTIONS:
        raise ValueError(f"section must be one of {SECTIONS}, got {section!r}")
    if family not in SECTION_FAMILIES:
        raise ValueError(f"family must be one of {SECTION_FAMILIES}, got {family!r}")
    if resolution > MAX_RESOLUTION:
        raise ValueError(f"resolution {resolution} exceeds {MAX_RESOLUTION}")
    opts = opts or OptimizerOptions()
    for c in CANDIDATES:
        validate(c * 2)
    cells = grid_cells(resolution)
    if workers <= 1 or section == "tension":
        return _run_cells((section, family, opts, cells))
    size = max(1, math.ceil(len(cells) / (4 * workers)))
    chunks = [(section, family, opts, cells[i:i + size]) for i in range(0, len(cells), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_run_cells, chunks))
    return [cell for part in parts for cell in part]


def nearest_cell(grid: list[PhaseCell], lam) -> PhaseCell:
    lam = np.asarray(_check_lambda(lam))
    return min(grid, key=lambda c: float(np.sum((np.asarray(c.barycentric) - lam) ** 2)))


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def emit_csv(grid: list[PhaseCell]) -> str:
    if not grid:
        raise ValueError("empty grid")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["lambda1", "lambda2", "lambda3", "winner_index", "winner_pattern", "coefficient"])
    for c in grid:
        w.writerow([*(_fmt(x) for x in c.barycentric), c.winner, c.winner_pattern,
                    _fmt(c.coefficient)])
    return buf.getvalue()


def parse_csv(text: str) -> list[dict]:
    rows = list(csv.DictReader(io.StringIO(text)))
    for r in rows:
        for k in ("lambda1", "lambda2", "lambda3", "coefficient"):
            r[k] = float(r[k])
        r["winner_index"] = int(r["winner_index"])
    return rows


def palette() -> list[str]:
    """19 distinguishable colours; hues are interleaved so neighbours in the list differ."""
    out = []
    for i in range(len(CANDIDATES)):
        h = (i * 7 % 19) / 19.0
        s, v = (0.65, 0.95) if i % 2 == 0 else (0.85, 0.70)
        r, g, b = colorsys.hsv_to_rgb(h, s, v)
        out.append(f"#{round(r * 255):02x}{round(g * 255):02x}{round(b * 255):02x}")
    return out


# vertex placement of (l1, l2, l3) per section; y grows downward in SVG
_LAYOUT = {
    "omega": ((0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3) / 2)),
    "tension": ((0.0, math.sqrt(3) / 2), (0.5, 0.0), (1.0, math.sqrt(3) / 2)),
}
_VERTEX_LABELS = {
    "omega": ("ω = (1,0,0)", "ω = (0,1,0)", "ω = (0,0,1)"),
    "tension": ("c = (1,1,0)", "c = (1,0,1)", "c = (0,1,1)"),
}


def emit_svg(grid: list[PhaseCell], section: str = "omega", title: str = "") -> str:
    """Ternary plot, one polygon per cell coloured by winner, with a legend."""
    if not grid:
        raise ValueError("empty grid")
    if section not in _LAYOUT:
        raise ValueError(f"section must be one of {SECTIONS}, got {section!r}")
    size, pad, legend_w = 500.0, 40.0, 230.0
    verts = np.array(_LAYOUT[section]) * size + pad
    colors = palette()

    def xy(b):
        p = np.asarray(b) @ verts
        return f"{p[0]:.3f},{p[1]:.3f}"

    width = size + 2 * pad + legend_w
    height = size * math.sqrt(3) / 2 + 2 * pad + 20
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="0 0 {width:.0f} {height:.0f}" width="{width:.0f}" height="{height:.0f}">',
    ]
    if title:
        lines.append(f'<title>{escape(title)}</title>')
    lines.append('<g stroke-width="0.3">')
    for c in grid:
        fill = colors[c.winner - 1] if c.winner != FAILED else "#808080"
        pts = " ".join(xy(v) for v in c.vertices)
        lines.append(f'<polygon points="{pts}" fill="{fill}" stroke="{fill}"/>')
    lines.append('</g>')
    outline = " ".join(f"{x:.3f},{y:.3f}" for x, y in verts)
    lines.append(f'<polygon points="{outline}" fill="none" stroke="#000000" stroke-width="1"/>')
    for (x, y), label in zip(verts, _VERTEX_LABELS[section]):
        dy = -8 if y < pad + size / 2 else 18
        lines.append(f'<text x="{x:.1f}" y="{y + dy:.1f}" font-size="12" '
                     f'text-anchor="middle">{escape(label)}</text>')
    x0 = size + 2 * pad
    for i, pat in enumerate(CANDIDATES):
        y = pad + 20 * i
        lines.append(f'<rect x="{x0:.0f}" y="{y:.0f}" width="14" height="14" '
                     f'fill="{colors[i]}" stroke="#000000" stroke-width="0.5"/>')
        lines.append(f'<text x="{x0 + 22:.0f}" y="{y + 12:.0f}" font-size="12">'
                     f'{i + 1} {pat}</text>')
    lines.append('</svg>')
    return "\n".join(lines) + "\n"
