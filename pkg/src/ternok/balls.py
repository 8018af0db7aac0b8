"""Discrete charged-ball model on the unit circle.

A ternary arrangement is a cyclic word over A, B, C with ``n`` balls of each
species; a ball of species ``i`` has diameter ``omega_i / n`` and the balls
touch, so ball centres follow from the diameters alone.  The potential energy
is

    U = 1/2 * sum_k sum_m f[i_k, i_m] * G(x_k, x_m)

with self terms included.  A binary arrangement is a ±1 spin word of length
``2n`` with centres at ``k / 2n``.

Each layer of a uniform-width pattern behaves like a ball whose charge sits
at its centre, which is what :func:`ok_discrete_equivalence` checks.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import energy as E
from .interaction import cap_samples, check_omega, compose_f, f_from_gamma
from .pattern import SPECIES, canonicalize

TERNARY_MAX_N = 5
BINARY_MAX_N = 8
REL_TOL = 1e-12
_CHUNK = 20000


def _green_matrix(x: np.ndarray) -> np.ndarray:
    """Periodic Green's function of every pair of points along the last axis."""
    d = np.abs(x[..., :, None] - x[..., None, :])
    return d * d / 2.0 - d / 2.0 + 1.0 / 12.0


def _ternary_labels(arr) -> np.ndarray:
    if isinstance(arr, str):
        bad = set(arr) - set(SPECIES)
        if bad:
            raise ValueError(f"unknown species labels {sorted(bad)} in arrangement")
        return np.array([SPECIES.index(c) for c in arr], dtype=np.intp)
    lab = np.asarray(arr, dtype=np.intp)
    if lab.ndim != 1 or np.any((lab < 0) | (lab > 2)):
        raise ValueError("arrangement must be a string over ABC or indices 0..2")
    return lab


def _check_ternary(arr) -> tuple[np.ndarray, int]:
    lab = _ternary_labels(arr)
    counts = np.bincount(lab, minlength=3)
    if lab.size == 0 or lab.size % 3 or np.any(counts != lab.size // 3):
        raise ValueError(f"ternary arrangement needs n balls of each species, got counts {counts.tolist()}")
    return lab, lab.size // 3


def _check_binary(arr) -> tuple[np.ndarray, int]:
    u = np.asarray([1 if s in (1, "+", "A") else -1 if s in (-1, "-", "B") else 0 for s in arr],
                   dtype=float)
    if u.size == 0 or np.any(u == 0) or u.sum() != 0:
        raise ValueError("binary arrangement needs equally many +1 and -1 spins")
    return u, u.size // 2


def centers_from_diameters(d) -> np.ndarray:
    """Centres of touching balls laid out from 0; the last centre lands on ``sum(d)``.

    ``x_k - x_{k-1} = (d_k + d_{k-1}) / 2`` with ``x_0`` identified with the last
    centre through periodicity.
    """
    d = np.asarray(d, dtype=float)
    steps = 0.5 * (d + np.roll(d, 1, axis=-1))
    return np.cumsum(steps, axis=-1)


def positions(arr, omega) -> np.ndarray:
    """Ball centres of a ternary arrangement (the last one is 1)."""
    lab, n = _check_ternary(arr)
    w = check_omega(omega)
    x = centers_from_diameters(w[lab] / n)
    x[-1] = 1.0     # exact in exact arithmetic; remove cumulative rounding
    return x


def binary_positions(arr) -> np.ndarray:
    _, n = _check_binary(arr)
    return np.arange(1, 2 * n + 1) / (2.0 * n)


def binary_energy(arr) -> float:
    u, n = _check_binary(arr)
    G = _green_matrix(binary_positions(arr))
    return 0.5 * math.fsum((np.outer(u, u) * G).ravel())


def point_charge_energy(labels, centers, f) -> float:
    """``1/2 * sum f[i_k, i_m] G(x_k, x_m)`` for arbitrary charges and centres."""
    lab = np.asarray(labels, dtype=np.intp)
    f = np.asarray(f, dtype=float)
    G = _green_matrix(np.asarray(centers, dtype=float))
    return 0.5 * math.fsum((f[np.ix_(lab, lab)] * G).ravel())


def ternary_energy(arr, omega, f) -> float:
    lab, _ = _check_ternary(arr)
    f = np.asarray(f, dtype=float)
    if f.shape != (3, 3) or not np.allclose(f, f.T, rtol=0, atol=1e-14 * max(1.0, np.abs(f).max())):
        raise ValueError("interaction matrix must be a symmetric 3x3 matrix")
    return point_charge_energy(lab, positions(lab, omega), f)


# --- enumeration ---------------------------------------------------------------

def _all_ternary(n: int) -> np.ndarray:
    """Every arrangement with n balls of each species, as rows of labels."""
    L = 3 * n
    rows = []
    for a_pos in itertools.combinations(range(L), n):
        rest = [k for k in range(L) if k not in a_pos]
        for b_sub in itertools.combinations(range(2 * n), n):
            row = np.full(L, 2, dtype=np.int8)
            row[list(a_pos)] = 0
            row[[rest[k] for k in b_sub]] = 1
            rows.append(row)
    return np.array(rows)


def _all_binary(n: int) -> np.ndarray:
    L = 2 * n
    rows = []
    for pos in itertools.combinations(range(L), n):
        row = -np.ones(L)
        row[list(pos)] = 1.0
        rows.append(row)
    return np.array(rows)


def _ternary_energies(rows: np.ndarray, omega, f) -> np.ndarray:
    n = rows.shape[1] // 3
    w = check_omega(omega)
    f = np.asarray(f, dtype=float)
    out = np.empty(rows.shape[0])
    for s in range(0, rows.shape[0], _CHUNK):
        lab = rows[s:s + _CHUNK].astype(np.intp)
        x = centers_from_diameters(w[lab] / n)
        G = _green_matrix(x)
        F = f[lab[:, :, None], lab[:, None, :]]
        out[s:s + _CHUNK] = 0.5 * (F * G).sum(axis=(1, 2))
    return out


def _binary_energies(rows: np.ndarray) -> np.ndarray:
    n = rows.shape[1] // 2
    G = _green_matrix(np.arange(1, 2 * n + 1) / (2.0 * n))
    return 0.5 * np.einsum("rk,km,rm->r", rows, G, rows)


def _binary_word(row) -> str:
    return "".join("A" if s > 0 else "B" for s in row)


@dataclass(frozen=True)
class BruteForceResult:
    minimizers: tuple[str, ...]      # canonical words, sorted
    energy: float
    spread: float                    # max - min over all arrangements
    count: int                       # raw arrangements enumerated


def _select(words, energies: np.ndarray) -> BruteForceResult:
    lo, hi = float(energies.min()), float(energies.max())
    tol = REL_TOL * (hi - lo)
    idx = np.nonzero(energies <= lo + tol)[0]
    mins = sorted({canonicalize(words(i)) for i in idx})
    return BruteForceResult(tuple(mins), lo, hi - lo, int(energies.size))


def brute_force_optimal(n: int, omega=None, f=None, mode: str = "ternary") -> BruteForceResult:
    """All arrangements minimizing the energy, modulo rotation and reflection.

    Ties are decided with relative tolerance ``REL_TOL`` of the energy spread.
    Binary words are written with A for +1 and B for -1.
    """
    if mode == "binary":
        if not 1 <= n <= BINARY_MAX_N:
            raise ValueError(f"binary brute force needs 1 <= n <= {BINARY_MAX_N}, got {n}")
        rows = _all_binary(n)
        return _select(lambda i: _binary_word(rows[i]), _binary_energies(rows))
    if mode != "ternary":
        raise ValueError(f"mode must be 'ternary' or 'binary', got {mode!r}")
    if not 1 <= n <= TERNARY_MAX_N:
        raise ValueError(f"ternary brute force needs 1 <= n <= {TERNARY_MAX_N}, got {n}")
    if omega is None or f is None:
        raise ValueError("ternary brute force needs omega and f")
    rows = _all_ternary(n)
    energies = _ternary_energies(rows, omega, f)
    return _select(lambda i: "".join(SPECIES[k] for k in rows[i]), energies)


def blend_family(n: int) -> list[str]:
    """Canonical words ``AB C^l1 AB C^l2 ... AB C^ln`` with ``sum(l) = n``."""
    out = set()
    for ls in itertools.product(range(n + 1), repeat=n):
        if sum(ls) == n:
            out.add(canonicalize("".join("AB" + "C" * l for l in ls)))
    return sorted(out)


def cyclic_word(n: int) -> str:
    return canonicalize("ABC" * n)


# --- continuum / discrete link -------------------------------------------------

def uniform_layer_energy(arr, params: E.ModelParams) -> float:
    """Long-range term of the layered configuration induced by an arrangement.

    Every ball becomes a layer of width ``omega_i / n``; neighbouring balls of
    one species simply form a thicker layer.
    """
    lab, n = _check_ternary(arr)
    w = np.asarray(params.omega)[lab] / n
    return E.long_range_raw(lab, w, params.gamma)


def ok_discrete_equivalence(pair, params: E.ModelParams) -> float:
    """``|dLR - (2/n^2) dU|`` between two arrangements, relative to the energy scale."""
    a, b = pair
    la, n = _check_ternary(a)
    lb, nb = _check_ternary(b)
    if n != nb:
        raise ValueError("arrangements in a pair must have the same n")
    f = f_from_gamma(params.gamma, params.omega)
    lr = [uniform_layer_energy(x, params) for x in (la, lb)]
    u = [ternary_energy(x, params.omega, f) for x in (la, lb)]
    scale = max(1.0, *map(abs, lr), *(2.0 / n**2 * abs(x) for x in u))
    return abs((lr[1] - lr[0]) - 2.0 / (n * n) * (u[1] - u[0])) / scale


# --- dipole flips --------------------------------------------------------------

def dipole_arrangements(m: int) -> tuple[str, str]:
    """Two arrangements differing by the orientation of every dipole in one half.

    Each half holds ``m`` A/B dipoles of alternating orientation (``ABBAAB...``),
    a palindrome when ``m`` is even; halves are separated by single C balls.
    The second arrangement swaps A and B in the first half.
    """
    if m < 2 or m % 2:
        raise ValueError(f"need an even number of dipoles per half, got {m}")
    half = "".join("AB" if k % 2 == 0 else "BA" for k in range(m))
    flipped = half.translate(str.maketrans("AB", "BA"))
    return half + "C" + half + "C", flipped + "C" + half + "C"


def dipole_flip_check(m: int, omega, f, strict: bool = True, tol: float = 1e-12) -> float:
    """Energy change when the dipoles of one half reverse orientation.

    A and B balls share one diameter ``omega_1 / 2m``; each C ball has diameter
    ``omega_3 / 2``.  ``strict`` enforces the preconditions ``omega_1 = omega_2``
    and ``f13 = f23``.
    """
    w = check_omega(omega)
    f = np.asarray(f, dtype=float)
    if abs(w[0] - w[1]) > tol:
        raise ValueError(f"A and B balls must have equal size (omega_1 = omega_2), got {w.tolist()}")
    scale = max(np.abs(f).max(), np.finfo(float).tiny)
    if strict and abs(f[0, 2] - f[1, 2]) > tol * scale:
        raise ValueError(f"dipole flip identity needs f13 = f23, got {f[0, 2]!r} and {f[1, 2]!r}")
    diam = np.array([w[0] / (2 * m), w[1] / (2 * m), w[2] / 2.0])
    energies = []
    for arr in dipole_arrangements(m):
        lab = _ternary_labels(arr)
        energies.append(point_charge_energy(lab, centers_from_diameters(diam[lab]), f))
    return energies[1] - energies[0]


# --- conjecture sweep ----------------------------------------------------------

def omega_grid() -> list[tuple[float, float, float]]:
    """15 compositions: the ordered triples of 13ths with sorted parts, plus the centroid."""
    pts = []
    for i in range(1, 12):
        for j in range(i, 13 - i):
            k = 13 - i - j
            if k >= j:
                pts.append((i / 13, j / 13, k / 13))
    pts.append((1 / 3, 1 / 3, 1 / 3))
    return pts


@dataclass(frozen=True)
class SweepCase:
    n: int
    omega: tuple
    f_pair: tuple          # (f12, f13, f23)
    holds: bool            # cyclic word among the minimizers
    minimizers: tuple


def _sweep_task(args) -> list[SweepCase]:
    n, fp, omegas = args
    rows = _all_ternary(n)
    target = cyclic_word(n)
    f = compose_f(*fp)
    out = []
    for om in omegas:
        e = _ternary_energies(rows, om, f)
        res = _select(lambda i: "".join(SPECIES[k] for k in rows[i]), e)
        out.append(SweepCase(n, tuple(om), tuple(fp), target in res.minimizers, res.minimizers))
    return out


def conjecture_sweep(ns=(2, 3, 4), omegas=None, caps=None, workers: int = 1) -> list[SweepCase]:
    """Check that ``ABC...ABC`` minimizes over every (n, omega, cap matrix).

    Cases come back ordered by n, then cap sample, then omega, whatever the
    worker count.
    """
    omegas = omega_grid() if omegas is None else [tuple(om) for om in omegas]
    caps = cap_samples() if caps is None else caps
    tasks = [(n, tuple(fp), omegas) for n in ns for fp in caps]
    if workers <= 1:
        parts = map(_sweep_task, tasks)
        return [c for part in parts for c in part]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return [c for part in pool.map(_sweep_task, tasks) for c in part]
