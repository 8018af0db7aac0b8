"""Closed-form energies of repeated ABC / ABAC stacks and large-gamma asymptotics.

For a repetend ``r`` repeated ``n`` times, the short-range energy is ``S*n``
and the long-range energy is ``gamma*K/n**2``: shrinking a configuration by a
factor ``n`` scales its field by ``1/n`` and the Green's function integral by
another ``1/n``.  Minimizing ``S*n + gamma*K/n**2`` over continuous ``n`` gives

    min J = C * gamma**(1/3),   C = (3/2) * 2**(1/3) * (S**2 * K)**(1/3)

which ranks repetends as ``gamma -> infinity``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import energy as E
from .optimizer import OptimizationResult, OptimizerOptions, optimize_widths
from .pattern import canonicalize, labels, repeat, validate

TIE_TOL = 1e-9


def _check_n(n: int, gamma: float) -> None:
    if int(n) != n or n < 1:
        raise ValueError(f"repeat count must be a positive integer, got {n!r}")
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma!r}")


def j_abc(n: int, params: E.ModelParams, gamma: float = 1.0) -> float:
    """Energy of ``n`` stacked ABC repeats with uniform layers under the Ren-Wei matrix.

    Only ``omega`` and the tensions are read from ``params``; ``gamma`` is the
    scalar strength.
    """
    _check_n(n, gamma)
    a, b, c = params.omega
    return (params.c12 + params.c13 + params.c23) * n + gamma / (16.0 * n * n) * (
        5.0 - 9.0 * a * b * c / (a * b + b * c + c * a))


def j_abac(n: int, params: E.ModelParams, gamma: float = 1.0) -> float:
    """Energy of ``n`` stacked ABAC repeats, both A layers of width a/2n (Ren-Wei matrix).

    The B/C tension never appears: B and C layers do not touch.
    """
    _check_n(n, gamma)
    a, b, c = params.omega
    return 2.0 * (params.c12 + params.c13) * n + gamma / (16.0 * n * n) * (
        2.0 + 3.0 * a * a / (a * b + a * c + b * c))


def optimal_repeat_count(S: float, K: float, gamma: float) -> float:
    """Continuous minimizer ``(2*gamma*K/S)**(1/3)`` of ``S*n + gamma*K/n**2``."""
    return (2.0 * gamma * K / S) ** (1.0 / 3.0)


def coefficient_from(S: float, K: float) -> float:
    return 1.5 * 2.0 ** (1.0 / 3.0) * (S * S * max(K, 0.0)) ** (1.0 / 3.0)


@dataclass(frozen=True)
class AsymptoticCoefficient:
    repetend: str                # as given (display form)
    canonical: str
    S: float                     # short-range energy of one repeat
    K: float                     # long-range energy of one repeat filling the cell
    C: float
    widths: tuple                # optimal widths of the single repeat
    converged: bool

    def continuous_optimum(self, gamma: float) -> float:
        return optimal_repeat_count(self.S, self.K, gamma)

    def energy(self, n: int, gamma: float) -> float:
        return self.S * n + gamma * self.K / (n * n)

    def best_integer_energy(self, gamma: float) -> tuple[int, float]:
        """Minimum of ``S*n + gamma*K/n**2`` over positive integers (ties: smaller n)."""
        x = self.continuous_optimum(gamma)
        cands = sorted({max(1, int(np.floor(x))), max(1, int(np.ceil(x)))})
        vals = [(self.energy(n, gamma), n) for n in cands]
        e, n = min(vals)
        return n, e


def asymptotic_coefficient(repetend: str, params: E.ModelParams,
                           opts: OptimizerOptions | None = None,
                           result: OptimizationResult | None = None) -> AsymptoticCoefficient:
    """``S``, ``K`` and ``C`` of a repetend; ``params.gamma`` is taken as the unit-strength matrix.

    ``K`` minimizes the long-range term over the widths of a single repeat.
    A precomputed optimization ``result`` (same pattern and params) can be
    passed to avoid repeating it; only S then depends on the tensions.
    """
    repetend = validate(repetend)
    repeat(repetend, 2)
    if result is None:
        result = optimize_widths(repetend, params, opts)
    S = E.short_range(repetend, params)
    K = float(result.energy.long_range)
    return AsymptoticCoefficient(repetend, canonicalize(repetend), S, K,
                                 coefficient_from(S, K),
                                 tuple(float(x) for x in result.widths),
                                 result.converged)


def long_range_of_repeat(repetend: str, widths, n: int, params: E.ModelParams) -> float:
    """Long-range term of ``n`` copies of ``repetend`` with its widths shrunk by ``1/n``."""
    w = np.tile(np.asarray(widths, dtype=float) / n, n)
    return E.long_range_raw(labels(repeat(repetend, n)), w, params.gamma)


def compare_candidates(repetends, params: E.ModelParams,
                       opts: OptimizerOptions | None = None) -> list[AsymptoticCoefficient]:
    """Ascending by ``C``; coefficients within ``TIE_TOL`` fall back to canonical order."""
    reps = list(repetends)
    if not reps:
        raise ValueError("need at least one repetend")
    coeffs = [asymptotic_coefficient(r, params, opts) for r in reps]
    return rank(coeffs)


def rank(coeffs: list[AsymptoticCoefficient]) -> list[AsymptoticCoefficient]:
    # sort by C, then sweep so that any run within TIE_TOL of its first member
    # is ordered canonically
    by_c = sorted(coeffs, key=lambda x: (x.C, x.canonical))
    out: list[AsymptoticCoefficient] = []
    i = 0
    while i < len(by_c):
        j = i + 1
        while j < len(by_c) and by_c[j].C - by_c[i].C < TIE_TOL:
            j += 1
        out.extend(sorted(by_c[i:j], key=lambda x: x.canonical))
        i = j
    return out
