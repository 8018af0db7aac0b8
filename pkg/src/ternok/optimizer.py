"""Layer-width minimization for a fixed pattern.

The feasible set is a product of scaled simplices, one per species: the
widths of the i-layers are nonnegative and sum to omega_i.  The short-range
term is constant on it, so only the long-range term is minimized.

The method is an active-set projected Newton iteration.  Free variables take
a Newton step in the null space of the per-species sum constraints whenever
the reduced Hessian is positive definite; otherwise a projected-gradient step
with Barzilai-Borwein length is used.  Both steps are safeguarded by an
Armijo backtracking line search, so the energy never increases.

Optimization runs over orbit totals: with ``symmetry_mode="paper-symmetric"``
layers related by a symmetry of the pattern are tied to a common width,
otherwise every layer is its own orbit.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import energy as E
from .pattern import labels as pattern_labels
from .pattern import repeat, symmetry_orbits, validate

SYMMETRY_MODES = ("free", "paper-symmetric")


@dataclass(frozen=True)
class OptimizerOptions:
    optimality_tol: float = 1e-6
    constraint_tol: float = 1e-6
    step_tol: float = 1e-6
    max_iters: int = 500
    symmetry_mode: str = "free"
    multistart: int = 0          # extra seeded random starts; 0 = uniform start only
    seed: int = 0

    def __post_init__(self):
        for name in ("optimality_tol", "constraint_tol", "step_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.symmetry_mode not in SYMMETRY_MODES:
            raise ValueError(f"symmetry_mode must be one of {SYMMETRY_MODES}")
        if self.multistart < 0:
            raise ValueError("multistart must be >= 0")


@dataclass
class OptimizationResult:
    pattern: str
    widths: np.ndarray
    energy: E.EnergyBreakdown
    converged: bool
    iterations: int
    degenerate_layers: list[int] = field(default_factory=list)
    kkt_residual: float = 0.0
    initial_energy: float = 0.0

    def as_dict(self) -> dict:
        return {
            "pattern": self.pattern,
            "widths": [float(x) for x in self.widths],
            "energy": self.energy.as_dict(),
            "converged": self.converged,
            "iterations": self.iterations,
            "degenerate_layers": list(self.degenerate_layers),
            "kkt_residual": self.kkt_residual,
        }


def project_simplex(v: np.ndarray, total: float) -> np.ndarray:
    """Euclidean projection onto ``{x >= 0, sum(x) = total}``."""
    if v.size == 1:
        return np.array([total])
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - total
    ind = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / ind > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


class _Problem:
    """Long-range energy as a function of orbit totals ``z``."""

    def __init__(self, pattern: str, params: E.ModelParams, mode: str):
        self.pattern = pattern
        self.labels = pattern_labels(pattern)
        L = len(pattern)
        orbits = symmetry_orbits(pattern) if mode == "paper-symmetric" else [[k] for k in range(L)]
        self.orbits = orbits
        K = len(orbits)
        self.expand = np.zeros((L, K))
        for o, members in enumerate(orbits):
            self.expand[members, o] = 1.0 / len(members)
        self.species = np.array([self.labels[m[0]] for m in orbits])
        self.groups = [np.nonzero(self.species == s)[0] for s in range(3)]
        self.totals = np.asarray(params.omega, dtype=float)
        self.M = E.layer_coupling(self.labels, params.gamma)
        self.scale = max(float(np.abs(self.M).max()), np.finfo(float).tiny)

    def widths(self, z):
        return self.expand @ z

    def value(self, z) -> float:
        return E.long_range_from_coupling(self.M, E.interfaces(self.widths(z)))

    def roundoff(self, z) -> float:
        """Rough absolute rounding error of :meth:`value` near ``z``."""
        y = E.interfaces(self.widths(z))
        mag = float(np.abs(self.M * E._F(y[:, None] - y[None, :])).sum())
        return 1024.0 * np.finfo(float).eps * mag

    def grad(self, z):
        y = E.interfaces(self.widths(z))
        gw = E.widths_from_positions_grad(E.position_gradient(self.M, y))
        return self.expand.T @ gw

    def hess(self, z):
        y = E.interfaces(self.widths(z))
        Hw = E.widths_hessian(E.position_hessian(self.M, y))
        return self.expand.T @ Hw @ self.expand

    def project(self, v):
        out = np.empty_like(v)
        for s, idx in enumerate(self.groups):
            out[idx] = project_simplex(v[idx], self.totals[s])
        return out

    def uniform(self):
        z = np.empty(len(self.orbits))
        counts = np.bincount(self.labels, minlength=3)
        for o, members in enumerate(self.orbits):
            s = self.species[o]
            z[o] = self.totals[s] * len(members) / counts[s]
        return z

    def kkt(self, z, g):
        return float(np.max(np.abs(z - self.project(z - g))))


def _null_space_basis(groups_free: list[np.ndarray], n: int) -> np.ndarray:
    """Orthonormal basis of ``{d : sum of d over each group = 0}`` on ``n`` free slots."""
    cols = []
    for idx in groups_free:
        m = idx.size
        if m < 2:
            continue
        # Helmert-style orthonormal contrasts within the group
        for j in range(1, m):
            v = np.zeros(n)
            v[idx[:j]] = 1.0
            v[idx[j]] = -float(j)
            cols.append(v / np.sqrt(j * (j + 1.0)))
    if not cols:
        return np.zeros((n, 0))
    return np.column_stack(cols)


def _minimize(prob: _Problem, z0: np.ndarray, opts: OptimizerOptions):
    z = prob.project(z0)
    f = prob.value(z)
    f0 = f
    sigma = 1e-4
    alpha_bb = 1.0 / prob.scale
    z_prev = g_prev = None
    converged = False
    it = 0
    kkt = np.inf
    for it in range(opts.max_iters + 1):
        g = prob.grad(z)
        kkt = prob.kkt(z, g)
        if kkt <= opts.optimality_tol:
            converged = True
            break
        if it == opts.max_iters:
            break
        if z_prev is not None:
            s, yv = z - z_prev, g - g_prev
            sy = float(s @ yv)
            if sy > 0:
                alpha_bb = float(s @ s) / sy
        z_prev, g_prev = z, g

        step = _newton_step(prob, z, g)
        noise = prob.roundoff(z)
        accepted = False
        if step is not None:
            d, amax = step
            slope = float(g @ d)
            a = min(1.0, amax)
            for _ in range(40):
                zt = z + a * d
                if a == amax:
                    zt = _snap(prob, z, d, amax)
                ft = prob.value(zt)
                if ft <= f + sigma * a * slope:
                    accepted = True
                    break
                # near the minimum energy differences drown in roundoff; accept
                # the step if it is roundoff-sized in energy and reduces the residual
                if ft <= f + noise and prob.kkt(zt, prob.grad(zt)) < kkt:
                    accepted = True
                    break
                a *= 0.5
        used_newton = accepted
        if not accepted:
            a = max(alpha_bb, 1e-12 / prob.scale)
            for _ in range(60):
                zt = prob.project(z - a * g)
                ft = prob.value(zt)
                if ft <= f - sigma * float(g @ (z - zt)):
                    accepted = True
                    break
                a *= 0.5
        if not accepted:
            break
        dz = float(np.max(np.abs(zt - z)))
        z, f = zt, ft
        if dz < opts.step_tol * 1e-6 and not used_newton:
            # gradient steps stalled far below the step tolerance
            g = prob.grad(z)
            kkt = prob.kkt(z, g)
            converged = kkt <= opts.optimality_tol
            break
    if f > f0:
        # only reachable through roundoff-level steps from an optimal start
        z = prob.project(z0)
        f = f0
        kkt = prob.kkt(z, prob.grad(z))
        converged = kkt <= opts.optimality_tol
    return z, f, f0, converged, it, kkt


def _snap(prob: _Problem, z, d, amax):
    # full step to the boundary: blocking variables become exactly zero
    neg = d < 0
    blocking = neg & (-z / np.where(neg, d, -1.0) <= amax * (1.0 + 1e-12))
    z = z + amax * d
    z[blocking | (z < 0)] = 0.0
    # restore exact group totals
    for s, idx in enumerate(prob.groups):
        tot = z[idx].sum()
        if tot > 0:
            z[idx] *= prob.totals[s] / tot
    return z


def _newton_step(prob: _Problem, z, g):
    """Reduced Newton direction on the face of free variables, or ``None``.

    Eigenvalues of the reduced Hessian are replaced by their absolute values
    with a relative floor, so indefinite or singular curvature (a species with
    no charge leaves flat directions) still yields a descent direction.
    """
    n = z.size
    zero = z <= 0.0
    lam = np.zeros(3)
    for s, idx in enumerate(prob.groups):
        pos = idx[~zero[idx]]
        lam[s] = g[pos].mean() if pos.size else 0.0
    free = ~zero | (g - lam[prob.species] < 0)
    H = prob.hess(z)
    for _ in range(n):
        groups_free = [idx[free[idx]] for idx in prob.groups]
        Z = _null_space_basis(groups_free, n)
        if Z.shape[1] == 0:
            return None
        R = Z.T @ H @ Z
        evals, evecs = np.linalg.eigh(0.5 * (R + R.T))
        top = max(float(np.abs(evals).max()), prob.scale * 1e-12)
        mod = np.maximum(np.abs(evals), 1e-8 * top)
        d = -Z @ (evecs @ ((evecs.T @ (Z.T @ g)) / mod))
        stuck = zero & free & (d < 0)
        if not stuck.any():
            break
        free &= ~stuck
    else:
        return None
    if float(g @ d) >= 0:
        return None
    neg = d < 0
    amax = float(np.min(-z[neg] / d[neg])) if np.any(neg) else np.inf
    if amax <= 0:
        return None
    return d, amax


def optimize_widths(pattern: str, params: E.ModelParams,
                    opts: OptimizerOptions | None = None) -> OptimizationResult:
    """Locally minimize the free energy over layer widths from the uniform start."""
    opts = opts or OptimizerOptions()
    pattern = validate(pattern)
    prob = _Problem(pattern, params, opts.symmetry_mode)
    starts = [prob.uniform()]
    if opts.multistart:
        rng = np.random.default_rng(opts.seed)
        for _ in range(opts.multistart):
            z = np.empty(len(prob.orbits))
            for s, idx in enumerate(prob.groups):
                z[idx] = rng.dirichlet(np.ones(idx.size)) * prob.totals[s]
            starts.append(z)
    best = None
    f_uniform = None
    for z0 in starts:
        run = _minimize(prob, z0, opts)
        if f_uniform is None:
            f_uniform = run[2]
        if best is None or run[1] < best[1]:
            best = run
    z, f, _, converged, iters, kkt = best
    w = prob.widths(z)
    sr = E.short_range(pattern, params)
    energy = E.EnergyBreakdown(sr, f, sr + f)
    degenerate = [int(k) for k in np.nonzero(w < opts.constraint_tol)[0]]
    return OptimizationResult(pattern, w, energy, bool(converged), int(iters),
                              degenerate, kkt, sr + f_uniform)


@dataclass
class RepeatResult:
    n: int
    result: OptimizationResult
    at_boundary: bool              # best n equals n_max; larger n may be better
    energies: list[float]          # total energy for n = 1..n_max


def optimize_repeats(repetend: str, params: E.ModelParams, n_max: int,
                     opts: OptimizerOptions | None = None) -> RepeatResult:
    """Best repetition count ``n`` in ``1..n_max`` (ties go to smaller ``n``)."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    repetend = validate(repetend)
    repeat(repetend, 2)  # seam check
    best_n, best = 0, None
    energies = []
    for n in range(1, n_max + 1):
        res = optimize_widths(repeat(repetend, n), params, opts)
        energies.append(res.energy.total)
        if best is None or res.energy.total < best.energy.total - 1e-12:
            best_n, best = n, res
    return RepeatResult(best_n, best, best_n == n_max, energies)
