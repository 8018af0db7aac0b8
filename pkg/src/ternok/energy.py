"""Sharp-interface free energy of a layered configuration on the periodic unit cell.

A configuration is a pattern plus one width per layer.  Interfaces sit at the
prefix sums of the widths, anchored at 0, so layer ``k`` occupies
``[y[k], y[k+1]]``.

The long-range term is evaluated through the antiderivative
``F(x) = (1-|x|)^2 x^2 / 24`` of the periodic Green's function, which turns every
layer-pair double integral into four F values.  Summing all pairs gives
``LR = -sum_ab M[a,b] F(y[a] - y[b])`` with ``M = D^T Gamma_layers D`` and ``D`` the
first-difference operator; gradient and Hessian in the interface positions
follow from ``F' `` and ``F'' = G``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import interaction
from .pattern import labels as pattern_labels
from .pattern import validate

WIDTH_TOL = 1e-10


class ConfigurationError(ValueError):
    """Widths or parameters inconsistent with the pattern."""


def green(x: float, y: float) -> float:
    """Green's function of ``-d^2/dx^2`` on [0, 1] with periodic boundary conditions."""
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise ValueError(f"green() arguments must lie in [0, 1], got ({x}, {y})")
    d = abs(x - y)
    return d * d / 2.0 - d / 2.0 + 1.0 / 12.0


def _F(x):
    # (1-|x|)^2 x^2 / 24 written as a polynomial in |x| (valid for all x)
    a = np.abs(x)
    return (x * x - 2.0 * a * x * x + x**4) / 24.0


def _dF(x):
    a = np.abs(x)
    return (2.0 * x - 6.0 * a * x + 4.0 * x**3) / 24.0


def _d2F(x):
    a = np.abs(x)
    return (2.0 - 12.0 * a + 12.0 * x * x) / 24.0


def segment_pair_integral(x1: float, x2: float, y1: float, y2: float) -> float:
    """Double integral of the Green's function over ``[x1, x2] x [y1, y2]``."""
    if not (0.0 <= x1 <= x2 <= 1.0 and 0.0 <= y1 <= y2 <= 1.0):
        raise ValueError(f"need 0 <= x1 <= x2 <= 1 and 0 <= y1 <= y2 <= 1, got "
                         f"({x1}, {x2}, {y1}, {y2})")
    vals = _F(np.array([x2 - y1, x1 - y1, x2 - y2, x1 - y2]))
    return math.fsum((vals[0], -vals[1], -vals[2], vals[3]))


@dataclass(frozen=True)
class ModelParams:
    """Volume fractions, interfacial tensions and the 3x3 long-range matrix."""

    omega: tuple[float, float, float]
    c12: float
    c13: float
    c23: float
    gamma: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = interaction.check_omega(self.omega)
        object.__setattr__(self, "omega", tuple(float(x) for x in w))
        g = np.array(self.gamma, dtype=float)
        if g.shape != (3, 3):
            raise ConfigurationError(f"gamma must be 3x3, got shape {g.shape}")
        g.setflags(write=False)
        object.__setattr__(self, "gamma", g)
        c = (self.c12, self.c13, self.c23)
        if any(x < 0 for x in c):
            raise ConfigurationError(f"interfacial tensions must be nonnegative, got {c}")
        s = sum(c)
        tol = 1e-12 * max(s, 1.0)
        if any(x > s - x + tol for x in c):
            raise ConfigurationError(f"interfacial tensions {c} violate the triangle inequality")

    @classmethod
    def from_family(cls, family: str, omega, tensions, gamma: float = 1.0) -> "ModelParams":
        c12, c13, c23 = tensions
        return cls(tuple(omega), c12, c13, c23,
                   interaction.build_family(family, omega, gamma))

    @property
    def tension_matrix(self) -> np.ndarray:
        return np.array([
            [0.0, self.c12, self.c13],
            [self.c12, 0.0, self.c23],
            [self.c13, self.c23, 0.0],
        ])

    def with_gamma(self, gamma) -> "ModelParams":
        return ModelParams(self.omega, self.c12, self.c13, self.c23, gamma)

    def admissibility(self, tol: float = interaction.DEFAULT_TOL):
        return interaction.is_admissible(self.gamma, self.omega, tol)


@dataclass(frozen=True)
class EnergyBreakdown:
    short_range: float
    long_range: float
    total: float

    def as_dict(self) -> dict:
        return {"short_range": self.short_range, "long_range": self.long_range,
                "total": self.total}


def interfaces(widths) -> np.ndarray:
    """Interface positions ``y[0] = 0, ..., y[L] = sum(widths)``."""
    w = np.asarray(widths, dtype=float)
    y = np.empty(w.size + 1)
    y[0] = 0.0
    np.cumsum(w, out=y[1:])
    return y


def check_widths(pattern: str, widths, omega, tol: float = WIDTH_TOL) -> np.ndarray:
    w = np.asarray(widths, dtype=float)
    if w.shape != (len(pattern),):
        raise ConfigurationError(
            f"{w.size} widths given for a pattern of {len(pattern)} layers")
    if np.any(w < -tol):
        raise ConfigurationError(f"negative layer width {w.min()!r}")
    if abs(w.sum() - 1.0) > tol:
        raise ConfigurationError(f"widths sum to {w.sum()!r}, expected 1")
    lab = pattern_labels(pattern)
    per = np.bincount(lab, weights=w, minlength=3)
    bad = np.abs(per - np.asarray(omega)) > tol
    if np.any(bad):
        raise ConfigurationError(
            f"per-species widths {per.tolist()} do not match volume fractions {list(omega)}")
    return w


def uniform_widths(pattern: str, omega) -> np.ndarray:
    """Each layer of species i gets ``omega_i / (number of i-layers)``."""
    lab = pattern_labels(pattern)
    counts = np.bincount(lab, minlength=3)
    return np.asarray(omega, dtype=float)[lab] / counts[lab]


def short_range(pattern: str, params: ModelParams) -> float:
    lab = pattern_labels(pattern)
    c = params.tension_matrix
    return math.fsum(c[lab, np.roll(lab, 1)])


def layer_coupling(labels, gamma) -> np.ndarray:
    """Matrix ``M`` with ``LR = -sum M[a,b] F(y[a]-y[b])`` over interface indices."""
    lab = np.asarray(labels, dtype=np.intp)
    g = np.asarray(gamma, dtype=float)
    g = 0.5 * (g + g.T)
    gl = g[np.ix_(lab, lab)]
    L = lab.size
    D = np.zeros((L, L + 1))
    idx = np.arange(L)
    D[idx, idx] = -1.0
    D[idx, idx + 1] = 1.0
    return D.T @ gl @ D


def long_range_from_coupling(M: np.ndarray, y: np.ndarray) -> float:
    terms = M * _F(y[:, None] - y[None, :])
    return -math.fsum(terms.ravel())


def long_range_raw(labels, widths, gamma) -> float:
    """Long-range term for arbitrary layer labels (adjacent repeats allowed)."""
    return long_range_from_coupling(layer_coupling(labels, gamma), interfaces(widths))


def free_energy(pattern: str, widths, params: ModelParams) -> EnergyBreakdown:
    pattern = validate(pattern)
    w = check_widths(pattern, widths, params.omega)
    sr = short_range(pattern, params)
    lr = long_range_raw(pattern_labels(pattern), w, params.gamma)
    return EnergyBreakdown(sr, lr, sr + lr)


def position_gradient(M: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Gradient of the long-range term with respect to every interface position."""
    return -2.0 * (M * _dF(y[:, None] - y[None, :])).sum(axis=1)


def position_hessian(M: np.ndarray, y: np.ndarray) -> np.ndarray:
    H = 2.0 * M * _d2F(y[:, None] - y[None, :])
    np.fill_diagonal(H, 0.0)
    np.fill_diagonal(H, -H.sum(axis=1))
    return H


def widths_from_positions_grad(gy: np.ndarray) -> np.ndarray:
    # y[c] = sum_{j<c} w[j]  =>  dE/dw[j] = sum_{c>j} dE/dy[c]
    return np.cumsum(gy[::-1])[::-1][1:]


def widths_hessian(Hy: np.ndarray) -> np.ndarray:
    L = Hy.shape[0] - 1
    J = np.tril(np.ones((L + 1, L)), k=-1)
    return J.T @ Hy @ J


def long_range_gradient(pattern: str, widths, params: ModelParams) -> np.ndarray:
    """Gradient of the long-range term with respect to each layer width.

    Interface 0 stays at the origin; every later interface moves with the
    cumulative sum of the widths before it.
    """
    pattern = validate(pattern)
    w = check_widths(pattern, widths, params.omega)
    M = layer_coupling(pattern_labels(pattern), params.gamma)
    return widths_from_positions_grad(position_gradient(M, interfaces(w)))


def long_range_via_field(pattern: str, widths, params: ModelParams) -> float:
    """Long-range term from the periodic field ``w' = 1_layer - omega``, zero mean.

    Each field component is piecewise linear, so ``w^T gamma w`` is quadratic on
    every layer and Simpson's rule integrates it exactly.
    """
    pattern = validate(pattern)
    w = check_widths(pattern, widths, params.omega)
    lab = pattern_labels(pattern)
    omega = np.asarray(params.omega)
    g = np.asarray(params.gamma)
    slopes = np.eye(3)[lab] - omega
    nodes = np.vstack([np.zeros(3), np.cumsum(slopes * w[:, None], axis=0)])
    # closing the period requires nodes[-1] == 0, guaranteed by the volume constraints
    mean = ((nodes[:-1] + nodes[1:]) / 2.0 * w[:, None]).sum(axis=0)
    nodes = nodes - mean
    left, right = nodes[:-1], nodes[1:]
    mid = 0.5 * (left + right)

    def q(v):
        return np.einsum("ki,ij,kj->k", v, g, v)

    per_layer = w / 6.0 * (q(left) + 4.0 * q(mid) + q(right))
    return math.fsum(per_layer)
