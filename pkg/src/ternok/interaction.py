"""Long-range coefficient matrices: named families, admissibility, canonical form.

Two equivalent descriptions of the long-range coupling are used throughout:

* ``gamma`` -- the 3x3 matrix multiplying the indicator-function double integral,
* ``f``     -- the charge interaction matrix ``diag(omega) @ gamma @ diag(omega)``.

Species are indexed 0, 1, 2 for A, B, C.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-9

# incompressibility elimination u3 = 1 - u1 - u2
ELIMINATION = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])


class MatrixError(ValueError):
    """Raised when a coefficient matrix or its inputs violate a precondition."""


def check_omega(omega, tol: float = 1e-12) -> np.ndarray:
    """Return ``omega`` as a float array after checking it is a valid composition."""
    w = np.asarray(omega, dtype=float)
    if w.shape != (3,):
        raise MatrixError(f"volume fractions must have 3 components, got shape {w.shape}")
    if np.any(w <= 0.0):
        raise MatrixError(f"volume fractions must be positive, got {w.tolist()}")
    if abs(w.sum() - 1.0) > tol:
        raise MatrixError(f"volume fractions must sum to 1, got sum {w.sum()!r}")
    return w


def _check_strength(gamma: float) -> float:
    if not gamma > 0.0:
        raise MatrixError(f"overall strength gamma must be positive, got {gamma!r}")
    return float(gamma)


def build_ohta(omega, gamma: float = 1.0) -> np.ndarray:
    """Nakazawa-Ohta mean-field matrix; B plays the role of the middle block."""
    a, b, c = check_omega(omega)
    gamma = _check_strength(gamma)
    pref = 3.0 * gamma / (3.0 - 2.0 * (a + c) - (a - c) ** 2)
    m = np.array([
        [(2 * b + 2 * c) / a**2, -(2 * c + 3 * b) / (a * b), b / (a * c)],
        [-(2 * c + 3 * b) / (a * b), (2 + 4 * b) / b**2, -(2 * a + 3 * b) / (b * c)],
        [b / (a * c), -(2 * a + 3 * b) / (b * c), (2 * a + 2 * b) / c**2],
    ])
    return pref * m


def build_ren(omega, gamma: float = 1.0) -> np.ndarray:
    """Ren-Wei matrix, symmetric under any permutation of the species."""
    a, b, c = check_omega(omega)
    gamma = _check_strength(gamma)
    pref = 3.0 * gamma / (4.0 * (a * b + a * c + b * c))
    m = np.array([
        [(b + c) / a**2, -c / (a * b), -b / (a * c)],
        [-c / (a * b), (a + c) / b**2, -a / (b * c)],
        [-b / (a * c), -a / (b * c), (a + b) / c**2],
    ])
    return pref * m


def build_blend(omega, gamma: float = 1.0) -> np.ndarray:
    """Diblock/homopolymer blend matrix; species C carries no charge."""
    a, b, _ = check_omega(omega)
    gamma = _check_strength(gamma)
    pref = 0.75 * gamma / (a + b)
    return pref * np.array([
        [1.0 / a**2, -1.0 / (a * b), 0.0],
        [-1.0 / (a * b), 1.0 / b**2, 0.0],
        [0.0, 0.0, 0.0],
    ])


def expansion_matrix(w) -> np.ndarray:
    """2x3 matrix ``B`` with ``B @ w = 0`` and ``B @ ELIMINATION = I``."""
    w = np.asarray(w, dtype=float)
    return np.array([
        [1.0 - w[0], -w[0], -w[0]],
        [-w[1], 1.0 - w[1], -w[1]],
    ])


def reduce_gamma(H) -> np.ndarray:
    """Project a 3x3 matrix onto the 2x2 form acting on (u1, u2)."""
    H = np.asarray(H, dtype=float)
    return ELIMINATION.T @ H @ ELIMINATION


def build_general(gamma_tilde, a: float, b: float, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Expand a reduced 2x2 matrix to the 3x3 matrix annihilating ``(a, b, 1-a-b)``.

    ``gamma_tilde`` must be symmetric positive semi-definite; an indefinite
    input raises :class:`MatrixError` listing its eigenvalues.
    """
    gt = np.asarray(gamma_tilde, dtype=float)
    if gt.shape != (2, 2):
        raise MatrixError(f"reduced matrix must be 2x2, got shape {gt.shape}")
    scale = max(np.linalg.norm(gt), np.finfo(float).tiny)
    if np.linalg.norm(gt - gt.T) > tol * scale:
        raise MatrixError("reduced matrix must be symmetric")
    eig = np.linalg.eigvalsh(0.5 * (gt + gt.T))
    if eig[0] < -tol * scale:
        raise MatrixError(f"reduced matrix is indefinite; eigenvalues {eig.tolist()}")
    w = check_omega((a, b, 1.0 - a - b))
    B = expansion_matrix(w)
    return B.T @ gt @ B


def f_from_gamma(gamma, omega) -> np.ndarray:
    w = check_omega(omega)
    return np.asarray(gamma, dtype=float) * np.outer(w, w)


def gamma_from_f(f, omega) -> np.ndarray:
    w = check_omega(omega)
    return np.asarray(f, dtype=float) / np.outer(w, w)


@dataclass(frozen=True)
class Admissibility:
    """Outcome of :func:`is_admissible`; truthy when the matrix is admissible."""

    admissible: bool
    null_residual: float     # ||gamma @ omega|| / ||gamma||
    min_eigenvalue: float    # of the symmetrized gamma, divided by ||gamma||
    asymmetry: float         # ||gamma - gamma.T|| / ||gamma||

    def __bool__(self) -> bool:
        return self.admissible


def is_admissible(gamma, omega, tol: float = DEFAULT_TOL) -> Admissibility:
    """Check ``gamma @ omega = 0`` and ``gamma >= 0`` relative to the Frobenius norm."""
    if not tol > 0:
        raise MatrixError("tolerance must be positive")
    w = check_omega(omega)
    g = np.asarray(gamma, dtype=float)
    scale = np.linalg.norm(g)
    if scale == 0.0:
        return Admissibility(True, 0.0, 0.0, 0.0)
    sym = 0.5 * (g + g.T)
    null_res = float(np.linalg.norm(sym @ w) / scale)
    min_eig = float(np.linalg.eigvalsh(sym)[0] / scale)
    asym = float(np.linalg.norm(g - g.T) / scale)
    ok = null_res <= tol and min_eig >= -tol
    return Admissibility(ok, null_res, min_eig, asym)


# Basis matrices of the pairwise decomposition: f = f12*P12 + f13*P13 + f23*P23.
_PAIR_BASIS = {
    (0, 1): np.array([[-1.0, 1.0, 0.0], [1.0, -1.0, 0.0], [0.0, 0.0, 0.0]]),
    (0, 2): np.array([[-1.0, 0.0, 1.0], [0.0, 0.0, 0.0], [1.0, 0.0, -1.0]]),
    (1, 2): np.array([[0.0, 0.0, 0.0], [0.0, -1.0, 1.0], [0.0, 1.0, -1.0]]),
}


@dataclass(frozen=True)
class Decomposition:
    f12: float
    f13: float
    f23: float
    psd: bool          # f12 + f13 + f23 <= -sqrt(f12^2 + f13^2 + f23^2)
    n_positive: int    # how many of the three coefficients are > 0

    @property
    def coefficients(self) -> tuple[float, float, float]:
        return (self.f12, self.f13, self.f23)

    def matrix(self) -> np.ndarray:
        return compose_f(self.f12, self.f13, self.f23)


def compose_f(f12: float, f13: float, f23: float) -> np.ndarray:
    """Interaction matrix with zero row sums built from its off-diagonal entries."""
    return (f12 * _PAIR_BASIS[(0, 1)] + f13 * _PAIR_BASIS[(0, 2)]
            + f23 * _PAIR_BASIS[(1, 2)])


def cap_test(f12: float, f13: float, f23: float, tol: float = DEFAULT_TOL) -> bool:
    """Positive semi-definiteness test for a zero-row-sum ``f`` in pair coordinates."""
    s = f12 + f13 + f23
    r = float(np.sqrt(f12 * f12 + f13 * f13 + f23 * f23))
    return s <= -r + tol * max(r, 1.0)


def decompose_f(f, tol: float = DEFAULT_TOL) -> Decomposition:
    f = np.asarray(f, dtype=float)
    if f.shape != (3, 3):
        raise MatrixError(f"interaction matrix must be 3x3, got shape {f.shape}")
    scale = max(np.linalg.norm(f), np.finfo(float).tiny)
    rows = f @ np.ones(3)
    if np.linalg.norm(rows) > tol * scale:
        raise MatrixError(f"row sums must vanish; residual {rows.tolist()}")
    sym = 0.5 * (f + f.T)
    f12, f13, f23 = float(sym[0, 1]), float(sym[0, 2]), float(sym[1, 2])
    return Decomposition(
        f12, f13, f23,
        psd=cap_test(f12, f13, f23, tol),
        n_positive=sum(v > 0.0 for v in (f12, f13, f23)),
    )


def canonicalize_gamma(H, omega) -> np.ndarray:
    """Unique matrix with ``H~ @ omega = 0`` giving the same long-range energy as ``H``.

    Asymmetric input is symmetrized first; only the symmetric part enters the
    energy.
    """
    w = check_omega(omega)
    H = np.asarray(H, dtype=float)
    H = 0.5 * (H + H.T)
    B = expansion_matrix(w)
    return B.T @ reduce_gamma(H) @ B


CAP_HALF_ANGLE = float(np.arccos(1.0 / np.sqrt(3.0)))


def cap_point(theta: float, phi: float) -> tuple[float, float, float]:
    """Unit-norm ``(f12, f13, f23)`` on the admissible spherical cap.

    ``theta`` is the angle from the cap centre ``-(1,1,1)/sqrt(3)`` and must lie in
    ``[0, CAP_HALF_ANGLE]`` (the rim); ``phi`` is the azimuth.
    """
    if not 0.0 <= theta <= CAP_HALF_ANGLE + 1e-15:
        raise MatrixError(f"theta must lie in [0, {CAP_HALF_ANGLE}], got {theta}")
    centre = -np.ones(3) / np.sqrt(3.0)
    e1 = np.array([1.0, -1.0, 0.0]) / np.sqrt(2.0)
    e2 = np.array([1.0, 1.0, -2.0]) / np.sqrt(6.0)
    v = np.cos(theta) * centre + np.sin(theta) * (np.cos(phi) * e1 + np.sin(phi) * e2)
    return (float(v[0]), float(v[1]), float(v[2]))


def cap_samples(n_theta: int = 4, n_phi: int = 5) -> list[tuple[float, float, float]]:
    """Deterministic grid of ``n_theta * n_phi`` cap points, rim included."""
    out = []
    for i in range(1, n_theta + 1):
        theta = CAP_HALF_ANGLE * i / n_theta
        for j in range(n_phi):
            # stagger azimuths between rings so the rim is not aligned with the axes
            phi = 2.0 * np.pi * (j + 0.5 * (i % 2)) / n_phi
            out.append(cap_point(theta, phi))
    return out


FAMILIES = {"ohta": build_ohta, "ren": build_ren, "blend": build_blend}


def build_family(name: str, omega, gamma: float = 1.0) -> np.ndarray:
    try:
        builder = FAMILIES[name]
    except KeyError:
        raise MatrixError(f"unknown matrix family {name!r}; expected one of {sorted(FAMILIES)}") from None
    return builder(omega, gamma)
