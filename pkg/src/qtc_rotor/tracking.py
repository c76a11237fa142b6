"""
Inversion of the orientation equations of motion.

The second derivative of ``<R>`` is affine in the three field components,
``A(t) eps(t) = b(t)``, with

    A_ii = 2 mu B <1 - R_i^2>,   A_ij = -2 mu B <R_i R_j>   (i != j)
    b    = d2<R>_d/dt2 + <[H0, [H0, R]]>

Given the current state and the desired acceleration, solving this 3x3
system yields the fields that reproduce the track's acceleration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .angular import QuadraticMoments, quadratic_expectations
from .errors import SingularityError

DEFAULT_GUARD = 1e8


@dataclass(frozen=True)
class FieldSample:
    eps_x: float
    eps_y: float
    eps_z: float
    t: float | None = None
    det: float = float("nan")
    cond: float = float("nan")

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.eps_x, self.eps_y, self.eps_z])


def tracking_matrix_from_moments(m: QuadraticMoments, mu: float, B: float) -> np.ndarray:
    s = 2.0 * mu * B
    return np.array([
        [s * (m.yy + m.zz), -s * m.xy, -s * m.zx],
        [-s * m.xy, s * (m.zz + m.xx), -s * m.yz],
        [-s * m.zx, -s * m.yz, s * (m.xx + m.yy)],
    ])


def build_tracking_matrix(psi, basis, mu: float, B: float, boundary_tol: float = 1e-8) -> np.ndarray:
    """Symmetric 3x3 tracking matrix for state ``psi``."""
    return tracking_matrix_from_moments(quadratic_expectations(psi, basis, boundary_tol), mu, B)


def build_tracking_vector(psi, track_accel, triple_mats, imag_tol: float = 1e-10) -> np.ndarray:
    """
    Right-hand side ``b`` from the desired acceleration and the drift term.

    ``triple_mats`` are the ``[H0, [H0, R_i]]`` matrices for i = X, Y, Z.
    """
    drift = np.empty(3)
    for i, m in enumerate(triple_mats):
        val = np.vdot(psi, m @ psi)
        scale = max(1.0, abs(val.real))
        if abs(val.imag) > imag_tol * scale:
            raise ArithmeticError(f"double-commutator expectation has imaginary part {val.imag:.3e}")
        drift[i] = val.real
    return np.asarray(track_accel, dtype=float) + drift


def solve_fields(A, b, guard: float = DEFAULT_GUARD, t: float | None = None) -> FieldSample:
    """
    Solve ``A eps = b`` for a symmetric positive-definite ``A``.

    Raises ``SingularityError`` if ``det(A) <= 0`` or the 2-norm condition
    number exceeds ``guard``.
    """
    A = np.asarray(A, dtype=float)
    evals = np.linalg.eigvalsh(A)
    det = float(np.prod(evals))
    cond = float(evals[-1] / evals[0]) if evals[0] > 0 else float("inf")
    if not det > 0 or not cond <= guard:
        raise SingularityError(
            f"tracking matrix not invertible at t={t}: det={det:.3e}, cond={cond:.3e}",
            t=t, det=det, cond=cond,
        )
    chol = np.linalg.cholesky(A)
    eps = np.linalg.solve(chol.T, np.linalg.solve(chol, np.asarray(b, dtype=float)))
    if not np.all(np.isfinite(eps)):
        raise SingularityError(f"non-finite field at t={t}", t=t, det=det, cond=cond)
    return FieldSample(float(eps[0]), float(eps[1]), float(eps[2]), t=t, det=det, cond=cond)
