"""
Short-time propagation under ``H = H0 - mu (eps_X X + eps_Y Y + eps_Z Z)``.

Fields are constant over each step, so one step is the action of
``exp(-i H dt)`` on the state.  It is evaluated with a Lanczos (Krylov)
approximation whose subspace grows until the a-posteriori error estimate
drops below tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh_tridiagonal

from .angular import Basis, h0_diagonal, position_matrices
from .errors import DomainError, PropagationError
from .rotor import RotorSpec
from .tracking import FieldSample

STEP_TOL = 1e-10
MAX_KRYLOV = 40


@dataclass(frozen=True)
class _Pattern:
    """Common sparsity pattern of diag, X, Y and Z with aligned data arrays."""

    template: sp.csr_matrix
    diag: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray


@lru_cache(maxsize=16)
def _pattern(jmax: int, k_fixed: int | None) -> _Pattern:
    from .angular import enumerate_basis

    basis = enumerate_basis(jmax, k_fixed)
    eye = sp.identity(basis.dim, dtype=complex, format="csr")
    x, y, z = position_matrices(basis)
    # union of patterns; explicit ones keep every position stored
    ones = [abs(m).astype(bool).astype(complex) for m in (eye, x, y, z)]
    template = (ones[0] + ones[1] + ones[2] + ones[3]).tocsr()
    template.sort_indices()

    def aligned(m):
        out = template.copy()
        out.data[:] = 0.0
        m = m.tocoo()
        pos = {(i, j): v for i, j, v in zip(m.row, m.col, m.data)}
        rows = np.repeat(np.arange(template.shape[0]), np.diff(template.indptr))
        return np.array([pos.get((i, j), 0.0) for i, j in zip(rows, template.indices)], dtype=complex)

    diag = aligned(eye).real
    return _Pattern(template, diag, aligned(x), aligned(y), aligned(z))


@dataclass
class HamiltonianOperator:
    basis: Basis
    h0_diagonal: np.ndarray
    mu: float
    fields: FieldSample

    def __post_init__(self):
        self._pattern = _pattern(self.basis.jmax, self.basis.k_fixed)
        if self.h0_diagonal.shape != (self.basis.dim,):
            raise DomainError("H0 diagonal does not match basis dimension")
        rows = np.repeat(np.arange(self.basis.dim), np.diff(self._pattern.template.indptr))
        self._h0_data = self._pattern.diag * self.h0_diagonal[rows]
        self._matrix = None

    def with_fields(self, fields: FieldSample) -> "HamiltonianOperator":
        new = object.__new__(HamiltonianOperator)
        new.basis, new.h0_diagonal, new.mu, new.fields = self.basis, self.h0_diagonal, self.mu, fields
        new._pattern, new._h0_data, new._matrix = self._pattern, self._h0_data, None
        return new

    @property
    def matrix(self) -> sp.csr_matrix:
        if self._matrix is None:
            p, f = self._pattern, self.fields
            data = self._h0_data - self.mu * (f.eps_x * p.x + f.eps_y * p.y + f.eps_z * p.z)
            m = p.template.copy()
            m.data = data
            self._matrix = m
        return self._matrix

    def __matmul__(self, v):
        return self.matrix @ v


def assemble_hamiltonian(rotor: RotorSpec, basis: Basis, fields: FieldSample) -> HamiltonianOperator:
    """``H = diag(E_JK) - mu (eps . R)`` on ``basis``."""
    if rotor.kind == "linear" and basis.k_fixed != 0:
        raise DomainError("a linear rotor lives in the K = 0 block")
    if basis.jmax != rotor.jmax:
        raise DomainError(f"basis jmax {basis.jmax} does not match rotor jmax {rotor.jmax}")
    h0 = h0_diagonal(basis, rotor.B, rotor.effective_C)
    return HamiltonianOperator(basis, h0, rotor.mu, fields)


def expm_krylov(matvec, v: np.ndarray, dt: float, tol: float = STEP_TOL, max_dim: int = MAX_KRYLOV):
    """
    Approximate ``exp(-i H dt) v`` for Hermitian ``H`` given by ``matvec``.

    Returns ``(w, err)`` where ``err`` is the estimated 2-norm error
    (``beta_m |e_m^T exp(-i T_m dt) e_1|`` times ``|v|``).
    """
    beta0 = np.linalg.norm(v)
    if beta0 == 0:
        return v.copy(), 0.0
    n = v.size
    max_dim = min(max_dim, n)
    V = np.empty((max_dim, n), dtype=complex)
    alpha = np.empty(max_dim)
    beta = np.empty(max_dim)
    V[0] = v / beta0
    err = np.inf
    for j in range(max_dim):
        w = matvec(V[j])
        alpha[j] = np.vdot(V[j], w).real
        w = w - alpha[j] * V[j]
        if j > 0:
            w -= beta[j - 1] * V[j - 1]
        # one pass of full reorthogonalization keeps V orthonormal
        w -= V[: j + 1].T @ (V[: j + 1].conj() @ w)
        beta[j] = np.linalg.norm(w)
        breakdown = beta[j] <= 1e-14 * max(1.0, abs(alpha[j]))
        if j >= 2 or breakdown or j == max_dim - 1:
            if j == 0:
                lam, S = alpha[:1], np.ones((1, 1))
            else:
                lam, S = eigh_tridiagonal(alpha[: j + 1], beta[:j])
            c = S @ (np.exp(-1j * lam * dt) * S[0])
            err = 0.0 if breakdown else beta[j] * abs(c[-1]) * beta0
            if err <= tol or breakdown:
                return beta0 * (c @ V[: j + 1]), err
        if j + 1 < max_dim:
            V[j + 1] = w / beta[j]
    return beta0 * (c @ V[: j + 1]), err


def step(psi: np.ndarray, H: HamiltonianOperator, dt: float, tol: float = STEP_TOL, _depth: int = 0) -> np.ndarray:
    """Apply ``exp(-i H dt)`` to ``psi`` to 2-norm accuracy ``tol``."""
    if not dt > 0:
        raise DomainError(f"time step must be positive, got {dt}")
    mat = H.matrix if isinstance(H, HamiltonianOperator) else H
    out, err = expm_krylov(mat.__matmul__, psi, dt, tol)
    if err <= tol:
        return out
    if _depth >= 8:
        raise PropagationError(f"Krylov exponential did not converge (estimated error {err:.2e})", residual=err)
    half = step(psi, H, dt / 2, tol / 2, _depth + 1)
    return step(half, H, dt / 2, tol / 2, _depth + 1)
