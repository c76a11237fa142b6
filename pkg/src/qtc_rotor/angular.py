"""
qtc_rotor.angular
-----------------

Symmetric-top eigenbasis and the operator matrices built on it.

States are ``|J K M>`` with ``K`` the body-fixed and ``M`` the space-fixed
projection.  The position operators ``X, Y, Z`` (space-fixed components of the
unit vector along the molecular axis) conserve ``K`` and couple
``J' = J - 1, J, J + 1``; their elements are products of two 3j symbols.
The ``J' = J`` couplings carry a factor ``K`` and vanish for linear rotors,
but for ``K != 0`` they are required for ``X^2 + Y^2 + Z^2 = 1``.

"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from .errors import DomainError, TruncationError

AXES = ("X", "Y", "Z")

#: elements smaller than this are not stored
DROP_TOL = 1e-15


# ---------------------------------------------------------------------------
# 3j symbols


_LOG_FACT = np.zeros(1)


def _log_factorials(n: int) -> np.ndarray:
    """Table of log(k!) for k = 0..n, grown on demand."""
    global _LOG_FACT
    if n >= _LOG_FACT.size:
        size = max(n + 1, 2 * _LOG_FACT.size)
        _LOG_FACT = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, size)))))
    return _LOG_FACT


def wigner3j(j1: int, j2: int, j3: int, m1: int, m2: int, m3: int) -> float:
    """
    Wigner 3j symbol for integer angular momenta (Racah single sum).

    Returns exactly 0.0 when ``m1 + m2 + m3 != 0``, when the triangle
    condition fails, or when some ``|m_i| > j_i``.

    Raises
    ------
    DomainError
        If any ``j_i`` is negative.
    """
    if j1 < 0 or j2 < 0 or j3 < 0:
        raise DomainError(f"negative angular momentum in 3j symbol ({j1}, {j2}, {j3})")
    if m1 + m2 + m3 != 0:
        return 0.0
    if not abs(j1 - j2) <= j3 <= j1 + j2:
        return 0.0
    if abs(m1) > j1 or abs(m2) > j2 or abs(m3) > j3:
        return 0.0

    lf = _log_factorials(j1 + j2 + j3 + 1)
    log_pref = 0.5 * (
        lf[j1 + j2 - j3] + lf[j1 - j2 + j3] + lf[-j1 + j2 + j3] - lf[j1 + j2 + j3 + 1]
        + lf[j1 + m1] + lf[j1 - m1] + lf[j2 + m2] + lf[j2 - m2] + lf[j3 + m3] + lf[j3 - m3]
    )

    kmin = max(0, j2 - j3 - m1, j1 - j3 + m2)
    kmax = min(j1 + j2 - j3, j1 - m1, j2 + m2)
    total = 0.0
    for k in range(kmin, kmax + 1):
        log_den = (
            lf[k] + lf[j1 + j2 - j3 - k] + lf[j1 - m1 - k] + lf[j2 + m2 - k]
            + lf[j3 - j2 + m1 + k] + lf[j3 - j1 - m2 + k]
        )
        term = math.exp(log_pref - log_den)
        total += -term if k % 2 else term

    return -total if (j1 - j2 - m3) % 2 else total


# ---------------------------------------------------------------------------
# basis


class BasisState(NamedTuple):
    J: int
    K: int
    M: int


@dataclass(frozen=True, eq=False)
class Basis:
    """Truncated ``|J K M>`` basis in canonical (J, K, M) lexicographic order."""

    jmax: int
    k_fixed: int | None
    states: tuple[BasisState, ...]
    index: dict[BasisState, int] = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    @property
    def key(self) -> tuple[int, int | None]:
        return (self.jmax, self.k_fixed)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Basis) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __contains__(self, state) -> bool:
        return BasisState(*state) in self.index

    @property
    def J(self) -> np.ndarray:
        return np.array([s.J for s in self.states])

    @property
    def K(self) -> np.ndarray:
        return np.array([s.K for s in self.states])

    @property
    def M(self) -> np.ndarray:
        return np.array([s.M for s in self.states])

    def basis_vector(self, state) -> np.ndarray:
        state = BasisState(*state)
        if state not in self.index:
            raise DomainError(f"state {tuple(state)} is not in basis jmax={self.jmax}, k={self.k_fixed}")
        psi = np.zeros(self.dim, dtype=complex)
        psi[self.index[state]] = 1.0
        return psi

    def boundary_population(self, psi: np.ndarray) -> float:
        """Probability in the truncation shell ``J = jmax``."""
        return float(np.sum(np.abs(psi[_shell_mask(self.jmax, self.k_fixed)]) ** 2))


def enumerate_basis(jmax: int, k_fixed: int | None = None) -> Basis:
    """
    Enumerate ``|J K M>`` with ``J <= jmax``; optionally restrict to one K block.

    Examples
    --------
    >>> enumerate_basis(1).dim
    10
    >>> enumerate_basis(30, 0).dim
    961
    """
    return _enumerate_basis(int(jmax), None if k_fixed is None else int(k_fixed))


@lru_cache(maxsize=None)
def _enumerate_basis(jmax: int, k_fixed: int | None) -> Basis:
    if jmax < 0:
        raise DomainError(f"jmax must be nonnegative, got {jmax}")
    if k_fixed is not None and abs(k_fixed) > jmax:
        raise DomainError(f"|k_fixed| = {abs(k_fixed)} exceeds jmax = {jmax}")
    states = []
    for J in range(jmax + 1):
        ks = range(-J, J + 1) if k_fixed is None else ([k_fixed] if abs(k_fixed) <= J else [])
        for K in ks:
            for M in range(-J, J + 1):
                states.append(BasisState(J, K, M))
    states = tuple(states)
    return Basis(jmax, k_fixed, states, {s: i for i, s in enumerate(states)})


@lru_cache(maxsize=None)
def _shell_mask(jmax: int, k_fixed: int | None) -> np.ndarray:
    basis = _enumerate_basis(jmax, k_fixed)
    mask = basis.J == jmax
    mask.setflags(write=False)
    return mask


def h0_eigenvalue(J: int, K: int, B: float, C: float) -> float:
    """Field-free symmetric-top energy ``B J(J+1) + (C - B) K^2``."""
    if abs(K) > J:
        raise DomainError(f"|K| = {abs(K)} exceeds J = {J}")
    return B * J * (J + 1) + (C - B) * K * K


def h0_diagonal(basis: Basis, B: float, C: float) -> np.ndarray:
    J, K = basis.J, basis.K
    return B * J * (J + 1) + (C - B) * K * K


# ---------------------------------------------------------------------------
# operator matrices


@dataclass(frozen=True)
class OperatorMatrix:
    """Sparse operator over a basis ordering."""

    basis: Basis
    entries: sp.csr_matrix
    hermitian: bool = True

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, other):
        return self.entries @ other

    def toarray(self) -> np.ndarray:
        return self.entries.toarray()

    def hermiticity_error(self) -> float:
        diff = self.entries - self.entries.conj().T
        return float(abs(diff).max()) if diff.nnz else 0.0

    def dump_rows(self):
        """Yield ``(J, K, M, J', K', M', re, im)`` for stored elements in index order."""
        coo = self.entries.tocoo()
        order = np.lexsort((coo.col, coo.row))
        states = self.basis.states
        for i, j, v in zip(coo.row[order], coo.col[order], coo.data[order]):
            if v == 0:
                continue
            yield (*states[i], *states[j], float(v.real), float(v.imag))


def _phase(J: int, K: int, M: int, Jp: int, Kp: int, Mp: int) -> int:
    return -1 if (2 + 2 * Jp + Mp - Kp + 2 * M) % 2 else 1


def position_element(axis: str, bra, ket) -> complex:
    """``<J K M | R_axis | J' K' M'>`` from the 3j-symbol expressions."""
    J, K, M = bra
    Jp, Kp, Mp = ket
    if Kp != K or abs(Jp - J) > 1:
        return 0.0
    norm = math.sqrt((2 * J + 1) * (2 * Jp + 1)) * _phase(J, K, M, Jp, Kp, Mp)
    k_part = wigner3j(J, 1, Jp, K, 0, -Kp)
    if axis == "Z":
        if Mp != M:
            return 0.0
        return norm * wigner3j(J, 1, Jp, M, 0, -Mp) * k_part
    q = Mp - M
    if abs(q) != 1:
        return 0.0
    m_part = wigner3j(J, 1, Jp, M, q, -Mp)
    if axis == "X":
        return -norm * math.sqrt(2) / 2 * q * m_part * k_part
    if axis == "Y":
        return norm * math.sqrt(2) / 2j * m_part * k_part
    raise DomainError(f"unknown axis {axis!r}")


def _build_position(axis: str, basis: Basis) -> sp.csr_matrix:
    dm = (0,) if axis == "Z" else (-1, 1)
    rows, cols, vals = [], [], []
    for i, (J, K, M) in enumerate(basis.states):
        for Jp in (J - 1, J, J + 1):
            for d in dm:
                j = basis.index.get(BasisState(Jp, K, M + d))
                if j is None:
                    continue
                v = position_element(axis, (J, K, M), (Jp, K, M + d))
                if abs(v) > DROP_TOL:
                    rows.append(i)
                    cols.append(j)
                    vals.append(v)
    mat = sp.csr_matrix(
        (np.asarray(vals, dtype=complex), (rows, cols)), shape=(basis.dim, basis.dim)
    )
    mat.sort_indices()
    return mat


@lru_cache(maxsize=64)
def _position_cached(axis: str, jmax: int, k_fixed: int | None) -> sp.csr_matrix:
    return _build_position(axis, _enumerate_basis(jmax, k_fixed))


def position_matrix(axis: str, basis: Basis) -> OperatorMatrix:
    """Matrix of the space-fixed position operator ``X``, ``Y`` or ``Z``."""
    axis = axis.upper()
    if axis not in AXES:
        raise DomainError(f"axis must be one of {AXES}, got {axis!r}")
    return OperatorMatrix(basis, _position_cached(axis, basis.jmax, basis.k_fixed))


def position_matrices(basis: Basis) -> tuple[sp.csr_matrix, sp.csr_matrix, sp.csr_matrix]:
    return tuple(position_matrix(a, basis).entries for a in AXES)


def triple_commutator_matrix(axis: str, basis: Basis, B: float) -> OperatorMatrix:
    """
    Matrix of ``[H0, [H0, R_axis]]``.

    Elements are ``(B (J(J+1) - J'(J'+1)))**2 <JKM|R|J'K'M'>``; the ``K**2``
    part of ``H0`` drops out because ``K' = K``.
    """
    r = position_matrix(axis, basis).entries.tocoo()
    J = basis.J
    rot_j = J * (J + 1)
    scale = (B * (rot_j[r.row] - rot_j[r.col])) ** 2
    mat = sp.csr_matrix((r.data * scale, (r.row, r.col)), shape=r.shape)
    mat.sort_indices()
    return OperatorMatrix(basis, mat)


# ---------------------------------------------------------------------------
# expectation values


class QuadraticMoments(NamedTuple):
    xx: float
    yy: float
    zz: float
    xy: float
    yz: float
    zx: float


def moments_from_images(xpsi, ypsi, zpsi) -> QuadraticMoments:
    """Quadratic moments from ``X|psi>, Y|psi>, Z|psi>`` (``<AB> = Re<A psi|B psi>``)."""
    return QuadraticMoments(
        float(np.vdot(xpsi, xpsi).real),
        float(np.vdot(ypsi, ypsi).real),
        float(np.vdot(zpsi, zpsi).real),
        float(np.vdot(xpsi, ypsi).real),
        float(np.vdot(ypsi, zpsi).real),
        float(np.vdot(zpsi, xpsi).real),
    )


def check_boundary(psi: np.ndarray, basis: Basis, tol: float = 1e-8) -> float:
    pop = basis.boundary_population(psi)
    if pop >= tol:
        raise TruncationError(
            f"population {pop:.3e} in shell J = {basis.jmax} exceeds {tol:.1e}", leakage=pop
        )
    return pop


def quadratic_expectations(psi: np.ndarray, basis: Basis, boundary_tol: float = 1e-8) -> QuadraticMoments:
    """
    ``<X^2>, <Y^2>, <Z^2>, <XY>, <YZ>, <ZX>`` for a normalized state.

    Products use the truncated linear matrices, which is exact as long as the
    ``J = jmax`` shell is empty; a ``TruncationError`` is raised otherwise.
    """
    check_boundary(psi, basis, boundary_tol)
    x, y, z = position_matrices(basis)
    return moments_from_images(x @ psi, y @ psi, z @ psi)


def orientation(psi: np.ndarray, basis: Basis) -> np.ndarray:
    """``(<X>, <Y>, <Z>)``."""
    return np.array([np.vdot(psi, r @ psi).real for r in position_matrices(basis)])
