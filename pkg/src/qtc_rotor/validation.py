"""Fast self-checks behind ``qtc-rotor validate``."""

from __future__ import annotations

import itertools
from typing import Callable, NamedTuple

import numpy as np
from scipy.linalg import expm

from . import angular
from .angular import AXES, enumerate_basis, position_matrix, quadratic_expectations, wigner3j
from .propagator import assemble_hamiltonian, step
from .rotor import RotorSpec
from .tracking import FieldSample, build_tracking_matrix


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str


def _random_interior_state(basis, rng):
    psi = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    psi[basis.J == basis.jmax] = 0.0
    return psi / np.linalg.norm(psi)


def check_3j_orthogonality(jmax=4):
    worst = 0.0
    for j1, j2 in itertools.product(range(jmax + 1), repeat=2):
        for m1 in range(-j1, j1 + 1):
            for m2 in range(-j2, j2 + 1):
                s = sum(
                    (2 * j3 + 1) * wigner3j(j1, j2, j3, m1, m2, -m1 - m2) ** 2
                    for j3 in range(abs(j1 - j2), j1 + j2 + 1)
                    if abs(m1 + m2) <= j3
                )
                worst = max(worst, abs(s - 1.0))
    return CheckResult("3j orthogonality", worst < 1e-10, f"max |sum - 1| = {worst:.2e}")


def check_3j_symmetry(jmax=3):
    worst = 0.0
    for j1, j2, j3 in itertools.product(range(jmax + 1), repeat=3):
        for m1, m2 in itertools.product(range(-j1, j1 + 1), range(-j2, j2 + 1)):
            m3 = -m1 - m2
            if abs(m3) > j3:
                continue
            w = wigner3j(j1, j2, j3, m1, m2, m3)
            sign = -1 if (j1 + j2 + j3) % 2 else 1
            worst = max(
                worst,
                abs(w - wigner3j(j2, j3, j1, m2, m3, m1)),
                abs(w - sign * wigner3j(j2, j1, j3, m2, m1, m3)),
            )
    return CheckResult("3j permutation symmetry", worst < 1e-12, f"max deviation {worst:.2e}")


def check_hermiticity(jmax=6):
    basis = enumerate_basis(jmax)
    errs = {a: angular._build_position(a, basis) for a in AXES}
    worst = max(abs(m - m.conj().T).max() for m in errs.values())
    return CheckResult("position matrices Hermitian", worst < 1e-12, f"max |R - R^dag| = {worst:.2e} at jmax={jmax}")


def check_selection_rules(jmax=6):
    basis = enumerate_basis(jmax)
    bad = 0
    for a in AXES:
        coo = position_matrix(a, basis).entries.tocoo()
        for i, j in zip(coo.row, coo.col):
            s, t = basis.states[i], basis.states[j]
            dm = abs(s.M - t.M)
            if s.K != t.K or abs(s.J - t.J) > 1 or dm != (0 if a == "Z" else 1):
                bad += 1
    return CheckResult("K conservation / selection rules", bad == 0, f"{bad} stray elements")


def check_trace_identity(jmax=6, samples=20, seed=0):
    rng = np.random.default_rng(seed)
    basis = enumerate_basis(jmax)
    worst = 0.0
    for _ in range(samples):
        A = build_tracking_matrix(_random_interior_state(basis, rng), basis, 1.0, 1.0)
        worst = max(worst, abs(np.trace(A) / 4.0 - 1.0))
    return CheckResult("trace(A) = 4 mu B", worst < 1e-8, f"max relative error {worst:.2e}")


def check_sum_rule(jmax=6, samples=20, seed=1):
    rng = np.random.default_rng(seed)
    basis = enumerate_basis(jmax)
    worst = 0.0
    for _ in range(samples):
        m = quadratic_expectations(_random_interior_state(basis, rng), basis, boundary_tol=1.0)
        worst = max(worst, abs(m.xx + m.yy + m.zz - 1.0))
    return CheckResult("<X^2 + Y^2 + Z^2> = 1", worst < 1e-10, f"max error {worst:.2e}")


def check_unitarity(jmax=6, seed=2):
    rng = np.random.default_rng(seed)
    rotor = RotorSpec("symmetric", 1.0, 0.3, 1.0, jmax)
    basis = enumerate_basis(jmax, 1)
    H = assemble_hamiltonian(rotor, basis, FieldSample(*rng.normal(size=3)))
    psi = _random_interior_state(basis, rng)
    out = step(psi, H, 0.01)
    ref = expm(-1j * 0.01 * H.matrix.toarray()) @ psi
    drift = abs(np.linalg.norm(out) - 1.0)
    err = np.linalg.norm(out - ref)
    return CheckResult("propagator unitarity", drift < 1e-12 and err < 1e-10,
                       f"norm drift {drift:.2e}, error vs dense expm {err:.2e}")


CHECKS: tuple[Callable[..., CheckResult], ...] = (
    check_3j_orthogonality, check_3j_symmetry, check_hermiticity, check_selection_rules,
    check_sum_rule, check_trace_identity, check_unitarity,
)


def run_checks(jmax: int = 6) -> list[CheckResult]:
    out = []
    for check in CHECKS:
        kwargs = {"jmax": jmax} if check not in (check_3j_orthogonality, check_3j_symmetry) else {}
        try:
            out.append(check(**kwargs))
        except Exception as exc:  # a crashing check is a failed check
            out.append(CheckResult(check.__name__, False, f"{type(exc).__name__}: {exc}"))
    return out
