import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_state
from oracles import adjugate_solve
from qtc_rotor.angular import enumerate_basis, quadratic_expectations, triple_commutator_matrix
from qtc_rotor.errors import SingularityError
from qtc_rotor.tracking import build_tracking_matrix, build_tracking_vector, solve_fields
from qtc_rotor.tracks import orientation_tracks

MU, B = 1.847, 2.0


def triples(basis, B=B):
    return [triple_commutator_matrix(a, basis, B).entries for a in "XYZ"]


def test_ground_state_matrix_is_isotropic():
    b = enumerate_basis(5)
    A = build_tracking_matrix(b.basis_vector((0, 0, 0)), b, MU, B)
    np.testing.assert_allclose(A, 4 * MU * B / 3 * np.eye(3), atol=1e-13)


def test_k1_state_matrix_dense_oracle():
    # <X^2> = <Y^2> = 2/5, <Z^2> = 1/5 for |110>, frozen from quadrature matrices
    b = enumerate_basis(5, 1)
    A = build_tracking_matrix(b.basis_vector((1, 1, 0)), b, MU, B)
    np.testing.assert_allclose(A, MU * B * np.diag([1.2, 1.2, 1.6]), atol=1e-12)


def test_matrix_symmetric_with_trace_identity(rng):
    b = enumerate_basis(6)
    for _ in range(50):
        A = build_tracking_matrix(random_state(b, rng), b, MU, B)
        assert np.array_equal(A, A.T)
        assert np.trace(A) / (4 * MU * B) == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.det(A) > 0


def test_vector_vanishes_for_eigenstate():
    b = enumerate_basis(5)
    psi = b.basis_vector((0, 0, 0))
    assert np.array_equal(build_tracking_vector(psi, np.zeros(3), triples(b)), np.zeros(3))
    np.testing.assert_allclose(build_tracking_vector(psi, [0.3, -1.0, 2.5], triples(b)), [0.3, -1.0, 2.5], atol=1e-15)


@pytest.mark.parametrize("phase", [0.0, 0.7, math.pi / 2])
def test_vector_superposition_dense_oracle(phase):
    # (E_1 - E_0)^2 Z_01 * 2 Re(c0* c1) = (2B)^2 / sqrt(3) * cos(phase)
    b = enumerate_basis(5)
    psi = (b.basis_vector((0, 0, 0)) + np.exp(1j * phase) * b.basis_vector((1, 0, 0))) / math.sqrt(2)
    vec = build_tracking_vector(psi, np.zeros(3), triples(b))
    np.testing.assert_allclose(vec, [0, 0, (2 * B) ** 2 / math.sqrt(3) * math.cos(phase)], atol=1e-12)


def test_vector_real_for_random_states(rng):
    b = enumerate_basis(6)
    for _ in range(20):
        build_tracking_vector(random_state(b, rng), np.zeros(3), triples(b))  # raises if complex


def test_solve_diagonal():
    A = 4 * MU * B / 3 * np.eye(3)
    f = solve_fields(A, [1.0, -2.0, 0.5])
    np.testing.assert_allclose(f.vector, 3 * np.array([1.0, -2.0, 0.5]) / (4 * MU * B), rtol=1e-15)
    assert f.det == pytest.approx((4 * MU * B / 3) ** 3)
    assert f.cond == pytest.approx(1.0)


def test_solve_singular_raises():
    A = np.diag([1.0, 1.0, 0.0])
    with pytest.raises(SingularityError) as info:
        solve_fields(A, np.ones(3), t=0.25)
    assert info.value.t == 0.25
    assert info.value.det == 0.0


def test_solve_condition_guard():
    A = np.diag([1.0, 1.0, 1e-9])
    with pytest.raises(SingularityError) as info:
        solve_fields(A, np.ones(3), guard=1e8)
    assert info.value.cond == pytest.approx(1e9)
    solve_fields(A, np.ones(3), guard=1e10)


def test_solve_matches_adjugate_for_benchmark_state():
    b = enumerate_basis(12, 0)
    psi = b.basis_vector((1, 0, 0))
    A = build_tracking_matrix(psi, b, 1.0, 1.0)
    vec = build_tracking_vector(psi, orientation_tracks(5.0).d2(0.0), triples(b, 1.0))
    ref = adjugate_solve(A, vec)
    np.testing.assert_allclose(solve_fields(A, vec).vector, ref, rtol=1e-12, atol=1e-30)


def test_solve_residual_random_states(rng):
    b = enumerate_basis(6)
    for _ in range(50):
        psi = random_state(b, rng)
        A = build_tracking_matrix(psi, b, MU, B)
        vec = rng.normal(size=3) * 10
        eps = solve_fields(A, vec).vector
        assert np.abs(A @ eps - vec).max() < 1e-10 * np.linalg.norm(vec)


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=-1e3, max_value=1e3, allow_nan=False).filter(lambda s: s != 0),
       st.integers(min_value=0, max_value=2**32 - 1))
def test_solve_scaling_covariance(scale, seed):
    rng = np.random.default_rng(seed)
    b = enumerate_basis(4)
    A = build_tracking_matrix(random_state(b, rng), b, 1.0, 1.0)
    vec = rng.normal(size=3)
    base = solve_fields(A, vec).vector
    np.testing.assert_allclose(solve_fields(A, scale * vec).vector, scale * base, rtol=1e-13, atol=1e-300)


def test_cauchy_schwarz_random_states(rng):
    b = enumerate_basis(6)
    for _ in range(1000):
        m = quadratic_expectations(random_state(b, rng), b)
        assert m.xx * m.yy - m.xy**2 >= -1e-12
        assert m.yy * m.zz - m.yz**2 >= -1e-12
        assert m.zz * m.xx - m.zx**2 >= -1e-12
