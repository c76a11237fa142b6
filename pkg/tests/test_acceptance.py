"""
Acceptance suite.  Each test checks one criterion and prints a single
``criterion N: PASS/FAIL`` line (also collected in the terminal summary).

Desk scale is jmax = 12, N = 10,000.  The full-scale runs (jmax = 30,
N = 30,000) take minutes and only run with ``QTC_FULL_SCALE=1``.
"""

import itertools
import os

import numpy as np
import pytest

from conftest import C_RATIO, track_config, random_state
from oracles import dense_position
from qtc_rotor.angular import (
    AXES, enumerate_basis, h0_diagonal, h0_eigenvalue, position_matrix, quadratic_expectations,
    triple_commutator_matrix, wigner3j,
)
from qtc_rotor.propagator import assemble_hamiltonian, step
from qtc_rotor.rotor import RotorSpec
from qtc_rotor.simulator import run, run_forward, run_linear
from qtc_rotor.tracking import FieldSample

STATES = [(0, 0, 0), (1, 0, 0), (1, 1, 0), (2, 0, 0)]
K0_STATES = [(0, 0, 0), (1, 0, 0), (2, 0, 0)]
DESK_STEPS = 10_000


def _label(state):
    return "|{}{}{}>".format(*state)


_CACHE = {}


def _run(state, steps=DESK_STEPS, **kw):
    key = (state, steps, tuple(sorted(kw.items())))
    if key not in _CACHE:
        kind = kw.pop("kind", "symmetric")
        cfg = track_config(state, steps, kind=kind, **kw)
        _CACHE[key] = run_linear(cfg) if kind == "linear" else run(cfg)
    return _CACHE[key]


def _max_dev(rec):
    return np.abs(rec.deviation).max(axis=0)


def _rms_dev(rec):
    return np.sqrt(np.mean(rec.deviation**2, axis=0))


# --- 1. track reproduction ---------------------------------------------------


@pytest.mark.slow
def test_criterion_1_track_reproduction(report):
    parts, ok = [], True
    for s in STATES:
        rec = _run(s)
        mx, rms, rt = _max_dev(rec), _rms_dev(rec), rec.summary["runtime_s"]
        good = rec.ok and mx.max() < 1e-3 and rms.max() < 2e-4 and rt < 60
        ok &= good
        parts.append(f"{_label(s)} max {mx.max():.2e} rms {rms.max():.2e} {rt:.1f}s")
    assert report(1, ok, "; ".join(parts))


# --- 2. convergence order ----------------------------------------------------


@pytest.mark.slow
def test_criterion_2_convergence_order(report):
    parts, ok = [], True
    for s in STATES:
        ratio = _max_dev(_run(s)).max() / _max_dev(_run(s, 2 * DESK_STEPS)).max()
        ok &= ratio >= 1.8
        parts.append(f"{_label(s)} ratio {ratio:.2f}")
    assert report(2, ok, "; ".join(parts))


# --- 3. linear-rotor equivalence -------------------------------------------


@pytest.mark.slow
def test_criterion_3_linear_equivalence(report):
    parts, ok = [], True
    for s in K0_STATES:
        sym = _run(s).fields
        scale = np.abs(sym).max()
        lin = np.abs(sym - _run(s, kind="linear").fields).max()
        c_var = np.abs(sym - _run(s, C=3 * C_RATIO).fields).max()
        good = lin <= 1e-10 * scale and c_var <= 1e-10 * scale
        ok &= good
        parts.append(f"{_label(s)} linear {lin:.1e} C-shift {c_var:.1e} (|eps| max {scale:.2f})")
    assert report(3, ok, "; ".join(parts))


# --- 4. determinant and trace ------------------------------------------------


@pytest.mark.slow
def test_criterion_4_determinant_and_trace(report):
    parts, ok = [], True
    for s in STATES:
        rec = _run(s)
        det_min = rec.column("det_a").min()
        tr = rec.summary["max_trace_error"]
        ok &= bool(det_min > 0 and tr < 1e-8)
        parts.append(f"{_label(s)} min det {det_min:.3f} trace err {tr:.1e}")
    assert report(4, ok, "; ".join(parts))


# --- 5. matrix elements ------------------------------------------------------


def test_criterion_5_matrix_elements(report):
    small = enumerate_basis(3)
    quad = max(np.abs(position_matrix(a, small).toarray() - dense_position(a, small.states)).max() for a in AXES)
    herm = max(position_matrix(a, enumerate_basis(10)).hermiticity_error() for a in AXES)
    orth = 0.0
    for j1, j2 in itertools.product(range(5), repeat=2):
        for m1, m2 in itertools.product(range(-j1, j1 + 1), range(-j2, j2 + 1)):
            total = sum((2 * j3 + 1) * wigner3j(j1, j2, j3, m1, m2, -m1 - m2) ** 2
                        for j3 in range(abs(j1 - j2), j1 + j2 + 1))
            orth = max(orth, abs(total - 1.0))
    ok = quad < 1e-8 and herm < 1e-12 and orth < 1e-10
    assert report(5, ok, f"quadrature {quad:.1e}, Hermiticity {herm:.1e}, 3j orthogonality {orth:.1e}")


# --- 6. conservation ---------------------------------------------------------


@pytest.mark.slow
def test_criterion_6_conservation(report, rng):
    drift = max(_run(s).summary["max_norm_drift"] for s in STATES)
    # the K-restricted runs cannot leak by construction; check a full-basis run
    full = _run((1, 1, 0), restrict_k_block=False)
    off = full.summary["max_off_block_population"]
    same = np.abs(full.fields - _run((1, 1, 0)).fields).max()

    rotor = RotorSpec("symmetric", 1.0, C_RATIO, 1.0, 12)
    basis = enumerate_basis(12, 1)
    H = assemble_hamiltonian(rotor, basis, FieldSample(0.0, 0.0, 0.0))
    h = h0_diagonal(basis, 1.0, C_RATIO)
    psi = random_state(basis, rng)
    e0 = np.vdot(psi, h * psi).real
    for _ in range(1000):
        psi = step(psi, H, 5.0 / (DESK_STEPS - 1))
    energy = abs(np.vdot(psi, h * psi).real - e0)

    ok = drift < 1e-8 and off < 1e-12 and energy < 1e-10 and full.ok
    assert report(6, ok, f"norm drift {drift:.1e}, off-block {off:.1e} (full vs block fields {same:.1e}), "
                         f"<H0> drift {energy:.1e}")


# --- 7. replay ---------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_7_replay(report):
    parts, ok = [], True
    for s in STATES:
        rec = _run(s)
        err = np.abs(run_forward(track_config(s, DESK_STEPS), rec.fields) - rec.achieved).max()
        ok &= err < 1e-10
        parts.append(f"{_label(s)} {err:.1e}")
    assert report(7, ok, "; ".join(parts))


# --- 8. Cauchy-Schwarz ---------------------------------------------------------


def test_criterion_8_cauchy_schwarz(report, rng):
    basis = enumerate_basis(6)
    worst = -np.inf
    for _ in range(1000):
        m = quadratic_expectations(random_state(basis, rng), basis)
        worst = max(worst, m.xy**2 - m.xx * m.yy, m.yz**2 - m.yy * m.zz, m.zx**2 - m.zz * m.xx)
    assert report(8, worst <= 1e-12, f"max violation {worst:.2e} over 1000 states")


# --- 9. triple commutator ----------------------------------------------------


def test_criterion_9_triple_commutator(report):
    B, C = 1.0, C_RATIO
    basis = enumerate_basis(5)
    h = np.diag([h0_eigenvalue(s.J, s.K, B, C) for s in basis.states])
    inner = np.ix_(basis.J <= 3, basis.J <= 3)
    worst = 0.0
    for a in AXES:
        r = position_matrix(a, basis).toarray()
        direct = h @ h @ r - 2 * h @ r @ h + r @ h @ h
        worst = max(worst, np.abs(triple_commutator_matrix(a, basis, B).toarray()[inner] - direct[inner]).max())
    assert report(9, worst < 1e-10, f"max deviation {worst:.1e} on J <= 3 at jmax 5")


# --- full scale -------------------------------------------------------------


@pytest.mark.full_scale
@pytest.mark.skipif(os.environ.get("QTC_FULL_SCALE") != "1", reason="set QTC_FULL_SCALE=1 (takes minutes)")
@pytest.mark.parametrize("state", STATES, ids=_label)
def test_criterion_1_full_scale(state, report):
    rec = run(track_config(state, 30_000, jmax=30))
    mx, rms = _max_dev(rec), _rms_dev(rec)
    ok = rec.ok and mx.max() < 1e-3 and rms.max() < 2e-4
    assert report(1, ok, f"full scale {_label(state)} max {mx.max():.2e} rms {rms.max():.2e} "
                         f"{rec.summary['runtime_s']:.0f}s")
