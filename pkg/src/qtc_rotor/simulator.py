"""
The tracking-control loop.

Starting from ``|psi(0)>`` the fields at ``t_0 = 0`` are obtained by inverting
the tracking equations; then for k = 1..N-1 the state is propagated over
``dt`` with the fields of step k-1 held fixed, and the fields for step k are
obtained from the new state.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .angular import Basis, BasisState, enumerate_basis, moments_from_images, position_matrices, triple_commutator_matrix
from .errors import DomainError, QTCError, SingularityError, TruncationError
from .propagator import STEP_TOL, assemble_hamiltonian, step
from .rotor import RotorSpec
from .tracking import DEFAULT_GUARD, FieldSample, build_tracking_vector, solve_fields, tracking_matrix_from_moments
from .tracks import TrackSet, compatibility_report

__all__ = [
    "RotorSpec", "SimulationConfig", "SimulationRecord", "SimulationAborted",
    "run", "run_linear", "run_forward", "COLUMNS",
]

COLUMNS = (
    "t", "eps_x", "eps_y", "eps_z", "x", "y", "z", "x_d", "y_d", "z_d",
    "det_a", "cond_a", "norm", "boundary_population",
)


@dataclass(frozen=True)
class SimulationConfig:
    rotor: RotorSpec
    initial_state: tuple[int, int, int]
    tracks: TrackSet
    horizon: float = 5.0
    steps: int = 10_000
    guard: float = DEFAULT_GUARD
    boundary_tol: float = 1e-8
    compat_tol: float = 1e-3
    restrict_k_block: bool = True
    step_tol: float = STEP_TOL

    def __post_init__(self):
        if self.steps < 2:
            raise DomainError(f"steps must be >= 2, got {self.steps}")
        if not self.horizon > 0:
            raise DomainError(f"horizon must be positive, got {self.horizon}")
        J, K, M = self.initial_state
        if not (0 <= J <= self.rotor.jmax and abs(K) <= J and abs(M) <= J):
            raise DomainError(f"initial state {self.initial_state} is not in the basis (jmax={self.rotor.jmax})")
        if self.rotor.kind == "linear" and K != 0:
            raise DomainError("a linear rotor has K = 0")

    @property
    def dt(self) -> float:
        return self.horizon / (self.steps - 1)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.steps) * self.dt

    def basis(self) -> Basis:
        if self.rotor.kind == "linear" or self.restrict_k_block:
            return enumerate_basis(self.rotor.jmax, self.initial_state[1])
        return enumerate_basis(self.rotor.jmax)


@dataclass
class SimulationRecord:
    """Per-grid-point data (``data[:, i]`` is column ``COLUMNS[i]``) and a summary."""

    data: np.ndarray
    summary: dict = field(default_factory=dict)
    final_state: np.ndarray | None = None

    def column(self, name: str) -> np.ndarray:
        return self.data[:, COLUMNS.index(name)]

    @property
    def fields(self) -> np.ndarray:
        return self.data[:, 1:4]

    @property
    def achieved(self) -> np.ndarray:
        return self.data[:, 4:7]

    @property
    def designated(self) -> np.ndarray:
        return self.data[:, 7:10]

    @property
    def deviation(self) -> np.ndarray:
        return self.achieved - self.designated

    @property
    def ok(self) -> bool:
        return self.summary.get("status") == "ok"


class SimulationAborted(QTCError):
    """A run stopped early; ``record`` holds the rows up to the failure."""

    def __init__(self, message: str, record: SimulationRecord, cause: QTCError):
        super().__init__(message)
        self.record = record
        self.cause = cause


def _summarize(rows: np.ndarray, base: dict) -> dict:
    s = dict(base)
    s["rows"] = int(rows.shape[0])
    if rows.shape[0]:
        dev = rows[:, 4:7] - rows[:, 7:10]
        for i, ax in enumerate("xyz"):
            s[f"max_error_{ax}"] = float(np.max(np.abs(dev[:, i])))
            s[f"rms_error_{ax}"] = float(np.sqrt(np.mean(dev[:, i] ** 2)))
        s["min_det_a"] = float(rows[:, 10].min())
        s["max_cond_a"] = float(rows[:, 11].max())
        s["max_norm_drift"] = float(np.max(np.abs(rows[:, 12] - 1.0)))
        s["max_boundary_population"] = float(rows[:, 13].max())
        s["max_abs_field"] = float(np.max(np.abs(rows[:, 1:4])))
    return s


class _Engine:
    """Operators shared by the inversion and replay loops."""

    def __init__(self, config: SimulationConfig):
        self.config = config
        rotor = config.rotor
        self.basis = config.basis()
        self.R = position_matrices(self.basis)
        self.triple = [triple_commutator_matrix(a, self.basis, rotor.B).entries for a in "XYZ"]
        self.H = assemble_hamiltonian(rotor, self.basis, FieldSample(0.0, 0.0, 0.0))
        K0 = config.initial_state[1]
        self.off_block = self.basis.K != K0

    def observe(self, psi):
        images = [r @ psi for r in self.R]
        expect = np.array([np.vdot(psi, im).real for im in images])
        return images, expect


def run(config: SimulationConfig) -> SimulationRecord:
    """
    Run the tracking loop; raise ``SimulationAborted`` (with the partial
    record attached) on a singular tracking matrix, truncation leakage or
    a failed propagation step.
    """
    rotor = config.rotor
    eng = _Engine(config)
    basis = eng.basis
    psi = basis.basis_vector(BasisState(*config.initial_state))
    report = compatibility_report(config.tracks, psi, basis, rotor.B, config.compat_tol)

    times = config.times
    dt = config.dt
    designated = config.tracks.value(times).T
    accel = config.tracks.d2(times).T
    rows = np.empty((config.steps, len(COLUMNS)))
    mask = basis.J == basis.jmax
    off_block = 0.0
    trace_err = 0.0
    trace_ref = 4.0 * rotor.mu * rotor.B

    base = {
        "kind": rotor.kind, "jmax": rotor.jmax, "dimension": basis.dim,
        "initial_state": "{},{},{}".format(*config.initial_state),
        "steps": config.steps, "horizon": config.horizon, "dt": dt,
        "compatible": report.compatible,
        "initial_value_offset_max": float(np.abs(report.delta_value).max()),
        "initial_slope_offset_max": float(np.abs(report.delta_slope).max()),
    }
    start = time.perf_counter()
    H = eng.H
    k = 0
    try:
        for k in range(config.steps):
            if k > 0:
                try:
                    psi = step(psi, H, dt, config.step_tol)
                except QTCError as exc:
                    exc.step = k
                    raise
            images, expect = eng.observe(psi)
            norm = math.sqrt(np.vdot(psi, psi).real)
            boundary = float(np.sum(np.abs(psi[mask]) ** 2))
            if eng.off_block.any():
                off_block = max(off_block, float(np.sum(np.abs(psi[eng.off_block]) ** 2)))
            if boundary >= config.boundary_tol:
                raise TruncationError(
                    f"population {boundary:.3e} in shell J = {basis.jmax} at step {k}",
                    leakage=boundary, step=k,
                )
            A = tracking_matrix_from_moments(moments_from_images(*images), rotor.mu, rotor.B)
            trace_err = max(trace_err, abs(np.trace(A) / trace_ref - 1.0))
            b = build_tracking_vector(psi, accel[k], eng.triple)
            try:
                f = solve_fields(A, b, config.guard, t=times[k])
            except SingularityError as exc:
                exc.step = k
                raise
            rows[k] = (times[k], f.eps_x, f.eps_y, f.eps_z, *expect, *designated[k],
                       f.det, f.cond, norm, boundary)
            H = H.with_fields(f)
    except QTCError as exc:
        summary = _summarize(rows[:k], base)
        summary.update(status="aborted", failure=f"{type(exc).__name__}: {exc}", failed_step=k,
                       runtime_s=time.perf_counter() - start, max_off_block_population=off_block,
                       max_trace_error=trace_err)
        record = SimulationRecord(rows[:k].copy(), summary, psi)
        raise SimulationAborted(str(exc), record, exc) from exc

    summary = _summarize(rows, base)
    summary.update(status="ok", runtime_s=time.perf_counter() - start, max_off_block_population=off_block,
                       max_trace_error=trace_err)
    return SimulationRecord(rows, summary, psi)


def run_linear(config: SimulationConfig) -> SimulationRecord:
    """Tracking loop for a linear rotor (the K = 0 block with ``H0 = B J(J+1)``)."""
    if config.rotor.kind != "linear":
        raise DomainError("run_linear needs a rotor of kind 'linear'")
    if config.initial_state[1] != 0:
        raise DomainError("a linear rotor has K = 0")
    return run(config)


def run_forward(config: SimulationConfig, fields: np.ndarray) -> np.ndarray:
    """
    Propagate with prescribed fields (no inversion) and return ``<R>`` at
    every grid point.  ``fields[k]`` is held over ``[t_k, t_k + dt)``.
    """
    fields = np.asarray(fields, dtype=float)
    eng = _Engine(config)
    psi = eng.basis.basis_vector(BasisState(*config.initial_state))
    n = fields.shape[0]
    out = np.empty((n, 3))
    H = eng.H
    for k in range(n):
        if k > 0:
            psi = step(psi, H, config.dt, config.step_tol)
        out[k] = eng.observe(psi)[1]
        H = H.with_fields(FieldSample(*fields[k]))
    return out
