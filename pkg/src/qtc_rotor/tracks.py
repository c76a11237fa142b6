"""
Designated orientation tracks with analytic first and second derivatives.

All times are in units of 1/B (``tau = B t``).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from .angular import Basis, orientation, position_matrices, h0_diagonal
from .errors import DomainError


class ScalarTrack:
    """A scalar function of time with its first two derivatives."""

    def value(self, t):
        raise NotImplementedError

    def d1(self, t):
        raise NotImplementedError

    def d2(self, t):
        raise NotImplementedError


@dataclass(frozen=True)
class GaussianSinusoidTrack(ScalarTrack):
    """``amplitude * exp(-((t - center)/width)**2) * trig(angular_frequency * t)``."""

    amplitude: float
    center: float
    width: float
    angular_frequency: float
    phase_kind: str = "sin"

    def __post_init__(self):
        if not self.width > 0:
            raise DomainError(f"width must be positive, got {self.width}")
        if self.phase_kind not in ("sin", "cos"):
            raise DomainError(f"phase_kind must be 'sin' or 'cos', got {self.phase_kind!r}")

    def _parts(self, t):
        t = np.asarray(t, dtype=float)
        u = (t - self.center) / self.width
        g = np.exp(-u * u)
        g1 = -2 * u / self.width * g
        g2 = (4 * u * u - 2) / self.width**2 * g
        w = self.angular_frequency
        if self.phase_kind == "sin":
            s, s1 = np.sin(w * t), w * np.cos(w * t)
        else:
            s, s1 = np.cos(w * t), -w * np.sin(w * t)
        s2 = -w * w * s
        return g, g1, g2, s, s1, s2

    def value(self, t):
        g, _, _, s, _, _ = self._parts(t)
        return self.amplitude * g * s

    def d1(self, t):
        g, g1, _, s, s1, _ = self._parts(t)
        return self.amplitude * (g1 * s + g * s1)

    def d2(self, t):
        g, g1, g2, s, s1, s2 = self._parts(t)
        return self.amplitude * (g2 * s + 2 * g1 * s1 + g * s2)


def gaussian_sinusoid_track(amplitude, center, width, angular_frequency, phase_kind="sin"):
    return GaussianSinusoidTrack(amplitude, center, width, angular_frequency, phase_kind)


class TabulatedTrack(ScalarTrack):
    """Natural cubic spline through ``(t, value)`` samples."""

    def __init__(self, t, values):
        t = np.asarray(t, dtype=float)
        values = np.asarray(values, dtype=float)
        if t.ndim != 1 or t.shape != values.shape:
            raise DomainError("samples must be two equal-length 1D sequences")
        if t.size < 4:
            raise DomainError(f"need at least 4 samples, got {t.size}")
        if np.any(np.diff(t) <= 0):
            raise DomainError("sample times must be strictly increasing")
        self.t = t
        self._spline = CubicSpline(t, values, bc_type="natural")
        self._d1 = self._spline.derivative(1)
        self._d2 = self._spline.derivative(2)

    def value(self, t):
        return self._spline(t)

    def d1(self, t):
        return self._d1(t)

    def d2(self, t):
        return self._d2(t)


def tabulated_track(samples) -> TabulatedTrack:
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[1] != 2:
        raise DomainError("samples must be a sequence of (t, value) pairs")
    return TabulatedTrack(samples[:, 0], samples[:, 1])


def load_tabulated_track(path) -> TabulatedTrack:
    """Read a two-column ``t value`` text file (``#`` starts a comment)."""
    try:
        data = np.loadtxt(Path(path), comments="#", ndmin=2)
    except ValueError as exc:
        raise DomainError(f"{path}: {exc}") from exc
    return tabulated_track(data)


@dataclass(frozen=True)
class ZeroTrack(ScalarTrack):
    def value(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    d1 = d2 = value


@dataclass(frozen=True)
class TrackSet:
    x: ScalarTrack
    y: ScalarTrack
    z: ScalarTrack

    def value(self, t) -> np.ndarray:
        return np.array([self.x.value(t), self.y.value(t), self.z.value(t)])

    def d1(self, t) -> np.ndarray:
        return np.array([self.x.d1(t), self.y.d1(t), self.z.d1(t)])

    def d2(self, t) -> np.ndarray:
        return np.array([self.x.d2(t), self.y.d2(t), self.z.d2(t)])


def orientation_tracks(horizon=5.0, amplitude=0.2, angular_frequency=8.0) -> TrackSet:
    """
    Gaussian-windowed sinusoid tracks used for the fluoromethane runs.

    X and Y share an envelope centred at ``0.8 T``; Z is centred at ``T``;
    all widths are ``T/8``.  With the defaults (``T = 5``, frequency 8 in
    units of B) these are the standard fluoromethane benchmark tracks.
    """
    T = float(horizon)
    return TrackSet(
        GaussianSinusoidTrack(amplitude, 0.8 * T, T / 8, angular_frequency, "sin"),
        GaussianSinusoidTrack(amplitude, 0.8 * T, T / 8, angular_frequency, "cos"),
        GaussianSinusoidTrack(amplitude, T, T / 8, angular_frequency, "cos"),
    )


def zero_tracks() -> TrackSet:
    z = ZeroTrack()
    return TrackSet(z, z, z)


@dataclass(frozen=True)
class CompatibilityReport:
    delta_value: np.ndarray
    delta_slope: np.ndarray
    tolerance: float

    @property
    def compatible(self) -> bool:
        return bool(max(np.abs(self.delta_value).max(), np.abs(self.delta_slope).max()) <= self.tolerance)


def orientation_velocity(psi: np.ndarray, basis: Basis, B: float = 1.0) -> np.ndarray:
    """``d<R>/dt = i <[H0, R]>``; the field term commutes with ``R``."""
    h = h0_diagonal(basis, B, 0.0)  # K**2 terms cancel since K' = K
    out = np.empty(3)
    for n, r in enumerate(position_matrices(basis)):
        rpsi = r @ psi
        out[n] = (1j * (np.vdot(psi, h * rpsi) - np.vdot(rpsi, h * psi))).real
    return out


def compatibility_report(tracks: TrackSet, psi0: np.ndarray, basis: Basis, B: float = 1.0,
                         tolerance: float = 1e-3, warn: bool = True) -> CompatibilityReport:
    """
    Mismatch between the initial state and the track at ``t = 0``.

    Only the acceleration is controlled, so any value or slope offset here
    persists for the whole run.
    """
    delta_value = orientation(psi0, basis) - tracks.value(0.0)
    delta_slope = orientation_velocity(psi0, basis, B) - tracks.d1(0.0)
    report = CompatibilityReport(delta_value, delta_slope, tolerance)
    if warn and not report.compatible:
        warnings.warn(
            f"initial state does not match the track at t=0: "
            f"value offset {delta_value}, slope offset {delta_slope}",
            stacklevel=2,
        )
    return report
