"""
Conversion between laboratory units and the internal ones.

Internally hbar = 1, energies are in units of B, times in 1/B (so
``tau = B t``) and fields in units of B/mu.  CODATA constants come from
``scipy.constants``; 1 D = 1e-21/c C m.
"""

from __future__ import annotations

from dataclasses import dataclass

from scipy import constants

DEBYE_C_M = 1e-21 / constants.c
WAVENUMBER_J = constants.h * constants.c * 100.0  # energy of 1 cm^-1


@dataclass(frozen=True)
class UnitSystem:
    B_cm: float
    mu_debye: float

    @property
    def energy_J(self) -> float:
        return self.B_cm * WAVENUMBER_J

    @property
    def time_s(self) -> float:
        return constants.hbar / self.energy_J

    @property
    def field_V_per_m(self) -> float:
        return self.energy_J / (self.mu_debye * DEBYE_C_M)

    def energy_to_internal(self, cm: float) -> float:
        return cm / self.B_cm

    def energy_from_internal(self, value: float) -> float:
        return value * self.B_cm

    def time_to_internal(self, seconds: float) -> float:
        return seconds / self.time_s

    def time_from_internal(self, tau: float) -> float:
        return tau * self.time_s

    def field_to_internal(self, v_per_m: float) -> float:
        return v_per_m / self.field_V_per_m

    def field_from_internal(self, value: float) -> float:
        return value * self.field_V_per_m
