from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class RotorSpec:
    """
    Rigid-rotor constants in internal units (hbar = 1).

    The usual choice is ``B = mu = 1``, making energies multiples of B, times
    multiples of 1/B and fields multiples of B/mu.  ``C`` is ignored for
    ``kind="linear"``.
    """

    kind: str = "symmetric"
    B: float = 1.0
    C: float = 1.0
    mu: float = 1.0
    jmax: int = 12

    def __post_init__(self):
        if self.kind not in ("symmetric", "linear"):
            raise DomainError(f"rotor kind must be 'symmetric' or 'linear', got {self.kind!r}")
        if not self.B > 0 or not self.mu > 0:
            raise DomainError("B and mu must be positive")
        if self.jmax < 1:
            raise DomainError(f"jmax must be >= 1, got {self.jmax}")

    @property
    def effective_C(self) -> float:
        # C only ever multiplies K**2, which is zero for a linear rotor
        return self.B if self.kind == "linear" else self.C
