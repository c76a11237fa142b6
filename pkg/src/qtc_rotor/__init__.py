"""Quantum tracking control of the orientation of symmetric-top and linear rotors."""

from .angular import (
    Basis, BasisState, OperatorMatrix, QuadraticMoments, enumerate_basis, h0_eigenvalue,
    position_matrix, quadratic_expectations, triple_commutator_matrix, wigner3j,
)
from .errors import DomainError, PropagationError, QTCError, SingularityError, TruncationError
from .propagator import HamiltonianOperator, assemble_hamiltonian, step
from .rotor import RotorSpec
from .simulator import SimulationAborted, SimulationConfig, SimulationRecord, run, run_forward, run_linear
from .tracking import FieldSample, build_tracking_matrix, build_tracking_vector, solve_fields
from .tracks import (
    ScalarTrack, TrackSet, compatibility_report, gaussian_sinusoid_track, orientation_tracks,
    tabulated_track,
)

__version__ = "0.1.0"
