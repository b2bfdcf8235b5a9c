"""Simulation and metrics for NV-cavity assisted two-photon four-qubit Toffoli and Fredkin gates."""

from .circuits import GateKind, build_circuit, effective_gate_matrix, oracle_matrix, run
from .emitter import IDEAL, EmitterParams, ScatteringCoefficients, coefficients, coefficients_at
from .metrics import (
    QuadratureSpec,
    average_efficiency_sim,
    average_fidelity,
    closed_form_efficiency,
    sweep,
)
from .statevec import QuantumState, make_input_state

__version__ = "0.1.0"

__all__ = [
    "IDEAL",
    "EmitterParams",
    "GateKind",
    "QuadratureSpec",
    "QuantumState",
    "ScatteringCoefficients",
    "average_efficiency_sim",
    "average_fidelity",
    "build_circuit",
    "closed_form_efficiency",
    "coefficients",
    "coefficients_at",
    "effective_gate_matrix",
    "make_input_state",
    "oracle_matrix",
    "run",
    "sweep",
]
