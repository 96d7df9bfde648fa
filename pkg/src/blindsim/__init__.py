"""blindsim: exact simulation of blind delegated measurement-based quantum
computation on small cluster states, with a client/server protocol layer,
leakage analysis, phenomenological noise, tomography, and a quantumness test.
"""
from .angles import Angle8
from .quantum import (
    DensityMatrix,
    PureState,
    fidelity_pure,
    linear_entropy,
    partial_trace,
    states_equal_up_to_phase,
    von_neumann_entropy,
)
from .clusters import (
    BlindPhases,
    ClusterConfig,
    GraphSpec,
    build_blind_cluster,
    linear_family_state,
    lab_family_state,
    lc_unitary_check,
    local_complement,
    path_graph,
    triangle_cluster_graph,
)
from .mbqc import (
    BranchRecord,
    MeasurementPattern,
    MeasurementStep,
    adapt_angle,
    circuit_oracle,
    cluster_state_for,
    enumerate_adaptive,
    enumerate_branches,
    pattern_for,
    run_adaptive,
)
from .protocol import (
    ClientSecrets,
    ClientSession,
    Message,
    ProtocolError,
    ServerSession,
    TcpServer,
    Transcript,
    run_session,
    run_session_tcp,
    server_entangle,
)
from .blindness import (
    ChiReport,
    Ensemble,
    grid_search_chi,
    holevo_chi,
    maximize_chi_over_priors,
    mixedness_check,
    pair_fold,
)
from .noise import NoiseParams, apply_noise
from .tomography import (
    CountsTable,
    MLEResult,
    exact_counts,
    mle_reconstruct,
    monte_carlo_errors,
    pauli_settings,
    simulate_counts,
)
from .verification import (
    QuantumnessSetting,
    TestReport,
    classical_guess_risk,
    run_quantumness_test,
    theoretical_distribution,
)

__all__ = [
    "Angle8",
    "BlindPhases",
    "BranchRecord",
    "ChiReport",
    "ClientSecrets",
    "ClientSession",
    "ClusterConfig",
    "CountsTable",
    "DensityMatrix",
    "Ensemble",
    "GraphSpec",
    "MLEResult",
    "MeasurementPattern",
    "MeasurementStep",
    "Message",
    "NoiseParams",
    "ProtocolError",
    "PureState",
    "QuantumnessSetting",
    "ServerSession",
    "TcpServer",
    "TestReport",
    "Transcript",
    "adapt_angle",
    "apply_noise",
    "build_blind_cluster",
    "circuit_oracle",
    "classical_guess_risk",
    "cluster_state_for",
    "enumerate_adaptive",
    "enumerate_branches",
    "linear_family_state",
    "lab_family_state",
    "exact_counts",
    "fidelity_pure",
    "grid_search_chi",
    "holevo_chi",
    "lc_unitary_check",
    "linear_entropy",
    "local_complement",
    "maximize_chi_over_priors",
    "mixedness_check",
    "mle_reconstruct",
    "monte_carlo_errors",
    "pair_fold",
    "partial_trace",
    "path_graph",
    "pattern_for",
    "pauli_settings",
    "run_adaptive",
    "run_quantumness_test",
    "run_session",
    "run_session_tcp",
    "server_entangle",
    "simulate_counts",
    "states_equal_up_to_phase",
    "theoretical_distribution",
    "triangle_cluster_graph",
    "von_neumann_entropy",
]

__version__ = "0.1.0"
