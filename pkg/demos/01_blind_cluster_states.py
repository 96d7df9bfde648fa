"""Blind cluster states and the four-qubit family.

A blind cluster state is an ordinary graph state whose vertex qubits carry
secret phases: prepare |theta_j> = (|0> + e^{i theta_j}|1>)/sqrt(2) on each
vertex, then entangle along the edges with CPhase gates.  For the four-qubit
linear family, theta_1 = theta_4 = 0 and the secret lives in (theta_2,
theta_3), each a multiple of pi/4.
"""
import numpy as np

from blindsim import (
    Angle8,
    BlindPhases,
    build_blind_cluster,
    linear_family_state,
    lab_family_state,
    lc_unitary_check,
    local_complement,
    path_graph,
    states_equal_up_to_phase,
    triangle_cluster_graph,
)
from blindsim.quantum import HADAMARD

# Building the family from its definition and from the written-out
# amplitudes gives the same state, for every choice of the secret.
phases = BlindPhases.family(n2=2, n3=3)
built = build_blind_cluster(path_graph(4), phases)
print("matches explicit amplitudes:", states_equal_up_to_phase(built, linear_family_state(2, 3)))

# The laboratory-basis form differs by Hadamards on the end qubits.
lab = lab_family_state(2, 3).apply_single(1, HADAMARD).apply_single(4, HADAMARD)
print("lab form under H x I x I x H:", states_equal_up_to_phase(lab, linear_family_state(2, 3)))

# Local complementation at vertex 2 turns the path into a triangle plus a
# pendant edge; on states the move is a local Clifford.
print("LC of the path at vertex 2:", sorted(local_complement(path_graph(4), 2).edges))
print("equals the triangle-cluster graph:",
      local_complement(path_graph(4), 2) == triangle_cluster_graph())
print("LC unitary relation holds for all 64 secrets:",
      all(lc_unitary_check(a, b) for a in range(8) for b in range(8)))

# The hiding works because |theta><theta| averaged with its pi-partner is
# maximally mixed; no measurement on the transmitted qubit can see theta.
rho = np.zeros((2, 2), dtype=complex)
for r in (0, 1):
    theta = Angle8(3).add_pi(r).radians
    vec = np.array([1.0, np.exp(1j * theta)]) / np.sqrt(2)
    rho += 0.5 * np.outer(vec, vec.conj())
print("pi-pair average:\n", np.round(rho, 12))
