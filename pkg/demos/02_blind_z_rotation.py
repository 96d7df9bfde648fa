"""A blind Z-rotation on the left-pointing linear cluster.

The server receives four qubits, entangles them along the path, and measures
qubits 4, 3, 2 at the fixed instructed angles pi/2, -pi/2, -pi/2.  What
rotation the client actually implemented depends on the hidden theta_3:
the output qubit ends in Rx(pi) Rz(theta_3 + pi/2) |psi_in>.  Sweeping
theta_3 over the grid and averaging the outputs gives the maximally mixed
state: the server-side view carries no trace of which rotation happened.
"""
import numpy as np

from blindsim.experiments import run_fig3c

table = run_fig3c()

for row in table["rows"]:
    print(f"theta_3 = {row['n3']}pi/4: fidelity to Rx(pi)Rz(theta3+pi/2)|psi_in> "
          f"= {row['fidelity_to_target']:.12f}")

avg = np.array([[complex(re, im) for re, im in r] for r in table["average_density"]])
print("\naverage over the sweep:\n", np.round(avg, 12))
print("linear entropy of the average:", table["average_linear_entropy"])
print("(apparatus reference:", table["reported_reference"], ")")
