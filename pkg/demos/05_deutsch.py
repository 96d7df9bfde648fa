"""Blind Deutsch algorithm on the staircase cluster.

The oracle, constant or balanced, is fixed by the angle on blind qubit 3
(-pi/2 or +pi/2); qubit 2 is measured at 0 and qubit 1 at pi/2.  Tomography
of output qubit 4 then reads the verdict: |0> for constant, |1> for
balanced, deterministically in the ideal case.  From the server's side both
oracles (and the Grover runs of the previous demo) produce identically
distributed instructions.
"""
import numpy as np

from blindsim.clusters import ClusterConfig
from blindsim.experiments import (
    DEUTSCH_ORACLE_ANGLES,
    GROVER_TAG_ANGLES,
    deutsch_output_state,
    instruction_pair_distribution,
    run_deutsch,
)
from blindsim.angles import Angle8

for oracle in ("constant", "balanced"):
    table = run_deutsch(oracle)
    verdicts = {row["tomography_verdict"] for row in table["rows"]}
    out = deutsch_output_state(oracle, 6, 4)
    print(f"{oracle}: success min {table['success_min']:.12f}, "
          f"tomography verdicts {verdicts}, reference {table['reported_reference']}")
    print(f"  output qubit for the (6,4) state: {np.round(out.amplitudes, 9)}")

# hiding: the (delta_2, delta_3) message distribution is uniform on the
# 8x8 grid for every computation
dists = []
for phi3 in DEUTSCH_ORACLE_ANGLES.values():
    dists.append(instruction_pair_distribution(
        ClusterConfig.STAIRCASE, {2: Angle8(0), 3: phi3}))
for phi2, phi3 in GROVER_TAG_ANGLES.values():
    dists.append(instruction_pair_distribution(
        ClusterConfig.TRIANGLE, {2: phi2, 3: phi3}))
print("\nall computations induce the same instruction distribution:",
      all(d == dists[0] for d in dists[1:]))
print("each (delta2, delta3) pair has probability",
      next(iter(dists[0].values())))
