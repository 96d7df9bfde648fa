"""Testing whether the server is quantum at all.

Fix one measurement setting (Z on qubit 1, then pi, -pi/2, pi/2) and vary
the hidden state.  Every one of the 16 outcomes is impossible for at least
one state of the sweep, but the server cannot know which states are in play.
A classical impostor guessing uniformly emits each outcome with probability
1/16 and hits an impossible one with probability at least 1/8 per round.
"""
import numpy as np

from blindsim.verification import (
    SWEEP8,
    classical_guess_risk,
    classical_stub_round,
    distribution_table,
    honest_protocol_round,
    run_quantumness_test,
)

table = distribution_table(SWEEP8)
print("theoretical distributions over the theta_3 sweep (rows sum to 1):")
for (n2, n3), probs in zip(SWEEP8, table):
    cells = " ".join(f"{p:.3f}" for p in probs)
    print(f"  ({n2},{n3}): {cells}")
print("zero cells per outcome:", (table < 1e-12).sum(axis=0))
print("best classical guesser is caught with probability",
      classical_guess_risk(states=SWEEP8))

rng = np.random.default_rng(0)
honest = run_quantumness_test(honest_protocol_round, 10_000, rng)
print(f"\nhonest server, 10^4 rounds: verdict={honest.verdict}, "
      f"TV={honest.tv_marginal:.4f}, chi2={honest.chi_square:.1f} "
      f"(dof {honest.degrees_of_freedom}), impossible hits {honest.impossible_hits}")

stub = run_quantumness_test(classical_stub_round, 1000, rng)
print(f"classical stub, 10^3 rounds: verdict={stub.verdict}, "
      f"impossible hits {stub.impossible_hits}")
