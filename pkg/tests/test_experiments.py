"""Experiment runners: ideal values, algorithm hiding, reproducibility, CLI."""
import json

import numpy as np
import pytest

from blindsim.angles import Angle8
from blindsim.cli import main
from blindsim.experiments import (
    DEUTSCH_ORACLE_ANGLES,
    ExperimentConfig,
    GROVER_TAG_ANGLES,
    grover_circuit_readout,
    grover_decode,
    instruction_pair_distribution,
    run_blindness,
    run_bulk_branches,
    run_deutsch,
    run_fig3c,
    run_fig3d,
    run_grover,
    run_grover_sessions,
    run_quantumness,
    run_tomography,
)
from blindsim.clusters import ClusterConfig
from blindsim.noise import NoiseParams

A = Angle8


class TestGrover:
    def test_all_tags_ideal(self):
        for tag in sorted(GROVER_TAG_ANGLES):
            table = run_grover(tag)
            assert table["success_min"] >= 1.0 - 1e-9
            assert table["classical_bound"] == 0.5

    def test_tag01_angle_anchor(self):
        # tagging |01> uses measurement angles -pi/2 and pi
        phi2, phi3 = GROVER_TAG_ANGLES["01"]
        assert {phi2.eighths, phi3.eighths} == {6, 4}

    def test_parallel_matches_sequential(self):
        seq = run_grover("10")
        par = run_grover("10", parallel=True)
        assert seq["rows"] == par["rows"]

    def test_engine_vs_circuit_readout_frame(self):
        # engine readout = bitwise NOT of the circuit-model readout; both
        # decode to the same tag
        from blindsim.clusters import BlindPhases
        from blindsim.mbqc import cluster_state_for, enumerate_adaptive, pattern_for

        for tag in sorted(GROVER_TAG_ANGLES):
            m1, m4 = grover_circuit_readout(tag)
            phi2, phi3 = GROVER_TAG_ANGLES[tag]
            phi = {1: A(2), 4: A(2), 2: phi2, 3: phi3}
            pattern = pattern_for(ClusterConfig.TRIANGLE, phi=phi)
            phases = BlindPhases.family(4, 5)
            state = cluster_state_for(ClusterConfig.TRIANGLE, phases)
            branch = next(
                b
                for b in enumerate_adaptive(state, pattern, phases, {})
                if not b.impossible
            )
            assert (branch.interpreted[1], branch.interpreted[4]) == (
                1 - m1,
                1 - m4,
            )
            assert grover_decode(branch.interpreted) == tag

    def test_live_sessions_decode(self):
        for tag in ("00", "11"):
            decoded = run_grover_sessions(tag, seed=5, n_sessions=8)
            assert decoded == [tag] * 8

    def test_unknown_tag(self):
        with pytest.raises(ValueError):
            run_grover("21")


class TestDeutsch:
    def test_both_oracles(self):
        for oracle in ("constant", "balanced"):
            table = run_deutsch(oracle)
            assert table["success_min"] >= 1.0 - 1e-9
            assert table["verdicts_correct"]

    def test_verdict_states_orthogonal(self):
        assert DEUTSCH_ORACLE_ANGLES["constant"] != DEUTSCH_ORACLE_ANGLES["balanced"]

    def test_unknown_oracle(self):
        with pytest.raises(ValueError):
            run_deutsch("both")


class TestAlgorithmHiding:
    def test_delta_distribution_identical_across_computations(self):
        """Constant Deutsch, balanced Deutsch, and every Grover tag induce
        the same uniform (delta2, delta3) message distribution."""
        reference = None
        computations = [
            {2: A(0), 3: DEUTSCH_ORACLE_ANGLES["constant"]},
            {2: A(0), 3: DEUTSCH_ORACLE_ANGLES["balanced"]},
        ] + [
            {2: pair[0], 3: pair[1]} for pair in GROVER_TAG_ANGLES.values()
        ]
        for phi in computations:
            dist = instruction_pair_distribution(ClusterConfig.STAIRCASE, phi)
            assert len(dist) == 64
            assert all(abs(p - 1 / 64) < 1e-12 for p in dist.values())
            if reference is None:
                reference = dist
            else:
                assert dist == reference


class TestFigures:
    def test_fig3c_table(self):
        table = run_fig3c()
        assert table["average_linear_entropy"] == pytest.approx(1.0, abs=1e-9)
        assert all(
            row["fidelity_to_target"] == pytest.approx(1.0, abs=1e-9)
            for row in table["rows"]
        )
        avg = np.array(
            [[complex(re, im) for re, im in row] for row in table["average_density"]]
        )
        np.testing.assert_allclose(avg, np.eye(2) / 2, atol=1e-9)

    def test_fig3c_noisy_entropy_still_high(self):
        table = run_fig3c(ExperimentConfig("fig3c", noise=NoiseParams()))
        assert table["noisy_average_linear_entropy"] >= 0.95

    def test_fig3d_table(self):
        table = run_fig3d()
        assert table["average_linear_entropy"] == pytest.approx(1.0, abs=1e-9)
        assert table["single_state_linear_entropy"] == pytest.approx(0.0, abs=1e-9)
        rotations = {row["hidden_rotation"] for row in table["rows"]}
        # the hidden family: Rz(pi/2 + a pi) x Rz(pi/2 + b pi)
        assert rotations == {
            "Rz(2pi/4) x Rz(0pi/4 + pi/2)",
            "Rz(2pi/4) x Rz(4pi/4 + pi/2)",
            "Rz(6pi/4) x Rz(0pi/4 + pi/2)",
            "Rz(6pi/4) x Rz(4pi/4 + pi/2)",
        }

    def test_reproducible_given_seed(self):
        a = run_fig3c(ExperimentConfig("fig3c", seed=9))
        b = run_fig3c(ExperimentConfig("fig3c", seed=9))
        assert json.dumps(a, default=str) == json.dumps(b, default=str)


class TestBlindnessExperiment:
    def test_ideal_and_broken(self):
        table = run_blindness(ExperimentConfig("blindness"))
        assert table["ideal"]["chi_uniform_bits"] == pytest.approx(0.0, abs=1e-9)
        assert table["ideal"]["chi_maximized_bits"] == pytest.approx(0.0, abs=1e-9)
        assert table["r_broken_chi_uniform_bits"] == pytest.approx(1.0, abs=1e-6)

    def test_noisy_leaks_a_little(self):
        table = run_blindness()
        assert 0.0 < table["noisy"]["chi_uniform_bits"] < 0.5
        assert (
            table["noisy"]["chi_maximized_bits"]
            >= table["noisy"]["chi_uniform_bits"] - 1e-9
        )


class TestTomographyExperiment:
    def test_fig3b_analogue_structure(self):
        table = run_tomography(
            ExperimentConfig("tomography", noise=NoiseParams()), mc_trials=5
        )
        assert table["error_bars"]["fidelity_to_target"] > 0.0
        assert table["converged"]
        # real part dominated by the four corner terms of the lab-basis state
        mat = np.array(
            [[complex(re, im) for re, im in row] for row in table["rho_hat"]]
        ).real
        corners = {0, 3, 12, 15}
        on = np.mean([abs(mat[i, j]) for i in corners for j in corners])
        off = np.mean(
            [
                abs(mat[i, j])
                for i in range(16)
                for j in range(16)
                if not (i in corners and j in corners)
            ]
        )
        assert on > 20 * off


class TestBulk:
    def test_bulk_rows(self):
        table = run_bulk_branches()
        assert table["row_count"] == 10 * 16
        total = sum(r["probability"] for r in table["rows"])
        assert total == pytest.approx(10.0, abs=1e-9)


class TestQuantumnessExperiment:
    def test_small_run(self):
        table = run_quantumness(
            ExperimentConfig("quantumness", seed=3), rounds=500, stub_trials=5
        )
        assert table["honest"]["verdict"] == "quantum-consistent"
        assert table["stub_rejection_rate"] == 1.0
        assert table["classical_guess_risk"] == pytest.approx(0.125, abs=1e-12)


class TestCli:
    def test_exit_codes(self, tmp_path):
        out = tmp_path / "grover.json"
        assert main(["grover", "--tag", "11", "--out", str(out)]) == 0
        table = json.loads(out.read_text())
        assert table["success_min"] >= 1.0 - 1e-9

    def test_csv_output(self, capsys):
        assert main(["deutsch", "--oracle", "balanced", "--csv"]) == 0
        captured = capsys.readouterr().out
        assert captured.startswith("n2,n3,success_probability")

    def test_seed_env_fallback(self, monkeypatch, capsys):
        monkeypatch.setenv("BLINDSIM_SEED", "123")
        assert main(["fig3d"]) == 0
        table = json.loads(capsys.readouterr().out)
        assert table["config"]["seed"] == 123

    def test_bulk(self, capsys):
        assert main(["bulk", "--csv"]) == 0
        assert capsys.readouterr().out.startswith("setting,n2,n3,outcome")
