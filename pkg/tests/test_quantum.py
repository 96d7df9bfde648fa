"""Quantum-core invariants and worked examples."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blindsim.angles import Angle8
from blindsim.quantum import (
    HADAMARD,
    PAULI_X,
    PAULI_Z,
    SQRT_X,
    SQRT_Z,
    DensityMatrix,
    PureState,
    fidelity_pure,
    linear_entropy,
    is_unitary,
    partial_trace,
    phase_gate,
    rx,
    rz,
    states_equal_up_to_phase,
    von_neumann_entropy,
)

PI = math.pi


def bell_pair() -> PureState:
    return PureState.from_amplitudes(np.array([1, 0, 0, 1]) / math.sqrt(2))


class TestAngle8:
    def test_wraps_mod_8(self):
        assert Angle8(9).eighths == 1
        assert Angle8(-2).eighths == 6

    def test_arithmetic_closed(self):
        assert (Angle8(3) + Angle8(7)).eighths == 2
        assert (-Angle8(3)).eighths == 5
        assert Angle8(1).add_pi().eighths == 5
        assert Angle8(1).add_pi(2).eighths == 1

    def test_radians_exact(self):
        assert Angle8(6).radians == pytest.approx(3 * PI / 2, abs=0)
        assert Angle8.from_radians(-PI / 2).eighths == 6

    def test_from_radians_off_grid(self):
        with pytest.raises(ValueError):
            Angle8.from_radians(0.3)

    def test_clifford(self):
        assert Angle8(2).is_clifford and Angle8(4).is_clifford
        assert not Angle8(1).is_clifford

    @given(st.integers(), st.integers())
    def test_group_laws(self, a, b):
        assert (Angle8(a) + Angle8(b)) - Angle8(b) == Angle8(a)
        assert (Angle8(a) + (-Angle8(a))).eighths == 0


class TestGates:
    def test_constants_unitary(self):
        for gate in (HADAMARD, PAULI_X, PAULI_Z, SQRT_X, SQRT_Z, rz(0.7), rx(-1.2)):
            assert is_unitary(gate)

    def test_sqrt_gates_square(self):
        np.testing.assert_allclose(SQRT_Z @ SQRT_Z, PAULI_Z, atol=1e-12)
        np.testing.assert_allclose(SQRT_X @ SQRT_X, PAULI_X, atol=1e-12)

    def test_rz_phase_gate_agree_up_to_phase(self):
        a = rz(0.9)
        b = phase_gate(0.9)
        ratio = b[0, 0] / a[0, 0]
        np.testing.assert_allclose(ratio * a, b, atol=1e-12)


class TestApplySingle:
    def test_h_on_zero(self):
        out = PureState.computational(1).apply_single(1, HADAMARD)
        assert states_equal_up_to_phase(out, PureState.plus())

    def test_rz_on_plus_gives_ket_theta(self):
        theta = 5 * PI / 4
        out = PureState.plus().apply_single(1, rz(theta))
        assert states_equal_up_to_phase(out, PureState.ket_theta(theta))

    def test_bit_flip_on_second_qubit(self):
        ket01 = PureState.computational(2, 0b01)
        out = ket01.apply_single(2, PAULI_X)
        assert states_equal_up_to_phase(out, PureState.computational(2, 0b00))

    def test_qubit_out_of_range(self):
        with pytest.raises(IndexError):
            PureState.plus().apply_single(2, HADAMARD)

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError):
            PureState.plus().apply_single(1, np.array([[1, 0], [0, 2.0]]))


class TestCphase:
    def test_minus_on_11(self):
        out = PureState.computational(2, 0b11).apply_cphase(1, 2)
        assert np.allclose(out.amplitudes, [0, 0, 0, -1])

    def test_identity_on_00(self):
        out = PureState.computational(2, 0b00).apply_cphase(1, 2)
        assert np.allclose(out.amplitudes, [1, 0, 0, 0])

    def test_involution_and_symmetry(self):
        rng = np.random.default_rng(7)
        vec = rng.normal(size=8) + 1j * rng.normal(size=8)
        psi = PureState.from_amplitudes(vec / np.linalg.norm(vec))
        twice = psi.apply_cphase(1, 3).apply_cphase(1, 3)
        np.testing.assert_allclose(twice.amplitudes, psi.amplitudes, atol=1e-12)
        np.testing.assert_allclose(
            psi.apply_cphase(3, 1).amplitudes, psi.apply_cphase(1, 3).amplitudes
        )

    def test_same_qubit_rejected(self):
        with pytest.raises(ValueError):
            PureState.computational(2).apply_cphase(1, 1)


class TestProjectDelta:
    def test_same_vector_probability_one(self):
        theta = 3 * PI / 4
        p, rest = PureState.ket_theta(theta).project_delta(1, theta, 0)
        assert p == pytest.approx(1.0, abs=1e-12)
        assert rest.num_qubits == 0

    def test_orthogonal_probability_zero(self):
        theta = 3 * PI / 4
        p, rest = PureState.ket_theta(theta).project_delta(1, theta + PI, 0)
        assert p < 1e-12
        assert rest is None

    def test_family_first_qubit_half(self):
        from blindsim.clusters import linear_family_state

        psi = linear_family_state(0, 0)
        for bit in (0, 1):
            p, _ = psi.project_delta(1, 0.0, bit)
            assert p == pytest.approx(0.5, abs=1e-10)

    @given(
        st.integers(0, 7),
        st.integers(0, 7),
        st.integers(0, 7),
    )
    @settings(max_examples=40, deadline=None)
    def test_branch_probabilities_sum_to_one(self, n2, n3, nd):
        from blindsim.clusters import linear_family_state

        psi = linear_family_state(n2, n3)
        delta = nd * PI / 4
        total = sum(psi.project_delta(2, delta, bit)[0] for bit in (0, 1))
        assert total == pytest.approx(1.0, abs=1e-10)

    @given(st.floats(0, 2 * PI), st.floats(0, 2 * PI))
    @settings(max_examples=40, deadline=None)
    def test_rz_shifts_measurement_angle(self, delta, gamma):
        rng = np.random.default_rng(11)
        vec = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi = PureState.from_amplitudes(vec / np.linalg.norm(vec))
        rotated = psi.apply_single(1, rz(gamma))
        p_after, _ = rotated.project_delta(1, delta, 0)
        p_before, _ = psi.project_delta(1, delta - gamma, 0)
        assert p_after == pytest.approx(p_before, abs=1e-10)


class TestMeasurePauli:
    def test_z_on_zero(self):
        p, _ = PureState.computational(1).measure_pauli(1, "Z", 0)
        assert p == pytest.approx(1.0)

    def test_x_on_plus(self):
        p, _ = PureState.plus().measure_pauli(1, "X", 0)
        assert p == pytest.approx(1.0)

    def test_z_on_family_first_qubit(self):
        from blindsim.clusters import linear_family_state

        n2, n3 = 3, 6
        t2, t3 = n2 * PI / 4, n3 * PI / 4
        p, rest = linear_family_state(n2, n3).measure_pauli(1, "Z", 0)
        assert p == pytest.approx(0.5, abs=1e-10)
        # direct amplitude selection from the linear-family expansion: q1=0 slice
        plus = np.array([1, 1]) / math.sqrt(2)
        minus = np.array([1, -1]) / math.sqrt(2)
        k0, k1 = np.array([1.0, 0]), np.array([0, 1.0])
        expected = (
            np.kron(np.kron(k0, k0), plus)
            + np.exp(1j * t3) * np.kron(np.kron(k0, k1), minus)
            + np.exp(1j * t2) * np.kron(np.kron(k1, k0), plus)
            - np.exp(1j * (t2 + t3)) * np.kron(np.kron(k1, k1), minus)
        ) / 2.0
        assert states_equal_up_to_phase(
            rest, PureState.from_amplitudes(expected), tol=1e-10
        )

    def test_unknown_axis(self):
        with pytest.raises(ValueError):
            PureState.plus().measure_pauli(1, "Q", 0)


class TestDensityMatrix:
    def test_from_pure_fidelity_one(self):
        psi = PureState.ket_theta(PI / 4)
        rho = DensityMatrix.from_pure(psi)
        assert fidelity_pure(rho, psi) == pytest.approx(1.0)

    def test_maximally_mixed_fidelity(self):
        rho = DensityMatrix.maximally_mixed(2)
        psi = bell_pair()
        assert fidelity_pure(rho, psi) == pytest.approx(0.25)

    def test_mixture_linearity(self):
        # 0.679 |psi><psi| + 0.321 sigma with <psi|sigma|psi> = 0
        psi = PureState.computational(1, 0)
        sigma = DensityMatrix.from_pure(PureState.computational(1, 1))
        rho = DensityMatrix.mixture(
            [DensityMatrix.from_pure(psi), sigma], [0.679, 0.321]
        )
        assert fidelity_pure(rho, psi) == pytest.approx(0.679, abs=1e-12)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            DensityMatrix.from_matrix(np.array([[0.5, 0.5], [0.1, 0.5]]))

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            DensityMatrix.from_matrix(np.array([[1.5, 0], [0, -0.5]]))


class TestEntropies:
    def test_linear_entropy_pure_zero(self):
        rho = DensityMatrix.from_pure(PureState.ket_theta(1.1))
        assert linear_entropy(rho) == pytest.approx(0.0, abs=1e-12)

    def test_linear_entropy_mixed_one(self):
        assert linear_entropy(DensityMatrix.maximally_mixed(1)) == pytest.approx(1.0)
        assert linear_entropy(DensityMatrix.maximally_mixed(2)) == pytest.approx(1.0)

    def test_von_neumann_values(self):
        assert von_neumann_entropy(
            DensityMatrix.from_pure(PureState.plus())
        ) == pytest.approx(0.0, abs=1e-9)
        assert von_neumann_entropy(DensityMatrix.maximally_mixed(1)) == pytest.approx(1.0)
        assert von_neumann_entropy(DensityMatrix.maximally_mixed(3)) == pytest.approx(3.0)

    @given(st.floats(0.0, 1.0))
    @settings(max_examples=30, deadline=None)
    def test_linear_entropy_monotone_under_mixing(self, weight):
        pure = DensityMatrix.from_pure(PureState.ket_theta(0.3))
        mixed = DensityMatrix.mixture(
            [pure, DensityMatrix.maximally_mixed(1)], [1 - weight, weight]
        )
        assert linear_entropy(mixed) <= 1.0 + 1e-12
        assert linear_entropy(mixed) >= linear_entropy(pure) - 1e-12


class TestPartialTrace:
    def test_product_state_factor(self):
        psi = PureState.ket_theta(PI / 4).tensor(PureState.computational(1, 1))
        rho = DensityMatrix.from_pure(psi)
        reduced = partial_trace(rho, keep=[1])
        expected = DensityMatrix.from_pure(PureState.ket_theta(PI / 4))
        np.testing.assert_allclose(reduced.matrix, expected.matrix, atol=1e-12)

    def test_bell_pair_mixed(self):
        rho = DensityMatrix.from_pure(bell_pair())
        for keep in ([1], [2]):
            reduced = partial_trace(rho, keep=keep)
            np.testing.assert_allclose(reduced.matrix, np.eye(2) / 2, atol=1e-12)

    def test_family_state_keep_middle(self):
        from blindsim.clusters import linear_family_state

        n2, n3 = 2, 5
        rho = DensityMatrix.from_pure(linear_family_state(n2, n3))
        reduced = partial_trace(rho, keep=[2, 3])
        # independent oracle: dense index arithmetic over the 16 amplitudes
        vec = linear_family_state(n2, n3).amplitudes
        expected = np.zeros((4, 4), dtype=complex)
        for a in range(16):
            for b in range(16):
                if (a & 0b1001) == (b & 0b1001):
                    expected[(a >> 1) & 3, (b >> 1) & 3] += vec[a] * vec[b].conj()
        np.testing.assert_allclose(reduced.matrix, expected, atol=1e-12)
        assert np.trace(reduced.matrix).real == pytest.approx(1.0)

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            partial_trace(DensityMatrix.maximally_mixed(2), keep=[3])
