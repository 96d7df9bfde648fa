"""Dense exact simulation of small multi-qubit systems.

Convention: qubit 1 is the most significant bit of the basis index, so the
basis label of a four-qubit amplitude reads |q1 q2 q3 q4>.  States are
immutable; every operation returns a fresh value.

The equatorial measurement basis is
    |b_delta> = (|0> + (-1)^b e^{i delta} |1>) / sqrt(2),   b in {0, 1},
so bit 0 always labels the "+" element of |±_delta>.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-10
EIGENVALUE_FLOOR = -1e-9
IMPOSSIBLE_BRANCH = 1e-12

# single-qubit gate constants
IDENTITY = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
SQRT_Z = np.diag([1.0, 1.0j]).astype(complex)
# Branch chosen so that SQRT_Z (x) SQRT_X (x) SQRT_Z (x) I maps the
# triangle-cluster graph state onto the linear one (see clusters module).
SQRT_X = HADAMARD @ np.diag([1.0, -1.0j]).astype(complex) @ HADAMARD


def rz(phi: float) -> np.ndarray:
    """R_z(phi) = exp(-i phi Z / 2)."""
    return np.array([[np.exp(-0.5j * phi), 0], [0, np.exp(0.5j * phi)]])


def rx(alpha: float) -> np.ndarray:
    """R_x(alpha) = exp(-i alpha X / 2)."""
    c, s = math.cos(alpha / 2.0), math.sin(alpha / 2.0)
    return np.array([[c, -1j * s], [-1j * s, c]])


def phase_gate(delta: float) -> np.ndarray:
    """diag(1, e^{i delta}), which is R_z(delta) up to global phase."""
    return np.diag([1.0, np.exp(1j * delta)]).astype(complex)


def is_unitary(gate: np.ndarray, tol: float = 1e-10) -> bool:
    gate = np.asarray(gate, dtype=complex)
    return gate.shape == (2, 2) and np.allclose(
        gate.conj().T @ gate, np.eye(2), atol=tol
    )


def _check_gate(gate: np.ndarray) -> np.ndarray:
    gate = np.asarray(gate, dtype=complex)
    if not is_unitary(gate):
        raise ValueError("gate is not a 2x2 unitary")
    return gate


def equatorial_bra(delta: float, bit: int) -> np.ndarray:
    """Projection row vector <b_delta| for the |±_delta> basis."""
    return np.array([1.0, (-1) ** bit * np.exp(1j * delta)]).conj() / math.sqrt(2)


@dataclass(frozen=True)
class PureState:
    """Normalized complex state vector on `num_qubits` qubits."""

    amplitudes: np.ndarray
    num_qubits: int

    @classmethod
    def from_amplitudes(cls, amplitudes: Sequence[complex]) -> "PureState":
        vec = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = int(round(math.log2(vec.size)))
        if 2**n != vec.size:
            raise ValueError(f"amplitude vector length {vec.size} is not a power of 2")
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm} deviates from 1")
        vec = vec / norm
        vec.setflags(write=False)
        return cls(vec, n)

    @classmethod
    def computational(cls, num_qubits: int, index: int = 0) -> "PureState":
        vec = np.zeros(2**num_qubits, dtype=complex)
        vec[index] = 1.0
        return cls.from_amplitudes(vec)

    @classmethod
    def ket_theta(cls, theta: float) -> "PureState":
        """|theta> = (|0> + e^{i theta}|1>)/sqrt(2)."""
        return cls.from_amplitudes([1.0, np.exp(1j * theta)] / np.sqrt(2))

    @classmethod
    def plus(cls) -> "PureState":
        return cls.ket_theta(0.0)

    def tensor(self, other: "PureState") -> "PureState":
        return PureState.from_amplitudes(np.kron(self.amplitudes, other.amplitudes))

    def _axis(self, qubit: int) -> int:
        if not 1 <= qubit <= self.num_qubits:
            raise IndexError(f"qubit {qubit} out of range 1..{self.num_qubits}")
        return qubit - 1

    def apply_single(self, qubit: int, gate: np.ndarray) -> "PureState":
        """Apply a single-qubit unitary to the given tensor factor (1-based)."""
        gate = _check_gate(gate)
        ax = self._axis(qubit)
        tensor = self.amplitudes.reshape([2] * self.num_qubits)
        tensor = np.moveaxis(tensor, ax, 0)
        tensor = np.tensordot(gate, tensor, axes=([1], [0]))
        tensor = np.moveaxis(tensor, 0, ax)
        return PureState.from_amplitudes(tensor.reshape(-1))

    def apply_cphase(self, i: int, j: int) -> "PureState":
        """CPhase |i>|j> -> (-1)^{ij} |i>|j> between two qubits."""
        if i == j:
            raise ValueError("CPhase requires two distinct qubits")
        ai, aj = self._axis(i), self._axis(j)
        tensor = self.amplitudes.reshape([2] * self.num_qubits).copy()
        sel = [slice(None)] * self.num_qubits
        sel[ai] = 1
        sel[aj] = 1
        tensor[tuple(sel)] *= -1.0
        return PureState.from_amplitudes(tensor.reshape(-1))

    def _project(self, qubit: int, bra: np.ndarray) -> tuple[float, "PureState | None"]:
        ax = self._axis(qubit)
        tensor = self.amplitudes.reshape([2] * self.num_qubits)
        tensor = np.moveaxis(tensor, ax, 0)
        reduced = np.tensordot(bra, tensor, axes=([0], [0])).reshape(-1)
        prob = float(np.linalg.norm(reduced) ** 2)
        if prob < IMPOSSIBLE_BRANCH:
            return prob, None
        return prob, PureState.from_amplitudes(reduced / math.sqrt(prob))

    def project_delta(
        self, qubit: int, delta: float, bit: int
    ) -> tuple[float, "PureState | None"]:
        """Measure `qubit` in |±_delta>; returns (probability, residual state).

        The residual state has the measured qubit removed and is renormalized.
        A branch with probability below 1e-12 returns None for the state so
        the caller can prune it.
        """
        return self._project(qubit, equatorial_bra(delta, bit))

    def measure_pauli(
        self, qubit: int, axis: str, bit: int
    ) -> tuple[float, "PureState | None"]:
        """Measure in a Pauli eigenbasis; bit 0 labels the +1 eigenstate."""
        if axis == "X":
            return self.project_delta(qubit, 0.0, bit)
        if axis == "Y":
            return self.project_delta(qubit, math.pi / 2.0, bit)
        if axis == "Z":
            bra = np.array([1.0, 0.0], dtype=complex) if bit == 0 else np.array([0.0, 1.0], dtype=complex)
            return self._project(qubit, bra)
        raise ValueError(f"unknown Pauli axis {axis!r}")

    def overlap(self, other: "PureState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def phase_insensitive_fidelity(self, other: "PureState") -> float:
        """|<self|other>|^2; equality up to global phase scores 1."""
        return abs(self.overlap(other)) ** 2

    def to_density_matrix(self) -> "DensityMatrix":
        return DensityMatrix.from_pure(self)


def states_equal_up_to_phase(a: PureState, b: PureState, tol: float = 1e-10) -> bool:
    return abs(abs(a.overlap(b)) - 1.0) < tol


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix on n qubits."""

    matrix: np.ndarray
    num_qubits: int

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "DensityMatrix":
        mat = np.asarray(matrix, dtype=complex)
        dim = mat.shape[0]
        n = int(round(math.log2(dim)))
        if mat.shape != (dim, dim) or 2**n != dim:
            raise ValueError(f"density matrix shape {mat.shape} is not 2^n x 2^n")
        if not np.allclose(mat, mat.conj().T, atol=HERMITIAN_TOL):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(mat).real - 1.0) > HERMITIAN_TOL:
            raise ValueError(f"trace {np.trace(mat)} deviates from 1")
        eigenvalues = np.linalg.eigvalsh(mat)
        if eigenvalues.min() < EIGENVALUE_FLOOR:
            raise ValueError(f"negative eigenvalue {eigenvalues.min()}")
        mat = mat.copy()
        mat.setflags(write=False)
        return cls(mat, n)

    @classmethod
    def from_pure(cls, psi: PureState) -> "DensityMatrix":
        vec = psi.amplitudes
        return cls.from_matrix(np.outer(vec, vec.conj()))

    @classmethod
    def maximally_mixed(cls, num_qubits: int) -> "DensityMatrix":
        dim = 2**num_qubits
        return cls.from_matrix(np.eye(dim) / dim)

    @classmethod
    def mixture(
        cls, states: Iterable["DensityMatrix"], weights: Iterable[float] | None = None
    ) -> "DensityMatrix":
        mats = [s.matrix for s in states]
        if weights is None:
            weights = [1.0 / len(mats)] * len(mats)
        acc = sum(w * m for w, m in zip(weights, mats))
        return cls.from_matrix(acc)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def fidelity_pure(rho: DensityMatrix, psi: PureState) -> float:
    """<psi| rho |psi> for a pure target."""
    vec = psi.amplitudes
    return float(np.real(vec.conj() @ rho.matrix @ vec))


def linear_entropy(rho: DensityMatrix) -> float:
    """(d/(d-1)) (1 - Tr rho^2): 0 for pure states, 1 for I/d."""
    d = rho.dim
    purity = float(np.real(np.trace(rho.matrix @ rho.matrix)))
    return (d / (d - 1.0)) * (1.0 - purity)


def von_neumann_entropy(rho: DensityMatrix, eigenvalue_cutoff: float = 1e-12) -> float:
    """-Tr(rho log2 rho) with 0 log 0 := 0."""
    eigenvalues = np.linalg.eigvalsh(rho.matrix)
    eigenvalues = eigenvalues[eigenvalues > eigenvalue_cutoff]
    return float(-(eigenvalues * np.log2(eigenvalues)).sum())


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Trace out all qubits not in `keep` (1-based qubit labels).

    The kept qubits stay in ascending original order.
    """
    keep = sorted(set(keep))
    n = rho.num_qubits
    if any(not 1 <= q <= n for q in keep):
        raise IndexError("keep set references qubits out of range")
    drop = [q - 1 for q in range(1, n + 1) if q not in keep]
    tensor = rho.matrix.reshape([2] * (2 * n))
    for offset, ax in enumerate(drop):
        a = ax - offset
        tensor = np.trace(tensor, axis1=a, axis2=a + (n - offset))
    dim = 2 ** len(keep)
    return DensityMatrix.from_matrix(tensor.reshape(dim, dim))
