"""Phenomenological noise for the four-qubit family.

The model is keyed to two interference-contrast parameters: the source pairs
(qubits 1,2 and 3,4) carry a phase-damping channel of strength
(1 - bell_visibility)/2, the inner qubits 2 and 3 (the ones overlapped at the
beam splitters, and the ones carrying the hiding phases) a second channel of
strength (1 - interference_visibility)/2.

Slow drift of the hiding phases is a Gaussian jitter of width
phase_drift_sigma on theta_2 and theta_3.  Without an rng it enters in closed
form as the exact exp(-sigma^2/2) coherence damping, a state-independent
channel, which provably cannot leak hiding-phase information.  With an rng
the realized offsets are sampled once per preparation, modeling a
miscalibrated apparatus whose produced state depends on the setting; this is
the mechanism that makes the leakage analysis report a nonzero chi.

Deliberately phenomenological: it reproduces qualitative fidelity degradation,
not any particular apparatus.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quantum import DensityMatrix, PureState


@dataclass(frozen=True)
class NoiseParams:
    bell_visibility: float = 0.9
    interference_visibility: float = 0.85
    phase_drift_sigma: float = 0.0

    def __post_init__(self) -> None:
        for name in ("bell_visibility", "interference_visibility"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} = {value} outside [0, 1]")
        if self.phase_drift_sigma < 0.0:
            raise ValueError("phase_drift_sigma must be nonnegative")

    @property
    def ideal(self) -> bool:
        return (
            self.bell_visibility == 1.0
            and self.interference_visibility == 1.0
            and self.phase_drift_sigma == 0.0
        )


def _dephase(rho: np.ndarray, qubit: int, p: float, n: int) -> np.ndarray:
    """rho -> (1-p) rho + p Z_q rho Z_q."""
    if p == 0.0:
        return rho
    signs = np.ones(2**n)
    stride = 2 ** (n - qubit)
    idx = (np.arange(2**n) // stride) % 2
    signs[idx == 1] = -1.0
    z_rho_z = rho * np.outer(signs, signs)
    return (1.0 - p) * rho + p * z_rho_z


PAIR_QUBITS = (1, 3)  # one qubit per source pair (1,2) and (3,4)
INTERFERED_QUBITS = (2, 3)


def _phase_kick(rho: np.ndarray, qubit: int, angle: float, n: int) -> np.ndarray:
    """Unitary Rz(angle) on one qubit of a density matrix."""
    phases = np.ones(2**n, dtype=complex)
    stride = 2 ** (n - qubit)
    idx = (np.arange(2**n) // stride) % 2
    phases[idx == 1] = np.exp(1j * angle)
    return rho * np.outer(phases, phases.conj())


def apply_noise(
    state: PureState,
    params: NoiseParams,
    rng: np.random.Generator | None = None,
) -> DensityMatrix:
    """Noisy version of a four-qubit family state as a density matrix.

    With `rng`, the phase drift is a sampled offset of the prepared hiding
    phases (deterministic given the generator state); without it, the drift
    is averaged in closed form.
    """
    if state.num_qubits != 4:
        raise ValueError("the noise model is defined on the four-qubit family")
    n = state.num_qubits
    rho = np.outer(state.amplitudes, state.amplitudes.conj())
    p_bell = (1.0 - params.bell_visibility) / 2.0
    for q in PAIR_QUBITS:
        rho = _dephase(rho, q, p_bell, n)
    p_int = (1.0 - params.interference_visibility) / 2.0
    for q in INTERFERED_QUBITS:
        rho = _dephase(rho, q, p_int, n)
    if params.phase_drift_sigma > 0.0:
        if rng is None:
            damping = math.exp(-params.phase_drift_sigma**2 / 2.0)
            p_jit = (1.0 - damping) / 2.0
            for q in INTERFERED_QUBITS:
                rho = _dephase(rho, q, p_jit, n)
        else:
            for q in INTERFERED_QUBITS:
                offset = float(rng.normal(0.0, params.phase_drift_sigma))
                rho = _phase_kick(rho, q, offset, n)
    return DensityMatrix.from_matrix(rho)
