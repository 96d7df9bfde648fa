"""Over-complete Pauli tomography with Poissonian counts and
maximum-likelihood reconstruction.

Settings are all 3^n products of local X/Y/Z bases (over-complete for the
sizes used here).  Counts are Poisson with mean exposure * Born probability.
The estimate maximizes the Poisson log-likelihood over rho = T^dag T / Tr,
T lower-triangular, by gradient ascent with backtracking line search.
Error bars come from re-running an extractor on Poisson-resampled counts.
"""
from __future__ import annotations

import io
import itertools
import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .quantum import DensityMatrix, PureState, fidelity_pure

_EIGENBASES = {
    "X": np.array([[1, 1], [1, -1]], dtype=complex).T / math.sqrt(2),
    "Y": np.array([[1, 1j], [1, -1j]], dtype=complex).T / math.sqrt(2),
    "Z": np.array([[1, 0], [0, 1]], dtype=complex).T,
}
# column b of _EIGENBASES[axis] is the outcome-b eigenvector (b=0 <-> +1)


def pauli_settings(num_qubits: int) -> list[tuple[str, ...]]:
    return list(itertools.product("XYZ", repeat=num_qubits))


def setting_projectors(setting: Sequence[str]) -> np.ndarray:
    """(2^n, d, d) stack of outcome projectors; qubit 1 is the MSB."""
    n = len(setting)
    dim = 2**n
    projectors = np.empty((dim, dim, dim), dtype=complex)
    for outcome in range(dim):
        vec = np.array([1.0 + 0j])
        for q, axis in enumerate(setting):
            bit = (outcome >> (n - 1 - q)) & 1
            vec = np.kron(vec, _EIGENBASES[axis][:, bit])
        projectors[outcome] = np.outer(vec, vec.conj())
    return projectors


def born_probabilities(rho: DensityMatrix, setting: Sequence[str]) -> np.ndarray:
    projectors = setting_projectors(setting)
    return np.real(np.einsum("kij,ji->k", projectors, rho.matrix))


@dataclass(frozen=True)
class CountsTable:
    settings: list[tuple[str, ...]]
    counts: np.ndarray  # (n_settings, 2^n)
    exposure: float  # mean total events per setting

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=float)
        if counts.shape[0] != len(self.settings):
            raise ValueError("counts rows must match settings")
        if not np.isfinite(counts).all() or (counts < 0).any():
            raise ValueError("counts must be finite and nonnegative")
        object.__setattr__(self, "counts", counts)

    @property
    def num_qubits(self) -> int:
        return len(self.settings[0])

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("setting_id,bases,outcome,count\n")
        n = self.num_qubits
        for k, setting in enumerate(self.settings):
            for o in range(2**n):
                out.write(f"{k},{''.join(setting)},{o:0{n}b},{self.counts[k, o]}\n")
        return out.getvalue()

    @classmethod
    def from_csv(cls, text: str, exposure: float) -> "CountsTable":
        rows = text.strip().splitlines()[1:]
        table: dict[int, tuple[tuple[str, ...], dict[int, float]]] = {}
        for row in rows:
            sid, bases, outcome, count = row.split(",")
            entry = table.setdefault(int(sid), (tuple(bases), {}))
            entry[1][int(outcome, 2)] = float(count)
        settings = []
        counts = []
        for sid in sorted(table):
            setting, by_outcome = table[sid]
            settings.append(setting)
            counts.append([by_outcome[o] for o in range(2 ** len(setting))])
        return cls(settings, np.array(counts), exposure)


def simulate_counts(
    rho: DensityMatrix,
    settings: Sequence[tuple[str, ...]],
    mean_total: float,
    rng: np.random.Generator,
) -> CountsTable:
    """Poisson counts with mean = mean_total * Born probability."""
    counts = np.empty((len(settings), rho.dim))
    for k, setting in enumerate(settings):
        probs = np.clip(born_probabilities(rho, setting), 0.0, None)
        counts[k] = rng.poisson(mean_total * probs)
    return CountsTable(list(settings), counts, mean_total)


def exact_counts(
    rho: DensityMatrix, settings: Sequence[tuple[str, ...]], exposure: float = 1.0
) -> CountsTable:
    """Infinite-statistics limit: counts equal exposure * probabilities."""
    counts = np.array(
        [np.clip(born_probabilities(rho, s), 0.0, None) * exposure for s in settings]
    )
    return CountsTable(list(settings), counts, exposure)


@dataclass(frozen=True)
class MLEResult:
    rho_hat: DensityMatrix
    log_likelihood: float
    fidelity_to_target: float | None
    error_bars: dict[str, float]
    converged: bool
    iterations: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "rho_hat": [
                    [[float(z.real), float(z.imag)] for z in row]
                    for row in self.rho_hat.matrix
                ],
                "log_likelihood": self.log_likelihood,
                "fidelity_to_target": self.fidelity_to_target,
                "error_bars": self.error_bars,
                "converged": self.converged,
                "iterations": self.iterations,
            }
        )


def _linear_inversion(table: CountsTable) -> np.ndarray:
    """Pauli-expectation inversion, projected to the PSD cone; MLE seed."""
    n = table.num_qubits
    dim = 2**n
    paulis = {
        "I": np.eye(2, dtype=complex),
        "X": np.array([[0, 1], [1, 0]], dtype=complex),
        "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
        "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    }
    totals = table.counts.sum(axis=1)
    freqs = table.counts / np.where(totals > 0, totals, 1.0)[:, None]
    rho = np.eye(dim, dtype=complex) / dim
    for string in itertools.product("IXYZ", repeat=n):
        if all(s == "I" for s in string):
            continue
        support = [q for q, s in enumerate(string) if s != "I"]
        estimates = []
        for k, setting in enumerate(table.settings):
            if all(setting[q] == string[q] for q in support):
                signs = np.array(
                    [
                        (-1) ** sum((o >> (n - 1 - q)) & 1 for q in support)
                        for o in range(dim)
                    ]
                )
                estimates.append(float(freqs[k] @ signs))
        if not estimates:
            continue
        op = np.array([[1.0 + 0j]])
        for s in string:
            op = np.kron(op, paulis[s])
        rho = rho + (np.mean(estimates) / dim) * op
    # clip to the PSD cone
    vals, vecs = np.linalg.eigh(rho)
    vals = np.clip(vals, 1e-6, None)
    rho = (vecs * vals) @ vecs.conj().T
    return rho / np.trace(rho).real


def measurement_rank(settings: Sequence[tuple[str, ...]], dim: int) -> int:
    rows = []
    for setting in settings:
        for proj in setting_projectors(setting):
            rows.append(proj.reshape(-1))
    return int(np.linalg.matrix_rank(np.array(rows), tol=1e-9))


def mle_reconstruct(
    table: CountsTable,
    target: PureState | None = None,
    max_iterations: int = 2000,
    improvement_tol: float = 1e-9,
) -> MLEResult:
    """Most likely physical density matrix under the Poisson count model."""
    n = table.num_qubits
    dim = 2**n
    if measurement_rank(table.settings, dim) < dim * dim:
        raise ValueError("settings are not informationally complete")
    projectors = np.concatenate(
        [setting_projectors(s) for s in table.settings], axis=0
    )
    counts = table.counts.reshape(-1)
    exposure = table.exposure

    lower = np.tril(np.ones((dim, dim), dtype=bool))

    def rho_of(t_mat: np.ndarray) -> np.ndarray:
        rho = t_mat @ t_mat.conj().T
        return rho / np.trace(rho).real

    def log_likelihood(rho: np.ndarray) -> float:
        probs = np.clip(np.real(np.einsum("kij,ji->k", projectors, rho)), 1e-15, None)
        mu = exposure * probs
        return float(np.sum(counts * np.log(mu) - mu))

    def gradient(t_mat: np.ndarray, rho: np.ndarray) -> np.ndarray:
        probs = np.clip(np.real(np.einsum("kij,ji->k", projectors, rho)), 1e-15, None)
        weights = counts / probs - exposure
        grad_rho = np.einsum("k,kij->ij", weights, projectors)
        trace_t = np.trace(t_mat @ t_mat.conj().T).real
        mean_shift = np.real(np.trace(grad_rho @ rho))
        grad_t = (2.0 / trace_t) * (grad_rho @ t_mat - mean_shift * t_mat)
        return np.where(lower, grad_t, 0.0)

    seed = _linear_inversion(table)
    t_mat = np.linalg.cholesky(seed + 1e-9 * np.eye(dim))  # lower triangular
    rho = rho_of(t_mat)
    ll = log_likelihood(rho)

    # Barzilai-Borwein step guess, halved until the likelihood improves.
    # The stopping gain is relative: count-scale likelihoods sit at ~1e6,
    # where an absolute 1e-9 window is finer than float64 can resolve.
    step: float | None = None
    prev_t: np.ndarray | None = None
    prev_grad: np.ndarray | None = None
    converged = False
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        grad_t = gradient(t_mat, rho)
        norm = np.linalg.norm(grad_t)
        if norm < 1e-14:
            converged = True
            break
        if prev_t is not None:
            dt = (t_mat - prev_t).reshape(-1)
            dg = (grad_t - prev_grad).reshape(-1)
            curvature = -np.real(np.vdot(dt, dg))
            if curvature > 1e-30:
                step = float(np.real(np.vdot(dt, dt)) / curvature)
        if step is None:
            step = 1.0 / norm
        prev_t, prev_grad = t_mat, grad_t
        trial = abs(step)
        improved = False
        for _ in range(60):
            candidate = t_mat + trial * grad_t
            cand_rho = rho_of(candidate)
            cand_ll = log_likelihood(cand_rho)
            if cand_ll > ll:
                improved = True
                break
            trial /= 2.0
        if not improved:
            converged = True
            break
        gain = cand_ll - ll
        t_mat, rho, ll = candidate, cand_rho, cand_ll
        if gain < improvement_tol * max(abs(ll), 1.0):
            converged = True
            break

    rho_hat = DensityMatrix.from_matrix(rho)
    fid = fidelity_pure(rho_hat, target) if target is not None else None
    return MLEResult(
        rho_hat=rho_hat,
        log_likelihood=ll,
        fidelity_to_target=fid,
        error_bars={},
        converged=converged,
        iterations=iterations,
    )


def monte_carlo_errors(
    table: CountsTable,
    n_trials: int,
    extract: Callable[[CountsTable], float],
    rng: np.random.Generator,
) -> float:
    """Std-dev of `extract` over Poisson resamplings of the counts."""
    values = []
    for _ in range(n_trials):
        resampled = CountsTable(
            table.settings, rng.poisson(table.counts), table.exposure
        )
        values.append(extract(resampled))
    return float(np.std(values))
