"""Adaptive measurement patterns on blind cluster states.

A pattern lists measured qubits in temporal order.  Each step carries a
target rotation phi and two dependency sets.  With interpreted outcomes
s'_i = s_i xor r_i, the instructed angle is

    delta_j = (-1)^{parity over x_deps} phi_j  +  theta_j
              + pi * (r_j xor parity over z_deps),

which compensates the hiding rotation theta_j, reference-frame sign flips,
and pending pi-type byproducts in one shot.  Output qubits carry their own
dependency sets for the final Pauli correction and, for some configurations,
a fixed local Clifford frame and a client-side unwind of never-measured
hiding phases.

Dependency sets here were fixed by byproduct flow along each configuration's
measurement order and are validated by the determinism and oracle-equivalence
test suites, not trusted.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .angles import Angle8
from .clusters import BlindPhases, ClusterConfig, build_blind_cluster
from .quantum import (
    HADAMARD,
    IMPOSSIBLE_BRANCH,
    PAULI_X,
    PAULI_Z,
    PureState,
    phase_gate,
    rx,
    rz,
)

PAULI_AXES = ("X", "Y", "Z")


@dataclass(frozen=True)
class MeasurementStep:
    qubit: int
    phi: Angle8 = Angle8(0)
    x_deps: frozenset[int] = frozenset()
    z_deps: frozenset[int] = frozenset()
    pauli_override: str | None = None

    def __post_init__(self) -> None:
        if self.pauli_override is not None and self.pauli_override not in PAULI_AXES:
            raise ValueError(f"unknown Pauli override {self.pauli_override!r}")


@dataclass(frozen=True)
class MeasurementPattern:
    steps: tuple[MeasurementStep, ...]
    outputs: tuple[int, ...]
    config: ClusterConfig | None = None
    output_x_deps: Mapping[int, frozenset[int]] = field(default_factory=dict)
    output_z_deps: Mapping[int, frozenset[int]] = field(default_factory=dict)
    # fixed single-qubit Clifford applied to an output after Pauli correction
    frame: Mapping[int, str] = field(default_factory=dict)
    # output qubits whose hiding phase is unwound client-side (never measured)
    theta_unwind: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        measured = [s.qubit for s in self.steps]
        if len(set(measured)) != len(measured):
            raise ValueError("a qubit is measured more than once")
        qubits = set(measured) | set(self.outputs)
        if qubits != set(range(1, len(qubits) + 1)):
            raise ValueError("steps and outputs must partition 1..n")
        if set(measured) & set(self.outputs):
            raise ValueError("outputs overlap measured qubits")
        seen: set[int] = set()
        for step in self.steps:
            if not (step.x_deps <= seen and step.z_deps <= seen):
                raise ValueError(
                    f"step for qubit {step.qubit} depends on a later measurement"
                )
            seen.add(step.qubit)
        for q in self.outputs:
            deps = self.output_x_deps.get(q, frozenset()) | self.output_z_deps.get(
                q, frozenset()
            )
            if not deps <= seen:
                raise ValueError(f"output {q} depends on an unmeasured qubit")

    @property
    def num_qubits(self) -> int:
        return len(self.steps) + len(self.outputs)

    def step_for(self, qubit: int) -> MeasurementStep:
        for step in self.steps:
            if step.qubit == qubit:
                return step
        raise KeyError(qubit)


_FRAME_GATES = {"H": HADAMARD}


def adapt_angle(
    step: MeasurementStep,
    theta_j: Angle8,
    r_j: int,
    prior_outcomes: Mapping[int, int],
) -> Angle8:
    """Instructed angle delta_j for a step, given interpreted prior outcomes."""
    if step.pauli_override is not None:
        raise ValueError("Pauli-override steps carry no equatorial instruction")
    try:
        x_par = sum(prior_outcomes[q] for q in step.x_deps) % 2
        z_par = sum(prior_outcomes[q] for q in step.z_deps) % 2
    except KeyError as exc:
        raise ValueError(f"dependency on unmeasured qubit {exc.args[0]}") from exc
    delta = step.phi.negate_if(bool(x_par)) + theta_j
    return delta.add_pi((r_j ^ z_par) & 1)


def input_prep_state(prep: str | Angle8) -> PureState:
    """Logical input produced by the first-qubit measurement (outcome 0).

    Pauli X, Y, Z measurements prepare |0>, |+_i>, |+>; an equatorial prep
    at angle phi prepares H Rz(-phi)|+>.
    """
    if prep == "Z":
        return PureState.plus()
    if prep == "X":
        prep = Angle8(0)
    elif prep == "Y":
        prep = Angle8(2)
    if not isinstance(prep, Angle8):
        raise ValueError(f"unknown input preparation {prep!r}")
    vec = HADAMARD @ phase_gate(-prep.radians) @ PureState.plus().amplitudes
    return PureState.from_amplitudes(vec)


def _prep_step(qubit: int, prep: str | Angle8) -> MeasurementStep:
    if prep == "Z":
        return MeasurementStep(qubit, pauli_override="Z")
    if prep == "X":
        prep = Angle8(0)
    elif prep == "Y":
        prep = Angle8(2)
    if not isinstance(prep, Angle8):
        raise ValueError(f"unknown input preparation {prep!r}")
    return MeasurementStep(qubit, phi=prep)


def pattern_for(
    config: ClusterConfig,
    phi: Mapping[int, Angle8] | None = None,
    input_prep: str | Angle8 = "Z",
) -> MeasurementPattern:
    """Measurement order, outputs, and dependency sets for a configuration.

    `phi` assigns target rotations to measured qubits (default 0).  For the
    two linear configurations `input_prep` selects the first measurement:
    a Pauli axis or an equatorial Angle8.
    """
    phi = dict(phi or {})

    def ang(q: int) -> Angle8:
        return phi.get(q, Angle8(0))

    fs = frozenset
    if config is ClusterConfig.LINEAR_RIGHT:
        prep = _prep_step(1, input_prep)
        z_prep = prep.pauli_override == "Z"
        steps = (
            prep,
            MeasurementStep(
                2, ang(2), x_deps=fs() if z_prep else fs({1}),
                z_deps=fs({1}) if z_prep else fs(),
            ),
            MeasurementStep(
                3, ang(3), x_deps=fs({2}), z_deps=fs() if z_prep else fs({1})
            ),
        )
        return MeasurementPattern(
            steps, (4,), config,
            output_x_deps={4: fs({3})}, output_z_deps={4: fs({2})},
        )
    if config is ClusterConfig.LINEAR_LEFT:
        prep = _prep_step(4, input_prep)
        z_prep = prep.pauli_override == "Z"
        steps = (
            prep,
            MeasurementStep(
                3, ang(3), x_deps=fs() if z_prep else fs({4}),
                z_deps=fs({4}) if z_prep else fs(),
            ),
            MeasurementStep(
                2, ang(2), x_deps=fs({3}), z_deps=fs() if z_prep else fs({4})
            ),
        )
        return MeasurementPattern(
            steps, (1,), config,
            output_x_deps={1: fs({2})}, output_z_deps={1: fs({3})},
        )
    if config is ClusterConfig.HORSESHOE:
        steps = (MeasurementStep(2, ang(2)), MeasurementStep(3, ang(3)))
        return MeasurementPattern(
            steps, (1, 4), config,
            output_x_deps={1: fs({2}), 4: fs({3})},
            frame={1: "H", 4: "H"},
        )
    if config is ClusterConfig.ROTATED_HORSESHOE:
        steps = (MeasurementStep(1, ang(1)), MeasurementStep(4, ang(4)))
        return MeasurementPattern(
            steps, (2, 3), config,
            output_x_deps={2: fs({1}), 3: fs({4})},
            output_z_deps={2: fs({4}), 3: fs({1})},
            theta_unwind=fs({2, 3}),
        )
    if config is ClusterConfig.STAIRCASE:
        steps = (
            MeasurementStep(2, ang(2)),
            MeasurementStep(3, ang(3)),
            MeasurementStep(1, ang(1), x_deps=fs({2})),
        )
        return MeasurementPattern(
            steps, (4,), config, output_x_deps={4: fs({1, 3})}
        )
    if config is ClusterConfig.TRIANGLE:
        steps = (
            MeasurementStep(2, ang(2)),
            MeasurementStep(3, ang(3), z_deps=fs({2})),
            MeasurementStep(1, ang(1), x_deps=fs({2})),
            MeasurementStep(4, ang(4), x_deps=fs({3})),
        )
        return MeasurementPattern(steps, (), config)
    raise ValueError(f"unknown configuration {config!r}")


@dataclass(frozen=True)
class BranchRecord:
    outcomes: dict[int, int]
    interpreted: dict[int, int]
    deltas: dict[int, Angle8 | None]
    probability: float
    impossible: bool
    output_state: PureState | None
    corrected_state: PureState | None


def _measure(
    state: PureState, remaining: list[int], qubit: int,
    delta: Angle8 | None, override: str | None, bit: int,
) -> tuple[float, PureState | None]:
    pos = remaining.index(qubit) + 1
    if override is not None:
        return state.measure_pauli(pos, override, bit)
    return state.project_delta(pos, delta.radians, bit)


def correct_output(
    pattern: MeasurementPattern,
    interpreted: Mapping[int, int],
    raw_output: PureState,
    phases: BlindPhases | None = None,
) -> PureState:
    """Client-side correction: theta unwind, Pauli byproducts, Clifford frame."""
    out = raw_output
    outputs = sorted(pattern.outputs)
    for q in pattern.theta_unwind:
        if phases is None:
            raise ValueError("theta unwind requires the hiding phases")
        out = out.apply_single(outputs.index(q) + 1, rz(-phases[q].radians))
    for q in outputs:
        pos = outputs.index(q) + 1
        x_par = sum(interpreted[d] for d in pattern.output_x_deps.get(q, ())) % 2
        z_par = sum(interpreted[d] for d in pattern.output_z_deps.get(q, ())) % 2
        if x_par:
            out = out.apply_single(pos, PAULI_X)
        if z_par:
            out = out.apply_single(pos, PAULI_Z)
    for q, name in pattern.frame.items():
        out = out.apply_single(outputs.index(q) + 1, _FRAME_GATES[name])
    return out


def enumerate_branches(
    state: PureState,
    pattern: MeasurementPattern,
    deltas: Mapping[int, Angle8 | None],
    phases: BlindPhases | None = None,
) -> list[BranchRecord]:
    """All 2^k branches of a fixed (non-adaptive) instruction assignment.

    Zero-probability branches are retained with `impossible=True`."""
    for step in pattern.steps:
        if step.pauli_override is None and deltas.get(step.qubit) is None:
            raise ValueError(f"no instruction for qubit {step.qubit}")
    records: list[BranchRecord] = []

    def walk(idx, state, remaining, prob, outcomes):
        if idx == len(pattern.steps):
            interp = dict(outcomes)
            corrected = None
            if state is not None and pattern.outputs:
                try:
                    corrected = correct_output(pattern, interp, state, phases)
                except ValueError:
                    corrected = None
            records.append(
                BranchRecord(
                    outcomes=dict(outcomes),
                    interpreted=interp,
                    deltas={
                        s.qubit: (None if s.pauli_override else deltas[s.qubit])
                        for s in pattern.steps
                    },
                    probability=prob,
                    impossible=prob < IMPOSSIBLE_BRANCH,
                    output_state=state if pattern.outputs else None,
                    corrected_state=corrected,
                )
            )
            return
        step = pattern.steps[idx]
        for bit in (0, 1):
            if state is None:
                walk(idx + 1, None, remaining, 0.0, {**outcomes, step.qubit: bit})
                continue
            p, rest = _measure(
                state, remaining, step.qubit,
                deltas.get(step.qubit), step.pauli_override, bit,
            )
            nxt = [q for q in remaining if q != step.qubit]
            walk(idx + 1, rest, nxt, prob * p, {**outcomes, step.qubit: bit})

    walk(0, state, list(range(1, pattern.num_qubits + 1)), 1.0, {})
    return records


def enumerate_adaptive(
    state: PureState,
    pattern: MeasurementPattern,
    phases: BlindPhases,
    r: Mapping[int, int],
) -> list[BranchRecord]:
    """All branches of the feed-forward process, with corrected outputs."""
    records: list[BranchRecord] = []

    def walk(idx, state, remaining, prob, outcomes, interpreted, used):
        if idx == len(pattern.steps):
            corrected = None
            if state is not None and pattern.outputs:
                corrected = correct_output(pattern, interpreted, state, phases)
            records.append(
                BranchRecord(
                    outcomes=dict(outcomes),
                    interpreted=dict(interpreted),
                    deltas=dict(used),
                    probability=prob,
                    impossible=prob < IMPOSSIBLE_BRANCH,
                    output_state=state if pattern.outputs else None,
                    corrected_state=corrected,
                )
            )
            return
        step = pattern.steps[idx]
        if step.pauli_override is not None:
            delta = None  # r-masking needs an angle; override outcomes are raw
        else:
            delta = adapt_angle(
                step, phases[step.qubit], r.get(step.qubit, 0), interpreted
            )
        for bit in (0, 1):
            interp_bit = bit ^ (r.get(step.qubit, 0) if delta is not None else 0)
            nxt_out = {**outcomes, step.qubit: bit}
            nxt_int = {**interpreted, step.qubit: interp_bit}
            nxt_used = {**used, step.qubit: delta}
            if state is None:
                walk(idx + 1, None, remaining, 0.0, nxt_out, nxt_int, nxt_used)
                continue
            p, rest = _measure(state, remaining, step.qubit, delta,
                               step.pauli_override, bit)
            nxt_rem = [q for q in remaining if q != step.qubit]
            walk(idx + 1, rest, nxt_rem, prob * p, nxt_out, nxt_int, nxt_used)

    walk(0, state, list(range(1, pattern.num_qubits + 1)), 1.0, {}, {}, {})
    return records


@dataclass(frozen=True)
class MbqcRun:
    """One sampled trajectory of an adaptive pattern."""

    outcomes: dict[int, int]
    interpreted: dict[int, int]
    deltas: dict[int, Angle8 | None]
    probability: float


def run_adaptive(
    state: PureState,
    pattern: MeasurementPattern,
    phases: BlindPhases,
    r: Mapping[int, int],
    rng_seed: int | np.random.Generator = 0,
) -> tuple[MbqcRun, PureState | None]:
    """Sample one adaptive trajectory; deterministic given the seed.

    Returns the run record and the byproduct-corrected output state (None
    when every qubit is measured)."""
    rng = (
        rng_seed
        if isinstance(rng_seed, np.random.Generator)
        else np.random.default_rng(rng_seed)
    )
    remaining = list(range(1, pattern.num_qubits + 1))
    outcomes: dict[int, int] = {}
    interpreted: dict[int, int] = {}
    used: dict[int, Angle8 | None] = {}
    prob = 1.0
    for step in pattern.steps:
        if step.pauli_override is not None:
            delta = None
        else:
            delta = adapt_angle(
                step, phases[step.qubit], r.get(step.qubit, 0), interpreted
            )
        p0, rest0 = _measure(state, remaining, step.qubit, delta,
                             step.pauli_override, 0)
        bit = 0 if rng.random() < p0 else 1
        if bit == 0:
            p, rest = p0, rest0
        else:
            p, rest = _measure(state, remaining, step.qubit, delta,
                               step.pauli_override, 1)
        if rest is None:
            raise RuntimeError("sampled an impossible branch")
        outcomes[step.qubit] = bit
        interpreted[step.qubit] = bit ^ (r.get(step.qubit, 0) if delta is not None else 0)
        used[step.qubit] = delta
        prob *= p
        state = rest
        remaining.remove(step.qubit)
    run = MbqcRun(outcomes, interpreted, used, prob)
    if not pattern.outputs:
        return run, None
    return run, correct_output(pattern, interpreted, state, phases)


def circuit_oracle(
    config: ClusterConfig,
    phi: Mapping[int, Angle8],
    input_prep: str | Angle8 = "Z",
) -> PureState:
    """Brute-force circuit-model reference for each configuration's output.

    Every expression below is built from plain gate algebra, independent of
    the measurement engine, so the two can cross-check each other.
    """
    phi = {q: a for q, a in phi.items()}

    def ang(q: int) -> float:
        return phi.get(q, Angle8(0)).radians

    plus = PureState.plus().amplitudes
    cz = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)

    if config is ClusterConfig.LINEAR_RIGHT:
        psi_in = input_prep_state(input_prep).amplitudes
        out = rx(-ang(3)) @ rz(-ang(2)) @ psi_in
        return PureState.from_amplitudes(out)
    if config is ClusterConfig.LINEAR_LEFT:
        psi_in = input_prep_state(input_prep).amplitudes
        out = rx(-ang(2)) @ rz(-ang(3)) @ psi_in
        return PureState.from_amplitudes(out)
    if config is ClusterConfig.HORSESHOE:
        out = np.kron(phase_gate(-ang(2)), phase_gate(-ang(3))) @ cz @ np.kron(plus, plus)
        return PureState.from_amplitudes(out)
    if config is ClusterConfig.ROTATED_HORSESHOE:
        wire = lambda a: HADAMARD @ phase_gate(-a) @ plus
        out = cz @ np.kron(wire(ang(1)), wire(ang(4)))
        return PureState.from_amplitudes(out)
    if config is ClusterConfig.STAIRCASE:
        pre = np.kron(HADAMARD @ phase_gate(-ang(2)), HADAMARD @ phase_gate(-ang(3))) @ cz @ np.kron(plus, plus)
        bra = np.array([1.0, np.exp(1j * ang(1))]).conj() / math.sqrt(2)
        out = np.tensordot(bra, pre.reshape(2, 2), axes=([0], [0]))
        return PureState.from_amplitudes(out / np.linalg.norm(out))
    if config is ClusterConfig.TRIANGLE:
        # pre-readout state on qubits (1,4) after ideally measuring 2 and 3
        ea, eb = np.exp(-1j * ang(2)), np.exp(-1j * ang(3))
        vec = np.array(
            [
                (1 + ea) + eb * (1 - ea),
                (1 + ea) - eb * (1 - ea),
                (1 - ea) - eb * (1 + ea),
                (1 - ea) + eb * (1 + ea),
            ],
            dtype=complex,
        )
        return PureState.from_amplitudes(vec / np.linalg.norm(vec))
    raise ValueError(f"unknown configuration {config!r}")


def lc_frame_instruction(qubit: int, delta: Angle8) -> Angle8:
    """Map a triangle-frame instruction onto the linear cluster.

    Absorbing the local-complementation unitary into the measurements shifts
    qubits 1 and 3 by pi/2 and leaves qubit 4 alone.  Qubit 2 sits in the
    sqrt(X) frame: its conjugated basis stays on the equator only for
    delta in {0, pi}, so anything else is rejected: blindness cannot be
    guaranteed for such a step.
    """
    if qubit in (1, 3):
        return delta + Angle8(2)
    if qubit == 4:
        return delta
    if qubit == 2:
        if delta.eighths in (0, 4):
            return delta
        raise ValueError(
            "triangle-frame measurement on qubit 2 at "
            f"{delta!r} is not expressible as an equatorial basis"
        )
    raise ValueError(f"no qubit {qubit} in the four-qubit family")


def pattern_to_json(pattern: MeasurementPattern) -> str:
    doc = {
        "config": pattern.config.value if pattern.config else None,
        "steps": [
            {
                "qubit": s.qubit,
                "phi_eighths": s.phi.eighths,
                "x_deps": sorted(s.x_deps),
                "z_deps": sorted(s.z_deps),
                "pauli_override": s.pauli_override,
            }
            for s in pattern.steps
        ],
        "outputs": sorted(pattern.outputs),
        "output_x_deps": {str(q): sorted(v) for q, v in pattern.output_x_deps.items()},
        "output_z_deps": {str(q): sorted(v) for q, v in pattern.output_z_deps.items()},
        "frame": dict(pattern.frame),
        "theta_unwind": sorted(pattern.theta_unwind),
    }
    return json.dumps(doc, sort_keys=True)


def pattern_from_json(text: str) -> MeasurementPattern:
    doc = json.loads(text)
    steps = tuple(
        MeasurementStep(
            s["qubit"],
            Angle8(s["phi_eighths"]),
            frozenset(s["x_deps"]),
            frozenset(s["z_deps"]),
            s.get("pauli_override"),
        )
        for s in doc["steps"]
    )
    return MeasurementPattern(
        steps,
        tuple(doc["outputs"]),
        ClusterConfig(doc["config"]) if doc.get("config") else None,
        {int(q): frozenset(v) for q, v in doc.get("output_x_deps", {}).items()},
        {int(q): frozenset(v) for q, v in doc.get("output_z_deps", {}).items()},
        {int(q): v for q, v in doc.get("frame", {}).items()},
        frozenset(doc.get("theta_unwind", ())),
    )


def cluster_state_for(config: ClusterConfig, phases: BlindPhases) -> PureState:
    return build_blind_cluster(config.graph, phases)
