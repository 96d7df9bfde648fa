"""The delegation protocol: a client that knows (theta, r, phi) talks to a
server that holds qubits and measures on instruction.

Wire format is newline-delimited JSON, one message per line:

    {"seq": int, "type": str, "body": {...}}

with amplitudes as [re, im] pairs of 64-bit floats and angles as integer
eighth-turns.  The same ClientSession/ServerSession state machines drive both
the in-process transport and the TCP transport, so transcripts differ only in
how the bytes travel.

The transfer of qubit amplitudes on the wire is a simulation artifact: the
server's *knowledge* is modeled by the r-averaged density matrices fed to the
blindness analyzer, never by the raw amplitude payloads.
"""
from __future__ import annotations

import json
import socket
import socketserver
import threading
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .angles import Angle8
from .blindness import Ensemble, pair_fold
from .clusters import BlindPhases, ClusterConfig
from .mbqc import (
    MeasurementPattern,
    adapt_angle,
    correct_output,
    pattern_for,
)
from .quantum import DensityMatrix, PureState


class ProtocolError(Exception):
    """Raised for out-of-order messages, bad ids, or blindness violations."""


@dataclass(frozen=True)
class Message:
    seq: int
    type: str
    body: dict

    def canonical_json(self) -> str:
        doc = {"seq": self.seq, "type": self.type, "body": self.body}
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "Message":
        doc = json.loads(line)
        return cls(int(doc["seq"]), str(doc["type"]), dict(doc["body"]))


def amplitudes_to_wire(psi: PureState) -> list[list[float]]:
    return [[float(a.real), float(a.imag)] for a in psi.amplitudes]


def amplitudes_from_wire(pairs: Sequence[Sequence[float]]) -> PureState:
    return PureState.from_amplitudes([complex(re, im) for re, im in pairs])


@dataclass(frozen=True)
class ClientSecrets:
    """Everything the server must not learn: hiding phases, outcome masks,
    and the target rotations that define the computation."""

    config: ClusterConfig
    phases: BlindPhases
    r: Mapping[int, int]
    phi: Mapping[int, Angle8]
    input_prep: str | Angle8 = "Z"

    @classmethod
    def random(
        cls,
        config: ClusterConfig,
        phi: Mapping[int, Angle8],
        rng: np.random.Generator,
        input_prep: str | Angle8 = "Z",
    ) -> "ClientSecrets":
        phases = BlindPhases.uniform_random(rng, blind_vertices=config.blind_qubits)
        r = {q: int(rng.integers(0, 2)) for q in config.measure_order}
        return cls(config, phases, dict(r), dict(phi), input_prep)


@dataclass
class Transcript:
    """Wire log of one session, in transmission order."""

    messages: list[Message] = field(default_factory=list)

    def record(self, message: Message) -> None:
        self.messages.append(message)

    def server_view(self) -> list[Message]:
        """Everything the server sees: the full wire log (secrets never
        travel; only delta instructions and simulated qubit payloads do)."""
        return list(self.messages)

    def to_ndjson(self) -> str:
        return "\n".join(m.canonical_json() for m in self.messages) + "\n"

    @classmethod
    def from_ndjson(cls, text: str) -> "Transcript":
        t = cls()
        for line in text.strip().splitlines():
            t.record(Message.from_json(line))
        return t


@dataclass(frozen=True)
class SessionResult:
    outcomes: dict[int, int]
    interpreted: dict[int, int]
    deltas: dict[int, Angle8 | None]
    output_state: PureState | None


def validate_blind_structure(pattern: MeasurementPattern, blind: Iterable[int]) -> None:
    """Non-blind measurements that follow blind ones must be Clifford angles.

    A sign flip of a Clifford angle is an addition of pi, which the random
    r-mask hides; for any other angle the flip would leak dependency parities.
    """
    blind = set(blind)
    seen_blind = False
    for step in pattern.steps:
        if step.qubit in blind:
            seen_blind = True
            continue
        if seen_blind and step.pauli_override is None and not step.phi.is_clifford:
            raise ProtocolError(
                f"non-Clifford angle {step.phi!r} on qubit {step.qubit} "
                "after blind measurements"
            )


class ClientSession:
    """Client state machine: emits messages, consumes outcome reports."""

    def __init__(self, secrets: ClientSecrets, enforce_blindness: bool = True):
        self.secrets = secrets
        self.pattern = pattern_for(
            secrets.config, phi=secrets.phi, input_prep=secrets.input_prep
        )
        if enforce_blindness:
            validate_blind_structure(self.pattern, secrets.config.blind_qubits)
        self._seq = 0
        self._step_index = 0
        self._outcomes: dict[int, int] = {}
        self._interpreted: dict[int, int] = {}
        self._deltas: dict[int, Angle8 | None] = {}
        self._pending_qubit: int | None = None
        self._output_state: PureState | None = None
        self._closed = False

    def _msg(self, type_: str, body: dict) -> Message:
        self._seq += 1
        return Message(self._seq, type_, body)

    def prepared_qubits(self) -> list[PureState]:
        """|theta_j> per qubit; nothing is entangled client-side."""
        n = self.pattern.num_qubits
        return [
            PureState.ket_theta(self.secrets.phases[q].radians)
            for q in range(1, n + 1)
        ]

    def start(self) -> list[Message]:
        out = [
            self._msg(
                "session_init",
                {
                    "config": self.secrets.config.value,
                    "qubit_count": self.pattern.num_qubits,
                },
            )
        ]
        for qid, psi in enumerate(self.prepared_qubits(), start=1):
            out.append(
                self._msg(
                    "qubit_transfer",
                    {"qubit_id": qid, "amplitudes": amplitudes_to_wire(psi)},
                )
            )
        out.append(self._next_instruction())
        return out

    def _next_instruction(self) -> Message:
        step = self.pattern.steps[self._step_index]
        self._pending_qubit = step.qubit
        if step.pauli_override is not None:
            return self._msg(
                "measure_instruction",
                {"qubit_id": step.qubit, "pauli": step.pauli_override},
            )
        delta = adapt_angle(
            step,
            self.secrets.phases[step.qubit],
            self.secrets.r.get(step.qubit, 0),
            self._interpreted,
        )
        self._deltas[step.qubit] = delta
        return self._msg(
            "measure_instruction",
            {"qubit_id": step.qubit, "delta_eighths": delta.eighths},
        )

    def on_message(self, message: Message) -> list[Message]:
        if message.type == "outcome_report":
            qid = message.body["qubit_id"]
            if qid != self._pending_qubit:
                raise ProtocolError(
                    f"outcome for qubit {qid}, expected {self._pending_qubit}"
                )
            bit = int(message.body["bit"])
            step = self.pattern.steps[self._step_index]
            self._outcomes[qid] = bit
            mask = self.secrets.r.get(qid, 0) if step.pauli_override is None else 0
            self._interpreted[qid] = bit ^ mask
            self._deltas.setdefault(qid, None)
            self._pending_qubit = None
            self._step_index += 1
            if self._step_index < len(self.pattern.steps):
                return [self._next_instruction()]
            if not self.pattern.outputs:
                self._closed = True
                return [self._msg("session_close", {"status": "ok"})]
            return []  # waiting for output_return
        if message.type == "output_return":
            raw = amplitudes_from_wire(message.body["amplitudes"])
            self._output_state = correct_output(
                self.pattern, self._interpreted, raw, self.secrets.phases
            )
            self._closed = True
            return [self._msg("session_close", {"status": "ok"})]
        raise ProtocolError(f"client cannot handle message type {message.type!r}")

    @property
    def done(self) -> bool:
        return self._closed

    def result(self) -> SessionResult:
        if not self._closed:
            raise ProtocolError("session still in progress")
        return SessionResult(
            dict(self._outcomes),
            dict(self._interpreted),
            dict(self._deltas),
            self._output_state,
        )


def server_entangle(qubits: Sequence[PureState], config: ClusterConfig) -> PureState:
    """Tensor the received qubits and CPhase along the configuration's graph."""
    state = qubits[0]
    for q in qubits[1:]:
        state = state.tensor(q)
    for i, j in sorted(config.graph.edges):
        state = state.apply_cphase(i, j)
    return state


class ServerSession:
    """Server state machine: entangles received qubits, measures on demand."""

    def __init__(self, seed: int | np.random.Generator = 0):
        self._rng = (
            seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        )
        self._seq = 0
        self._config: ClusterConfig | None = None
        self._expected = 0
        self._received: dict[int, PureState] = {}
        self._state: PureState | None = None
        self._remaining: list[int] = []
        self._instructions = 0

    def _msg(self, type_: str, body: dict) -> Message:
        self._seq += 1
        return Message(self._seq, type_, body)

    def handle(self, message: Message) -> list[Message]:
        if message.type == "session_init":
            if self._config is not None:
                raise ProtocolError("duplicate session_init")
            self._config = ClusterConfig(message.body["config"])
            self._expected = int(message.body["qubit_count"])
            return []
        if message.type == "qubit_transfer":
            if self._config is None:
                raise ProtocolError("qubit_transfer before session_init")
            if self._state is not None:
                raise ProtocolError("qubit_transfer after measurements began")
            qid = int(message.body["qubit_id"])
            self._received[qid] = amplitudes_from_wire(message.body["amplitudes"])
            return []
        if message.type == "measure_instruction":
            return self._measure(message)
        if message.type == "session_close":
            return []
        raise ProtocolError(f"server cannot handle message type {message.type!r}")

    def _measure(self, message: Message) -> list[Message]:
        if self._config is None:
            raise ProtocolError("measure_instruction before session_init")
        if self._state is None:
            if set(self._received) != set(range(1, self._expected + 1)):
                raise ProtocolError("measurement requested before all qubits arrived")
            qubits = [self._received[q] for q in range(1, self._expected + 1)]
            self._state = server_entangle(qubits, self._config)
            self._remaining = list(range(1, self._expected + 1))
        qid = int(message.body["qubit_id"])
        if qid not in self._remaining:
            raise ProtocolError(f"unknown or already-measured qubit {qid}")
        pos = self._remaining.index(qid) + 1
        if "pauli" in message.body:
            axis = message.body["pauli"]
            p0, rest0 = self._state.measure_pauli(pos, axis, 0)
        else:
            delta = Angle8(int(message.body["delta_eighths"]))
            p0, rest0 = self._state.project_delta(pos, delta.radians, 0)
        bit = 0 if self._rng.random() < p0 else 1
        if bit == 0:
            rest = rest0
        else:
            if "pauli" in message.body:
                _, rest = self._state.measure_pauli(pos, axis, 1)
            else:
                _, rest = self._state.project_delta(pos, delta.radians, 1)
        if rest is None:
            raise ProtocolError("measured an impossible branch")
        self._state = rest
        self._remaining.remove(qid)
        self._instructions += 1
        out = [self._msg("outcome_report", {"qubit_id": qid, "bit": bit})]
        outputs = sorted(self._config.outputs)
        if self._instructions == len(self._config.measure_order) and outputs:
            out.append(
                self._msg(
                    "output_return",
                    {
                        "qubit_ids": outputs,
                        "amplitudes": amplitudes_to_wire(self._state),
                    },
                )
            )
        return out


def run_session(
    secrets: ClientSecrets,
    server_seed: int = 0,
    enforce_blindness: bool = True,
) -> tuple[Transcript, SessionResult]:
    """Drive one full session over the in-process transport."""
    client = ClientSession(secrets, enforce_blindness=enforce_blindness)
    server = ServerSession(seed=server_seed)
    transcript = Transcript()
    queue = list(client.start())
    for msg in queue:
        transcript.record(msg)
    while queue and not client.done:
        outbound = queue
        queue = []
        replies: list[Message] = []
        for msg in outbound:
            replies.extend(server.handle(msg))
        for reply in replies:
            transcript.record(reply)
            for follow_up in client.on_message(reply):
                transcript.record(follow_up)
                queue.append(follow_up)
    # flush any trailing client messages (e.g. session_close) to the server
    for msg in queue:
        server.handle(msg)
    return transcript, client.result()


class _NdjsonHandler(socketserver.StreamRequestHandler):
    def handle(self) -> None:
        session = ServerSession(seed=self.server.session_seed())  # type: ignore[attr-defined]
        for raw in self.rfile:
            line = raw.decode("utf-8").strip()
            if not line:
                continue
            message = Message.from_json(line)
            for reply in session.handle(message):
                self.wfile.write((reply.canonical_json() + "\n").encode("utf-8"))
            self.wfile.flush()
            if message.type == "session_close":
                break


class TcpServer(socketserver.ThreadingTCPServer):
    """One server process; each connection gets an isolated session."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address: tuple[str, int], seed: int = 0):
        super().__init__(address, _NdjsonHandler)
        self._seed = seed
        self._count = 0
        self._lock = threading.Lock()

    def session_seed(self) -> np.random.Generator:
        with self._lock:
            index = self._count
            self._count += 1
        return np.random.default_rng([self._seed, index])

    def start_background(self) -> threading.Thread:
        thread = threading.Thread(target=self.serve_forever, daemon=True)
        thread.start()
        return thread


def run_session_tcp(
    secrets: ClientSecrets,
    address: tuple[str, int],
    enforce_blindness: bool = True,
    timeout: float = 30.0,
) -> tuple[Transcript, SessionResult]:
    """Drive one full session against a TCP server at `address`."""
    client = ClientSession(secrets, enforce_blindness=enforce_blindness)
    transcript = Transcript()
    with socket.create_connection(address, timeout=timeout) as sock:
        reader = sock.makefile("r", encoding="utf-8")
        writer = sock.makefile("w", encoding="utf-8")

        def send(msg: Message) -> None:
            transcript.record(msg)
            writer.write(msg.canonical_json() + "\n")
            writer.flush()

        pending = list(client.start())
        while pending:
            batch, pending = pending, []
            for msg in batch:
                send(msg)
                if msg.type != "measure_instruction":
                    continue
                # drain replies until the client reacts or the session ends;
                # the last instruction of an output-bearing run is answered
                # by an outcome_report followed by the output_return
                while not client.done and not pending:
                    line = reader.readline()
                    if not line:
                        raise ProtocolError("server closed the connection")
                    reply = Message.from_json(line)
                    transcript.record(reply)
                    pending.extend(client.on_message(reply))
        writer.flush()
    return transcript, client.result()


def transmitted_product_state(phases: BlindPhases, qubit_count: int = 4) -> PureState:
    """The joint state of everything the client transmits: tensor of |theta_j>."""
    state = PureState.ket_theta(phases[1].radians)
    for q in range(2, qubit_count + 1):
        state = state.tensor(PureState.ket_theta(phases[q].radians))
    return state


def conditional_transmitted_state(delta: Angle8, phi: Angle8) -> DensityMatrix:
    """Server's knowledge of one blind qubit given the delta message.

    Averages |theta> over the (theta, r) pairs consistent with
    delta = phi + theta + pi r; with r uniform this is I/2 for every delta.
    """
    rhos = []
    for n in range(8):
        for r in (0, 1):
            if (phi + Angle8(n)).add_pi(r) == delta:
                rhos.append(
                    DensityMatrix.from_pure(PureState.ket_theta(Angle8(n).radians))
                )
    if not rhos:
        raise ValueError("no (theta, r) pair is consistent with this delta")
    return DensityMatrix.mixture(rhos)


def server_view_ensemble(
    states_by_index: Mapping[int, DensityMatrix],
    r_uniform: bool = True,
) -> Ensemble:
    """Server-side ensemble over a hiding-phase sweep, uniform prior.

    `states_by_index` maps the swept grid index n (theta = n pi/4) to the
    state the server holds for that choice.  With uniform r the ensemble is
    folded over pi-partners, which is how the outcome mask enters the
    server's marginal view.
    """
    indices = sorted(states_by_index)
    ensemble = Ensemble(
        states=[states_by_index[n] for n in indices],
        prior=np.full(len(indices), 1.0 / len(indices)),
    )
    if r_uniform:
        if indices != list(range(8)):
            raise ValueError("pair folding needs the full 8-point grid")
        ensemble = pair_fold(ensemble)
    return ensemble
