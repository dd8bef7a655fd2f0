"""Session plumbing shared by every interactive run: key material, the
client/server message channel, and the replayable transcript.

Randomness is label-addressed: ``KeySource`` hashes (seed, label) into an
independent generator per draw, so the value bound to a label never depends
on draw order.  That is what lets the blindness auditor override a single
pad and re-run the protocol with every other draw unchanged.

The channel is in-process: a round trip snapshots the register, applies
the server's gates to the shared buffer, and snapshots again.  Snapshots
are simulation artifacts (a real channel would carry the qubits themselves)
kept so transcripts can be audited after the fact.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from . import statevec as sv
from .statevec import GateOp, Statevector

CLIENT_TO_SERVER = "client->server"
SERVER_TO_CLIENT = "server->client"


class ProtocolError(Exception):
    """A message or request outside the protocol's fixed vocabulary."""


class KeySource:
    """Deterministic per-label bits, overridable one label at a time."""

    def __init__(self, seed: int, overrides=None, disable_pads: bool = False):
        self.seed = int(seed)
        self.overrides = {k: tuple(v) for k, v in (overrides or {}).items()}
        self.disable_pads = disable_pads
        self.log: list[tuple[str, object]] = []

    def _rng(self, label: str) -> np.random.Generator:
        raw = hashlib.blake2b(
            f"{self.seed}/{label}".encode(), digest_size=8
        ).digest()
        return np.random.default_rng(int.from_bytes(raw, "little"))

    def pad_pair(self, label: str) -> tuple[int, int]:
        """One (x_bit, z_bit) pad draw; zeroed when pads are disabled."""
        if label in self.overrides:
            pair = self.overrides[label]
        elif self.disable_pads:
            pair = (0, 0)
        else:
            bits = self._rng("pad/" + label).integers(0, 2, size=2)
            pair = (int(bits[0]), int(bits[1]))
        self.log.append((label, pair))
        return pair

    def measure_u(self, label: str) -> float:
        """Uniform draw in [0, 1) for a measurement; never disabled."""
        u = float(self._rng("u/" + label).random())
        self.log.append((label, u))
        return u


@dataclass(frozen=True)
class Message:
    """One direction of one round trip.

    ``snapshot`` is the full register at transmission time; ``transmitted``
    lists the wires actually on the channel.  ``pad_labels`` maps each
    transmitted wire to the key label currently protecting it (outbound
    only; used by the mixedness audit).
    """

    direction: str
    tag: dict | None
    transmitted: tuple[int, ...]
    snapshot: np.ndarray = field(repr=False)
    pad_labels: tuple[tuple[int, str], ...] = ()

    def tag_json(self) -> str:
        return json.dumps(self.tag, sort_keys=True, separators=(",", ":"))

    def payload_density(self) -> sv.DensityMatrix:
        """Reduced state of the transmitted wires (what the channel carries)."""
        n = int(self.snapshot.size).bit_length() - 1
        state = Statevector(n, self.snapshot)
        return sv.reduced_density(state, self.transmitted)


@dataclass(frozen=True)
class GateMarker:
    """Delegation boundaries of one circuit gate inside the message list."""

    gate_index: int
    kind: str
    message_start: int
    message_end: int


@dataclass
class Transcript:
    seed: int
    epsilon: float | None
    n_qubits: int
    messages: list[Message] = field(default_factory=list)
    markers: list[GateMarker] = field(default_factory=list)
    client_op_kinds: list[str] = field(default_factory=list)
    server_op_kinds: list[str] = field(default_factory=list)
    complete: bool = False

    def round_trips(self) -> int:
        return sum(1 for m in self.messages if m.direction == CLIENT_TO_SERVER)

    def digest(self) -> str:
        """Canonical sha256 of the whole exchange; replays must match it."""
        h = hashlib.sha256()
        head = f"{self.seed}|{self.epsilon!r}|{self.n_qubits}|{self.complete}"
        h.update(head.encode())
        for m in self.messages:
            h.update(m.direction.encode())
            h.update(m.tag_json().encode())
            h.update(repr(m.transmitted).encode())
            h.update(m.snapshot.tobytes())
        for mk in self.markers:
            h.update(
                f"{mk.gate_index}:{mk.kind}:{mk.message_start}:{mk.message_end}".encode()
            )
        h.update(",".join(self.client_op_kinds).encode())
        h.update(b"|")
        h.update(",".join(self.server_op_kinds).encode())
        return h.hexdigest()


class Session:
    """One protocol run: register buffer, key source, growing transcript."""

    def __init__(self, n_qubits: int, seed: int, *, epsilon: float | None = None,
                 overrides=None, disable_pads: bool = False):
        if not 1 <= n_qubits <= sv.MAX_QUBITS:
            raise ValueError(f"register must hold 1..{sv.MAX_QUBITS} qubits")
        self.n_qubits = n_qubits
        self.amps = np.zeros(2**n_qubits, dtype=complex)
        self.amps[0] = 1.0
        self.keys = KeySource(seed, overrides, disable_pads)
        self.transcript = Transcript(seed=int(seed), epsilon=epsilon,
                                     n_qubits=n_qubits)

    def state(self) -> Statevector:
        return Statevector(self.n_qubits, self.amps.copy())

    def load_state(self, state: Statevector) -> None:
        if state.n_qubits != self.n_qubits:
            raise ValueError("register size mismatch")
        self.amps = state.amps.copy()

    def client_apply(self, ops) -> None:
        for op in ops:
            sv._apply_op(self.amps, op)
            self.transcript.client_op_kinds.append(op.kind.value)

    def client_measure(self, wire: int, label: str) -> int:
        if not 0 <= wire < self.n_qubits:
            raise ProtocolError(f"wire {wire} out of range")
        u = self.keys.measure_u(label)
        state, outcome = sv.measure_qubit(
            Statevector(self.n_qubits, self.amps.copy()), wire, u=u
        )
        self.amps = state.amps.copy()
        self.transcript.client_op_kinds.append("measure")
        return outcome

    def round_trip(self, transmitted, tag: dict, server_ops,
                   pad_labels=()) -> None:
        """Send ``transmitted`` wires with ``tag``; server applies its gates."""
        transmitted = tuple(transmitted)
        self.transcript.messages.append(Message(
            CLIENT_TO_SERVER, dict(tag), transmitted, self.amps.copy(),
            tuple(pad_labels),
        ))
        for op in server_ops:
            sv._apply_op(self.amps, op)
            self.transcript.server_op_kinds.append(op.kind.value)
        self.transcript.messages.append(Message(
            SERVER_TO_CLIENT, None, transmitted, self.amps.copy(),
        ))

    def mark_gate(self, gate_index: int, kind: str, message_start: int) -> None:
        self.transcript.markers.append(GateMarker(
            gate_index, kind, message_start, len(self.transcript.messages)
        ))

    def finish(self) -> Transcript:
        self.transcript.complete = True
        return self.transcript
