"""End-to-end delegated execution of lowered circuits.

The register holds the n working wires plus four block slots.  Every
delegated gate opens with the same server action, one uniform block
J = H(slot 1) . CZ(slot 2, slot 3) . Rz(slot 4), applied to freshly
padded slot qubits:

* h gate: the working qubit rides slot 1; slots 2-4 are dummies.
* cz gate: the working pair rides slots 2 and 3 (first operand in
  slot 2); slots 1 and 4 are dummies.
* rz gate: slots 1-3 are dummies and slot 4 becomes the transit wire
  for the digit blocks; the first round (m=1, k=1) rides the block
  message and the remaining rounds go out as single-wire messages.

Slot pads are one-time keys drawn per (gate, slot) or (gate, round)
label, so the quantum payload of every outbound message is exactly
maximally mixed to the server.  After each gate the client decrypts the
slots through the composed key update, measures them back to |0>, and
the slots are ready for the next gate.  Measurements in the circuit are
performed locally by the client and never delegated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import paulis
from . import statevec as sv
from .angles import AngleDigits, digitize, precision_bits
from .circuits import Circuit
from .rzprotocol import (
    PI,
    RoundKeys,
    digit_block_plan,
    round_pad_ops,
    round_unpad_ops,
)
from .session import ProtocolError, Session, Transcript
from .statevec import Gate, GateOp

N_SLOTS = 4

# gates the protocol can delegate (measure is handled client-side)
DELEGABLE = frozenset({Gate.H, Gate.CZ, Gate.RZ})


class UnsupportedGateError(ProtocolError):
    """Circuit contains a gate outside {h, cz, rz, measure}."""


class RegisterCapacityError(ProtocolError):
    """Working register plus block slots exceeds the simulator cap."""


class BlindServer:
    """The fixed tag dispatch; these are the only gates the server runs."""

    def __init__(self, n_working: int, n_digits: int):
        self.slot_wires = tuple(range(n_working, n_working + N_SLOTS))
        self.n_digits = n_digits

    def ops_for(self, tag: dict) -> list[GateOp]:
        s1, s2, s3, s4 = self.slot_wires
        kind = tag.get("kind")
        if kind == "block":
            k = tag.get("k")
            if k is None:
                # one-shot rotation covering the whole ladder budget
                angle = PI - PI / 2**self.n_digits
            elif int(k) == 1:
                angle = PI / 2
            else:
                raise ProtocolError(f"block message cannot carry round {k}")
            return [sv.h(s1), sv.cz(s2, s3), sv.rz(angle, s4)]
        if kind == "round":
            k = int(tag.get("k", 0))
            if not 1 <= k <= self.n_digits:
                raise ProtocolError(
                    f"round index {k} outside 1..{self.n_digits}"
                )
            return [sv.rz(PI / 2**k, s4)]
        raise ProtocolError(f"server cannot satisfy tag {tag}")


@dataclass(frozen=True)
class ProtocolResult:
    state: sv.Statevector
    working_state: sv.Statevector
    transcript: Transcript
    digits: dict[int, AngleDigits] = field(default_factory=dict)
    outcomes: dict[int, int] = field(default_factory=dict)


class _Run:
    def __init__(self, circuit: Circuit, epsilon: float, seed: int,
                 extractor: str, overrides, disable_pads: bool):
        self.n = circuit.n_qubits
        if self.n + N_SLOTS > sv.MAX_QUBITS:
            raise RegisterCapacityError(
                f"{self.n} working qubits need {self.n + N_SLOTS} wires; "
                f"the cap is {sv.MAX_QUBITS}"
            )
        self.n_digits = precision_bits(epsilon)
        self.slots = tuple(range(self.n, self.n + N_SLOTS))
        self.extractor = extractor
        self.session = Session(self.n + N_SLOTS, seed, epsilon=epsilon,
                               overrides=overrides,
                               disable_pads=disable_pads)
        self.server = BlindServer(self.n, self.n_digits)
        self.digits: dict[int, AngleDigits] = {}
        self.outcomes: dict[int, int] = {}

    # -- slot plumbing ----------------------------------------------------

    def _dummy_slot_key(self, gate_index: int, slots):
        labels = [f"gate{gate_index}:slot{self.slots.index(s) + 1}"
                  for s in slots]
        key = paulis.PauliKey(tuple(
            self.session.keys.pad_pair(lbl) for lbl in labels
        ))
        return key, labels

    def _reset_slots(self, gate_index: int) -> None:
        # wipe whatever the block left behind; slots come back as |0>
        for i, slot in enumerate(self.slots, start=1):
            out = self.session.client_measure(
                slot, f"gate{gate_index}:reset:slot{i}"
            )
            if out:
                self.session.client_apply([sv.x(slot)])

    # -- gate delegation --------------------------------------------------

    def _delegate_block_gate(self, gate_index: int, swap_map: dict) -> None:
        """h and cz: ride the uniform block, one round trip."""
        sess = self.session
        for q, slot in swap_map.items():
            sess.client_apply([sv.swap(q, slot)])
        key, labels = self._dummy_slot_key(gate_index, self.slots)
        sess.client_apply(paulis.pad_ops(key, qubits=self.slots))
        tag = {"kind": "block"}
        sess.round_trip(self.slots, tag, self.server.ops_for(tag),
                        pad_labels=tuple(zip(self.slots, labels)))
        upd = paulis.key_update_circuit([sv.h(0), sv.cz(1, 2)], key)
        sess.client_apply(paulis.unpad_ops(upd.new_key, qubits=self.slots))
        for q, slot in swap_map.items():
            sess.client_apply([sv.swap(q, slot)])
        self._reset_slots(gate_index)

    def _delegate_rz(self, gate_index: int, op: GateOp) -> None:
        sess = self.session
        q = op.qubits[0]
        transit = self.slots[3]
        d = digitize(op.angle, self.n_digits, self.extractor)
        self.digits[gate_index] = d
        if d.parity:
            sess.client_apply([sv.z(q)])
        for m in range(1, self.n_digits + 1):
            s_m = d.nonzero_flags[m - 1]
            q_m = d.negative_flags[m - 1]
            round_label = {
                k: f"gate{gate_index}:m{m}:k{k}" for k in range(1, m + 1)
            }
            keys = RoundKeys(tuple(
                sess.keys.pad_pair(round_label[k]) for k in range(1, m + 1)
            ))
            plan = digit_block_plan(s_m, q_m, keys)
            if plan.initial_swap:
                sess.client_apply([sv.swap(transit, q)])
            for r in plan.rounds:
                if m == 1:
                    # the opening round rides the uniform block message
                    dummies = self.slots[:3]
                    key, labels = self._dummy_slot_key(gate_index, dummies)
                    sess.client_apply(paulis.pad_ops(key, qubits=dummies))
                    sess.client_apply(round_pad_ops(r, transit))
                    tag = {"kind": "block", "k": 1}
                    sess.round_trip(
                        self.slots, tag, self.server.ops_for(tag),
                        pad_labels=tuple(zip(dummies, labels))
                        + ((transit, round_label[1]),),
                    )
                    sess.client_apply(round_unpad_ops(r, transit))
                    upd = paulis.key_update_circuit(
                        [sv.h(0), sv.cz(1, 2)], key
                    )
                    sess.client_apply(
                        paulis.unpad_ops(upd.new_key, qubits=dummies)
                    )
                else:
                    sess.client_apply(round_pad_ops(r, transit))
                    tag = {"kind": "round", "k": r.index}
                    sess.round_trip(
                        (transit,), tag, self.server.ops_for(tag),
                        pad_labels=((transit, round_label[r.index]),),
                    )
                    sess.client_apply(round_unpad_ops(r, transit))
                if r.swap_after:
                    sess.client_apply([sv.swap(transit, q)])
        self._reset_slots(gate_index)

    # -- driver -----------------------------------------------------------

    def run(self, circuit: Circuit) -> ProtocolResult:
        s1, s2, s3, _ = self.slots
        for j, op in enumerate(circuit.ops):
            start = len(self.session.transcript.messages)
            if op.kind is Gate.MEASURE:
                wire = op.qubits[0]
                self.outcomes[j] = self.session.client_measure(
                    wire, f"gate{j}:measure:q{wire}"
                )
            elif op.kind is Gate.H:
                self._delegate_block_gate(j, {op.qubits[0]: s1})
            elif op.kind is Gate.CZ:
                self._delegate_block_gate(
                    j, {op.qubits[0]: s2, op.qubits[1]: s3}
                )
            elif op.kind is Gate.RZ:
                self._delegate_rz(j, op)
            else:
                raise UnsupportedGateError(
                    f"'{op.kind.value}' is not delegable; "
                    "lower the circuit first"
                )
            self.session.mark_gate(j, op.kind.value, start)
        state = self.session.state()
        working = state
        for slot in reversed(self.slots):
            working = sv.drop_qubit(working, slot, 0)
        return ProtocolResult(state, working, self.session.finish(),
                              self.digits, self.outcomes)


def run_protocol(circuit: Circuit, epsilon: float, seed: int, *,
                 extractor: str = "floor", overrides=None,
                 disable_pads: bool = False) -> ProtocolResult:
    """Run a lowered circuit through the delegation protocol.

    The server starts from |0...0>; state preparation belongs to the
    circuit.  ``overrides`` pins individual pad labels (audit hook) and
    ``disable_pads`` turns every pad off (negative control); neither
    affects the working-register result.
    """
    for op in circuit.ops:
        if op.kind not in DELEGABLE and op.kind is not Gate.MEASURE:
            raise UnsupportedGateError(
                f"'{op.kind.value}' is not delegable; lower the circuit first"
            )
    return _Run(circuit, epsilon, seed, extractor, overrides,
                disable_pads).run(circuit)
