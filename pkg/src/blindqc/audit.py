"""Blindness checks on protocol transcripts.

What the server learns is exactly the ordered list of classical tags it
receives plus the quantum states crossing the channel.  The auditor
checks both halves:

* view invariance: two circuits with the same delegation skeleton must
  produce byte-identical classical views, whatever their wires, angles,
  or gate choices within a message class;
* payload mixedness: averaged over the one-time pad protecting it, each
  transmitted wire must be exactly maximally mixed at the moment it
  crosses the channel.  The exhaustive mode replays the protocol four
  times per pad label (the twirl is then exact, tolerance 1e-10); the
  sampled mode averages fresh-seed runs and uses a 3/sqrt(N) tolerance.

A negative control reruns the protocol with pads disabled and requires
some transmitted wire to sit far from maximally mixed, guarding against
an auditor that would pass vacuously.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from . import statevec as sv
from .angles import precision_bits
from .circuits import Circuit
from .protocol import run_protocol
from .session import CLIENT_TO_SERVER, Transcript
from .statevec import Gate

AUDIT_VERSION = 1
NEGATIVE_CONTROL_THRESHOLD = 0.4
EXHAUSTIVE_TOLERANCE = 1e-10

ALL_PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1))

# message class each delegable gate produces; measurements send nothing
_SKELETON_CLASS = {Gate.H: "block", Gate.CZ: "block", Gate.RZ: "rz"}


class SkeletonMismatch(ValueError):
    """View comparison requested for circuits with different skeletons."""


class ViewMismatch(AssertionError):
    """Same-skeleton circuits produced different classical views."""


def circuit_skeleton(circuit: Circuit) -> tuple[str, ...]:
    """The message-class sequence a circuit induces on the channel."""
    out = []
    for op in circuit.ops:
        cls = _SKELETON_CLASS.get(op.kind)
        if cls is not None:
            out.append(cls)
    return tuple(out)


def classical_view(transcript: Transcript) -> tuple[str, ...]:
    """Everything classical the server sees, in order, canonically encoded."""
    return tuple(
        m.tag_json() for m in transcript.messages
        if m.direction == CLIENT_TO_SERVER
    )


def view_digest(view: tuple[str, ...]) -> str:
    h = hashlib.sha256()
    for entry in view:
        h.update(entry.encode())
        h.update(b"\n")
    return h.hexdigest()


def view_invariance(circuit_a: Circuit, circuit_b: Circuit, epsilon: float,
                    seed: int) -> tuple[str, ...]:
    """Run both circuits and require identical classical views.

    Returns the common view; raises SkeletonMismatch when the circuits
    are not comparable and ViewMismatch when a comparable pair leaks.
    """
    if circuit_skeleton(circuit_a) != circuit_skeleton(circuit_b):
        raise SkeletonMismatch(
            "circuits have different delegation skeletons; the view is "
            "allowed to differ"
        )
    va = classical_view(run_protocol(circuit_a, epsilon, seed).transcript)
    vb = classical_view(run_protocol(circuit_b, epsilon, seed).transcript)
    if va != vb:
        first = next(i for i, (x, y) in enumerate(zip(va, vb)) if x != y)
        raise ViewMismatch(
            f"views diverge at outbound message {first}: "
            f"{va[first]} vs {vb[first]}"
        )
    return va


# ---------------------------------------------------------------------------
# payload mixedness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MixednessResult:
    mode: str
    n_messages: int
    n_checks: int
    worst_distance: float
    worst_label: str | None
    inbound_worst_distance: float
    tolerance: float
    uncovered: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return self.worst_distance <= self.tolerance and not self.uncovered

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "n_messages": self.n_messages,
            "n_checks": self.n_checks,
            "worst_distance": self.worst_distance,
            "worst_label": self.worst_label,
            "inbound_worst_distance": self.inbound_worst_distance,
            "tolerance": self.tolerance,
            "uncovered": list(self.uncovered),
            "pass": self.passed,
        }


def _outbound(transcript: Transcript):
    return [(i, m) for i, m in enumerate(transcript.messages)
            if m.direction == CLIENT_TO_SERVER]


def _wire_density(snapshot: np.ndarray, wire: int) -> np.ndarray:
    n = int(snapshot.size).bit_length() - 1
    state = sv.Statevector(n, snapshot)
    return sv.reduced_density(state, [wire]).mat


def _dist_from_mixed(rho: np.ndarray) -> float:
    eigs = np.linalg.eigvalsh(rho - np.eye(2) / 2)
    return float(0.5 * np.sum(np.abs(eigs)))


def _subseed(seed: int, t: int) -> int:
    digest = hashlib.blake2b(f"{seed}/sample/{t}".encode(), digest_size=8)
    return int.from_bytes(digest.digest(), "little")


def payload_mixedness(circuit: Circuit, epsilon: float, seed: int, *,
                      mode: str = "exhaustive",
                      samples: int = 400) -> MixednessResult:
    """Check every transmitted wire is maximally mixed on the channel."""
    baseline = run_protocol(circuit, epsilon, seed)
    outbound = _outbound(baseline.transcript)

    uncovered = []
    for i, msg in outbound:
        padded_wires = {w for w, _ in msg.pad_labels}
        for wire in msg.transmitted:
            if wire not in padded_wires:
                uncovered.append(f"message {i} wire {wire}")

    worst = 0.0
    worst_label = None
    inbound_worst = 0.0
    n_checks = 0

    if mode == "exhaustive":
        tolerance = EXHAUSTIVE_TOLERANCE
        for i, msg in outbound:
            for wire, label in msg.pad_labels:
                replays = [
                    run_protocol(circuit, epsilon, seed,
                                 overrides={label: pair})
                    for pair in ALL_PAIRS
                ]
                avg_out = sum(
                    _wire_density(r.transcript.messages[i].snapshot, wire)
                    for r in replays
                ) / 4.0
                avg_in = sum(
                    _wire_density(r.transcript.messages[i + 1].snapshot, wire)
                    for r in replays
                ) / 4.0
                n_checks += 1
                dist = _dist_from_mixed(avg_out)
                if dist > worst:
                    worst, worst_label = dist, label
                inbound_worst = max(inbound_worst, _dist_from_mixed(avg_in))
    elif mode == "sampled":
        if samples < 4:
            raise ValueError("sampled mode needs at least 4 runs")
        tolerance = 3.0 / np.sqrt(samples)
        replays = [
            run_protocol(circuit, epsilon, _subseed(seed, t))
            for t in range(samples)
        ]
        for i, msg in outbound:
            for wire in msg.transmitted:
                avg_out = sum(
                    _wire_density(r.transcript.messages[i].snapshot, wire)
                    for r in replays
                ) / samples
                avg_in = sum(
                    _wire_density(r.transcript.messages[i + 1].snapshot, wire)
                    for r in replays
                ) / samples
                n_checks += 1
                dist = _dist_from_mixed(avg_out)
                if dist > worst:
                    worst, worst_label = dist, f"message {i} wire {wire}"
                inbound_worst = max(inbound_worst, _dist_from_mixed(avg_in))
    else:
        raise ValueError(f"unknown mixedness mode '{mode}'")

    return MixednessResult(
        mode=mode,
        n_messages=len(outbound),
        n_checks=n_checks,
        worst_distance=worst,
        worst_label=worst_label,
        inbound_worst_distance=inbound_worst,
        tolerance=tolerance,
        uncovered=tuple(uncovered),
    )


def negative_control(circuit: Circuit, epsilon: float, seed: int) -> float:
    """Max channel distance from maximally mixed with all pads disabled.

    A sound auditor must see a large value here; if even unpadded traffic
    looked mixed, the mixedness check would be vacuous.
    """
    bare = run_protocol(circuit, epsilon, seed, disable_pads=True)
    worst = 0.0
    for _, msg in _outbound(bare.transcript):
        for wire in msg.transmitted:
            rho = _wire_density(msg.snapshot, wire)
            worst = max(worst, _dist_from_mixed(rho))
    return worst


def count_rounds(transcript: Transcript) -> list[dict]:
    """Round trips consumed by each gate, from the transcript markers."""
    return [
        {
            "gate": mk.gate_index,
            "kind": mk.kind,
            "rounds": (mk.message_end - mk.message_start) // 2,
        }
        for mk in transcript.markers
    ]


# a well-formed run confines each party to its half of the gate set
CLIENT_OP_KINDS = frozenset({"x", "z", "swap", "measure"})
SERVER_OP_KINDS = frozenset({"h", "cz", "rz"})


def capability_confinement(transcript: Transcript) -> dict:
    """Statically check which gate kinds each party applied.

    The client may only touch the state with Pauli frame operations
    (X, Z, swaps, measurements); every other unitary must have crossed
    the channel and show up in the server's column.
    """
    client = sorted(set(transcript.client_op_kinds))
    server = sorted(set(transcript.server_op_kinds))
    ok = (set(client) <= CLIENT_OP_KINDS and set(server) <= SERVER_OP_KINDS)
    return {"client_kinds": client, "server_kinds": server, "pass": ok}


def audit_circuit(circuit: Circuit, epsilon: float, seed: int, *,
                  mode: str = "exhaustive", samples: int = 400) -> dict:
    """Full audit report as a JSON-ready dict; deterministic per seed."""
    result = run_protocol(circuit, epsilon, seed)
    view = classical_view(result.transcript)
    mixed = payload_mixedness(circuit, epsilon, seed, mode=mode,
                              samples=samples)
    control = negative_control(circuit, epsilon, seed)
    control_ok = control >= NEGATIVE_CONTROL_THRESHOLD
    caps = capability_confinement(result.transcript)
    return {
        "version": AUDIT_VERSION,
        "epsilon": epsilon,
        "seed": seed,
        "precision_bits": precision_bits(epsilon),
        "n_gates": len(circuit.ops),
        "round_trips": result.transcript.round_trips(),
        "rounds_per_gate": count_rounds(result.transcript),
        "classical_view_digest": view_digest(view),
        "classical_view": list(view),
        "capabilities": caps,
        "mixedness": mixed.as_dict(),
        "negative_control": {
            "max_distance": control,
            "threshold": NEGATIVE_CONTROL_THRESHOLD,
            "pass": control_ok,
        },
        "pass": mixed.passed and control_ok and caps["pass"],
    }
