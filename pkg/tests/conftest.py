"""Shared helpers for protocol-level tests."""

import math

import numpy as np

from blindqc import statevec as sv
from blindqc.angles import digitize, reconstruct
from blindqc.circuits import Circuit
from blindqc.statevec import Gate


def random_lowered_circuit(rng: np.random.Generator, n_qubits: int,
                           n_gates: int) -> Circuit:
    """Random measure-free circuit over the delegable set {h, cz, rz}."""
    ops = []
    for _ in range(n_gates):
        roll = int(rng.integers(3))
        if roll == 0:
            ops.append(sv.h(int(rng.integers(n_qubits))))
        elif roll == 1 and n_qubits >= 2:
            a, b = (int(x) for x in rng.permutation(n_qubits)[:2])
            ops.append(sv.cz(a, b))
        else:
            theta = float(rng.uniform(-2 * math.pi, 2 * math.pi))
            ops.append(sv.rz(theta, int(rng.integers(n_qubits))))
    return Circuit(n_qubits, tuple(ops))


def digitized_reference(circuit: Circuit, n_digits: int,
                        extractor: str = "floor") -> sv.Statevector:
    """Direct simulation with every rz snapped to its digit approximant."""
    state = sv.new_state(circuit.n_qubits)
    for op in circuit.ops:
        if op.kind is Gate.RZ:
            d = digitize(op.angle, n_digits, extractor)
            state = sv.apply(state, sv.rz(reconstruct(d), op.qubits[0]))
        else:
            state = sv.apply(state, op)
    return state


def rz_error_budget(circuit: Circuit, n_digits: int,
                    extractor: str = "floor") -> float:
    """Worst-case infidelity from rotation truncation.

    Per-step Fubini-Study angles add, so infidelity is bounded by
    sin^2(sum |delta_i| / 2).  The per-gate sum of sin^2(delta_i/2) is
    not a bound: floor-extracted remainders all share a sign and
    accumulate coherently on a wire.
    """
    half_angle = 0.0
    for op in circuit.ops:
        if op.kind is Gate.RZ:
            d = digitize(op.angle, n_digits, extractor)
            half_angle += abs(op.angle - reconstruct(d)) / 2
    return math.sin(min(half_angle, math.pi / 2)) ** 2
