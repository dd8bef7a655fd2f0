"""Dense statevector simulator for small registers.

Conventions used across the package:

* little-endian indexing: qubit ``q`` is bit ``q`` of the amplitude index,
  so qubit 0 is the least significant bit;
* ``Rz(theta) = diag(exp(-i theta/2), exp(+i theta/2))``;
* ``S = diag(1, i)`` and ``T = diag(1, exp(i pi/4))``;
* registers are capped at ``MAX_QUBITS`` qubits.

States are value objects: ``apply`` returns a fresh ``Statevector`` and never
mutates its input.  The in-place ``_apply_*`` kernels are shared with the
protocol engine, which owns a private buffer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

MAX_QUBITS = 12

SQRT_HALF = 1.0 / np.sqrt(2.0)

X_MAT = np.array([[0, 1], [1, 0]], dtype=complex)
Z_MAT = np.array([[1, 0], [0, -1]], dtype=complex)
H_MAT = np.array([[SQRT_HALF, SQRT_HALF], [SQRT_HALF, -SQRT_HALF]], dtype=complex)
S_MAT = np.array([[1, 0], [0, 1j]], dtype=complex)
T_MAT = np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex)


def rz_matrix(theta: float) -> np.ndarray:
    return np.array(
        [[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex
    )


class Gate(str, Enum):
    """Gate vocabulary for circuits and protocol messages."""

    X = "x"
    Z = "z"
    H = "h"
    S = "s"
    T = "t"
    CX = "cx"
    CZ = "cz"
    CCX = "ccx"
    RZ = "rz"
    SWAP = "swap"
    MEASURE = "measure"
    # U is an in-memory-only kind carrying an explicit 2x2 matrix, so that
    # arbitrary single-qubit unitaries can be fed to the lowering pass.  The
    # circuit file format intentionally does not serialize it.
    U = "u"


GATE_ARITY = {
    Gate.X: 1,
    Gate.Z: 1,
    Gate.H: 1,
    Gate.S: 1,
    Gate.T: 1,
    Gate.CX: 2,
    Gate.CZ: 2,
    Gate.CCX: 3,
    Gate.RZ: 1,
    Gate.SWAP: 2,
    Gate.MEASURE: 1,
    Gate.U: 1,
}

_FIXED_1Q = {
    Gate.X: X_MAT,
    Gate.Z: Z_MAT,
    Gate.H: H_MAT,
    Gate.S: S_MAT,
    Gate.T: T_MAT,
}


@dataclass(frozen=True)
class GateOp:
    """One gate application: a kind, target qubits, and optional payload."""

    kind: Gate
    qubits: tuple[int, ...]
    angle: float | None = None
    matrix: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if len(self.qubits) != GATE_ARITY[self.kind]:
            raise ValueError(
                f"{self.kind.value} takes {GATE_ARITY[self.kind]} qubit(s), "
                f"got {self.qubits}"
            )
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"duplicate qubit in {self.kind.value}{self.qubits}")
        if (self.angle is not None) != (self.kind is Gate.RZ):
            raise ValueError("angle is required for rz and forbidden elsewhere")
        if (self.matrix is not None) != (self.kind is Gate.U):
            raise ValueError("matrix payload is required for u and forbidden elsewhere")
        if self.matrix is not None and self.matrix.shape != (2, 2):
            raise ValueError("u payload must be a 2x2 matrix")


# Small factories; tests and the lowering pass read much better with these.
def x(q: int) -> GateOp:
    return GateOp(Gate.X, (q,))


def z(q: int) -> GateOp:
    return GateOp(Gate.Z, (q,))


def h(q: int) -> GateOp:
    return GateOp(Gate.H, (q,))


def s(q: int) -> GateOp:
    return GateOp(Gate.S, (q,))


def t(q: int) -> GateOp:
    return GateOp(Gate.T, (q,))


def cx(control: int, target: int) -> GateOp:
    return GateOp(Gate.CX, (control, target))


def cz(a: int, b: int) -> GateOp:
    return GateOp(Gate.CZ, (a, b))


def ccx(c1: int, c2: int, target: int) -> GateOp:
    return GateOp(Gate.CCX, (c1, c2, target))


def rz(theta: float, q: int) -> GateOp:
    return GateOp(Gate.RZ, (q,), angle=float(theta))


def swap(a: int, b: int) -> GateOp:
    return GateOp(Gate.SWAP, (a, b))


def measure(q: int) -> GateOp:
    return GateOp(Gate.MEASURE, (q,))


def u(matrix: np.ndarray, q: int) -> GateOp:
    return GateOp(Gate.U, (q,), matrix=np.asarray(matrix, dtype=complex))


@dataclass(frozen=True)
class Statevector:
    """Normalized pure state of ``n_qubits`` qubits (little-endian amplitudes)."""

    n_qubits: int
    amps: np.ndarray

    def __post_init__(self) -> None:
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}")
        a = np.asarray(self.amps, dtype=complex)
        if a.shape != (2**self.n_qubits,):
            raise ValueError("amplitude length does not match qubit count")
        object.__setattr__(self, "amps", a)
        a.setflags(write=False)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


@dataclass(frozen=True)
class DensityMatrix:
    """Density operator on ``dim`` basis states."""

    dim: int
    mat: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.mat, dtype=complex)
        if m.shape != (self.dim, self.dim):
            raise ValueError("density matrix shape does not match dim")
        object.__setattr__(self, "mat", m)
        m.setflags(write=False)

    def validate(self, tol: float = 1e-9) -> None:
        """Check hermiticity, unit trace and positivity within ``tol``."""
        if np.abs(self.mat - self.mat.conj().T).max() > tol:
            raise ValueError("density matrix is not hermitian")
        if abs(np.trace(self.mat) - 1.0) > tol:
            raise ValueError("density matrix trace is not 1")
        if np.linalg.eigvalsh(self.mat).min() < -tol:
            raise ValueError("density matrix has a negative eigenvalue")


def new_state(n_qubits: int, amps: np.ndarray | None = None) -> Statevector:
    """|0...0> on ``n_qubits`` qubits, or a validated custom amplitude vector."""
    if amps is None:
        a = np.zeros(2**n_qubits, dtype=complex)
        a[0] = 1.0
        return Statevector(n_qubits, a)
    a = np.asarray(amps, dtype=complex)
    n = abs(np.linalg.norm(a) - 1.0)
    if n > 1e-9:
        raise ValueError(f"amplitudes are not normalized (off by {n:.2e})")
    return Statevector(n_qubits, a.copy())


def random_state(n_qubits: int, rng: np.random.Generator) -> Statevector:
    a = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    return Statevector(n_qubits, a / np.linalg.norm(a))


# ---------------------------------------------------------------------------
# in-place kernels (shared with the protocol engine)
# ---------------------------------------------------------------------------


def _apply_1q(amps: np.ndarray, mat: np.ndarray, q: int) -> None:
    view = amps.reshape(-1, 2, 1 << q)
    lo = view[:, 0, :].copy()
    hi = view[:, 1, :]
    view[:, 0, :] = mat[0, 0] * lo + mat[0, 1] * hi
    view[:, 1, :] = mat[1, 0] * lo + mat[1, 1] * hi


def _apply_x(amps: np.ndarray, q: int) -> None:
    view = amps.reshape(-1, 2, 1 << q)
    view[:, [0, 1], :] = view[:, [1, 0], :]


def _apply_z(amps: np.ndarray, q: int) -> None:
    view = amps.reshape(-1, 2, 1 << q)
    view[:, 1, :] *= -1.0


def _apply_rz(amps: np.ndarray, theta: float, q: int) -> None:
    view = amps.reshape(-1, 2, 1 << q)
    view[:, 0, :] *= np.exp(-0.5j * theta)
    view[:, 1, :] *= np.exp(0.5j * theta)


def _pair_indices(dim: int, on_bits: tuple[int, ...], off_bit: int) -> np.ndarray:
    idx = np.arange(dim)
    sel = (idx >> off_bit) & 1 == 0
    for b in on_bits:
        sel &= (idx >> b) & 1 == 1
    return idx[sel]


def _apply_cx(amps: np.ndarray, control: int, target: int) -> None:
    i0 = _pair_indices(amps.size, (control,), target)
    i1 = i0 | (1 << target)
    amps[i0], amps[i1] = amps[i1], amps[i0]


def _apply_cz(amps: np.ndarray, a: int, b: int) -> None:
    idx = np.arange(amps.size)
    sel = ((idx >> a) & 1 == 1) & ((idx >> b) & 1 == 1)
    amps[sel] *= -1.0


def _apply_ccx(amps: np.ndarray, c1: int, c2: int, target: int) -> None:
    i0 = _pair_indices(amps.size, (c1, c2), target)
    i1 = i0 | (1 << target)
    amps[i0], amps[i1] = amps[i1], amps[i0]


def _apply_swap(amps: np.ndarray, a: int, b: int) -> None:
    idx = np.arange(amps.size)
    sel = ((idx >> a) & 1 == 1) & ((idx >> b) & 1 == 0)
    i0 = idx[sel]
    i1 = (i0 & ~(1 << a)) | (1 << b)
    amps[i0], amps[i1] = amps[i1], amps[i0]


def _apply_op(amps: np.ndarray, op: GateOp) -> None:
    kind = op.kind
    if kind is Gate.RZ:
        _apply_rz(amps, op.angle, op.qubits[0])
    elif kind is Gate.X:
        _apply_x(amps, op.qubits[0])
    elif kind is Gate.Z:
        _apply_z(amps, op.qubits[0])
    elif kind in _FIXED_1Q:
        _apply_1q(amps, _FIXED_1Q[kind], op.qubits[0])
    elif kind is Gate.U:
        _apply_1q(amps, op.matrix, op.qubits[0])
    elif kind is Gate.CX:
        _apply_cx(amps, op.qubits[0], op.qubits[1])
    elif kind is Gate.CZ:
        _apply_cz(amps, op.qubits[0], op.qubits[1])
    elif kind is Gate.SWAP:
        _apply_swap(amps, op.qubits[0], op.qubits[1])
    elif kind is Gate.CCX:
        _apply_ccx(amps, op.qubits[0], op.qubits[1], op.qubits[2])
    else:
        raise ValueError(f"cannot apply {kind.value} as a unitary; use measure_qubit")


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def apply(state: Statevector, op: GateOp) -> Statevector:
    """Apply one unitary gate and return the new state."""
    for q in op.qubits:
        if not 0 <= q < state.n_qubits:
            raise ValueError(f"qubit {q} out of range for {state.n_qubits} qubits")
    if op.kind is Gate.MEASURE:
        raise ValueError("measure is not unitary; use measure_qubit")
    amps = state.amps.copy()
    _apply_op(amps, op)
    return Statevector(state.n_qubits, amps)


def apply_all(state: Statevector, ops) -> Statevector:
    amps = state.amps.copy()
    for op in ops:
        _apply_op(amps, op)
    return Statevector(state.n_qubits, amps)


def measure_qubit(
    state: Statevector, q: int, *, u: float | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[Statevector, int]:
    """Projective computational-basis measurement of qubit ``q``.

    The outcome is drawn from ``u`` in [0, 1) when given, otherwise from
    ``rng``.  Returns the collapsed, renormalized state and the outcome bit.
    """
    if u is None:
        if rng is None:
            raise ValueError("measure_qubit needs either u or rng")
        u = float(rng.random())
    view = state.amps.reshape(-1, 2, 1 << q)
    p1 = float(np.sum(np.abs(view[:, 1, :]) ** 2))
    outcome = 1 if u < p1 else 0
    amps = state.amps.copy()
    out_view = amps.reshape(-1, 2, 1 << q)
    out_view[:, 1 - outcome, :] = 0.0
    amps /= np.linalg.norm(amps)
    return Statevector(state.n_qubits, amps), outcome


def fidelity(a: Statevector, b: Statevector) -> float:
    return float(np.abs(np.vdot(a.amps, b.amps)) ** 2)


def phase_aligned_distance(a: Statevector, b: Statevector) -> float:
    """max_i |a_i - e^{i phi} b_i| with phi chosen to cancel the global phase."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("states have different qubit counts")
    ip = np.vdot(b.amps, a.amps)
    phase = ip / abs(ip) if abs(ip) > 1e-300 else 1.0
    return float(np.abs(a.amps - phase * b.amps).max())


def equal_up_to_global_phase(a: Statevector, b: Statevector, tol: float = 1e-10) -> bool:
    return phase_aligned_distance(a, b) <= tol


def ensemble_density(states, weights=None) -> DensityMatrix:
    """Weighted mixture sum_i w_i |psi_i><psi_i| (uniform weights by default)."""
    states = list(states)
    if not states:
        raise ValueError("empty ensemble")
    if weights is None:
        weights = [1.0 / len(states)] * len(states)
    if len(weights) != len(states) or abs(sum(weights) - 1.0) > 1e-9:
        raise ValueError("weights must match states and sum to 1")
    dim = states[0].amps.size
    rho = np.zeros((dim, dim), dtype=complex)
    for w, st in zip(weights, states):
        if st.amps.size != dim:
            raise ValueError("mixed register sizes in ensemble")
        rho += w * np.outer(st.amps, st.amps.conj())
    return DensityMatrix(dim, rho)


def reduced_density(state: Statevector, keep) -> DensityMatrix:
    """Partial trace onto ``keep`` (ascending little-endian order preserved)."""
    keep = sorted(set(keep))
    n = state.n_qubits
    if any(q < 0 or q >= n for q in keep):
        raise ValueError("keep set out of range")
    if not keep:
        raise ValueError("keep set is empty")
    # axis n-1-q corresponds to qubit q after reshape
    tensor = state.amps.reshape([2] * n)
    keep_axes = [n - 1 - q for q in reversed(keep)]
    other_axes = [ax for ax in range(n) if ax not in keep_axes]
    perm = keep_axes + other_axes
    moved = np.transpose(tensor, perm).reshape(2 ** len(keep), -1)
    rho = moved @ moved.conj().T
    return DensityMatrix(2 ** len(keep), rho)


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """(1/2) * trace norm of rho - sigma."""
    if rho.dim != sigma.dim:
        raise ValueError("dimension mismatch")
    eigs = np.linalg.eigvalsh(rho.mat - sigma.mat)
    return float(0.5 * np.sum(np.abs(eigs)))


def maximally_mixed(n_qubits: int) -> DensityMatrix:
    dim = 2**n_qubits
    return DensityMatrix(dim, np.eye(dim, dtype=complex) / dim)


def append_qubits(state: Statevector, k: int) -> Statevector:
    """Adjoin ``k`` fresh |0> qubits above the current high qubit."""
    if state.n_qubits + k > MAX_QUBITS:
        raise ValueError(f"register would exceed {MAX_QUBITS} qubits")
    amps = np.zeros(2 ** (state.n_qubits + k), dtype=complex)
    amps[: state.amps.size] = state.amps
    return Statevector(state.n_qubits + k, amps)


def drop_qubit(state: Statevector, q: int, bit: int) -> Statevector:
    """Remove qubit ``q``, which must hold the basis state ``bit`` exactly."""
    view = state.amps.reshape(-1, 2, 1 << q)
    gone = view[:, 1 - bit, :]
    if float(np.linalg.norm(gone)) > 1e-9:
        raise ValueError(f"qubit {q} is not in |{bit}>")
    kept = view[:, bit, :].reshape(-1)
    return Statevector(state.n_qubits - 1, kept)


def ops_unitary(n_qubits: int, ops) -> np.ndarray:
    """Full matrix of an op list, built column by column (test utility)."""
    dim = 2**n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        amps = np.zeros(dim, dtype=complex)
        amps[col] = 1.0
        for op in ops:
            _apply_op(amps, op)
        out[:, col] = amps
    return out
