"""Communication-cost model and the crossover threshold.

Two ways to delegate a circuit with n_p parametric rotations and n_np
fixed gates to target precision epsilon:

* baseline: compile each rotation to a fixed-gate ladder first, paying
  ln(1/eps)**3.97 delegation rounds per rotation and one per fixed gate;
* interactive: delegate every gate through the recursive-decryption
  channel, paying log2(pi/eps)**2 rounds per gate regardless of kind.

Normalizing by total gate count, the baseline costs r*K + (1 - r) and
the interactive protocol costs L2, with r = n_p / (n_p + n_np) the
parametric fraction, K = ln(1/eps)**3.97 and L2 = log2(pi/eps)**2.  The
interactive side wins exactly when r exceeds

    critical_ratio(eps) = (L2 - 1) / (K - 1)

which falls from ~0.90 at eps = 1e-1 to ~0.003 at eps = 1e-12: the
tighter the precision, the fewer rotations it takes to justify the
interactive protocol.
"""

from __future__ import annotations

import io
import math

from .angles import precision_bits
from .circuits import Circuit
from .statevec import Gate

# exponent of the ladder-compilation cost law
SK_EXPONENT = 3.97

CSV_HEADER = "epsilon,ratio,c_p,c_np,critical_ratio"
CSV_HEADER_MEASURED = CSV_HEADER + ",measured_rounds"


def baseline_rounds(epsilon: float) -> float:
    """Rounds to compile one rotation into fixed gates at precision eps."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must be in (0, 1)")
    return math.log(1 / epsilon) ** SK_EXPONENT


def interactive_rounds(epsilon: float) -> float:
    """Per-gate round cost of the interactive protocol (any gate kind)."""
    if not 0 < epsilon < math.pi:
        raise ValueError("epsilon must be in (0, pi)")
    return math.log2(math.pi / epsilon) ** 2


def measured_rounds(epsilon: float) -> int:
    """Exact per-rotation round count the implementation realizes."""
    m = precision_bits(epsilon)
    return m * (m + 1) // 2


def gate_census(circuit: Circuit) -> tuple[int, int]:
    """(parametric, non-parametric) gate counts; measurements are free."""
    n_p = sum(1 for op in circuit.ops if op.kind is Gate.RZ)
    n_np = sum(1 for op in circuit.ops
               if op.kind not in (Gate.RZ, Gate.MEASURE))
    return n_p, n_np


def cost_parametric_baseline(n_p: int, n_np: int, epsilon: float) -> float:
    """Total rounds when rotations are compiled away before delegating."""
    return n_p * baseline_rounds(epsilon) + n_np


def cost_proposed(n_p: int, n_np: int, epsilon: float) -> float:
    """Total rounds when everything rides the interactive channel."""
    return (n_p + n_np) * interactive_rounds(epsilon)


def critical_ratio(epsilon: float) -> float:
    """Parametric fraction above which the interactive protocol wins.

    Defined for epsilon < 1/e, where the baseline cost of a rotation
    exceeds the cost of a fixed gate.
    """
    if not 0 < epsilon < 1 / math.e:
        raise ValueError("critical ratio needs epsilon in (0, 1/e)")
    num = interactive_rounds(epsilon) - 1.0
    den = baseline_rounds(epsilon) - 1.0
    return num / den


def crossover_holds(ratio: float, epsilon: float) -> bool:
    """Whether the interactive protocol is cheaper at this gate mix."""
    if not 0 <= ratio <= 1:
        raise ValueError("ratio must be in [0, 1]")
    per_gate_baseline = ratio * baseline_rounds(epsilon) + (1.0 - ratio)
    return interactive_rounds(epsilon) < per_gate_baseline


def sweep(epsilons, ratio: float, *, measured: bool = False) -> list[dict]:
    """Normalized per-gate costs across precisions at a fixed gate mix."""
    rows = []
    for eps in epsilons:
        row = {
            "epsilon": float(eps),
            "ratio": float(ratio),
            "c_p": ratio * baseline_rounds(eps) + (1.0 - ratio),
            "c_np": interactive_rounds(eps),
            "critical_ratio": critical_ratio(eps),
        }
        if measured:
            row["measured_rounds"] = measured_rounds(eps)
        rows.append(row)
    return rows


def sweep_csv(rows) -> str:
    """Render sweep rows as CSV with 6-significant-digit values."""
    measured = rows and "measured_rounds" in rows[0]
    out = io.StringIO()
    out.write((CSV_HEADER_MEASURED if measured else CSV_HEADER) + "\n")
    for row in rows:
        cells = [
            f"{row['epsilon']:.6g}",
            f"{row['ratio']:.6g}",
            f"{row['c_p']:.6g}",
            f"{row['c_np']:.6g}",
            f"{row['critical_ratio']:.6g}",
        ]
        if measured:
            cells.append(str(row["measured_rounds"]))
        out.write(",".join(cells) + "\n")
    return out.getvalue()
