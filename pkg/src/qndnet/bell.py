"""Nondemolition measurement in the Bell basis.

The network acts on two data qubits (0, 1) and two ancillas (2, 3), both
ancillas starting in |0>:

    CNOT(0->2), CNOT(1->2)   # ancilla 2 picks up the parity bit
    H(0), H(1)               # rotates phase information into parity
    CNOT(0->3), CNOT(1->3)   # ancilla 3 picks up the (rotated) phase bit
    H(0), H(1)               # restores the data register

Measuring the ancillas identifies the Bell component and leaves the data
qubits in exactly that Bell state, so repeating the measurement yields the
same bits with no further disturbance.  Decoding table:

    (parity, phase): (0,0)->Phi+  (0,1)->Phi-  (1,0)->Psi+  (1,1)->Psi-

Under the "paper" Hadamard convention the pre-measurement joint state carries
the input's Bell coefficients on the ancilla branches with their exact signs;
the "standard" convention flips some branch-internal phases but leaves every
outcome probability and decoded bit unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Sequence

import numpy as np

from .statevector import (
    StateVector,
    _measure_drop_raw,
    _require_normalized,
    append_ancillas,
    apply_gates,
    cnot,
    hadamard,
    inner_product,
)

_SQRT_HALF = 1.0 / np.sqrt(2.0)


class BellLabel(Enum):
    """The four Bell states: Phi+- = (|11> +- |00>)/sqrt2, Psi+- = (|10> +- |01>)/sqrt2."""

    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"

    @property
    def token(self) -> str:
        return self.value


#: Labels in ancilla-decoding order: index = 2*parity + phase.
BELL_DECODE_ORDER = (
    BellLabel.PHI_PLUS,
    BellLabel.PHI_MINUS,
    BellLabel.PSI_PLUS,
    BellLabel.PSI_MINUS,
)

# leading ket bits and relative sign of each Bell state
_BELL_DEFS = {
    BellLabel.PHI_PLUS: ("11", +1),
    BellLabel.PHI_MINUS: ("11", -1),
    BellLabel.PSI_PLUS: ("10", +1),
    BellLabel.PSI_MINUS: ("10", -1),
}


def parse_bell_label(token: str) -> BellLabel:
    for label in BellLabel:
        if label.value == token:
            return label
    raise ValueError(f"unknown Bell label {token!r} (expected phi+/phi-/psi+/psi-)")


def bell_state(label: BellLabel) -> StateVector:
    """The two-qubit state named by ``label``, with the sign on the complement ket."""
    bits, sign = _BELL_DEFS[label]
    amps = np.zeros(4, dtype=np.complex128)
    amps[int(bits, 2)] = _SQRT_HALF
    amps[int(bits, 2) ^ 0b11] = sign * _SQRT_HALF
    return StateVector(2, amps)


def decode_bell(parity_bit: int, phase_bit: int) -> BellLabel:
    """Ancilla bits -> Bell label (total bijection)."""
    if parity_bit not in (0, 1) or phase_bit not in (0, 1):
        raise ValueError(f"bits must be 0 or 1, got ({parity_bit}, {phase_bit})")
    return BELL_DECODE_ORDER[2 * parity_bit + phase_bit]


def bell_bits(label: BellLabel) -> tuple[int, int]:
    """Inverse of decode_bell: the (parity, phase) ancilla bits of a Bell state."""
    index = BELL_DECODE_ORDER.index(label)
    return index >> 1, index & 1


@dataclass(frozen=True)
class BellQndOutcome:
    """Measured ancilla bits, the decoded label, and the collapsed data state."""

    parity_bit: int
    phase_bit: int
    label: BellLabel
    probability: float
    post_state: StateVector


@lru_cache(maxsize=None)
def _network_steps(convention: str) -> tuple:
    h = lambda t: hadamard(t, convention)  # noqa: E731
    return (
        cnot(0, 2),
        cnot(1, 2),
        h(0),
        h(1),
        cnot(0, 3),
        cnot(1, 3),
        h(0),
        h(1),
    )


def bell_network_unitary_steps(convention: str = "paper") -> list:
    """The full 8-gate network over qubits (data 0, 1; ancillas 2, 3)."""
    return list(_network_steps(convention))


def bell_premeasurement_state(state: StateVector, convention: str = "paper") -> StateVector:
    """Input (2 qubits) with ancillas appended and the network applied, unmeasured."""
    if state.num_qubits != 2:
        raise ValueError(f"expected a 2-qubit input, got {state.num_qubits}")
    _require_normalized(state, "bell network")
    return apply_gates(append_ancillas(state, 2), _network_steps(convention))


def run_bell_qnd(
    state: StateVector,
    convention: str = "paper",
    draws: Sequence[float] = (0.0, 0.0),
) -> BellQndOutcome:
    """Run the network and measure both ancillas (qubit 2 first, then 3).

    The outcome is deterministic given ``draws``; the joint probability of the
    observed bits equals the squared overlap of the input with the decoded
    Bell state, and the returned 2-qubit post state is that Bell state.
    """
    if len(draws) != 2:
        raise ValueError("run_bell_qnd needs exactly two draws")
    joint = bell_premeasurement_state(state, convention)
    parity, p_parity, amps = _measure_drop_raw(joint.amplitudes, 2, draws[0])
    phase, p_phase, amps = _measure_drop_raw(amps, 2, draws[1])
    return BellQndOutcome(
        parity_bit=parity,
        phase_bit=phase,
        label=decode_bell(parity, phase),
        probability=p_parity * p_phase,
        post_state=StateVector(2, amps),
    )


def bell_branch_table(
    state: StateVector, convention: str = "paper"
) -> list[tuple[tuple[int, int], BellLabel, float, StateVector | None]]:
    """All four ancilla branches of the network: (bits, label, probability, post state).

    Enumerates the same evolution run_bell_qnd samples from; branches of
    (numerically) zero probability carry ``None`` as their post state.
    """
    joint = bell_premeasurement_state(state, convention)
    table = []
    m = joint.amplitudes.reshape(4, 4)  # rows: data index, cols: ancilla pattern
    for a in range(4):
        bits = ((a >> 1) & 1, a & 1)
        prob = float(np.sum(np.abs(m[:, a]) ** 2))
        post = None
        if prob > 1e-15:
            post = StateVector(2, m[:, a] / np.sqrt(prob))
        table.append((bits, decode_bell(*bits), prob, post))
    return table


def bell_projection_oracle(
    state: StateVector,
) -> list[tuple[BellLabel, float, StateVector]]:
    """Brute-force Bell decomposition by direct inner products.

    Independent of the network code path; used to validate run_bell_qnd.
    """
    if state.num_qubits != 2:
        raise ValueError(f"expected a 2-qubit input, got {state.num_qubits}")
    _require_normalized(state, "bell_projection_oracle")
    out = []
    for label in BELL_DECODE_ORDER:
        basis = bell_state(label)
        amp = inner_product(basis, state)
        out.append((label, abs(amp) ** 2, basis))
    return out
