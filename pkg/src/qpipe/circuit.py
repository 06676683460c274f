"""Gate-list IR plus builders for the phase-injection encoder.

Builders are pure functions over immutable inputs; a given input always
produces a byte-identical gate list.  The controlled-phase convention is
fixed for determinism: position qubit 0 is the target, the remaining
position qubits plus one estimation qubit are controls (any choice is
unitarily equivalent for a diagonal oracle).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .phasemap import PhaseImage, accumulate_phases
from .statevector import (
    RegisterLayout,
    StateVector,
    apply_controlled_phase,
    apply_hadamard,
    apply_pauli_x,
    apply_swap,
    init_zero,
    inverse_qft_schedule,
)

__all__ = [
    "GateKind",
    "GateOp",
    "Circuit",
    "GrayStep",
    "GateTally",
    "gray_sequence",
    "hadamard_layer",
    "build_naive_oracle",
    "build_gray_oracle",
    "inverse_qft_ops",
    "build_qpipe",
    "count_gates",
    "apply_ops",
    "simulate",
    "serialize_circuit",
    "parse_gate_list",
]

_TAU = 2.0 * math.pi


class GateKind(str, Enum):
    HADAMARD = "H"
    PAULI_X = "X"
    CONTROLLED_PHASE = "CP"
    SWAP = "SWAP"


@dataclass(frozen=True)
class GateOp:
    """One gate: H/X on `target`, CP on `target` with `controls` and `angle`
    (radians), or SWAP of `target` with `partner`."""

    kind: GateKind
    target: int
    controls: tuple[int, ...] = ()
    angle: float = 0.0
    partner: int | None = None

    def __post_init__(self):
        if self.target in self.controls:
            raise ValueError(f"target {self.target} overlaps controls {self.controls}")
        if len(set(self.controls)) != len(self.controls):
            raise ValueError(f"duplicate controls {self.controls}")
        if self.kind is GateKind.CONTROLLED_PHASE:
            if not math.isfinite(self.angle):
                raise ValueError(f"CP angle must be finite, got {self.angle}")
        elif self.controls:
            raise ValueError(f"{self.kind.value} gate takes no controls")
        if self.kind is GateKind.SWAP:
            if self.partner is None or self.partner == self.target:
                raise ValueError("SWAP needs two distinct qubits")
        elif self.partner is not None:
            raise ValueError(f"{self.kind.value} gate takes no partner qubit")

    @property
    def qubits(self) -> tuple[int, ...]:
        extra = (self.partner,) if self.partner is not None else ()
        return self.controls + (self.target,) + extra


def _h(target: int) -> GateOp:
    return GateOp(GateKind.HADAMARD, target)


def _x(target: int) -> GateOp:
    return GateOp(GateKind.PAULI_X, target)


def _cp(angle: float, controls: Iterable[int], target: int) -> GateOp:
    return GateOp(GateKind.CONTROLLED_PHASE, target, tuple(sorted(controls)), angle)


def _swap(a: int, b: int) -> GateOp:
    return GateOp(GateKind.SWAP, a, partner=b)


@dataclass(frozen=True)
class Circuit:
    """Immutable ordered gate list over a register layout."""

    layout: RegisterLayout
    ops: tuple[GateOp, ...]

    def __post_init__(self):
        total = self.layout.num_qubits
        for op in self.ops:
            for qb in op.qubits:
                if not 0 <= qb < total:
                    raise ValueError(f"gate {op} touches qubit {qb} outside 0..{total - 1}")


@dataclass(frozen=True)
class GrayStep:
    """One step of the reflected-Gray traversal of the position register."""

    step_index: int
    code_word: int
    transition_bit: int | None  # None only on the final step


def gray_sequence(n: int) -> list[GrayStep]:
    """All 2**n Gray code words g_s = s XOR (s >> 1) with transition bits.

    Consecutive words differ in exactly one bit; the final word is 2**(n-1).
    """
    if not 1 <= n <= 30:
        raise ValueError(f"position register size {n} outside supported range 1..30")
    size = 1 << n
    steps = []
    for s in range(size):
        word = s ^ (s >> 1)
        if s < size - 1:
            nxt = (s + 1) ^ ((s + 1) >> 1)
            bit = (word ^ nxt).bit_length() - 1
        else:
            bit = None
        steps.append(GrayStep(step_index=s, code_word=word, transition_bit=bit))
    return steps


def _phase_gate(layout: RegisterLayout, estimation_qubit: int, theta: float) -> GateOp:
    """CP encoding phase fraction theta (turns) scaled by 2**k for e_k.

    The fraction is reduced mod 1 before the radian conversion (fmod is
    exact); the applied phase e^{2*pi*i*2**k*theta} is unchanged.
    """
    controls = tuple(range(1, layout.n)) + (layout.estimation_qubit(estimation_qubit),)
    angle = _TAU * math.fmod(theta * (1 << estimation_qubit), 1.0)
    return _cp(angle, controls, target=0)


def _check_oracle_args(layout: RegisterLayout, phases: PhaseImage, estimation_qubit: int) -> None:
    if phases.n != layout.n:
        raise ValueError(f"phase image has n={phases.n} but layout expects n={layout.n}")
    if not 0 <= estimation_qubit < layout.q:
        raise ValueError(f"estimation qubit {estimation_qubit} out of range for q={layout.q}")


def build_naive_oracle(
    layout: RegisterLayout, phases: PhaseImage, estimation_qubit: int
) -> tuple[GateOp, ...]:
    """Per-pixel mark/phase/unmark fragment controlled on one estimation qubit.

    For each nonzero-phase pixel j: X on every zero-bit of j (mapping |j> to
    |1..1>), one controlled phase, then the same X gates to uncompute.
    """
    _check_oracle_args(layout, phases, estimation_qubit)
    n = layout.n
    ops: list[GateOp] = []
    for j in range(1 << n):
        theta = float(phases.theta[j])
        if theta == 0.0:
            continue
        zero_bits = [b for b in range(n) if not (j >> b) & 1]
        marks = [_x(b) for b in zero_bits]
        ops.extend(marks)
        ops.append(_phase_gate(layout, estimation_qubit, theta))
        ops.extend(marks)
    return tuple(ops)


def build_gray_oracle(
    layout: RegisterLayout, phases: PhaseImage, estimation_qubit: int
) -> tuple[GateOp, ...]:
    """Gray-ordered traversal fragment, diagonal-equivalent to the naive one.

    One initial X per position qubit, then per Gray step a controlled phase
    when that pixel is nonzero followed by a single transition X, and finally
    n-1 X gates flipping the zero-bits of the last code word 2**(n-1) to
    restore the register.  The X skeleton is emitted even for all-zero
    images; only the controlled phases are conditional.
    """
    _check_oracle_args(layout, phases, estimation_qubit)
    n = layout.n
    ops: list[GateOp] = [_x(b) for b in range(n)]
    for step in gray_sequence(n):
        theta = float(phases.theta[step.code_word])
        if theta != 0.0:
            ops.append(_phase_gate(layout, estimation_qubit, theta))
        if step.transition_bit is not None:
            ops.append(_x(step.transition_bit))
    ops.extend(_x(b) for b in range(n - 1))
    return tuple(ops)


def hadamard_layer(layout: RegisterLayout) -> tuple[GateOp, ...]:
    return tuple(_h(g) for g in range(layout.num_qubits))


def inverse_qft_ops(layout: RegisterLayout) -> tuple[GateOp, ...]:
    """QFT^dagger on the estimation register as IR ops: q(q+2)//2 gates."""
    ops: list[GateOp] = []
    for item in inverse_qft_schedule(layout.estimation_qubits):
        if item[0] == "h":
            ops.append(_h(item[1]))
        elif item[0] == "cp":
            ops.append(_cp(item[1], (item[2],), item[3]))
        else:
            ops.append(_swap(item[1], item[2]))
    return tuple(ops)


def build_qpipe(
    layout: RegisterLayout,
    images: PhaseImage | Sequence[PhaseImage],
    oracle: str = "gray",
    fused: bool = True,
) -> Circuit:
    """Full encoder: Hadamard layer, one oracle traversal per estimation
    qubit, then QFT^dagger on the estimation register.

    Multiple images are fused by default — a single traversal applies the
    summed phase at each pixel, so a pixel whose phases cancel exactly emits
    no controlled phase.  ``fused=False`` lays the images out as sequential
    per-image blocks instead (same unitary, more gates).
    """
    if isinstance(images, PhaseImage):
        images = [images]
    images = list(images)
    if not images:
        raise ValueError("need at least one phase image to encode")
    for img in images:
        if img.n != layout.n:
            raise ValueError(f"phase image has n={img.n} but layout expects n={layout.n}")
    if oracle == "gray":
        builder = build_gray_oracle
    elif oracle == "naive":
        builder = build_naive_oracle
    else:
        raise ValueError(f"unknown oracle variant {oracle!r}; expected 'gray' or 'naive'")

    ops: list[GateOp] = list(hadamard_layer(layout))
    if fused:
        total = images[0] if len(images) == 1 else accumulate_phases(images)
        for k in range(layout.q):
            ops.extend(builder(layout, total, k))
    else:
        for img in images:
            for k in range(layout.q):
                ops.extend(builder(layout, img, k))
    ops.extend(inverse_qft_ops(layout))
    return Circuit(layout=layout, ops=tuple(ops))


@dataclass(frozen=True)
class GateTally:
    """Exact op counts over an IR fragment or circuit."""

    hadamard_count: int = 0
    x_count: int = 0
    cp_count: int = 0
    swap_count: int = 0
    cp_control_arities: tuple[tuple[int, int], ...] = ()  # (arity, count) pairs

    @property
    def total(self) -> int:
        return self.hadamard_count + self.x_count + self.cp_count + self.swap_count

    def arity_histogram(self) -> dict[int, int]:
        return dict(self.cp_control_arities)


def count_gates(circuit: Circuit | Iterable[GateOp]) -> GateTally:
    """Deterministic raw tally of H/X/CP/SWAP ops and CP control arities."""
    ops = circuit.ops if isinstance(circuit, Circuit) else tuple(circuit)
    h = x = cp = sw = 0
    arities: dict[int, int] = {}
    for op in ops:
        if op.kind is GateKind.HADAMARD:
            h += 1
        elif op.kind is GateKind.PAULI_X:
            x += 1
        elif op.kind is GateKind.CONTROLLED_PHASE:
            cp += 1
            arities[len(op.controls)] = arities.get(len(op.controls), 0) + 1
        else:
            sw += 1
    return GateTally(
        hadamard_count=h,
        x_count=x,
        cp_count=cp,
        swap_count=sw,
        cp_control_arities=tuple(sorted(arities.items())),
    )


def apply_ops(state: StateVector, ops: Iterable[GateOp]) -> StateVector:
    for op in ops:
        if op.kind is GateKind.HADAMARD:
            apply_hadamard(state, op.target)
        elif op.kind is GateKind.PAULI_X:
            apply_pauli_x(state, op.target)
        elif op.kind is GateKind.CONTROLLED_PHASE:
            apply_controlled_phase(state, op.controls, op.target, op.angle)
        else:
            apply_swap(state, op.target, op.partner)
    return state


def simulate(circuit: Circuit, qubit_cap: int | None = None) -> StateVector:
    """Execute the circuit on the all-zeros state."""
    state = init_zero(circuit.layout, qubit_cap)
    return apply_ops(state, circuit.ops)


def serialize_circuit(circuit: Circuit | Iterable[GateOp]) -> str:
    """Plain-text gate list, one op per line.

    ``H <q>`` | ``X <q>`` | ``CP <angle_rad> <target> <ctrl>...`` |
    ``SWAP <a> <b>``; angles carry 17 significant digits so they round-trip
    exactly.
    """
    ops = circuit.ops if isinstance(circuit, Circuit) else tuple(circuit)
    lines = []
    for op in ops:
        if op.kind is GateKind.HADAMARD:
            lines.append(f"H {op.target}")
        elif op.kind is GateKind.PAULI_X:
            lines.append(f"X {op.target}")
        elif op.kind is GateKind.CONTROLLED_PHASE:
            ctrl = "".join(f" {c}" for c in op.controls)
            lines.append(f"CP {op.angle:.17g} {op.target}{ctrl}")
        else:
            lines.append(f"SWAP {op.target} {op.partner}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_gate_list(text: str) -> tuple[GateOp, ...]:
    """Inverse of serialize_circuit (whitespace-tolerant)."""
    ops: list[GateOp] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        verb = parts[0].upper()
        try:
            if verb == "H" and len(parts) == 2:
                ops.append(_h(int(parts[1])))
            elif verb == "X" and len(parts) == 2:
                ops.append(_x(int(parts[1])))
            elif verb == "CP" and len(parts) >= 3:
                angle = float(parts[1])
                target = int(parts[2])
                controls = tuple(int(p) for p in parts[3:])
                ops.append(_cp(angle, controls, target))
            elif verb == "SWAP" and len(parts) == 3:
                ops.append(_swap(int(parts[1]), int(parts[2])))
            else:
                raise ValueError("unrecognized gate line")
        except ValueError as exc:
            raise ValueError(f"bad gate list line {lineno}: {raw!r} ({exc})") from None
    return tuple(ops)
