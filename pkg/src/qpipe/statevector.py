"""Dense complex statevector with bit-plane gate kernels.

Amplitude index convention (fixed across the package): the estimation
register occupies the high-order bits of the amplitude index and the
position register the low-order bits, so ``index = k * 2**n + x``.
Within each register, qubit 0 is the least-significant bit; globally,
qubit ``g`` is bit ``g`` of the amplitude index, position qubits are
``0..n-1`` and estimation qubits ``n..n+q-1``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "EQ_ATOL",
    "NORM_ATOL",
    "DEFAULT_QUBIT_CAP",
    "QUBIT_CAP_ENV",
    "ResourceLimitError",
    "RegisterLayout",
    "StateVector",
    "zero_state",
    "init_zero",
    "resolve_qubit_cap",
    "apply_hadamard",
    "apply_pauli_x",
    "apply_controlled_phase",
    "apply_swap",
    "inverse_qft_schedule",
    "apply_inverse_qft",
    "marginal_distribution",
]

# Centralized tolerances: amplitude/probability equality and norm drift.
EQ_ATOL = 1e-10
NORM_ATOL = 1e-9

# 2**24 complex128 amplitudes is ~256 MiB; keeps desk-scale runs in RAM.
DEFAULT_QUBIT_CAP = 24
QUBIT_CAP_ENV = "QPIPE_QUBIT_CAP"

_SQRT1_2 = 1.0 / math.sqrt(2.0)


class ResourceLimitError(RuntimeError):
    """A requested register would exceed the configured qubit cap."""

    def __init__(self, requested: int, cap: int):
        super().__init__(
            f"requested {requested} qubits exceeds the qubit cap of {cap}"
            f" (raise it via --qubit-cap or {QUBIT_CAP_ENV})"
        )
        self.requested = requested
        self.cap = cap


def resolve_qubit_cap(explicit: int | None = None) -> int:
    """Effective qubit cap: explicit value, else env override, else default."""
    if explicit is not None:
        return int(explicit)
    env = os.environ.get(QUBIT_CAP_ENV)
    if env is not None and env.strip():
        return int(env)
    return DEFAULT_QUBIT_CAP


@dataclass(frozen=True)
class RegisterLayout:
    """Estimation register of ``q`` qubits over position register of ``n``.

    Estimation bits are the high-order index bits so the marginal over
    (k, x) is a contiguous reshape.
    """

    q: int
    n: int

    def __post_init__(self):
        if self.q < 1 or self.n < 1:
            raise ValueError(f"register sizes must be >= 1, got q={self.q}, n={self.n}")

    @property
    def num_qubits(self) -> int:
        return self.q + self.n

    @property
    def estimation_dim(self) -> int:
        return 1 << self.q

    @property
    def position_dim(self) -> int:
        return 1 << self.n

    @property
    def position_qubits(self) -> tuple[int, ...]:
        return tuple(range(self.n))

    @property
    def estimation_qubits(self) -> tuple[int, ...]:
        return tuple(range(self.n, self.n + self.q))

    def estimation_qubit(self, k: int) -> int:
        if not 0 <= k < self.q:
            raise ValueError(f"estimation qubit {k} out of range for q={self.q}")
        return self.n + k


@dataclass
class StateVector:
    """2**num_qubits complex amplitudes, exclusively owned while mutated."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise ValueError(
                f"expected {1 << self.num_qubits} amplitudes for {self.num_qubits} "
                f"qubits, got shape {self.amplitudes.shape}"
            )

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())


def zero_state(num_qubits: int) -> StateVector:
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(num_qubits, amps)


def init_zero(layout: RegisterLayout, qubit_cap: int | None = None) -> StateVector:
    """All-zeros basis state over the joint register, subject to the cap."""
    cap = resolve_qubit_cap(qubit_cap)
    if layout.num_qubits > cap:
        raise ResourceLimitError(layout.num_qubits, cap)
    return zero_state(layout.num_qubits)


def _check_qubit(state: StateVector, qubit: int) -> None:
    if not 0 <= qubit < state.num_qubits:
        raise ValueError(f"qubit index {qubit} out of range for {state.num_qubits} qubits")


def _indices_with_bits_set(num_qubits: int, ones: Iterable[int], zeros: Iterable[int] = ()) -> np.ndarray:
    """All amplitude indices whose bits in `ones` are 1 and in `zeros` are 0.

    Enumerates only the free bits, so the cost is 2**(#free) instead of 2**m.
    """
    ones = set(ones)
    zeros = set(zeros)
    fixed = ones | zeros
    free = [b for b in range(num_qubits) if b not in fixed]
    base = 0
    for b in ones:
        base |= 1 << b
    r = np.arange(1 << len(free), dtype=np.intp)
    idx = np.full(r.shape, base, dtype=np.intp)
    for j, b in enumerate(free):
        idx |= ((r >> j) & 1) << b
    return idx


def apply_hadamard(state: StateVector, target: int) -> StateVector:
    """In-place 2x2 Hadamard on the target bit-plane."""
    _check_qubit(state, target)
    a = state.amplitudes.reshape(-1, 2, 1 << target)
    lo = a[:, 0, :].copy()
    hi = a[:, 1, :]
    a[:, 0, :] = (lo + hi) * _SQRT1_2
    a[:, 1, :] = (lo - hi) * _SQRT1_2
    return state


def apply_pauli_x(state: StateVector, target: int) -> StateVector:
    """Swap amplitude pairs that differ only in the target bit."""
    _check_qubit(state, target)
    a = state.amplitudes.reshape(-1, 2, 1 << target)
    tmp = a[:, 0, :].copy()
    a[:, 0, :] = a[:, 1, :]
    a[:, 1, :] = tmp
    return state


def apply_controlled_phase(
    state: StateVector,
    controls: Iterable[int],
    target: int,
    angle: float,
) -> StateVector:
    """Multiply by e^{i*angle} every amplitude with target and all controls set.

    An empty control set is an unconditional phase on the target's |1>
    subspace (a plain phase gate).
    """
    controls = tuple(controls)
    if len(set(controls)) != len(controls):
        raise ValueError(f"duplicate control qubits in {controls}")
    if target in controls:
        raise ValueError(f"target qubit {target} overlaps controls {controls}")
    _check_qubit(state, target)
    for c in controls:
        _check_qubit(state, c)
    if not math.isfinite(angle):
        raise ValueError(f"phase angle must be finite, got {angle}")
    idx = _indices_with_bits_set(state.num_qubits, {target, *controls})
    state.amplitudes[idx] *= complex(math.cos(angle), math.sin(angle))
    return state


def apply_swap(state: StateVector, qubit_a: int, qubit_b: int) -> StateVector:
    """Exchange two qubits (used for the QFT bit-reversal stage)."""
    if qubit_a == qubit_b:
        raise ValueError(f"swap requires two distinct qubits, got {qubit_a} twice")
    _check_qubit(state, qubit_a)
    _check_qubit(state, qubit_b)
    idx = _indices_with_bits_set(state.num_qubits, ones={qubit_a}, zeros={qubit_b})
    partner = idx ^ ((1 << qubit_a) | (1 << qubit_b))
    amps = state.amplitudes
    tmp = amps[idx].copy()
    amps[idx] = amps[partner]
    amps[partner] = tmp
    return state


def inverse_qft_schedule(qubits: Sequence[int]) -> list[tuple]:
    """Gate schedule realizing QFT^dagger on `qubits` (qubits[0] = LSB).

    The forward transform is the textbook ladder — per wire j from the
    most-significant down: H, then controlled phases pi/2**(j-m) from each
    less-significant wire m — followed by bit-reversal swaps.  The inverse
    is that sequence reversed with negated phases: len(qubits)*(len+2)//2
    gates in total.

    Items are ("h", target) | ("cp", angle, control, target) | ("swap", a, b).
    """
    qubits = list(qubits)
    count = len(qubits)
    forward: list[tuple] = []
    for j in reversed(range(count)):
        forward.append(("h", qubits[j]))
        for m in reversed(range(j)):
            forward.append(("cp", math.pi / (1 << (j - m)), qubits[m], qubits[j]))
    for i in range(count // 2):
        forward.append(("swap", qubits[i], qubits[count - 1 - i]))
    inverse: list[tuple] = []
    for item in reversed(forward):
        if item[0] == "cp":
            inverse.append(("cp", -item[1], item[2], item[3]))
        else:
            inverse.append(item)
    return inverse


def apply_inverse_qft(state: StateVector, qubits: Sequence[int]) -> StateVector:
    """Apply QFT^dagger to a contiguous ascending run of qubits.

    Realized gate-by-gate through the same primitives as the rest of the
    simulator; the dense conjugate-transpose DFT matrix exists only as a
    test oracle.
    """
    qubits = tuple(qubits)
    if not qubits:
        raise ValueError("inverse QFT needs at least one qubit")
    if qubits != tuple(range(qubits[0], qubits[0] + len(qubits))):
        raise ValueError(f"register {qubits} is not a contiguous ascending qubit run")
    for qb in qubits:
        _check_qubit(state, qb)
    for item in inverse_qft_schedule(qubits):
        if item[0] == "h":
            apply_hadamard(state, item[1])
        elif item[0] == "cp":
            apply_controlled_phase(state, (item[2],), item[3], item[1])
        else:
            apply_swap(state, item[1], item[2])
    return state


def marginal_distribution(state: StateVector, layout: RegisterLayout) -> np.ndarray:
    """Joint probabilities P[k, x] = |amplitude(k, x)|^2, shape (2**q, 2**n)."""
    if layout.num_qubits != state.num_qubits:
        raise ValueError(
            f"layout covers {layout.num_qubits} qubits but state has {state.num_qubits}"
        )
    probs = state.probabilities()
    return probs.reshape(layout.estimation_dim, layout.position_dim)
