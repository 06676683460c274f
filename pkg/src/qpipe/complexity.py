"""Closed-form resource calculators for the encoder variants.

Exact counts for the naive and Gray-code oracles (cross-validated against IR
tallies elsewhere), plus leading-term comparison rows for the standard
amplitude- and basis-encoding baselines, which are asymptotic-only and
flagged as estimates rather than dressed up with invented constants.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable

__all__ = [
    "Method",
    "ResourceEstimate",
    "qft_gate_count",
    "depth_estimate",
    "naive_counts",
    "gray_counts",
    "comparative_counts",
    "x_count_reduction_ratio",
    "emit_scaling_table",
    "SCALING_CSV_HEADER",
]


class Method(str, Enum):
    FRQI = "frqi"
    NEQR = "neqr"
    QPIPE_NAIVE = "qpipe-naive"
    QPIPE_GRAY = "qpipe-gray"


@dataclass(frozen=True)
class ResourceEstimate:
    """Gate counts and a depth estimate for one encoding method.

    For the two pipeline variants every count is exact (given power-of-two
    N) and total_gates is their sum; for the comparison baselines only the
    leading term is known and `is_leading_term_only` is set.  Non-power-of-two
    N makes the closed forms upper bounds (`is_upper_bound`).
    """

    method: Method
    qubits: int
    total_gates: int
    depth_estimate: int
    q: int
    n: int
    num_pixels: int
    num_nonzero: int
    x_count: int | None = None
    cp_count: int | None = None
    hadamard_count: int | None = None
    qft_count: int | None = None
    is_leading_term_only: bool = False
    is_upper_bound: bool = False

    def __post_init__(self):
        parts = (self.x_count, self.cp_count, self.hadamard_count, self.qft_count)
        if all(p is not None for p in parts) and sum(parts) != self.total_gates:
            raise ValueError(
                f"total_gates {self.total_gates} is not the sum of parts {parts}"
            )


def qft_gate_count(q: int) -> int:
    """q Hadamards + q(q-1)/2 controlled phases + floor(q/2) swaps.

    Equals q(q+2)/2 exactly for even q and its floor for odd q.
    """
    return q + q * (q - 1) // 2 + q // 2


def _check_sizes(q: int, n: int, num_pixels: int, num_nonzero: int) -> bool:
    if q < 1 or n < 1:
        raise ValueError(f"register sizes must be >= 1, got q={q}, n={n}")
    if not 1 <= num_pixels <= 1 << n:
        raise ValueError(f"pixel count {num_pixels} does not fit n={n} position qubits")
    if not 0 <= num_nonzero <= num_pixels:
        raise ValueError(f"nonzero count {num_nonzero} outside 0..{num_pixels}")
    return num_pixels != 1 << n  # True -> counts are upper bounds


def depth_estimate(method: Method, q: int, n: int, num_pixels: int, num_nonzero: int) -> int:
    """Leading-term depth with unit constant; an estimate, not an exact count.

    Each multi-controlled phase contributes O(n) two-qubit depth and pixels
    are sequential, giving q*n*N_nonzero for the naive oracle and
    q*(n*N_nonzero + N) for the Gray traversal (the bare transition skeleton
    costs q*N even with no phases).
    """
    if method is Method.FRQI:
        return num_pixels * num_pixels
    if method is Method.NEQR:
        return q * num_pixels * n
    if method is Method.QPIPE_NAIVE:
        return q * n * num_nonzero
    return q * (n * num_nonzero + num_pixels)


def naive_counts(
    q: int, n: int, num_pixels: int | None = None, num_nonzero: int | None = None
) -> ResourceEstimate:
    """Exact counts for the per-pixel mark/unmark oracle: qnN Pauli-X gates
    and q*N_nonzero controlled phases on top of the Hadamard and QFT stages."""
    if num_pixels is None:
        num_pixels = 1 << n
    if num_nonzero is None:
        num_nonzero = num_pixels
    upper = _check_sizes(q, n, num_pixels, num_nonzero)
    x = q * n * num_pixels
    cp = q * num_nonzero
    h = q + n
    qft = qft_gate_count(q)
    return ResourceEstimate(
        method=Method.QPIPE_NAIVE,
        qubits=q + n,
        x_count=x,
        cp_count=cp,
        hadamard_count=h,
        qft_count=qft,
        total_gates=x + cp + h + qft,
        depth_estimate=depth_estimate(Method.QPIPE_NAIVE, q, n, num_pixels, num_nonzero),
        q=q,
        n=n,
        num_pixels=num_pixels,
        num_nonzero=num_nonzero,
        is_upper_bound=upper,
    )


def gray_counts(
    q: int, n: int, num_pixels: int | None = None, num_nonzero: int | None = None
) -> ResourceEstimate:
    """Exact counts for the Gray-code oracle: q(2n + N - 2) Pauli-X gates,
    the controlled-phase count unchanged at q*N_nonzero."""
    if num_pixels is None:
        num_pixels = 1 << n
    if num_nonzero is None:
        num_nonzero = num_pixels
    upper = _check_sizes(q, n, num_pixels, num_nonzero)
    x = q * (2 * n + num_pixels - 2)
    cp = q * num_nonzero
    h = q + n
    qft = qft_gate_count(q)
    return ResourceEstimate(
        method=Method.QPIPE_GRAY,
        qubits=q + n,
        x_count=x,
        cp_count=cp,
        hadamard_count=h,
        qft_count=qft,
        total_gates=x + cp + h + qft,
        depth_estimate=depth_estimate(Method.QPIPE_GRAY, q, n, num_pixels, num_nonzero),
        q=q,
        n=n,
        num_pixels=num_pixels,
        num_nonzero=num_nonzero,
        is_upper_bound=upper,
    )


def _leading_term_row(method: Method, q: int, n: int, num_pixels: int) -> ResourceEstimate:
    if method is Method.FRQI:
        qubits = n + 1
        gates = num_pixels * num_pixels
    else:
        qubits = q + n
        gates = q * num_pixels * n
    return ResourceEstimate(
        method=method,
        qubits=qubits,
        total_gates=gates,
        depth_estimate=depth_estimate(method, q, n, num_pixels, num_pixels),
        q=q,
        n=n,
        num_pixels=num_pixels,
        num_nonzero=num_pixels,
        is_leading_term_only=True,
    )


def comparative_counts(
    q: int, n: int, num_pixels: int | None = None, num_nonzero: int | None = None
) -> list[ResourceEstimate]:
    """All four comparison rows: amplitude baseline, basis baseline, naive
    and Gray pipeline variants (worst case all pixels nonzero by default)."""
    if num_pixels is None:
        num_pixels = 1 << n
    if num_nonzero is None:
        num_nonzero = num_pixels
    return [
        _leading_term_row(Method.FRQI, q, n, num_pixels),
        _leading_term_row(Method.NEQR, q, n, num_pixels),
        naive_counts(q, n, num_pixels, num_nonzero),
        gray_counts(q, n, num_pixels, num_nonzero),
    ]


def x_count_reduction_ratio(q: int, n: int) -> float:
    """Pauli-X count ratio naive/Gray at N = 2**n; tends to n for large N."""
    num_pixels = 1 << n
    return (q * n * num_pixels) / (q * (2 * n + num_pixels - 2))


SCALING_CSV_HEADER = "k,N,method,qubits,x_count,cp_count,total_gates,depth,is_estimate"


def emit_scaling_table(q: int = 8, k_values: Iterable[int] | None = None) -> list[str]:
    """CSV rows (header first) for k-by-k images across all four methods."""
    if k_values is None:
        k_values = range(2, 257)
    lines = [SCALING_CSV_HEADER]
    for k in k_values:
        if k < 1:
            raise ValueError(f"image side length must be >= 1, got {k}")
        num_pixels = k * k
        n = max(1, (num_pixels - 1).bit_length())
        for est in comparative_counts(q, n, num_pixels=num_pixels):
            x = "" if est.x_count is None else str(est.x_count)
            cp = "" if est.cp_count is None else str(est.cp_count)
            flagged = est.is_leading_term_only or est.is_upper_bound
            lines.append(
                f"{k},{num_pixels},{est.method.value},{est.qubits},{x},{cp},"
                f"{est.total_gates},{est.depth_estimate},{int(flagged)}"
            )
    return lines
