"""Phase-injection pixel encoding: statevector simulation, Gray-code phase
oracles, inverse-QFT decoding, threshold-governed readout, closed-form
resource estimation and quantum edge detection."""

from .circuit import (
    Circuit,
    GateKind,
    GateOp,
    GateTally,
    GrayStep,
    build_gray_oracle,
    build_naive_oracle,
    build_qpipe,
    count_gates,
    gray_sequence,
    parse_gate_list,
    serialize_circuit,
    simulate,
)
from .complexity import (
    Method,
    ResourceEstimate,
    comparative_counts,
    depth_estimate,
    emit_scaling_table,
    gray_counts,
    naive_counts,
)
from .phasemap import (
    Image,
    MappingKind,
    MappingMode,
    PhaseImage,
    ShiftAxis,
    ShiftFill,
    accumulate_phases,
    default_i_range,
    flatten_and_pad,
    map_phases,
    negate_phases,
    shift_image,
)
from .qed import (
    Direction,
    GradientField,
    QedReport,
    classical_gradient,
    mae,
    quantum_gradient,
    run_qed,
    sobel_fuse,
    threshold_sweep,
)
from .readout import (
    ReadoutTable,
    SignalAnnihilatedError,
    ThresholdPolicy,
    decode_pixel,
    decode_table,
    dirichlet_kernel_prob,
    parse_threshold_spec,
)
from .statevector import (
    RegisterLayout,
    ResourceLimitError,
    StateVector,
    apply_controlled_phase,
    apply_hadamard,
    apply_inverse_qft,
    apply_pauli_x,
    init_zero,
    marginal_distribution,
)

__version__ = "0.1.0"
