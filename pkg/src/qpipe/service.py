"""HTTP service wrapping the core pipeline.

Stateless request/response endpoints over JSON payloads; images travel
inline as row-major pixel lists.  Run with:

    uvicorn qpipe.service:app
"""

from __future__ import annotations

import math

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import generators
from .circuit import build_qpipe, serialize_circuit, simulate
from .complexity import emit_scaling_table
from .phasemap import Image, MappingKind, MappingMode, ShiftFill, default_i_range, map_phases
from .qed import Direction, run_qed, threshold_sweep
from .readout import ThresholdPolicy, decode_table, parse_threshold_spec
from .statevector import RegisterLayout, ResourceLimitError, marginal_distribution

app = FastAPI(
    title="qpipe",
    description="Phase-injection pixel encoding: simulate, decode, estimate resources.",
    version="0.1.0",
)


class ImagePayload(BaseModel):
    width: int
    height: int
    pixels: list[float]  # row-major
    bit_depth_hint: int | None = None

    def to_image(self) -> Image:
        return Image(width=self.width, height=self.height, pixels=self.pixels,
                     bit_depth_hint=self.bit_depth_hint)

    @classmethod
    def from_image(cls, image: Image) -> "ImagePayload":
        return cls(width=image.width, height=image.height,
                   pixels=[float(v) for v in image.pixels],
                   bit_depth_hint=image.bit_depth_hint)


class EncodeRequest(BaseModel):
    image: ImagePayload
    qubits_estimation: int = 8
    mode: MappingKind = MappingKind.FULL_TURN
    i_range: float | None = None
    threshold: str = "dynamic"
    qubit_cap: int | None = None
    dump_circuit: bool = False


class PixelRow(BaseModel):
    x: int
    row: int
    col: int
    decoded: float | None  # None when annihilated
    retained_mass: float
    annihilated: bool


class EncodeResponse(BaseModel):
    q: int
    n: int
    threshold_resolved: float
    pixels: list[PixelRow]
    circuit: str | None = None


class QedRequest(BaseModel):
    image: ImagePayload
    qubits_estimation: int = 8
    directions: list[Direction] = Field(
        default=[Direction.HORIZONTAL, Direction.VERTICAL, Direction.SOBEL]
    )
    mode: MappingKind = MappingKind.HALF_TURN
    i_range: float | None = None
    threshold: str = "dynamic"
    fill: ShiftFill = ShiftFill.ZERO
    include_annihilated_as_zero: bool = False
    qubit_cap: int | None = None


class DirectionResult(BaseModel):
    mae: float | None
    annihilated_count: int
    quantum: list[list[float]]
    classical: list[list[float]]


class QedResponse(BaseModel):
    config: dict
    annihilated_count: int
    results: dict[str, DirectionResult]


class ComplexityRequest(BaseModel):
    qubits_estimation: int = 8
    k_min: int = 2
    k_max: int = 256


class ComplexityResponse(BaseModel):
    csv: list[str]  # header line first


class SweepRequest(BaseModel):
    image: ImagePayload
    qubits_estimation: int = 8
    thresholds: list[str] = Field(
        default=["1e-1", "1e-2", "1e-3", "1e-4", "1e-5", "1e-6", "dynamic"]
    )
    direction: Direction = Direction.SOBEL
    mode: MappingKind = MappingKind.HALF_TURN
    i_range: float | None = None
    fill: ShiftFill = ShiftFill.ZERO
    qubit_cap: int | None = None


class SweepRow(BaseModel):
    threshold: str
    resolved: float
    mae: float
    annihilated_count: int


class SweepResponse(BaseModel):
    rows: list[SweepRow]


class GenerateRequest(BaseModel):
    generator: str
    width: int
    height: int
    seed: int = 0
    sigma: float = 0.1
    high: float = 200.0
    low: float = 0.0
    split: int | None = None
    i_range: float = 256.0


def _bad_request(exc: Exception) -> HTTPException:
    return HTTPException(status_code=422, detail=str(exc))


def _parse_policy(spec: str) -> ThresholdPolicy:
    spec = spec.strip()
    try:
        return ThresholdPolicy.fixed(float(spec))  # bare numbers mean fixed
    except ValueError:
        return parse_threshold_spec(spec)


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "service": "qpipe"}


@app.post("/encode", response_model=EncodeResponse)
def encode(request: EncodeRequest) -> EncodeResponse:
    try:
        image = request.image.to_image()
        i_range = request.i_range if request.i_range is not None else default_i_range(image)
        mode = MappingMode(request.mode, i_range)
        policy = _parse_policy(request.threshold)
        phases = map_phases(image, mode)
        layout = RegisterLayout(q=request.qubits_estimation, n=phases.n)
        circuit = build_qpipe(layout, phases)
        state = simulate(circuit, request.qubit_cap)
        table = decode_table(marginal_distribution(state, layout), layout, policy, mode)
    except ResourceLimitError as exc:
        raise HTTPException(status_code=413, detail=str(exc))
    except ValueError as exc:
        raise _bad_request(exc)
    count = image.width * image.height
    rows = [
        PixelRow(
            x=p.position,
            row=p.position // image.width,
            col=p.position % image.width,
            decoded=None if p.annihilated else p.decoded_intensity,
            retained_mass=p.retained_mass,
            annihilated=p.annihilated,
        )
        for p in table.pixels[:count]
    ]
    return EncodeResponse(
        q=layout.q,
        n=layout.n,
        threshold_resolved=table.threshold_used,
        pixels=rows,
        circuit=serialize_circuit(circuit) if request.dump_circuit else None,
    )


@app.post("/qed", response_model=QedResponse)
def qed(request: QedRequest) -> QedResponse:
    try:
        image = request.image.to_image()
        policy = _parse_policy(request.threshold)
        report = run_qed(
            image,
            q=request.qubits_estimation,
            policy=policy,
            directions=request.directions,
            fill=request.fill,
            mapping=request.mode,
            i_range=request.i_range,
            include_annihilated_as_zero=request.include_annihilated_as_zero,
            qubit_cap=request.qubit_cap,
        )
    except ResourceLimitError as exc:
        raise HTTPException(status_code=413, detail=str(exc))
    except ValueError as exc:
        raise _bad_request(exc)
    results = {
        d.value: DirectionResult(
            mae=None if math.isnan(r.mae) else r.mae,
            annihilated_count=r.annihilated_count,
            quantum=r.quantum.values.tolist(),
            classical=r.classical.values.tolist(),
        )
        for d, r in report.results.items()
    }
    return QedResponse(
        config=report.config,
        annihilated_count=report.annihilated_count,
        results=results,
    )


@app.post("/complexity", response_model=ComplexityResponse)
def complexity(request: ComplexityRequest) -> ComplexityResponse:
    if request.k_min < 1 or request.k_max < request.k_min:
        raise _bad_request(ValueError(f"bad side-length range {request.k_min}..{request.k_max}"))
    try:
        lines = emit_scaling_table(
            q=request.qubits_estimation,
            k_values=range(request.k_min, request.k_max + 1),
        )
    except ValueError as exc:
        raise _bad_request(exc)
    return ComplexityResponse(csv=lines)


@app.post("/threshold-sweep", response_model=SweepResponse)
def sweep(request: SweepRequest) -> SweepResponse:
    try:
        image = request.image.to_image()
        policies = [_parse_policy(spec) for spec in request.thresholds]
        rows = threshold_sweep(
            image,
            q=request.qubits_estimation,
            policies=policies,
            direction=request.direction,
            fill=request.fill,
            mapping=request.mode,
            i_range=request.i_range,
            qubit_cap=request.qubit_cap,
        )
    except ResourceLimitError as exc:
        raise HTTPException(status_code=413, detail=str(exc))
    except ValueError as exc:
        raise _bad_request(exc)
    return SweepResponse(rows=[SweepRow(**row) for row in rows])


@app.post("/generate", response_model=ImagePayload)
def generate(request: GenerateRequest) -> ImagePayload:
    kwargs: dict = {"width": request.width, "height": request.height}
    if request.generator == "ramp":
        kwargs["i_range"] = request.i_range
    elif request.generator == "step":
        kwargs.update(high=request.high, low=request.low, split=request.split)
    else:
        kwargs.update(sigma=request.sigma, i_range=request.i_range, seed=request.seed)
    try:
        image = generators.generate(request.generator, **kwargs)
    except ValueError as exc:
        raise _bad_request(exc)
    return ImagePayload.from_image(image)
