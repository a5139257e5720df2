"""Two-dimensional cycle sweeps with CSV and binary PGM export.

Spectra are computed once per distinct field magnitude and shared by every
cell that uses them; each cell is then an independent, cheap evaluation.
Cells may be farmed out to worker processes, but results are always
assembled in row-major order (y outer, x inner), so the exported bytes do
not depend on the degree of parallelism.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cycles import CLASSIFY_TOL, CYCLE_KINDS, FROM_SPECTRA, OperationMode, snap
from .errors import NumericalError, ValidationError
from .spin_model import MagneticField, unit_vector
from .thermodynamics import spectrum_at

AXIS_VARIABLES = ("B0", "B1", "Th")
CSV_HEADER = "x,y,mode,w_net,q_in,q_out,eff,kappa"
ERROR = "error"

GRAY_LEVELS = {
    OperationMode.ENGINE: 60,
    OperationMode.REFRIGERATOR: 120,
    OperationMode.HEATER: 180,
    OperationMode.ACCELERATOR: 240,
    OperationMode.NONE: 0,
    ERROR: 255,
}


@dataclass(frozen=True)
class GridAxis:
    variable: str
    min: float
    max: float
    count: int

    def __post_init__(self):
        if self.variable not in AXIS_VARIABLES:
            raise ValidationError(
                f"axis variable must be one of {AXIS_VARIABLES}, got {self.variable!r}"
            )
        if not (math.isfinite(self.min) and math.isfinite(self.max) and self.min < self.max):
            raise ValidationError(
                f"axis {self.variable}: need finite min < max, got [{self.min}, {self.max}]"
            )
        if int(self.count) != self.count or self.count < 2:
            raise ValidationError(f"axis {self.variable}: count must be an integer >= 2")

    def values(self):
        return np.linspace(self.min, self.max, int(self.count))


@dataclass(frozen=True)
class SweepCell:
    x: float
    y: float
    mode: object  # OperationMode or ERROR
    w_net: float = math.nan
    q_in: float = math.nan
    q_out: float = math.nan
    eff: float | None = None
    kappa: float | None = None
    message: str | None = None

    @property
    def is_error(self):
        return self.mode == ERROR


@dataclass
class SweepResult:
    kind: str
    axis_x: GridAxis
    axis_y: GridAxis
    fixed: dict
    cells: list
    tol: float = CLASSIFY_TOL
    diagnostics: dict = field(default_factory=dict)

    def cell(self, ix, iy):
        return self.cells[iy * self.axis_x.count + ix]

    def mode_grid(self):
        """Modes as a (count_y, count_x) list of lists, row 0 = minimum y."""
        nx = self.axis_x.count
        return [
            [c.mode for c in self.cells[row * nx:(row + 1) * nx]]
            for row in range(self.axis_y.count)
        ]


def _cell_from_result(x, y, result):
    eff = result.efficiency if result.efficiency is not None else result.cop
    return SweepCell(
        x=float(x),
        y=float(y),
        mode=result.mode,
        w_net=result.w_net,
        q_in=result.q_in,
        q_out=result.q_out,
        eff=eff,
        kappa=result.kappa,
    )


# Worker state: each task only ships indices, the shared spectra are installed once.
_WORKER = {}


def _install(state):
    _WORKER.clear()
    _WORKER.update(state)


def _eval_row(iy):
    st = _WORKER
    func = FROM_SPECTRA[st["kind"]]
    y = st["ys"][iy]
    row = []
    for ix, x in enumerate(st["xs"]):
        spec0, spec1, t_l, t_h, failure = st["cell_inputs"](ix, iy)
        if failure is not None:
            row.append(SweepCell(float(x), float(y), ERROR, message=failure))
            continue
        try:
            result = func(spec0, spec1, t_l, t_h, st["tol"])
        except (ValidationError, NumericalError, ValueError, ArithmeticError) as exc:
            row.append(SweepCell(float(x), float(y), ERROR, message=str(exc)))
            continue
        row.append(_cell_from_result(x, y, result))
    return row


def _spectra_for(params, magnitudes, direction):
    """Spectrum (or failure message) for each field magnitude."""
    d = unit_vector(direction)
    out = []
    for b in magnitudes:
        try:
            out.append((spectrum_at(params, MagneticField(*(float(b) * d))), None))
        except (ValidationError, NumericalError) as exc:
            out.append((None, f"B={b}: {exc}"))
    return out


class _B0B1Inputs:
    def __init__(self, spectra_x, spectra_y, t_l, t_h):
        self.spectra_x = spectra_x
        self.spectra_y = spectra_y
        self.t_l = t_l
        self.t_h = t_h

    def __call__(self, ix, iy):
        spec0, err0 = self.spectra_x[ix]
        spec1, err1 = self.spectra_y[iy]
        return spec0, spec1, self.t_l, self.t_h, err0 or err1


class _B1ThInputs:
    def __init__(self, spec0, spectra_x, t_l, ths):
        self.spec0 = spec0
        self.spectra_x = spectra_x
        self.t_l = t_l
        self.ths = ths

    def __call__(self, ix, iy):
        spec0, err0 = self.spec0
        spec1, err1 = self.spectra_x[ix]
        return spec0, spec1, self.t_l, float(self.ths[iy]), err0 or err1


def _run(kind, axis_x, axis_y, fixed, cell_inputs, tol, workers):
    xs = axis_x.values()
    ys = axis_y.values()
    state = {"kind": kind, "xs": xs, "ys": ys, "cell_inputs": cell_inputs, "tol": tol}
    rows = range(len(ys))
    if workers is None or workers <= 1:
        _install(state)
        try:
            results = [_eval_row(iy) for iy in rows]
        finally:
            _WORKER.clear()
    else:
        with ProcessPoolExecutor(max_workers=workers, initializer=_install,
                                 initargs=(state,)) as pool:
            results = list(pool.map(_eval_row, rows))
    cells = [cell for row in results for cell in row]
    diagnostics = {str(m): 0 for m in OperationMode}
    diagnostics[ERROR] = 0
    for c in cells:
        diagnostics[str(c.mode)] += 1
    return SweepResult(kind, axis_x, axis_y, fixed, cells, tol, diagnostics)


def _check_kind(kind):
    if kind not in CYCLE_KINDS:
        raise ValidationError(f"unknown cycle {kind!r}; expected one of {CYCLE_KINDS}")


def sweep_b0_b1(params, t_l, t_h, axis_b0, axis_b1, cycle_kind,
                direction=(0.0, 0.0, 1.0), tol=CLASSIFY_TOL, workers=1):
    """Evaluate ``cycle_kind`` on the B0 (x) by B1 (y) grid at fixed bath temperatures."""
    _check_kind(cycle_kind)
    if not (0 < t_l < t_h):
        raise ValidationError(f"need 0 < t_l < t_h, got t_l={t_l}, t_h={t_h}")
    if axis_b0.variable != "B0" or axis_b1.variable != "B1":
        raise ValidationError("sweep_b0_b1 needs a B0 axis and a B1 axis")
    direction = tuple(unit_vector(direction))
    spectra_x = _spectra_for(params, axis_b0.values(), direction)
    spectra_y = _spectra_for(params, axis_b1.values(), direction)
    fixed = {"t_l": t_l, "t_h": t_h, "direction": direction, "compound": params.name}
    inputs = _B0B1Inputs(spectra_x, spectra_y, t_l, t_h)
    return _run(cycle_kind, axis_b0, axis_b1, fixed, inputs, tol, workers)


def sweep_b1_th(params, t_l, b0, axis_b1, axis_th, cycle_kind,
                direction=(0.0, 0.0, 1.0), tol=CLASSIFY_TOL, workers=1):
    """Evaluate ``cycle_kind`` on the B1 (x) by T_h (y) grid at fixed ``t_l`` and ``b0``."""
    _check_kind(cycle_kind)
    if not t_l > 0:
        raise ValidationError(f"t_l must be > 0, got {t_l}")
    if axis_b1.variable != "B1" or axis_th.variable != "Th":
        raise ValidationError("sweep_b1_th needs a B1 axis and a Th axis")
    ths = axis_th.values()
    if not np.all(ths > t_l):
        raise ValidationError(f"every T_h on the axis must exceed t_l={t_l}")
    direction = tuple(unit_vector(direction))
    spec0 = _spectra_for(params, [b0], direction)[0]
    spectra_x = _spectra_for(params, axis_b1.values(), direction)
    fixed = {"t_l": t_l, "b0": b0, "direction": direction, "compound": params.name}
    inputs = _B1ThInputs(spec0, spectra_x, t_l, ths)
    return _run(cycle_kind, axis_b1, axis_th, fixed, inputs, tol, workers)


def _fmt(value):
    if value is None:
        return "nan"
    return f"{value:.17g}"


def csv_row(cell, tol=CLASSIFY_TOL):
    if cell.is_error:
        return f"{_fmt(cell.x)},{_fmt(cell.y)},{ERROR},nan,nan,nan,nan,nan"
    values = [snap(v, tol) for v in (cell.w_net, cell.q_in, cell.q_out)]
    fields_ = [_fmt(cell.x), _fmt(cell.y), str(cell.mode)]
    fields_ += [_fmt(v) for v in values] + [_fmt(cell.eff), _fmt(cell.kappa)]
    return ",".join(fields_)


def export_csv(result):
    """CSV bytes: header plus one row per cell, row-major (y outer, x inner)."""
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for cell in result.cells:
        buf.write(csv_row(cell, result.tol) + "\n")
    return buf.getvalue().encode("ascii")


def _efficiency_level(cell):
    if cell.is_error or cell.mode is OperationMode.NONE:
        return 0
    value = cell.eff if cell.mode is OperationMode.ENGINE else cell.kappa
    if value is None or not math.isfinite(value):
        return 0
    value = min(max(value, 0.0), 1.0)
    return int(math.floor(value * 255 + 0.5))


def export_pgm(result, layer="mode"):
    """Binary P5 greymap of the mode or efficiency layer; the top row is the maximum y."""
    if layer not in ("mode", "efficiency"):
        raise ValidationError(f"layer must be 'mode' or 'efficiency', got {layer!r}")
    nx, ny = result.axis_x.count, result.axis_y.count
    pixels = bytearray()
    for iy in reversed(range(ny)):
        for ix in range(nx):
            cell = result.cell(ix, iy)
            if layer == "mode":
                pixels.append(GRAY_LEVELS[cell.mode])
            else:
                pixels.append(_efficiency_level(cell))
    return f"P5\n{nx} {ny}\n255\n".encode("ascii") + bytes(pixels)
