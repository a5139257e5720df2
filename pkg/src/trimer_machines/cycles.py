"""Reversible quantum Carnot, Otto and Stirling cycles on the trimer.

Sign conventions
----------------
* ``work`` is the work done BY the working substance (positive = output).
* ``heat`` is positive when it flows INTO the working substance.
* ``q_in`` is the heat exchanged with the hot bath and ``q_out`` the heat
  exchanged with the cold bath, both signed as above. Cycle closure then
  reads ``w_net = q_in + q_out``.

Each cycle is evaluated from the two spectra at the field magnitudes
``b0`` and ``b1``; the ``*_from_spectra`` functions expose that core so a
sweep can reuse spectra across grid cells.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, NoEfficiencyError, NoRootError, ValidationError
from .spin_model import MagneticField, unit_vector
from .thermodynamics import (
    FIELD_BRACKET,
    boltzmann,
    entropy,
    internal_energy,
    isentropic_field,
    spectrum_at,
)

CLASSIFY_TOL = 1e-12
CYCLE_KINDS = ("carnot", "otto", "stirling")


class OperationMode(str, enum.Enum):
    ENGINE = "engine"
    REFRIGERATOR = "refrigerator"
    HEATER = "heater"
    ACCELERATOR = "accelerator"
    NONE = "none"

    def __str__(self):
        return self.value


# sign patterns of (w_net, q_in, q_out)
_SIGN_TABLE = {
    (1, 1, -1): OperationMode.ENGINE,
    (-1, -1, 1): OperationMode.REFRIGERATOR,
    (-1, -1, -1): OperationMode.HEATER,
    (-1, 1, -1): OperationMode.ACCELERATOR,
}


@dataclass(frozen=True)
class StrokeRecord:
    label: str
    kind: str
    heat: float
    work: float
    delta_u: float


@dataclass(frozen=True)
class CycleResult:
    """Outcome of one reversible cycle.

    ``efficiency`` is set for engines only, ``cop`` and ``kappa`` for the
    other modes. ``strokes`` is ``None`` when stroke-level detail is
    unavailable (Carnot intermediate fields outside the bracket, or detail
    not requested). ``intermediate_fields`` holds the Carnot ``(B_b, B_d)``.
    """

    kind: str
    strokes: tuple | None
    w_net: float
    q_in: float
    q_out: float
    mode: OperationMode
    efficiency: float | None = None
    cop: float | None = None
    kappa: float | None = None
    intermediate_fields: tuple | None = None

    @property
    def closure_error(self):
        return abs(self.w_net - (self.q_in + self.q_out))


def snap(value, tol=CLASSIFY_TOL):
    return 0.0 if abs(value) < tol else value


def _sign(value):
    return int(value > 0) - int(value < 0)


def classify_mode(w_net, q_in, q_out, tol=CLASSIFY_TOL):
    """Operating mode from the signs of net work and bath heats.

    Values smaller than ``tol`` in magnitude count as zero, and a zero in any
    slot matches no mode.
    """
    if not tol > 0:
        raise ValidationError(f"classification tolerance must be > 0, got {tol!r}")
    key = tuple(_sign(snap(v, tol)) for v in (w_net, q_in, q_out))
    return _SIGN_TABLE.get(key, OperationMode.NONE)


def cop_to_kappa(cop):
    return cop / (1.0 + cop)


def efficiency_and_kappa(mode, w_net, q_in, q_out):
    """Return ``(eta, None)`` for an engine and ``(cop, kappa)`` otherwise."""
    mode = OperationMode(mode)
    if mode is OperationMode.ENGINE:
        return w_net / q_in, None
    if mode is OperationMode.REFRIGERATOR:
        cop = q_in / w_net
    elif mode in (OperationMode.HEATER, OperationMode.ACCELERATOR):
        cop = q_out / w_net
    else:
        raise NoEfficiencyError("a cycle with mode 'none' has no efficiency")
    return cop, cop_to_kappa(cop)


def _check_temperatures(t_l, t_h):
    for name, t in (("t_l", t_l), ("t_h", t_h)):
        if not (isinstance(t, (int, float, np.floating)) and math.isfinite(t) and t > 0):
            raise DomainError(f"{name} must be finite and > 0 K, got {t!r}")
    if not t_l < t_h:
        raise DomainError(f"need t_l < t_h, got t_l={t_l!r}, t_h={t_h!r}")


def _check_fields(b0, b1, nonnegative=False):
    for name, b in (("b0", b0), ("b1", b1)):
        if not math.isfinite(b):
            raise ValidationError(f"{name} must be finite, got {b!r}")
        if nonnegative and b < 0:
            raise ValidationError(f"{name} must be >= 0 T, got {b!r}")


def _finish(kind, strokes, w_net, q_in, q_out, tol, intermediate=None):
    mode = classify_mode(w_net, q_in, q_out, tol)
    efficiency = cop = kappa = None
    if mode is OperationMode.ENGINE:
        efficiency, _ = efficiency_and_kappa(mode, w_net, q_in, q_out)
    elif mode is not OperationMode.NONE:
        cop, kappa = efficiency_and_kappa(mode, w_net, q_in, q_out)
    return CycleResult(
        kind=kind,
        strokes=strokes,
        w_net=float(w_net),
        q_in=float(q_in),
        q_out=float(q_out),
        mode=mode,
        efficiency=efficiency,
        cop=cop,
        kappa=kappa,
        intermediate_fields=intermediate,
    )


def _isothermal(label, t, s_start, s_end, u_start, u_end):
    heat = float(t * (s_end - s_start))
    delta_u = float(u_end - u_start)
    return StrokeRecord(label, "isothermal", heat, heat - delta_u, delta_u)


def _adiabatic(label, u_start, u_end):
    delta_u = float(u_end - u_start)
    return StrokeRecord(label, "adiabatic", 0.0, -delta_u, delta_u)


def _isochoric(label, heat):
    heat = float(heat)
    return StrokeRecord(label, "isochoric", heat, 0.0, heat)


# --- Carnot -----------------------------------------------------------------

def carnot_from_spectra(spec0, spec1, t_l, t_h, tol=CLASSIFY_TOL):
    """Net Carnot quantities; they depend only on the two corner entropies."""
    _check_temperatures(t_l, t_h)
    delta_s = entropy(spec0, t_l) - entropy(spec1, t_h)
    q_in = t_h * delta_s
    q_out = -t_l * delta_s
    w_net = (t_h - t_l) * delta_s
    return _finish("carnot", None, w_net, q_in, q_out, tol)


def carnot_cycle(params, t_l, t_h, b0, b1, direction=(0.0, 0.0, 1.0),
                 bracket=FIELD_BRACKET, tol=CLASSIFY_TOL, detail=True):
    """Carnot cycle: isotherm at ``t_l``, adiabat to (t_h, b1), isotherm at ``t_h``, adiabat back.

    With ``detail`` the intermediate fields ``B_b`` (end of the cold
    isotherm) and ``B_d`` (end of the hot isotherm) are found by entropy
    matching inside ``bracket`` and the four strokes are reported. If either
    has no solution, ``strokes`` is ``None`` but the net result stands.
    """
    _check_temperatures(t_l, t_h)
    _check_fields(b0, b1, nonnegative=True)
    d = unit_vector(direction)
    spec0 = spectrum_at(params, MagneticField(*(b0 * d)))
    spec1 = spectrum_at(params, MagneticField(*(b1 * d)))
    net = carnot_from_spectra(spec0, spec1, t_l, t_h, tol)
    if not detail:
        return net

    s_a = entropy(spec0, t_l)
    s_c = entropy(spec1, t_h)
    try:
        b_b = isentropic_field(params, t_l, s_c, d, bracket)
        b_d = isentropic_field(params, t_h, s_a, d, bracket)
    except (NoRootError, ConvergenceError):
        return net
    spec_b = spectrum_at(params, MagneticField(*(b_b * d)))
    spec_d = spectrum_at(params, MagneticField(*(b_d * d)))
    u_a = internal_energy(spec0, t_l)
    u_b = internal_energy(spec_b, t_l)
    u_c = internal_energy(spec1, t_h)
    u_d = internal_energy(spec_d, t_h)
    strokes = (
        _isothermal("a-b", t_l, s_a, entropy(spec_b, t_l), u_a, u_b),
        _adiabatic("b-c", u_b, u_c),
        _isothermal("c-d", t_h, s_c, entropy(spec_d, t_h), u_c, u_d),
        _adiabatic("d-a", u_d, u_a),
    )
    return CycleResult(
        kind=net.kind,
        strokes=strokes,
        w_net=net.w_net,
        q_in=net.q_in,
        q_out=net.q_out,
        mode=net.mode,
        efficiency=net.efficiency,
        cop=net.cop,
        kappa=net.kappa,
        intermediate_fields=(b_b, b_d),
    )


# --- Otto -------------------------------------------------------------------

def otto_from_spectra(spec0, spec1, t_l, t_h, tol=CLASSIFY_TOL):
    """Otto cycle with population-frozen adiabats between the two spectra.

    Levels are paired by ascending index; the intermediate temperatures at
    b and d are never needed.
    """
    _check_temperatures(t_l, t_h)
    e0 = spec0.eigenvalues
    e1 = spec1.eigenvalues
    p_l = boltzmann(spec0, t_l)
    p_h = boltzmann(spec1, t_h)
    dp = p_h - p_l
    q_in = float(np.dot(e1, dp))
    q_out = float(np.dot(e0, -dp))
    w_net = float(np.dot(e1 - e0, dp))
    strokes = (
        _adiabatic("a-b", float(np.dot(e0, p_l)), float(np.dot(e1, p_l))),
        _isochoric("b-c", q_in),
        _adiabatic("c-d", float(np.dot(e1, p_h)), float(np.dot(e0, p_h))),
        _isochoric("d-a", q_out),
    )
    return _finish("otto", strokes, w_net, q_in, q_out, tol)


def otto_cycle(params, t_l, t_h, b0, b1, direction=(0.0, 0.0, 1.0), tol=CLASSIFY_TOL):
    _check_temperatures(t_l, t_h)
    _check_fields(b0, b1)
    d = unit_vector(direction)
    spec0 = spectrum_at(params, MagneticField(*(b0 * d)))
    spec1 = spectrum_at(params, MagneticField(*(b1 * d)))
    return otto_from_spectra(spec0, spec1, t_l, t_h, tol)


# --- Stirling ---------------------------------------------------------------

def stirling_from_spectra(spec0, spec1, t_l, t_h, tol=CLASSIFY_TOL):
    """Stirling cycle: two isotherms joined by two isochores."""
    _check_temperatures(t_l, t_h)
    s_l0, s_l1 = entropy(spec0, t_l), entropy(spec1, t_l)
    s_h0, s_h1 = entropy(spec0, t_h), entropy(spec1, t_h)
    u_l0, u_l1 = internal_energy(spec0, t_l), internal_energy(spec1, t_l)
    u_h0, u_h1 = internal_energy(spec0, t_h), internal_energy(spec1, t_h)
    ab = _isothermal("a-b", t_l, s_l0, s_l1, u_l0, u_l1)
    bc = _isochoric("b-c", u_h1 - u_l1)
    cd = _isothermal("c-d", t_h, s_h1, s_h0, u_h1, u_h0)
    da = _isochoric("d-a", u_l0 - u_h0)
    w_net = ab.work + cd.work
    q_in = bc.heat + cd.heat
    q_out = da.heat + ab.heat
    return _finish("stirling", (ab, bc, cd, da), w_net, q_in, q_out, tol)


def stirling_cycle(params, t_l, t_h, b0, b1, direction=(0.0, 0.0, 1.0), tol=CLASSIFY_TOL):
    _check_temperatures(t_l, t_h)
    _check_fields(b0, b1)
    d = unit_vector(direction)
    spec0 = spectrum_at(params, MagneticField(*(b0 * d)))
    spec1 = spectrum_at(params, MagneticField(*(b1 * d)))
    return stirling_from_spectra(spec0, spec1, t_l, t_h, tol)


FROM_SPECTRA = {
    "carnot": carnot_from_spectra,
    "otto": otto_from_spectra,
    "stirling": stirling_from_spectra,
}


def run_cycle(kind, params, t_l, t_h, b0, b1, direction=(0.0, 0.0, 1.0), **kwargs):
    """Dispatch to the cycle named ``kind``."""
    if kind == "carnot":
        return carnot_cycle(params, t_l, t_h, b0, b1, direction, **kwargs)
    if kind == "otto":
        return otto_cycle(params, t_l, t_h, b0, b1, direction, **kwargs)
    if kind == "stirling":
        return stirling_cycle(params, t_l, t_h, b0, b1, direction, **kwargs)
    raise ValidationError(f"unknown cycle {kind!r}; expected one of {CYCLE_KINDS}")
