"""Equilibrium thermodynamics of a finite spectrum, in k_B = 1 units.

All exponentials are shifted by the lowest level, so nothing overflows even
at T = 1e-8 K with Kelvin-scale gaps. Entropy is dimensionless, energies are
in Kelvin per molecule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .eigensolver import Spectrum, diagonalize
from .errors import ConvergenceError, DomainError, NoRootError, ValidationError
from .spin_model import MagneticField, build_hamiltonian, unit_vector

FIELD_BRACKET = (0.0, 10.0)
TEMPERATURE_BRACKET = (1e-3, 50.0)
ROOT_TOL = 1e-10
FIELD_SCAN_INTERVALS = 32


def _levels(spec):
    if isinstance(spec, Spectrum):
        return spec.eigenvalues
    levels = np.asarray(spec, dtype=float)
    if levels.ndim != 1 or levels.size == 0:
        raise ValidationError("spectrum must be a non-empty 1-D array of energies")
    return levels


def _check_temperature(t):
    if not (isinstance(t, (int, float, np.floating)) and math.isfinite(t) and t > 0):
        raise DomainError(f"temperature must be finite and > 0 K, got {t!r}")


def _shifted_weights(spec, t):
    """Return (levels, e_min, x, w, z) with x = (e - e_min)/t, w = exp(-x), z = sum(w)."""
    _check_temperature(t)
    levels = _levels(spec)
    e_min = levels.min()
    x = (levels - e_min) / t
    w = np.exp(-x)
    return levels, e_min, x, w, w.sum()


def boltzmann(spec, t):
    """Equilibrium populations of each level at temperature ``t``."""
    _, _, _, w, z = _shifted_weights(spec, t)
    return w / z


def log_partition(spec, t):
    _, e_min, _, _, z = _shifted_weights(spec, t)
    return -e_min / t + math.log(z)


def internal_energy(spec, t):
    """Mean energy ``sum_i e_i p_i``, evaluated relative to the ground level."""
    levels, e_min, _, w, z = _shifted_weights(spec, t)
    return e_min + float(np.dot(levels - e_min, w / z))


def entropy(spec, t):
    """Gibbs entropy ``-sum p ln p`` with ``0 ln 0 = 0``.

    Uses ``ln p_i = -x_i - ln z`` exactly, so levels whose population
    underflows to zero contribute nothing instead of NaN.
    """
    _, _, x, w, z = _shifted_weights(spec, t)
    p = w / z
    return float(np.dot(p, x + math.log(z)))


@dataclass(frozen=True)
class ThermoPoint:
    temperature: float
    field: MagneticField
    probs: np.ndarray
    log_z: float
    internal_energy: float
    entropy: float


@lru_cache(maxsize=8192)
def spectrum_at(params, field):
    """Diagonalized Hamiltonian of ``params`` in ``field`` (memoized; inputs are immutable)."""
    if not isinstance(field, MagneticField):
        field = MagneticField(*field)
    return diagonalize(build_hamiltonian(params, field))


def thermo_point(params, t, field):
    _check_temperature(t)
    if not isinstance(field, MagneticField):
        field = MagneticField(*field)
    spec = spectrum_at(params, field)
    probs = boltzmann(spec, t)
    probs.setflags(write=False)
    return ThermoPoint(
        temperature=float(t),
        field=field,
        probs=probs,
        log_z=log_partition(spec, t),
        internal_energy=internal_energy(spec, t),
        entropy=entropy(spec, t),
    )


def _check_bracket(bracket, what):
    try:
        lo, hi = (float(b) for b in bracket)
    except (TypeError, ValueError):
        raise ValidationError(f"{what} bracket must be a pair of numbers") from None
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValidationError(f"{what} bracket must be finite with lo < hi, got {bracket!r}")
    return lo, hi


def _bracketed_root(g, lo, hi, scan, what):
    """First root of ``g`` on [lo, hi], scanning ``scan`` equal subintervals from ``lo``."""
    nodes = np.linspace(lo, hi, scan + 1) if scan > 1 else np.array([lo, hi])
    g_prev = g(nodes[0])
    if g_prev == 0.0:
        return float(nodes[0])
    for a, b in zip(nodes[:-1], nodes[1:]):
        g_next = g(b)
        if g_next == 0.0:
            return float(b)
        if (g_prev < 0.0) != (g_next < 0.0):
            root = brentq(g, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
            if abs(g(root)) > ROOT_TOL:
                raise ConvergenceError(
                    f"{what}: root refinement stalled at residual {abs(g(root)):.3e}"
                )
            return float(root)
        g_prev = g_next
    raise NoRootError(f"no isentropic {what} in range [{lo}, {hi}]")


def isentropic_field(params, t, s_target, direction=(0.0, 0.0, 1.0),
                     bracket=FIELD_BRACKET, scan=FIELD_SCAN_INTERVALS):
    """Field magnitude along ``direction`` at which ``S(t, B) = s_target``.

    S(B) at fixed T need not be monotonic, so the bracket is cut into
    ``scan`` equal subintervals and the first sign change from ``b_lo`` is
    refined with Brent's method. The returned field satisfies the entropy
    match to 1e-10. Raises :class:`NoRootError` when no subinterval changes
    sign.
    """
    _check_temperature(t)
    lo, hi = _check_bracket(bracket, "field")
    d = unit_vector(direction)

    def g(b):
        return entropy(spectrum_at(params, MagneticField(*(b * d))), t) - s_target

    return _bracketed_root(g, lo, hi, scan, "field")


def isentropic_temperature(params, field, s_target, bracket=TEMPERATURE_BRACKET):
    """Temperature at which ``S(T, field) = s_target``; S is nondecreasing in T."""
    lo, hi = _check_bracket(bracket, "temperature")
    if lo <= 0.0:
        raise DomainError(f"temperature bracket must be positive, got {bracket!r}")
    if not isinstance(field, MagneticField):
        field = MagneticField(*field)
    spec = spectrum_at(params, field)

    def g(t):
        return entropy(spec, t) - s_target

    return _bracketed_root(g, lo, hi, 1, "temperature")


def trace_isentrope(params, start, field_grid, direction=(0.0, 0.0, 1.0),
                    bracket=TEMPERATURE_BRACKET):
    """Temperatures along the isentrope through ``start = (t0, field0)``.

    Returns a list of ``(B, T)`` pairs, one per grid magnitude; grid points
    with no solution in ``bracket`` carry ``T = nan``.
    """
    t0, field0 = start
    if not isinstance(field0, MagneticField):
        field0 = MagneticField(*field0)
    s0 = entropy(spectrum_at(params, field0), t0)
    d = unit_vector(direction)
    out = []
    for b in field_grid:
        b = float(b)
        field = MagneticField(*(b * d))
        if field == field0:
            out.append((b, float(t0)))
            continue
        try:
            out.append((b, isentropic_temperature(params, field, s0, bracket)))
        except NoRootError:
            out.append((b, math.nan))
    return out
