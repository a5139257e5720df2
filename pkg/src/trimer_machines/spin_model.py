"""Spin-1/2 triangle Hamiltonian with anisotropic exchange, DM coupling and Zeeman term.

Basis convention: computational states ``|s1 s2 s3>`` with site 1 as the most
significant bit and spin-up encoded as 0, so index 0 is ``|up up up>``.
Spin operators are ``sigma/2``; every coupling is in Kelvin and the field in
Tesla, converted through ``mu_b_hat = mu_B / k_B``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import ParameterError, UnknownPresetError

MU_B_HAT = 0.6717156644  # K/T

PAIRS = ((1, 2), (2, 3), (3, 1))
AXES = ("x", "y", "z")

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# Levi-Civita: nonzero (alpha, beta, gamma) -> sign
_LEVI_CIVITA = {
    ("x", "y", "z"): 1.0,
    ("y", "z", "x"): 1.0,
    ("z", "x", "y"): 1.0,
    ("x", "z", "y"): -1.0,
    ("z", "y", "x"): -1.0,
    ("y", "x", "z"): -1.0,
}


def _check_finite(obj):
    for f in fields(obj):
        value = getattr(obj, f.name)
        if isinstance(value, float) and not math.isfinite(value):
            raise ParameterError(
                f"{type(obj).__name__}.{f.name} must be finite, got {value!r}"
            )


@dataclass(frozen=True)
class BondExchange:
    jx: float
    jy: float
    jz: float

    def __post_init__(self):
        for name in ("jx", "jy", "jz"):
            object.__setattr__(self, name, float(getattr(self, name)))
        _check_finite(self)

    def component(self, axis):
        return getattr(self, "j" + axis)


@dataclass(frozen=True)
class DMVector:
    dx: float
    dy: float
    dz: float

    def __post_init__(self):
        for name in ("dx", "dy", "dz"):
            object.__setattr__(self, name, float(getattr(self, name)))
        _check_finite(self)

    def component(self, axis):
        return getattr(self, "d" + axis)


@dataclass(frozen=True)
class GTensor:
    """Diagonal g-tensor of one site."""

    gx: float
    gy: float
    gz: float

    def __post_init__(self):
        for name in ("gx", "gy", "gz"):
            object.__setattr__(self, name, float(getattr(self, name)))
        _check_finite(self)

    def component(self, axis):
        return getattr(self, "g" + axis)


@dataclass(frozen=True)
class MagneticField:
    """Site-independent applied field in Tesla."""

    bx: float = 0.0
    by: float = 0.0
    bz: float = 0.0

    def __post_init__(self):
        for name in ("bx", "by", "bz"):
            object.__setattr__(self, name, float(getattr(self, name)))
        _check_finite(self)

    @classmethod
    def along(cls, direction, magnitude):
        """Field of the given magnitude along ``direction`` (normalized here)."""
        d = unit_vector(direction)
        return cls(*(float(magnitude) * d))

    def component(self, axis):
        return getattr(self, "b" + axis)

    def as_array(self):
        return np.array([self.bx, self.by, self.bz])

    @property
    def magnitude(self):
        return float(np.linalg.norm(self.as_array()))


def unit_vector(direction):
    d = np.asarray(direction, dtype=float).reshape(3)
    if not np.all(np.isfinite(d)):
        raise ParameterError(f"direction must be finite, got {direction!r}")
    norm = np.linalg.norm(d)
    if norm == 0.0:
        raise ParameterError("direction must be a nonzero vector")
    return d / norm


@dataclass(frozen=True)
class CompoundParams:
    """Full parameter set of one trimer compound.

    ``bonds`` and ``dm`` are ordered as the pairs (1,2), (2,3), (3,1);
    ``g`` is ordered by site 1..3. Use :meth:`bond`, :meth:`dm_vector` and
    :meth:`site_g` for 1-based lookup.
    """

    name: str
    bonds: tuple
    dm: tuple
    g: tuple
    mu_b_hat: float = MU_B_HAT

    def __post_init__(self):
        object.__setattr__(self, "bonds", tuple(self.bonds))
        object.__setattr__(self, "dm", tuple(self.dm))
        object.__setattr__(self, "g", tuple(self.g))
        for attr, kind in (("bonds", BondExchange), ("dm", DMVector), ("g", GTensor)):
            items = getattr(self, attr)
            if len(items) != 3:
                raise ParameterError(f"{attr} needs exactly 3 entries, got {len(items)}")
            if not all(isinstance(item, kind) for item in items):
                raise ParameterError(f"{attr} entries must be {kind.__name__}")
        object.__setattr__(self, "mu_b_hat", float(self.mu_b_hat))
        _check_finite(self)

    def bond(self, j, k):
        return self.bonds[_pair_index(j, k)]

    def dm_vector(self, j, k):
        return self.dm[_pair_index(j, k)]

    def site_g(self, site):
        if site not in (1, 2, 3):
            raise ParameterError(f"site must be 1, 2 or 3, got {site!r}")
        return self.g[site - 1]

    def to_dict(self):
        return {
            "name": self.name,
            "bonds": [
                {"pair": list(p), "jx": b.jx, "jy": b.jy, "jz": b.jz}
                for p, b in zip(PAIRS, self.bonds)
            ],
            "dm": [
                {"pair": list(p), "dx": d.dx, "dy": d.dy, "dz": d.dz}
                for p, d in zip(PAIRS, self.dm)
            ],
            "g": [
                {"site": i + 1, "gx": g.gx, "gy": g.gy, "gz": g.gz}
                for i, g in enumerate(self.g)
            ],
        }


def _pair_index(j, k):
    try:
        return PAIRS.index((j, k))
    except ValueError:
        raise ParameterError(f"pair must be one of {PAIRS}, got {(j, k)}") from None


def zero_params(name="zero"):
    """Parameter set with every coupling and g-factor equal to zero."""
    return CompoundParams(
        name=name,
        bonds=(BondExchange(0, 0, 0),) * 3,
        dm=(DMVector(0, 0, 0),) * 3,
        g=(GTensor(0, 0, 0),) * 3,
    )


def _table_compound(name, j12, j12z, j23, j23z, d, g1, g2, g3, gz):
    return CompoundParams(
        name=name,
        bonds=(
            BondExchange(j12, j12, j12z),
            BondExchange(j23, j23, j23z),
            BondExchange(j23, j23, j23z),
        ),
        dm=(DMVector(d, d, d), DMVector(0, 0, d), DMVector(0, 0, d)),
        g=(GTensor(g1, g1, gz), GTensor(g2, g2, gz), GTensor(g3, g3, gz)),
    )


PRESETS = {
    "cu3-as": _table_compound(
        "cu3-as", 4.50, 4.56, 4.03, 4.06, 0.529, 2.25, 2.10, 2.40, 2.06
    ),
    "cu3-sb": _table_compound(
        "cu3-sb", 4.49, 4.54, 3.91, 3.96, 0.517, 2.24, 2.11, 2.40, 2.07
    ),
}


def preset(name):
    """Return the tabulated parameter set of a known compound."""
    try:
        return PRESETS[name]
    except KeyError:
        raise UnknownPresetError(name, sorted(PRESETS)) from None


def _require(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise ParameterError(f"missing key {key!r} in {where}")
    return obj[key]


def _number(obj, key, where):
    value = _require(obj, key, where)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParameterError(f"{where}.{key} must be a number, got {value!r}")
    return float(value)


def params_from_dict(data):
    """Build :class:`CompoundParams` from the JSON parameter-file schema."""
    if not isinstance(data, dict):
        raise ParameterError("parameter file must contain a JSON object")
    name = _require(data, "name", "parameter file")
    sections = {}
    for key, ident in (("bonds", "pair"), ("dm", "pair"), ("g", "site")):
        entries = _require(data, key, "parameter file")
        if not isinstance(entries, list) or len(entries) != 3:
            raise ParameterError(f"{key!r} must be an array of 3 objects")
        by_id = {}
        for n, entry in enumerate(entries):
            where = f"{key}[{n}]"
            raw = _require(entry, ident, where)
            ident_value = tuple(raw) if isinstance(raw, list) else raw
            by_id[ident_value] = (entry, where)
        sections[key] = by_id

    def ordered(key, wanted):
        out = []
        for ident in wanted:
            if ident not in sections[key]:
                raise ParameterError(f"{key!r} has no entry for {ident!r}")
            out.append(sections[key][ident])
        return out

    bonds = tuple(
        BondExchange(*(_number(e, c, w) for c in ("jx", "jy", "jz")))
        for e, w in ordered("bonds", PAIRS)
    )
    dm = tuple(
        DMVector(*(_number(e, c, w) for c in ("dx", "dy", "dz")))
        for e, w in ordered("dm", PAIRS)
    )
    g = tuple(
        GTensor(*(_number(e, c, w) for c in ("gx", "gy", "gz")))
        for e, w in ordered("g", (1, 2, 3))
    )
    kwargs = {}
    if "mu_b_hat" in data:
        kwargs["mu_b_hat"] = _number(data, "mu_b_hat", "parameter file")
    return CompoundParams(name=str(name), bonds=bonds, dm=dm, g=g, **kwargs)


def load_params(path):
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParameterError(f"{path}: invalid JSON ({exc})") from None
    except OSError as exc:
        raise ParameterError(f"cannot read parameter file {path}: {exc}") from None
    return params_from_dict(data)


@lru_cache(maxsize=None)
def spin_operator(site, axis):
    """Embedded ``S_site^axis`` on the 8-dim trimer space (site 1 leftmost)."""
    if site not in (1, 2, 3) or axis not in _PAULI:
        raise ParameterError(f"invalid spin operator ({site!r}, {axis!r})")
    factors = [np.eye(2, dtype=complex)] * 3
    factors[site - 1] = 0.5 * _PAULI[axis]
    op = np.kron(np.kron(factors[0], factors[1]), factors[2])
    op.setflags(write=False)
    return op


def total_spin(axis):
    return sum(spin_operator(site, axis) for site in (1, 2, 3))


@lru_cache(maxsize=256)
def _hamiltonian_parts(params):
    """Field-free part and the three per-axis Zeeman matrices (per unit field)."""
    h0 = np.zeros((8, 8), dtype=complex)
    for (j, k), bond, dm in zip(PAIRS, params.bonds, params.dm):
        for a in AXES:
            h0 += bond.component(a) * (spin_operator(j, a) @ spin_operator(k, a))
        for (a, b, c), sign in _LEVI_CIVITA.items():
            coeff = sign * dm.component(a)
            if coeff:
                h0 += coeff * (spin_operator(j, b) @ spin_operator(k, c))
    zeeman = []
    for a in AXES:
        m = np.zeros((8, 8), dtype=complex)
        for site, g in zip((1, 2, 3), params.g):
            m += params.mu_b_hat * g.component(a) * spin_operator(site, a)
        zeeman.append(m)
    for m in (h0, *zeeman):
        m.setflags(write=False)
    return h0, tuple(zeeman)


def build_hamiltonian(params, field):
    """Return the 8x8 Hamiltonian matrix (Kelvin) for ``params`` in ``field``."""
    if not isinstance(params, CompoundParams):
        raise ParameterError("params must be a CompoundParams instance")
    if not isinstance(field, MagneticField):
        field = MagneticField(*field)
    h0, zeeman = _hamiltonian_parts(params)
    h = h0.copy()
    for a, m in zip(AXES, zeeman):
        b = field.component(a)
        if b:
            h += b * m
    return h
