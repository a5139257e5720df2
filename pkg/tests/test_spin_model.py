import json
import math

import numpy as np
import pytest

from conftest import isotropic_triangle, random_params
from trimer_machines.errors import ParameterError, UnknownPresetError
from trimer_machines.spin_model import (
    MU_B_HAT,
    BondExchange,
    CompoundParams,
    DMVector,
    GTensor,
    MagneticField,
    build_hamiltonian,
    load_params,
    params_from_dict,
    preset,
    spin_operator,
    total_spin,
)


def test_spin_operator_z_site1_is_msb():
    expected = np.diag([0.5] * 4 + [-0.5] * 4)
    np.testing.assert_array_equal(spin_operator(1, "z"), expected)


@pytest.mark.parametrize("site", [1, 2, 3])
@pytest.mark.parametrize("axis", ["x", "y", "z"])
def test_spin_operators_traceless_hermitian_square_to_quarter(site, axis):
    s = spin_operator(site, axis)
    assert abs(np.trace(s)) == 0
    np.testing.assert_array_equal(s, s.conj().T)
    np.testing.assert_allclose(s @ s, np.eye(8) / 4, atol=0)


def test_spin_commutator_su2():
    for site in (1, 2, 3):
        sx, sy, sz = (spin_operator(site, a) for a in "xyz")
        np.testing.assert_allclose(sx @ sy - sy @ sx, 1j * sz, atol=1e-15)


def test_spin_operator_rejects_bad_site():
    with pytest.raises(ParameterError):
        spin_operator(4, "z")


def test_zero_params_zero_matrix(zero):
    h = build_hamiltonian(zero, MagneticField())
    assert np.count_nonzero(h) == 0


def test_cu3_as_traceless(cu3_as):
    h = build_hamiltonian(cu3_as, MagneticField(0, 0, 0))
    assert abs(np.trace(h)) < 1e-12


def test_isotropic_triangle_casimir_spectrum():
    j = 4.0
    h = build_hamiltonian(isotropic_triangle(j), MagneticField())
    # E(S) = (J/2)[S(S+1) - 9/4]: quartet S=3/2, two doublets S=1/2
    casimir = sorted([j / 2 * (1.5 * 2.5 - 2.25)] * 4 + [j / 2 * (0.5 * 1.5 - 2.25)] * 4)
    assert casimir == [-3.0] * 4 + [3.0] * 4
    np.testing.assert_allclose(np.linalg.eigvalsh(h), casimir, atol=1e-12)


def test_zeeman_only_spectrum():
    g, b = 2.06, 3.7
    params = CompoundParams(
        "zeeman", (BondExchange(0, 0, 0),) * 3, (DMVector(0, 0, 0),) * 3, (GTensor(g, g, g),) * 3
    )
    h = build_hamiltonian(params, MagneticField(0, 0, b))
    ms = sorted([-1.5, -0.5, -0.5, -0.5, 0.5, 0.5, 0.5, 1.5])
    np.testing.assert_allclose(
        np.linalg.eigvalsh(h), [m * g * MU_B_HAT * b for m in ms], atol=1e-12
    )


def _explicit_dm(j, k, d):
    """D . (S_j x S_k) written out component by component."""
    s = {(site, a): spin_operator(site, a) for site in (j, k) for a in "xyz"}
    return (
        d[0] * (s[j, "y"] @ s[k, "z"] - s[j, "z"] @ s[k, "y"])
        + d[1] * (s[j, "z"] @ s[k, "x"] - s[j, "x"] @ s[k, "z"])
        + d[2] * (s[j, "x"] @ s[k, "y"] - s[j, "y"] @ s[k, "x"])
    )


def test_dm_term_matches_explicit_cross_product(rng):
    dms = [rng.normal(size=3) for _ in range(3)]
    params = CompoundParams(
        "dm", (BondExchange(0, 0, 0),) * 3, tuple(DMVector(*d) for d in dms), (GTensor(0, 0, 0),) * 3
    )
    expected = sum(_explicit_dm(j, k, d) for (j, k), d in zip([(1, 2), (2, 3), (3, 1)], dms))
    np.testing.assert_allclose(build_hamiltonian(params, MagneticField()), expected, atol=1e-15)


@pytest.mark.parametrize("axis", [0, 1, 2])
def test_single_dm_bond_spectrum(axis):
    # a lone D along any axis on bond (1,2): eigenvalues +-D/2 once each per spectator state
    d = 0.8
    vec = [0.0, 0.0, 0.0]
    vec[axis] = d
    params = CompoundParams(
        "dm1",
        (BondExchange(0, 0, 0),) * 3,
        (DMVector(*vec), DMVector(0, 0, 0), DMVector(0, 0, 0)),
        (GTensor(0, 0, 0),) * 3,
    )
    ev = np.linalg.eigvalsh(build_hamiltonian(params, MagneticField()))
    np.testing.assert_allclose(ev, [-d / 2] * 2 + [0.0] * 4 + [d / 2] * 2, atol=1e-14)


def test_hermitian_and_traceless_for_random_parameters(rng):
    for _ in range(200):
        params = random_params(rng)
        field = MagneticField(*rng.uniform(-10, 10, 3))
        h = build_hamiltonian(params, field)
        norm = np.linalg.norm(h)
        assert np.linalg.norm(h - h.conj().T) <= 1e-13 * (1 + norm)
        assert abs(np.trace(h)) <= 1e-12


def test_xxz_with_z_dm_and_z_field_conserves_total_sz(rng):
    params = CompoundParams(
        "xxz",
        tuple(BondExchange(j, j, jz) for j, jz in rng.uniform(1, 5, (3, 2))),
        tuple(DMVector(0, 0, d) for d in rng.uniform(-1, 1, 3)),
        tuple(GTensor(*rng.uniform(1.5, 2.5, 3)) for _ in range(3)),
    )
    h = build_hamiltonian(params, MagneticField(0, 0, 4.2))
    sz = total_spin("z")
    assert np.linalg.norm(h @ sz - sz @ h) <= 1e-12


def test_cu3_as_breaks_total_sz(cu3_as):
    # D_12 has in-plane components, so S^z_total is not conserved
    h = build_hamiltonian(cu3_as, MagneticField(0, 0, 1))
    sz = total_spin("z")
    assert np.linalg.norm(h @ sz - sz @ h) > 1e-3


def test_preset_table_values():
    cu_as = preset("cu3-as")
    assert cu_as.bond(1, 2).jz == 4.56
    assert cu_as.bond(1, 2).jx == cu_as.bond(1, 2).jy == 4.50
    for pair in [(2, 3), (3, 1)]:
        assert cu_as.bond(*pair).jx == cu_as.bond(*pair).jy == 4.03
        assert cu_as.bond(*pair).jz == 4.06
        assert cu_as.dm_vector(*pair) == DMVector(0, 0, 0.529)
    assert cu_as.dm_vector(1, 2) == DMVector(0.529, 0.529, 0.529)
    assert [cu_as.site_g(s).gx for s in (1, 2, 3)] == [2.25, 2.10, 2.40]
    assert all(cu_as.site_g(s).gz == 2.06 for s in (1, 2, 3))
    assert cu_as.mu_b_hat == 0.6717156644

    cu_sb = preset("cu3-sb")
    assert cu_sb.site_g(3).gx == 2.40
    assert cu_sb.bond(1, 2).jz == 4.54
    assert cu_sb.bond(2, 3).jx == 3.91
    assert cu_sb.dm_vector(3, 1).dz == 0.517
    assert cu_sb.site_g(1).gz == 2.07


def test_presets_are_xxz():
    for name in ("cu3-as", "cu3-sb"):
        assert all(b.jx == b.jy for b in preset(name).bonds)


def test_unknown_preset_lists_names():
    with pytest.raises(UnknownPresetError) as info:
        preset("cu3-x")
    assert "cu3-as" in str(info.value) and "cu3-sb" in str(info.value)


def test_non_finite_parameter_rejected():
    with pytest.raises(ParameterError):
        BondExchange(1.0, math.nan, 1.0)
    with pytest.raises(ParameterError):
        MagneticField(0, 0, math.inf)


def test_wrong_number_of_bonds_rejected():
    with pytest.raises(ParameterError):
        CompoundParams("bad", (BondExchange(1, 1, 1),) * 2, (DMVector(0, 0, 0),) * 3,
                       (GTensor(2, 2, 2),) * 3)


def test_param_file_round_trip(tmp_path, cu3_as):
    path = tmp_path / "p.json"
    path.write_text(json.dumps(cu3_as.to_dict()))
    assert load_params(path) == cu3_as


def test_param_file_order_independent(cu3_as):
    data = cu3_as.to_dict()
    data["bonds"].reverse()
    data["g"].reverse()
    assert params_from_dict(data) == cu3_as


@pytest.mark.parametrize("drop", ["name", "bonds", "dm", "g"])
def test_param_file_missing_top_level_key(cu3_as, drop):
    data = cu3_as.to_dict()
    del data[drop]
    with pytest.raises(ParameterError, match=drop):
        params_from_dict(data)


def test_param_file_missing_component(cu3_as):
    data = cu3_as.to_dict()
    del data["dm"][1]["dz"]
    with pytest.raises(ParameterError, match="'dz'"):
        params_from_dict(data)


def test_field_along_normalizes_direction():
    f = MagneticField.along((0, 0, 2), 3.0)
    assert f == MagneticField(0, 0, 3.0)
    with pytest.raises(ParameterError):
        MagneticField.along((0, 0, 0), 1.0)
