import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helicitylab.fieldcalc import Grid
from helicitylab.fields import random_scalar, random_vector
from helicitylab.hamiltonian import (
    DYNAMICS_ORDER,
    TERMS,
    Functional,
    VarDerivs,
    builtin_functionals,
    combine,
    diagnose_sign_fault,
    hamiltonian_consistency,
    infer_dynamics_order,
    poisson_bracket,
    validate_var_deriv,
)
from helicitylab.harness.initial import random_mhd_state
from helicitylab.mhd import EosParams, mhd_rhs, total_energy, total_entropy, total_mass

G16 = Grid(16)
G24 = Grid(24)
LIB = builtin_functionals()
seeds = st.integers(min_value=0, max_value=2**32 - 1)


@pytest.fixture(scope="module")
def s16():
    return random_mhd_state(G16, 1)


@pytest.fixture(scope="module")
def s24():
    return random_mhd_state(G24, 1)


def linear(name, grid, mu=None, rho=None, eta=None, B=None):
    """``int <c, w>`` for fixed coefficient fields ``c``."""
    z, zv = np.zeros(grid.n), np.zeros((3, *grid.n))
    d = VarDerivs(zv if mu is None else mu, z if rho is None else rho, z if eta is None else eta, zv if B is None else B)

    def value(s):
        return grid.integrate(np.sum(d.mu * s.mu, axis=0) + d.rho * s.rho + d.eta * s.eta + np.sum(d.B * s.B, axis=0))

    return Functional(name, value, lambda s: d)


# library ----------------------------------------------------------------------


def test_library_contents():
    assert set(LIB) == {
        "mass",
        "momentum_x",
        "momentum_y",
        "momentum_z",
        "entropy",
        "energy",
        "magnetic_helicity",
        "cross_helicity",
    }


def test_functional_values_match_totals(s16):
    assert LIB["energy"](s16) == pytest.approx(total_energy(s16), rel=1e-14)
    assert LIB["mass"](s16) == pytest.approx(total_mass(s16), rel=1e-14)
    assert LIB["entropy"](s16) == pytest.approx(total_entropy(s16), rel=1e-14)


def test_energy_respects_eos_parameters(s16):
    p = EosParams(gamma=1.4, K=2.0)
    assert builtin_functionals(p)["energy"](s16) == pytest.approx(total_energy(s16, p), rel=1e-14)


@pytest.mark.parametrize("name", sorted(LIB))
def test_var_derivs_validate(s16, name):
    assert validate_var_deriv(LIB[name], s16) < 1e-8


@pytest.mark.parametrize("name,component", [("energy", "rho"), ("energy", "B"), ("cross_helicity", "mu"), ("entropy", "eta")])
def test_corrupted_derivative_is_flagged(s16, name, component):
    assert validate_var_deriv(LIB[name].corrupted(component), s16) > 1e-8


def test_validate_rejects_zero_probes(s16):
    with pytest.raises(ValueError):
        validate_var_deriv(LIB["mass"], s16, probes=0)


# bracket ------------------------------------------------------------------------


@settings(max_examples=3, deadline=None)
@given(seeds)
def test_antisymmetry_all_pairs(seed):
    s = random_mhd_state(G16, seed)
    for f in LIB.values():
        for g in LIB.values():
            r = poisson_bracket(f, g, s)
            assert r.antisymmetry_defect <= 1e-12 * max(abs(r.value_fg), r.scale, 1e-300)


def test_self_bracket_vanishes(s16):
    for f in LIB.values():
        assert abs(poisson_bracket(f, f, s16).value_fg) <= 1e-12 * max(poisson_bracket(f, f, s16).scale, 1e-300)


def test_casimirs(s16):
    for name in ("mass", "entropy", "magnetic_helicity"):
        for other in LIB.values():
            r = poisson_bracket(LIB[name], other, s16)
            assert abs(r.value_fg) <= 1e-10 * max(r.scale, 1.0), (name, other.name)


def test_bilinearity(s16):
    a, b = 0.7, -1.3
    f, g, h = LIB["cross_helicity"], LIB["entropy"], LIB["energy"]
    lhs = poisson_bracket(combine(f, g, a, b), h, s16)
    rhs = a * poisson_bracket(f, h, s16).value_fg + b * poisson_bracket(g, h, s16).value_fg
    assert abs(lhs.value_fg - rhs) <= 1e-12 * lhs.scale


@pytest.mark.parametrize("field", ["rho", "eta", "B", "mu"])
def test_bracket_reproduces_each_tendency(s16, field):
    # for f = int <c, w> the flow gives df/dt = int <c, dw/dt> exactly
    rng = np.random.default_rng(11)
    c = random_vector(G16, rng) if field in ("B", "mu") else random_scalar(G16, rng)
    f = linear(field, G16, **{field: c})
    k = mhd_rhs(s16)
    rate = {"rho": k.drho, "eta": k.deta, "B": k.dB, "mu": k.dmu}[field]
    expected = G16.integrate(np.sum(c * rate, axis=0) if rate.ndim == 4 else c * rate)
    r = poisson_bracket(f, LIB["energy"], s16)
    assert r.value_fg == pytest.approx(expected, rel=1e-10, abs=1e-12 * r.scale)


def test_unsymmetrized_form_is_not_antisymmetric(s16):
    r = poisson_bracket(LIB["cross_helicity"], LIB["energy"], s16, form="unsymmetrized")
    assert r.antisymmetry_defect > 1e-6 * r.scale


def test_unknown_form_and_fault_rejected(s16):
    with pytest.raises(ValueError):
        poisson_bracket(LIB["mass"], LIB["energy"], s16, form="other")
    with pytest.raises(ValueError):
        poisson_bracket(LIB["mass"], LIB["energy"], s16, fault="pressure")


def test_grid_mismatch_rejected(s16):
    f = linear("c", Grid(8), rho=np.ones((8, 8, 8)))
    with pytest.raises(ValueError):
        poisson_bracket(f, LIB["energy"], s16)


# consistency with the flow -------------------------------------------------------


@pytest.mark.parametrize("name", ["mass", "momentum_x", "energy", "cross_helicity", "entropy"])
def test_consistency(s24, name):
    assert hamiltonian_consistency(LIB[name], s24).error < 1e-4


def test_consistency_error_quarters_under_dt_halving(s24):
    r1 = hamiltonian_consistency(LIB["cross_helicity"], s24)
    r2 = hamiltonian_consistency(LIB["cross_helicity"], s24, dt=r1.dt / 2)
    assert 3.0 < r1.error / r2.error < 5.0


def test_dynamics_order(s24):
    assert infer_dynamics_order(s24) == DYNAMICS_ORDER == "f,H"


@pytest.mark.parametrize("fault", TERMS)
def test_injected_fault_is_localized(s24, fault):
    reports = [hamiltonian_consistency(LIB[n], s24, fault=fault) for n in ("cross_helicity", "energy", "momentum_x")]
    reports += [hamiltonian_consistency(linear("B", G24, B=random_vector(G24, np.random.default_rng(2))), s24, fault=fault)]
    assert max(r.error for r in reports) > 1e-4
    assert diagnose_sign_fault(reports) == [fault]
