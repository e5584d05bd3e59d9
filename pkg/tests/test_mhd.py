import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helicitylab.errors import BlowupError, NonPositiveDensityError
from helicitylab.fieldcalc import TWO_PI, Grid
from helicitylab.fields import abc_field, random_vector
from helicitylab.harness.initial import random_mhd_state
from helicitylab.mhd import (
    EosParams,
    MhdState,
    cfl_dt,
    divergence_residual,
    eos_energy,
    eos_pressure,
    eos_temperature,
    gauge_residual,
    mhd_rhs,
    potential_rhs,
    rk4_step,
    total_energy,
    total_mass,
    total_momentum,
)

G16 = Grid(16)


def sup(a):
    return float(np.max(np.abs(a)))


def state(grid, u=None, rho=None, eta=None, A=None):
    z3 = np.zeros((3, *grid.n))
    A = z3 if A is None else A
    return MhdState(
        grid,
        z3.copy() if u is None else u,
        np.ones(grid.n) if rho is None else rho,
        np.zeros(grid.n) if eta is None else eta,
        grid.curl(A),
        A,
        A.copy(),
    )


# equation of state ------------------------------------------------------------


def test_eos_reference_values():
    assert eos_pressure(np.array(1.0), np.array(0.0)) == pytest.approx(1.0)
    assert eos_energy(np.array(1.0), np.array(0.0)) == pytest.approx(1.5)


@settings(max_examples=30, deadline=None)
@given(
    st.floats(0.2, 5.0),
    st.floats(-1.0, 1.0),
    st.floats(1.1, 3.0),
)
def test_eos_thermodynamic_consistency(rho, eta, gamma):
    p = EosParams(gamma=gamma, K=0.8, c_v=1.7)
    h = 1e-5 * rho
    de_drho = (eos_energy(rho + h, eta, p) - eos_energy(rho - h, eta, p)) / (2 * h)
    assert eos_pressure(rho, eta, p) == pytest.approx(rho**2 * de_drho, rel=1e-8)
    k = 1e-5
    de_deta = (eos_energy(rho, eta + k, p) - eos_energy(rho, eta - k, p)) / (2 * k)
    assert eos_temperature(rho, eta, p) == pytest.approx(de_deta, rel=1e-8)


def test_entropy_shift_scales_pressure():
    p = EosParams(c_v=2.0)
    c = 3.7
    base = eos_pressure(1.3, 0.2, p)
    assert eos_pressure(1.3, 0.2 + p.c_v * np.log(c), p) == pytest.approx(c * base, rel=1e-13)


@pytest.mark.parametrize("kw", [{"gamma": 1.0}, {"K": 0.0}, {"c_v": -1.0}])
def test_eos_params_validated(kw):
    with pytest.raises(ValueError):
        EosParams(**kw)


def test_eos_rejects_nonpositive_density():
    with pytest.raises(NonPositiveDensityError):
        eos_pressure(np.array([1.0, 0.0]), np.zeros(2))


# tendencies -------------------------------------------------------------------


def test_static_equilibrium_has_zero_tendency():
    k = mhd_rhs(state(G16, eta=np.full(G16.n, 0.3)))
    for a in (k.du, k.drho, k.deta, k.dB, k.dA, k.dA_g):
        assert sup(a) == 0.0


def test_force_free_beltrami_field_is_static():
    s = state(G16, A=abc_field(G16))
    k = mhd_rhs(s)
    for a in (k.du, k.drho, k.deta, k.dB, k.dA, k.dA_g):
        assert sup(a) < 1e-13


def test_pure_advection_of_density():
    x, _, _ = G16.mesh()
    U = 0.7
    u = np.zeros((3, *G16.n))
    u[0] = U
    k = mhd_rhs(state(G16, u=u, rho=1 + 0.1 * np.sin(x)))
    assert sup(k.drho + 0.1 * U * np.cos(x)) < 1e-13


def test_potential_tendencies():
    x, _, _ = G16.mesh()
    u = np.zeros((3, *G16.n))
    u[0] = 1.0
    s = state(G16, u=u)
    s.A_g = np.zeros((3, *G16.n))
    s.A_g[1] = np.sin(x)
    dA, dA_g = potential_rhs(s)
    assert sup(dA) == 0.0  # B = 0
    assert sup(dA_g[1] + np.cos(x)) < 1e-13
    assert sup(dA_g[[0, 2]]) < 1e-13
    dA, dA_g = potential_rhs(state(G16, A=random_vector(G16, np.random.default_rng(0))))
    assert sup(dA) == 0.0 and sup(dA_g) == 0.0  # u = 0


def test_induction_identity_at_fixed_instant():
    s = random_mhd_state(Grid(24), seed=3)
    k = mhd_rhs(s)
    assert sup(s.grid.curl(k.dA) - k.dB) <= 1e-12 * sup(k.dB)


def test_rhs_does_not_mutate_state():
    s = random_mhd_state(G16, seed=1)
    before = s.copy()
    mhd_rhs(s)
    for name in ("u", "rho", "eta", "B", "A", "A_g"):
        assert np.array_equal(getattr(s, name), getattr(before, name))


# integrator -------------------------------------------------------------------


def test_rk4_zero_tendency_advances_time_only():
    s = state(G16)
    s2 = rk4_step(s, 0.1)
    assert s2.t == pytest.approx(0.1)
    assert np.array_equal(s2.rho, s.rho) and np.array_equal(s2.u, s.u)


def test_rk4_linear_advection_is_fifth_order_locally():
    # uniform u, B = 0, negligible pressure: eta is a passive tracer and the
    # exact solution is a shift
    x, _, _ = G16.mesh()
    U = 1.0
    u = np.zeros((3, *G16.n))
    u[0] = U
    s = state(G16, u=u, eta=0.1 * np.sin(x))
    p = EosParams(K=1e-14)

    def err(dt):
        s2 = rk4_step(s, dt, p)
        return sup(s2.eta - 0.1 * np.sin(x - U * dt))

    e1, e2 = err(0.2), err(0.1)
    assert e1 / e2 > 28.0  # ~32 for O(dt^5)


def test_dt_halving_gives_fourth_order():
    g = Grid(16)
    s0 = random_mhd_state(g, seed=5, amplitude=0.3)
    T = 0.4

    def run(n):
        s = s0
        for _ in range(n):
            s = rk4_step(s, T / n)
        return s

    ref = run(64)
    e1 = sup(run(8).B - ref.B)
    e2 = sup(run(16).B - ref.B)
    assert 12.0 < e1 / e2 < 20.0


def test_solenoidality_and_mass_over_steps():
    s = random_mhd_state(G16, seed=2)
    m0 = total_mass(s)
    for _ in range(5):
        s = rk4_step(s, cfl_dt(s))
    assert divergence_residual(s) < 1e-11
    assert abs(total_mass(s) - m0) / m0 < 1e-13


def test_blowup_reports_stage():
    s = random_mhd_state(G16, seed=2)
    s.eta = s.eta.copy()
    s.eta[0, 0, 0] = np.nan
    with pytest.raises(BlowupError) as info:
        rk4_step(s, 0.01)
    assert info.value.stage == 1


def test_nonpositive_density_aborts():
    s = random_mhd_state(G16, seed=2)
    s.rho = s.rho - 2.0
    with pytest.raises(NonPositiveDensityError):
        mhd_rhs(s)


# CFL ----------------------------------------------------------------------------


def test_cfl_closed_form():
    s = state(G16)
    dt = cfl_dt(s, courant=0.5)
    assert dt == pytest.approx(0.5 * G16.spacing[0] / np.sqrt(5.0 / 3.0))


def test_cfl_degenerate_guard_is_finite():
    s = state(G16, eta=np.full(G16.n, -200.0))  # P ~ e^-200
    dt = cfl_dt(s)
    assert np.isfinite(dt) and dt > 1e10


def test_cfl_halves_when_velocity_doubles():
    s = state(G16, eta=np.full(G16.n, -200.0))
    s.u = np.zeros((3, *G16.n))
    s.u[0] = 50.0
    dt1 = cfl_dt(s)
    s.u = 2 * s.u
    assert cfl_dt(s) == pytest.approx(dt1 / 2, rel=1e-12)


@pytest.mark.parametrize("c", [0.0, 1.5])
def test_cfl_rejects_bad_courant(c):
    with pytest.raises(ValueError):
        cfl_dt(state(G16), courant=c)


# totals ---------------------------------------------------------------------------


def test_energy_of_rest_state():
    assert total_energy(state(Grid(8))) == pytest.approx(TWO_PI**3 * 1.5, rel=1e-14)


def test_mass_of_perturbed_density():
    x, _, _ = G16.mesh()
    assert total_mass(state(G16, rho=1 + 0.3 * np.sin(x))) == pytest.approx(TWO_PI**3, rel=1e-14)


def test_momentum_of_odd_velocity():
    x, _, _ = G16.mesh()
    u = np.stack([np.sin(x), np.sin(2 * x), np.sin(x) * 0.3])
    assert np.abs(total_momentum(state(G16, u=u))).max() < 1e-13


def test_gauge_residual_small_after_steps():
    s = random_mhd_state(G16, seed=4)
    for _ in range(3):
        s = rk4_step(s, cfl_dt(s))
    assert gauge_residual(s) < 1e-12
