import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helicitylab.errors import PressureSolveError
from helicitylab.euler import (
    EulerState,
    euler_cfl_dt,
    euler_rhs,
    euler_rk4_step,
    frozen_in_residual,
    kinetic_energy,
    leray_project,
    phi_rhs,
    pressure_solve,
    residual_scale,
    transported_form_residual,
    vorticity,
    vorticity_residual,
)
from helicitylab.fieldcalc import Grid
from helicitylab.fields import abc_field, random_scalar, random_solenoidal, random_vector
from helicitylab.harness.initial import random_euler_state

G16 = Grid(16)
G32 = Grid(32)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def sup(a):
    return float(np.max(np.abs(a)))


# projection -------------------------------------------------------------------


def test_projection_fixed_point_and_kernel():
    rng = np.random.default_rng(0)
    u = random_solenoidal(G32, rng)
    assert sup(leray_project(G32, u) - u) < 1e-13
    g = random_scalar(G32, rng)
    assert sup(leray_project(G32, G32.grad(g))) < 1e-12


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_projection_is_idempotent_and_solenoidal(seed):
    F = random_vector(G16, np.random.default_rng(seed))
    P = leray_project(G16, F)
    assert sup(G16.div(P)) < 1e-12 * sup(F)
    assert sup(leray_project(G16, P) - P) < 1e-13 * sup(F)


# tendencies -------------------------------------------------------------------


def test_abc_is_a_steady_state():
    s = EulerState.from_velocity(G32, abc_field(G32))
    t = euler_rhs(s)
    assert sup(t.du) < 1e-13
    assert sup(euler_rhs(s, form="rotational").du) < 1e-13


def test_zero_velocity_gives_zero_tendency():
    s = EulerState.from_velocity(G16, np.zeros((3, *G16.n)))
    t = euler_rhs(s)
    assert sup(t.du) == 0.0 and sup(t.drho) == 0.0 and sup(t.dphi) == 0.0


def test_shear_flow_is_steady_with_constant_pressure():
    _, y, _ = G16.mesh()
    u = np.zeros((3, *G16.n))
    u[0] = np.sin(y)
    t = euler_rhs(EulerState.from_velocity(G16, u))
    assert sup(t.du) < 1e-14
    assert sup(t.pressure.P - t.pressure.P.mean()) < 1e-14


def test_tendency_is_divergence_free_for_uniform_density():
    s = random_euler_state(G32, seed=3)
    assert sup(G32.div(euler_rhs(s).du)) < 1e-12 * sup(euler_rhs(s).du)


def test_advective_and_rotational_forms_agree():
    s = random_euler_state(G32, seed=4)
    a, b = euler_rhs(s).du, euler_rhs(s, form="rotational").du
    assert sup(a - b) < 1e-12 * sup(a)


def test_unknown_form_rejected():
    with pytest.raises(ValueError):
        euler_rhs(random_euler_state(G16, seed=0), form="weird")


def test_vorticity_examples():
    assert sup(vorticity(G32, abc_field(G32)) - abc_field(G32)) < 1e-12
    _, y, _ = G16.mesh()
    u = np.zeros((3, *G16.n))
    u[0] = np.sin(y)
    xi = vorticity(G16, u)
    assert sup(xi[2] + np.cos(y)) < 1e-13 and sup(xi[:2]) < 1e-13
    u = np.ones((3, *G16.n))
    assert sup(vorticity(G16, u)) == 0.0


@settings(max_examples=5, deadline=None)
@given(seeds)
def test_vorticity_and_frozen_in_identities(seed):
    s = random_euler_state(G32, seed=seed)
    scale = residual_scale(s)
    assert vorticity_residual(s) < 1e-10 * scale
    assert frozen_in_residual(s) < 1e-9 * scale


def test_residuals_on_abc_and_rest():
    a = EulerState.from_velocity(G32, abc_field(G32))
    assert vorticity_residual(a) < 1e-10 and frozen_in_residual(a) < 1e-10
    z = EulerState.from_velocity(G16, np.zeros((3, *G16.n)))
    assert vorticity_residual(z) == 0.0 and frozen_in_residual(z) == 0.0


def test_density_is_transported_exactly():
    x, _, _ = G32.mesh()
    s = random_euler_state(G32, seed=5, rho=1 + 0.1 * np.sin(x))
    t = euler_rhs(s)
    assert sup(t.drho + G32.directional(s.u, s.rho)) == 0.0


# pressure -------------------------------------------------------------------------


def test_variable_density_pressure_converges():
    x, _, z = G32.mesh()
    s = random_euler_state(G32, seed=6, rho=1 + 0.2 * np.sin(x) * np.cos(z))
    t = euler_rhs(s)
    assert t.pressure.residual <= 1e-10
    assert 1 < t.pressure.iterations < 200
    assert sup(G32.div(t.du)) < 1e-9 * sup(t.du)


def test_pressure_nonconvergence_raises_with_residual():
    x, _, _ = G16.mesh()
    s = random_euler_state(G16, seed=1, rho=1 + 0.5 * np.sin(x))
    N = G16.advect(s.u, s.u)
    with pytest.raises(PressureSolveError) as info:
        pressure_solve(G16, s.rho, N, max_iter=2)
    assert info.value.iterations == 2 and info.value.residual > 0


# transported scalar -------------------------------------------------------------


def test_phi_grows_linearly_at_rest_with_constant_pressure():
    s = EulerState.from_velocity(G16, np.zeros((3, *G16.n)))
    dphi = phi_rhs(s)
    assert sup(dphi - dphi.mean()) == 0.0


def test_phi_rhs_on_abc():
    a = EulerState.from_velocity(G32, abc_field(G32), phi=random_scalar(G32, np.random.default_rng(2)))
    t = euler_rhs(a)
    expected = -G32.directional(a.u, a.phi) + t.h
    assert sup(t.dphi - expected) < 1e-13


@pytest.mark.parametrize("paper_sign", [False, True])
def test_transported_one_form(paper_sign):
    rng = np.random.default_rng(8)
    s = EulerState.from_velocity(G32, random_solenoidal(G32, rng), phi=0.3 * random_scalar(G32, rng))
    assert transported_form_residual(s, paper_sign=paper_sign) < 1e-12 * residual_scale(s)


def test_paper_sign_flips_reported_pressure_only():
    s = random_euler_state(G16, seed=9)
    a, b = euler_rhs(s), euler_rhs(s, paper_sign=True)
    assert np.array_equal(a.du, b.du)
    assert np.array_equal(a.pressure.P, -b.pressure.P)
    # with the flipped pressure h = P/rho + |u|^2/2
    assert sup(b.h - (b.pressure.P + 0.5 * G16.dealias(np.sum(s.u**2, axis=0)))) < 1e-14


# integration ------------------------------------------------------------------------


def test_abc_stays_put():
    s = EulerState.from_velocity(G32, abc_field(G32))
    u0 = s.u.copy()
    while s.t < 1.0 - 1e-12:
        s = euler_rk4_step(s, min(euler_cfl_dt(s), 1.0 - s.t))
    assert sup(s.u - u0) < 1e-10


def test_euler_rk4_fourth_order():
    s0 = random_euler_state(G16, seed=2, kmax=2)
    T = 0.5

    def run(n):
        s = s0
        for _ in range(n):
            s = euler_rk4_step(s, T / n)
        return s.u

    ref = run(80)
    e1, e2 = sup(run(10) - ref), sup(run(20) - ref)
    assert 12.0 < e1 / e2 < 20.0


def test_divergence_and_energy_along_trajectory():
    s = random_euler_state(G16, seed=3)
    E0 = kinetic_energy(s)
    for _ in range(10):
        s = euler_rk4_step(s, euler_cfl_dt(s))
        assert sup(G16.div(s.u)) < 1e-11 * sup(s.u)
    assert abs(kinetic_energy(s) - E0) / E0 < 1e-6


def test_zero_state_is_fixed():
    s = EulerState.from_velocity(G16, np.zeros((3, *G16.n)))
    s2 = euler_rk4_step(s, 0.1)
    assert sup(s2.u) == 0.0 and s2.t == pytest.approx(0.1)
