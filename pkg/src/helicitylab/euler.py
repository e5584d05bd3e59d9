"""Incompressible superfluid flow with an advected density and a transported scalar.

The velocity tendency is ``-(u . grad) u - rho^-1 grad P`` with ``P`` fixed by
``div du = 0``.  For constant density this is a single spectral solve; for
variable density a preconditioned fixed-point iteration is used.

The scalar ``phi`` obeys ``(d/dt + L_u) phi = h`` with
``h = |u|^2 / 2 - P / rho``, which makes the 1-form ``<u - grad phi, dx>``
exactly transported.  With ``paper_sign=True`` the pressure is reported with
the opposite sign (``+ rho^-1 grad P`` in the momentum equation) and ``h``
becomes ``P / rho + |u|^2 / 2``; the dynamics are identical.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import BlowupError, NonPositiveDensityError, PressureSolveError
from .fieldcalc import Grid, KForm, lie_derivative

PRESSURE_TOL = 1e-10
PRESSURE_MAX_ITER = 200


@dataclass
class EulerState:
    grid: Grid
    u: np.ndarray
    rho: np.ndarray
    phi: np.ndarray
    t: float = 0.0

    @classmethod
    def from_velocity(cls, grid, u, rho=None, phi=None, t=0.0):
        rho = np.ones(grid.n) if rho is None else np.asarray(rho, dtype=float)
        phi = np.zeros(grid.n) if phi is None else np.asarray(phi, dtype=float)
        return cls(grid, grid.leray(u), rho, phi, t)

    def copy(self):
        return replace(self, u=self.u.copy(), rho=self.rho.copy(), phi=self.phi.copy())


@dataclass(frozen=True)
class PressureSolve:
    P: np.ndarray
    residual: float
    iterations: int = 1


@dataclass
class EulerTendency:
    du: np.ndarray
    drho: np.ndarray
    dphi: np.ndarray
    pressure: PressureSolve
    h: np.ndarray


def leray_project(grid, F):
    """``F - grad lap^-1 div F``: divergence-free, idempotent."""
    return grid.leray(F)


def vorticity(grid, u):
    return grid.curl(u)


def _nonlinear(grid, u, form):
    if form == "advective":
        return grid.advect(u, u)
    if form == "rotational":
        xi = grid.curl(u)
        return -grid.cross(u, xi) + grid.grad(grid.dealias(0.5 * np.sum(u * u, axis=0)))
    raise ValueError(f"unknown nonlinear form {form!r}")


def _is_uniform(rho):
    return float(np.ptp(rho)) == 0.0


def pressure_solve(grid, rho, nonlinear, tol=PRESSURE_TOL, max_iter=PRESSURE_MAX_ITER):
    """Solve ``div(rho^-1 grad P) = -div N`` for zero-mean ``P``.

    The iteration uses the constant-coefficient inverse with ``rho^-1``
    replaced by its mean as preconditioner; ``tol`` bounds the residual
    sup-norm relative to ``max(|div N|_inf, 1)``.
    """
    rhs = -grid.div(nonlinear)
    if np.any(rho <= 0):
        raise NonPositiveDensityError("density must be positive")
    if _is_uniform(rho):
        rho0 = float(rho.flat[0])
        P = grid.irfft(rho0 * grid.inverse_div_grad_hat(grid.rfft(rhs)))
        return PressureSolve(P, 0.0, 1)

    rinv = grid.dealias(1.0 / rho)
    m = float(np.mean(rinv))
    bound = tol * max(grid.supnorm(rhs), 1.0)
    P = np.zeros(grid.n)
    residual = np.inf
    for it in range(1, max_iter + 1):
        r = rhs - grid.div(grid.dealias(rinv * grid.grad(P)))
        residual = grid.supnorm(r)
        if residual <= bound:
            return PressureSolve(P, residual / max(grid.supnorm(rhs), 1.0), it)
        P = P + grid.irfft(grid.inverse_div_grad_hat(grid.rfft(r))) / m
    raise PressureSolveError(residual, max_iter)


def euler_rhs(state, paper_sign=False, form="advective", tol=PRESSURE_TOL, max_iter=PRESSURE_MAX_ITER):
    """Tendencies of ``(u, rho, phi)``."""
    g = state.grid
    u, rho = state.u, state.rho
    N = _nonlinear(g, u, form)
    solve = pressure_solve(g, rho, N, tol, max_iter)
    P = solve.P
    if _is_uniform(rho):
        p_over_rho = P / float(rho.flat[0])
        du = -N - g.grad(p_over_rho)
    else:
        p_over_rho = g.dealias(P / rho)
        du = -N - g.dealias(g.grad(P) / rho)
    drho = -g.directional(u, rho)
    kinetic = 0.5 * g.dealias(np.sum(u * u, axis=0))
    h = kinetic - p_over_rho
    dphi = -g.directional(u, state.phi) + h
    if paper_sign:
        solve = PressureSolve(-P, solve.residual, solve.iterations)
    return EulerTendency(du=du, drho=drho, dphi=dphi, pressure=solve, h=h)


def phi_rhs(state, **kwargs):
    """``d phi / dt = -<u, grad phi> + h``."""
    return euler_rhs(state, **kwargs).dphi


def euler_rk4_step(state, dt, **kwargs):
    """Classical RK4; the velocity is re-projected at every stage."""
    g = state.grid
    y0 = (g.leray(state.u), state.rho, state.phi)

    def evaluate(y, stage):
        u, rho, phi = y
        k = euler_rhs(EulerState(g, g.leray(u), rho, phi, state.t), **kwargs)
        out = (k.du, k.drho, k.dphi)
        if not all(np.all(np.isfinite(a)) for a in out):
            raise BlowupError(stage)
        return out

    def shifted(k, c):
        return tuple(a + c * b for a, b in zip(y0, k))

    k1 = evaluate(y0, 1)
    k2 = evaluate(shifted(k1, 0.5 * dt), 2)
    k3 = evaluate(shifted(k2, 0.5 * dt), 3)
    k4 = evaluate(shifted(k3, dt), 4)
    u, rho, phi = (
        y + dt / 6.0 * (a + 2.0 * b + 2.0 * c + d)
        for y, a, b, c, d in zip(y0, k1, k2, k3, k4)
    )
    if np.any(rho <= 0):
        raise NonPositiveDensityError("density became non-positive")
    return EulerState(g, g.leray(u), rho, phi, state.t + dt)


def euler_cfl_dt(state, courant=0.25):
    if not 0.0 < courant <= 1.0:
        raise ValueError("courant must lie in (0, 1]")
    umax = float(np.max(np.sqrt(np.sum(state.u**2, axis=0))))
    return courant * min(state.grid.spacing) / max(umax, 1e-12)


# diagnostics ----------------------------------------------------------------


def kinetic_energy(state):
    return state.grid.integrate(0.5 * state.rho * np.sum(state.u**2, axis=0))


def residual_scale(state):
    """``|u|_inf |xi|_inf``, the natural size of the vorticity tendency."""
    g = state.grid
    return g.supnorm(state.u) * g.supnorm(g.curl(state.u))


def vorticity_residual(state, **kwargs):
    """``|curl(du) - curl(u x xi)|_inf`` with the discrete (dealiased) product."""
    g = state.grid
    du = euler_rhs(state, **kwargs).du
    xi = g.curl(state.u)
    return g.supnorm(g.curl(du) - g.curl(g.cross(state.u, xi)))


def frozen_in_residual(state, **kwargs):
    """Sup-norm of ``dv/dt + (u.grad) v - (v.grad) u + v div u`` for ``v = xi / rho``."""
    g = state.grid
    tend = euler_rhs(state, **kwargs)
    u = state.u
    rinv = 1.0 / state.rho
    xi = g.curl(u)
    v = g.dealias(rinv * xi)
    dxi = g.curl(tend.du)
    dv = g.dealias(rinv * (dxi - g.dealias(v * tend.drho)))
    R = dv + g.advect(u, v) - g.advect(v, u) + g.dealias(v * g.div(u))
    return g.supnorm(R)


def transported_form_residual(state, **kwargs):
    """Sup-norm of ``(d/dt + L_u) <u - grad phi, dx>``; zero when ``h`` is consistent."""
    g = state.grid
    tend = euler_rhs(state, **kwargs)
    beta = state.u - g.grad(state.phi)
    dbeta = tend.du - g.grad(tend.dphi)
    return g.supnorm(dbeta + lie_derivative(state.u, KForm(1, g, beta)).proxy)
