"""Compressible ideal MHD superfluid on the periodic box.

State variables are the velocity ``u``, density ``rho``, specific entropy
``eta``, magnetic field ``B`` and two vector potentials: ``A`` in the Weyl
gauge (``dA/dt = u x B``) and ``A_g`` in the transport gauge, where the
1-form ``<A_g, dx>`` is carried by the flow.

The integrator advances the momentum density ``mu = rho u`` rather than
``u``: the momentum tendency is assembled in flux form, so total mass and
momentum are linear invariants of both the semi-discrete system and of RK4
and are kept to rounding.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BlowupError, NonPositiveDensityError
from .fieldcalc import Grid, KForm, lie_derivative

CFL_FLOOR = 1e-12


@dataclass(frozen=True)
class EosParams:
    """Polytropic closure ``e = K exp(eta / c_v) rho^(gamma-1) / (gamma-1)``."""

    gamma: float = 5.0 / 3.0
    K: float = 1.0
    c_v: float = 1.0

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError("gamma must exceed 1")
        if not (self.K > 0 and self.c_v > 0):
            raise ValueError("K and c_v must be positive")


def _require_positive(rho):
    rho = np.asarray(rho)
    if not np.all(rho > 0):
        raise NonPositiveDensityError(f"density minimum {np.min(rho):.6g} is not positive")


def eos_energy(rho, eta, params=EosParams()):
    """Specific internal energy ``e(rho, eta)``."""
    _require_positive(rho)
    g = params.gamma
    return params.K * np.exp(eta / params.c_v) * rho ** (g - 1.0) / (g - 1.0)


def eos_pressure(rho, eta, params=EosParams()):
    """``P = rho^2 de/drho = K exp(eta/c_v) rho^gamma``."""
    _require_positive(rho)
    return params.K * np.exp(eta / params.c_v) * rho**params.gamma


def eos_temperature(rho, eta, params=EosParams()):
    """``T = de/deta = e / c_v``."""
    return eos_energy(rho, eta, params) / params.c_v


@dataclass
class MhdState:
    grid: Grid
    u: np.ndarray
    rho: np.ndarray
    eta: np.ndarray
    B: np.ndarray
    A: np.ndarray
    A_g: np.ndarray
    t: float = 0.0

    @property
    def mu(self):
        return self.rho * self.u

    def copy(self):
        return replace(
            self,
            u=self.u.copy(),
            rho=self.rho.copy(),
            eta=self.eta.copy(),
            B=self.B.copy(),
            A=self.A.copy(),
            A_g=self.A_g.copy(),
        )


@dataclass
class MhdTendency:
    """Time derivatives of every state field.

    ``dmu`` is the flux-form momentum tendency that the integrator uses;
    ``du = (dmu - u drho) / rho`` is the same quantity in velocity form.
    """

    du: np.ndarray
    drho: np.ndarray
    deta: np.ndarray
    dB: np.ndarray
    dA: np.ndarray
    dA_g: np.ndarray
    dmu: np.ndarray = field(repr=False)


def potential_rhs(state):
    """Tendencies of the Weyl-gauge and transport-gauge potentials.

    ``dA = u x B`` (from ``E + u x B = 0``, ``E = -dA/dt``) and
    ``dA_g = -L_u <A_g, dx>`` evaluated through Cartan's formula.
    """
    g = state.grid
    dA = g.cross(state.u, state.B)
    dA_g = -lie_derivative(state.u, KForm(1, g, state.A_g)).proxy
    return dA, dA_g


def mhd_rhs(state, params=EosParams()):
    """Right-hand side of the ideal MHD system, dealiased after every product."""
    g = state.grid
    u, rho, eta, B = state.u, state.rho, state.eta, state.B
    _require_positive(rho)
    mask = g.dealias_mask
    ik = g._ik

    mu = g.dealias(rho * u)
    drho = -g.div(mu)
    deta = -g.directional(u, eta)

    P = eos_pressure(rho, eta, params)
    # momentum flux  mu_i u_j - B_i B_j  and total pressure  P + |B|^2 / 2
    stress = mu[:, None] * u[None, :] - B[:, None] * B[None, :]
    stress_h = mask * g.rfft(stress)
    ptot_h = mask * g.rfft(P + 0.5 * np.sum(B * B, axis=0))
    dmu_h = np.stack(
        [
            -(ik[0] * stress_h[i, 0] + ik[1] * stress_h[i, 1] + ik[2] * stress_h[i, 2])
            - ik[i] * ptot_h
            for i in range(3)
        ]
    )
    dmu = g.irfft(dmu_h)
    du = g.dealias((dmu - g.dealias(u * drho)) / rho)

    dA, dA_g = potential_rhs(state)
    dB = g.curl(dA)
    return MhdTendency(du=du, drho=drho, deta=deta, dB=dB, dA=dA, dA_g=dA_g, dmu=dmu)


def _finite(*arrays):
    return all(np.all(np.isfinite(a)) for a in arrays)


def rk4_step(state, dt, params=EosParams()):
    """Classical RK4 over ``(mu, rho, eta, B, A, A_g)``; returns a new state."""
    y0 = (state.mu, state.rho, state.eta, state.B, state.A, state.A_g)

    def evaluate(y, stage):
        mu, rho, eta, B, A, A_g = y
        _require_positive(rho)
        s = MhdState(state.grid, mu / rho, rho, eta, B, A, A_g, state.t)
        k = mhd_rhs(s, params)
        out = (k.dmu, k.drho, k.deta, k.dB, k.dA, k.dA_g)
        if not _finite(*out):
            raise BlowupError(stage)
        return out

    def shifted(k, c):
        return tuple(a + c * b for a, b in zip(y0, k))

    k1 = evaluate(y0, 1)
    k2 = evaluate(shifted(k1, 0.5 * dt), 2)
    k3 = evaluate(shifted(k2, 0.5 * dt), 3)
    k4 = evaluate(shifted(k3, dt), 4)
    mu, rho, eta, B, A, A_g = (
        y + dt / 6.0 * (a + 2.0 * b + 2.0 * c + d)
        for y, a, b, c, d in zip(y0, k1, k2, k3, k4)
    )
    _require_positive(rho)
    return MhdState(state.grid, mu / rho, rho, eta, B, A, A_g, state.t + dt)


def cfl_dt(state, params=EosParams(), courant=0.25):
    """Explicit step bound ``courant * dx_min / (|u| + c_s + c_A)``."""
    if not 0.0 < courant <= 1.0:
        raise ValueError("courant must lie in (0, 1]")
    rho = state.rho
    P = eos_pressure(rho, state.eta, params)
    umax = float(np.max(np.sqrt(np.sum(state.u**2, axis=0))))
    c_s = float(np.max(np.sqrt(params.gamma * P / rho)))
    c_A = float(np.max(np.sqrt(np.sum(state.B**2, axis=0)))) / np.sqrt(float(np.min(rho)))
    return courant * min(state.grid.spacing) / max(umax + c_s + c_A, CFL_FLOOR)


# conserved quantities -------------------------------------------------------


def total_mass(state):
    return state.grid.integrate(state.rho)


def total_momentum(state):
    return np.asarray(state.grid.integrate(state.mu), dtype=float)


def total_entropy(state):
    return state.grid.integrate(state.rho * state.eta)


def total_energy(state, params=EosParams()):
    """``H = int [ rho |u|^2 / 2 + rho e + |B|^2 / 2 ]``."""
    rho = state.rho
    density = (
        0.5 * rho * np.sum(state.u**2, axis=0)
        + rho * eos_energy(rho, state.eta, params)
        + 0.5 * np.sum(state.B**2, axis=0)
    )
    return state.grid.integrate(density)


# diagnostics ----------------------------------------------------------------


def divergence_residual(state):
    """``|div B|_inf / |B|_inf`` (0 for a vanishing field)."""
    g = state.grid
    scale = g.supnorm(state.B)
    return g.supnorm(g.div(state.B)) / scale if scale > 0 else 0.0


def gauge_residual(state):
    """``|curl A_g - B|_inf``; zero while the transport gauge is consistent."""
    g = state.grid
    return g.supnorm(g.curl(state.A_g) - state.B)
