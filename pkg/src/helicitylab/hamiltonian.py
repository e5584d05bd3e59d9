"""Lie-Poisson bracket of compressible ideal MHD in the variables (mu, rho, eta, B).

With ``F = (F_mu, F_rho, F_eta, F_B)`` the variational derivatives of ``f``
and ``G`` those of ``g`` the bracket is the sum of five quadratures::

    momentum         -<mu, [F_mu, G_mu]_c>
    density          rho (<G_mu, grad F_rho> - <F_mu, grad G_rho>)
    entropy          eta div(G_mu F_eta - F_mu G_eta)
    field_transport  <B, (G_mu . grad) F_B> - <B, (F_mu . grad) G_B>
    field_stretch    <F_B, (B . grad) G_mu> - <G_B, (B . grad) F_mu>

where ``[X, Y]_c = (X . grad) Y - (Y . grad) X``.  Every term is written as
``X(f, g) - X(g, f)`` so antisymmetry holds to the last bit.  With this
orientation the dynamics read ``df/dt = {f, H}`` (``DYNAMICS_ORDER``).

``form="unsymmetrized"`` evaluates the alternative arrangement with
``+<mu, [F_mu, G_mu]_c>`` and ``<B, [G_mu, F_B]_c>`` for the first and
fourth terms; it is neither antisymmetric nor consistent with the flow and
is kept for comparison.
"""

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .fieldcalc import lie_derivative_vector
from .fields import random_scalar, random_solenoidal, random_vector, vector_potential
from .mhd import EosParams, MhdState, cfl_dt, eos_energy, eos_pressure, rk4_step, total_energy

TERMS = ("momentum", "density", "entropy", "field_transport", "field_stretch")
DYNAMICS_ORDER = "f,H"
FD_EPS = 1e-5

canonical_vf_bracket = lie_derivative_vector


class VarDerivs(NamedTuple):
    mu: np.ndarray
    rho: np.ndarray
    eta: np.ndarray
    B: np.ndarray

    def scaled(self, a):
        return VarDerivs(*(a * c for c in self))

    def __add__(self, other):
        return VarDerivs(*(a + b for a, b in zip(self, other)))


@dataclass(frozen=True)
class Functional:
    """A scalar functional of the MHD state with its variational derivatives."""

    name: str
    value: Callable[[MhdState], float]
    var_derivs: Callable[[MhdState], VarDerivs]

    def __call__(self, state):
        return self.value(state)

    def scaled(self, a):
        return combine(self, None, a, 0.0)

    def corrupted(self, component, factor=1.01):
        """Copy whose ``component`` derivative is multiplied by ``factor``."""
        idx = VarDerivs._fields.index(component)

        def derivs(state):
            d = list(self.var_derivs(state))
            d[idx] = factor * d[idx]
            return VarDerivs(*d)

        return Functional(f"{self.name}~{component}", self.value, derivs)


def combine(f, g, a, b):
    """The functional ``a f + b g`` (``g`` may be ``None``)."""
    if g is None:
        return Functional(f"{a}*{f.name}", lambda s: a * f(s), lambda s: f.var_derivs(s).scaled(a))
    return Functional(
        f"{a}*{f.name}+{b}*{g.name}",
        lambda s: a * f(s) + b * g(s),
        lambda s: f.var_derivs(s).scaled(a) + g.var_derivs(s).scaled(b),
    )


# builtin library ------------------------------------------------------------


def _zeros(state):
    return np.zeros(state.grid.n), np.zeros((3, *state.grid.n))


def _mass():
    def derivs(s):
        z, zv = _zeros(s)
        return VarDerivs(zv, np.ones(s.grid.n), z, zv)

    return Functional("mass", lambda s: s.grid.integrate(s.rho), derivs)


def _momentum(i):
    def derivs(s):
        z, zv = _zeros(s)
        e = zv.copy()
        e[i] = 1.0
        return VarDerivs(e, z, z, zv)

    return Functional(
        "momentum_" + "xyz"[i], lambda s: s.grid.integrate(s.rho * s.u[i]), derivs
    )


def _entropy():
    def derivs(s):
        _, zv = _zeros(s)
        return VarDerivs(zv, s.eta.copy(), s.rho.copy(), zv)

    return Functional("entropy", lambda s: s.grid.integrate(s.rho * s.eta), derivs)


def _energy(params):
    # dH/dmu = u, dH/drho = -|u|^2/2 + e + P/rho, dH/deta = rho T, dH/dB = B
    def derivs(s):
        e = eos_energy(s.rho, s.eta, params)
        P = eos_pressure(s.rho, s.eta, params)
        drho = -0.5 * np.sum(s.u**2, axis=0) + e + P / s.rho
        return VarDerivs(s.u.copy(), drho, s.rho * e / params.c_v, s.B.copy())

    return Functional("energy", lambda s: total_energy(s, params), derivs)


def _magnetic_helicity():
    # value in the Coulomb gauge so it depends on B alone; dK/dB = 2 A
    def value(s):
        return s.grid.integrate(np.sum(vector_potential(s.grid, s.B) * s.B, axis=0))

    def derivs(s):
        z, zv = _zeros(s)
        return VarDerivs(zv, z, z, 2.0 * vector_potential(s.grid, s.B))

    return Functional("magnetic_helicity", value, derivs)


def _cross_helicity():
    # C = int mu.B / rho:  dC/dmu = B/rho, dC/drho = -u.B/rho, dC/dB = u
    def derivs(s):
        z, _ = _zeros(s)
        uB = np.sum(s.u * s.B, axis=0)
        return VarDerivs(s.B / s.rho, -uB / s.rho, z, s.u.copy())

    return Functional(
        "cross_helicity", lambda s: s.grid.integrate(np.sum(s.u * s.B, axis=0)), derivs
    )


def builtin_functionals(params=EosParams()):
    """The eight library functionals, keyed by name."""
    fs = [
        _mass(),
        _momentum(0),
        _momentum(1),
        _momentum(2),
        _entropy(),
        _energy(params),
        _magnetic_helicity(),
        _cross_helicity(),
    ]
    return {f.name: f for f in fs}


# bracket --------------------------------------------------------------------


@dataclass(frozen=True)
class BracketReport:
    value_fg: float
    value_gf: float
    antisymmetry_defect: float
    terms: dict
    terms_gf: dict = field(repr=False)
    scale: float = 0.0


def _half_terms(grid, state, F, G, form):
    """One-sided integrands ``X(f, g)``; the bracket is ``X(f, g) - X(g, f)``."""
    mu = state.mu
    dot = lambda a, b: np.sum(a * b, axis=0)  # noqa: E731
    out = {}
    if form == "consistent":
        out["momentum"] = -dot(mu, grid.advect(F.mu, G.mu))
    else:
        out["momentum"] = dot(mu, grid.advect(F.mu, G.mu))
    out["density"] = state.rho * dot(G.mu, grid.grad(F.rho))
    out["entropy"] = state.eta * grid.div(G.mu * F.eta)
    if form == "consistent":
        out["field_transport"] = dot(state.B, grid.advect(G.mu, F.B))
    else:
        out["field_transport"] = dot(state.B, canonical_vf_bracket(grid, G.mu, F.B))
    out["field_stretch"] = dot(F.B, grid.advect(state.B, G.mu))
    return out


def _term_integrands(state, F, G, form):
    g = state.grid
    a = _half_terms(g, state, F, G, form)
    if form == "unsymmetrized":
        b = _half_terms(g, state, G, F, form)
        # first term is already a full commutator, the fourth is left one-sided
        return {
            "momentum": a["momentum"] - b["momentum"],
            "density": a["density"] - b["density"],
            "entropy": a["entropy"] - b["entropy"],
            "field_transport": a["field_transport"],
            "field_stretch": a["field_stretch"] - b["field_stretch"],
        }
    b = _half_terms(g, state, G, F, form)
    return {name: a[name] - b[name] for name in TERMS}


def _apply_fault(terms, fault):
    if fault is None:
        return terms
    if fault not in TERMS:
        raise ValueError(f"unknown bracket term {fault!r}; expected one of {TERMS}")
    out = dict(terms)
    out[fault] = -out[fault]
    return out


def bracket_terms(f, g, state, form="consistent", fault=None):
    """Per-term quadratures of ``{f, g}`` and the absolute-integrand scale."""
    if form not in ("consistent", "unsymmetrized"):
        raise ValueError(f"unknown bracket form {form!r}")
    F, G = f.var_derivs(state), g.var_derivs(state)
    for d in (F, G):
        if d.mu.shape[1:] != tuple(state.grid.n):
            raise ValueError("variational derivative does not match the state grid")
    integrands = _term_integrands(state, F, G, form)
    grid = state.grid
    values = {k: grid.integrate(v) for k, v in integrands.items()}
    scale = sum(grid.integrate(np.abs(v)) for v in integrands.values())
    return _apply_fault(values, fault), scale


def poisson_bracket(f, g, state, form="consistent", fault=None):
    """``{f, g}`` and ``{g, f}`` with per-term values and the antisymmetry defect.

    ``fault`` names one term whose sign is reversed, for fault-injection tests.
    """
    terms_fg, s1 = bracket_terms(f, g, state, form, fault)
    terms_gf, s2 = bracket_terms(g, f, state, form, fault)
    fg = float(sum(terms_fg[k] for k in TERMS))
    gf = float(sum(terms_gf[k] for k in TERMS))
    return BracketReport(fg, gf, abs(fg + gf), terms_fg, terms_gf, max(s1, s2))


# checks ---------------------------------------------------------------------


def _perturbed(state, dw, eps):
    dmu, drho, deta, dB = dw
    rho = state.rho + eps * drho
    mu = state.mu + eps * dmu
    return MhdState(state.grid, mu / rho, rho, state.eta + eps * deta, state.B + eps * dB, state.A, state.A_g, state.t)


def random_perturbation(state, rng, kmax=2):
    """Smooth perturbation sized to each state component.

    ``dmu`` and ``drho`` carry a mean so linear functionals see them; ``dB``
    is solenoidal and mean-free so it stays in the image of curl.
    """
    g = state.grid

    def size(a):
        return max(float(np.max(np.abs(a))), 1.0)

    dmu = size(state.mu) * random_vector(g, rng, kmax, mean=True)
    drho = size(state.rho) * random_scalar(g, rng, kmax, mean=True)
    deta = size(state.eta) * random_scalar(g, rng, kmax)
    dB = size(state.B) * random_solenoidal(g, rng, kmax)
    return dmu, drho, deta, dB


def directional_derivative(f, state, dw):
    """``int <Df, dw>`` and the absolute-integrand scale of that pairing."""
    g = state.grid
    D = f.var_derivs(state)
    parts = (
        np.sum(D.mu * dw[0], axis=0),
        D.rho * dw[1],
        D.eta * dw[2],
        np.sum(D.B * dw[3], axis=0),
    )
    return sum(g.integrate(p) for p in parts), sum(g.integrate(np.abs(p)) for p in parts)


def validate_var_deriv(f, state, probes=3, seed=0, eps=FD_EPS):
    """Worst relative error between central differences of ``f`` and ``<Df, dw>``."""
    if probes < 1:
        raise ValueError("probes must be at least 1")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(probes):
        dw = random_perturbation(state, rng)
        fd = (f(_perturbed(state, dw, eps)) - f(_perturbed(state, dw, -eps))) / (2 * eps)
        lin, scale = directional_derivative(f, state, dw)
        worst = max(worst, abs(fd - lin) / max(abs(lin), abs(fd), scale, 1e-300))
    return worst


@dataclass(frozen=True)
class ConsistencyReport:
    name: str
    fd_rate: float
    bracket_rate: float
    error: float
    scale: float
    dt: float
    terms: dict


def _rate_scale(f, state, params):
    # |f| over the fastest signal crossing time of one cell
    t_cell = cfl_dt(state, params, courant=1.0)
    return abs(f(state)) / t_cell


def hamiltonian_consistency(f, state, dt=None, params=EosParams(), form="consistent", fault=None):
    """Compare ``(f(t+dt) - f(t-dt)) / 2dt`` against ``{f, H}``.

    The error is relative to the largest of the two rates, the integrand
    scale of the bracket and ``|f| / t_cell``, the rate at which ``f`` could
    change if every cell turned over in one signal crossing time.
    """
    if dt is None:
        dt = cfl_dt(state, params) / 10.0
    H = _energy(params)
    fd = (f(rk4_step(state, dt, params)) - f(rk4_step(state, -dt, params))) / (2.0 * dt)
    terms, integrand_scale = bracket_terms(f, H, state, form, fault)
    br = float(sum(terms[k] for k in TERMS))
    scale = max(abs(fd), abs(br), integrand_scale, _rate_scale(f, state, params), 1e-300)
    return ConsistencyReport(f.name, fd, br, abs(fd - br) / scale, scale, dt, terms)


def infer_dynamics_order(state, f=None, params=EosParams()):
    """Return ``"f,H"`` or ``"H,f"``, whichever ordering reproduces ``df/dt``."""
    f = f or _cross_helicity()
    rep = hamiltonian_consistency(f, state, params=params)
    err_fh = abs(rep.fd_rate - rep.bracket_rate)
    err_hf = abs(rep.fd_rate + rep.bracket_rate)
    return "f,H" if err_fh <= err_hf else "H,f"


def diagnose_sign_fault(reports, tol=1e-4):
    """Names of terms whose sign reversal would make every report consistent.

    Works from the per-term values alone, so it can localize a fault in an
    implementation it does not otherwise trust.
    """
    suspects = []
    for name in TERMS:
        ok = True
        for r in reports:
            flipped = r.bracket_rate - 2.0 * r.terms[name]
            if abs(flipped - r.fd_rate) / r.scale > tol:
                ok = False
                break
        if ok:
            suspects.append(name)
    return suspects
