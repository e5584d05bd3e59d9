"""Helicity-type invariants and their iterated-Lie-derivative hierarchies.

Every hierarchy is evaluated on scalar densities: with a generator ``v``
satisfying ``div(rho v) = 0`` the Lie derivative of the 3-form
``rho f d^3x`` reduces to ``rho <v, grad f> d^3x``, so

    I_n = int rho f_n d^3x,   f_{n+1} = <v, grad f_n>.

The solenoidality residual of ``rho v`` is computed for every call and
attached to the result.

On the periodic box ``int rho <v, grad g> = -int g div(rho v)`` vanishes,
so every order ``n >= 1`` is identically zero in the continuum.  Their
discrete values are therefore judged against the magnitude of their
density, ``int |rho f_n|``, which each hierarchy reports in ``scales``.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import HierarchyOrderError

DEFAULT_MAX_ORDER = 4
SOLENOIDAL_WARN = 1e-8
SCALE_FLOOR = 1e-30


class HierarchyWarning(UserWarning):
    pass


class Hierarchy(list):
    """List of hierarchy levels (fields or integrals) with diagnostics attached.

    Attributes:
        divergence_residual: ``|div(rho v)|_inf / |rho v|_inf``.
        scales: per-order ``int |rho f_n|`` (integral hierarchies only).
        warning: message when the residual exceeded ``SOLENOIDAL_WARN``.
    """

    def __init__(self, items=(), divergence_residual=0.0, scales=None, warning=None):
        super().__init__(items)
        self.divergence_residual = divergence_residual
        self.scales = scales
        self.warning = warning


def lie_scalar_hierarchy(grid, v, f, N, rho=None, max_order=DEFAULT_MAX_ORDER):
    """Return ``[f_0, ..., f_N]`` with ``f_{n+1}`` the dealiased ``<v, grad f_n>``."""
    if N < 0:
        raise HierarchyOrderError("hierarchy order must be non-negative")
    if N > max_order:
        raise HierarchyOrderError(f"order {N} exceeds the cap {max_order}")
    flux = v if rho is None else grid.dealias(rho * v)
    flux_norm = grid.supnorm(flux)
    residual = grid.supnorm(grid.div(flux)) / flux_norm if flux_norm > 0 else 0.0
    message = None
    if residual > SOLENOIDAL_WARN:
        message = f"div(rho v) residual {residual:.2e} exceeds {SOLENOIDAL_WARN:.0e}"
        warnings.warn(message, HierarchyWarning, stacklevel=2)
    levels = [np.asarray(f, dtype=float)]
    for _ in range(N):
        levels.append(grid.directional(v, levels[-1]))
    return Hierarchy(levels, divergence_residual=residual, warning=message)


def _integrate_hierarchy(grid, rho, v, f0, N, max_order):
    levels = lie_scalar_hierarchy(grid, v, f0, N, rho=rho, max_order=max_order)
    values, scales = [], []
    for fn in levels:
        density = rho * fn
        values.append(grid.integrate(density))
        scales.append(grid.integrate(np.abs(density)))
    return Hierarchy(
        values,
        divergence_residual=levels.divergence_residual,
        scales=scales,
        warning=levels.warning,
    )


def _generator_and_density(grid, rho, w, pairing):
    """``v = w / rho`` and ``f_0 = pairing / rho``, both dealiased."""
    rinv = 1.0 / rho
    v = grid.dealias(w * rinv)
    f0 = grid.dealias(rinv * pairing)
    return v, f0


# magnetic ------------------------------------------------------------------


def magnetic_helicity(state):
    """``int <A, curl A> d^3x`` with the curl recomputed from ``A``."""
    g = state.grid
    return g.integrate(np.sum(state.A * g.curl(state.A), axis=0))


def magnetic_helicity_hierarchy(state, N, gauge="transport", max_order=DEFAULT_MAX_ORDER):
    """``int rho L_v^n (rho^-1 <B, A>) d^3x`` with ``v = B / rho``.

    ``gauge="transport"`` takes order 0 from the Weyl potential ``A`` and
    orders ``n >= 1`` from the transport-gauge ``A_g``; ``gauge="weyl"``
    uses ``A`` throughout.
    """
    if gauge not in ("transport", "weyl"):
        raise ValueError(f"unknown gauge track {gauge!r}")
    g = state.grid
    potential = state.A_g if gauge == "transport" else state.A
    v, f0 = _generator_and_density(g, state.rho, state.B, g.dot(state.B, potential))
    out = _integrate_hierarchy(g, state.rho, v, f0, N, max_order)
    if gauge == "transport":
        _, f0_weyl = _generator_and_density(g, state.rho, state.B, g.dot(state.B, state.A))
        density = state.rho * f0_weyl
        out[0] = g.integrate(density)
        out.scales[0] = g.integrate(np.abs(density))
    return out


def cross_helicity(state):
    """``int <u, B> d^3x``."""
    return state.grid.integrate(np.sum(state.u * state.B, axis=0))


# kinematic -----------------------------------------------------------------


def kinematic_helicity(grid, u):
    """``int <u, curl u> d^3x``."""
    return grid.integrate(np.sum(u * grid.curl(u), axis=0))


def generalized_helicity_hierarchy(state, N, max_order=DEFAULT_MAX_ORDER):
    """``int rho L_v^n (rho^-1 <u, xi>) d^3x`` with ``xi = curl u``, ``v = xi / rho``."""
    g = state.grid
    xi = g.curl(state.u)
    v, f0 = _generator_and_density(g, state.rho, xi, g.dot(state.u, xi))
    return _integrate_hierarchy(g, state.rho, v, f0, N, max_order)


def m_hierarchy(state, N, max_order=DEFAULT_MAX_ORDER):
    """Hierarchy built on the gauge-shifted one-form ``u - grad phi``."""
    g = state.grid
    xi = g.curl(state.u)
    shifted = state.u - g.grad(state.phi)
    v, f0 = _generator_and_density(g, state.rho, xi, g.dot(shifted, xi))
    return _integrate_hierarchy(g, state.rho, v, f0, N, max_order)


# time series ---------------------------------------------------------------


@dataclass
class InvariantSeries:
    """Samples of one invariant.

    ``density_scale`` is the size of the integrand (``int |density|``), the
    largest seen over the samples; it keeps the relative drift meaningful for
    invariants whose value is identically zero.
    """

    name: str
    order: int = 0
    times: list = field(default_factory=list)
    values: list = field(default_factory=list)
    density_scale: float = 0.0

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise ValueError("times and values must have equal length")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("sample times must be strictly increasing")

    def append(self, t, value):
        if self.times and t <= self.times[-1]:
            raise ValueError(f"sample time {t} does not advance past {self.times[-1]}")
        self.times.append(float(t))
        self.values.append(float(value))


@dataclass(frozen=True)
class DriftReport:
    name: str
    order: int
    baseline: float
    max_abs_drift: float
    rel_drift: float
    scale: float


def drift_report(series):
    """Largest departure from the first sample, absolute and relative."""
    if not series.values:
        raise ValueError(f"series {series.name!r} is empty")
    values = np.asarray(series.values, dtype=float)
    baseline = float(values[0])
    max_abs = float(np.max(np.abs(values - baseline)))
    scale = max(abs(baseline), float(np.max(np.abs(values))), series.density_scale, SCALE_FLOOR)
    return DriftReport(series.name, series.order, baseline, max_abs, max_abs / scale, scale)
