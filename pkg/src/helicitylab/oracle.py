"""Finite-difference reference implementation of the helicity hierarchies.

Shares nothing with the spectral path beyond the state arrays: derivatives
are 6th-order central stencils, products are plain pointwise products and
integrals are periodic trapezoid sums.  Used to cross-check the spectral
engine on smooth data.
"""

import numpy as np

_STENCIL = ((1, 3.0 / 4.0), (2, -3.0 / 20.0), (3, 1.0 / 60.0))


def fd_derivative(f, axis, h):
    """6th-order central difference of ``f`` along grid ``axis`` (periodic)."""
    out = np.zeros_like(f)
    for shift, c in _STENCIL:
        out += c * (np.roll(f, -shift, axis=axis) - np.roll(f, shift, axis=axis))
    return out / h


def fd_grad(f, spacing):
    return np.stack([fd_derivative(f, a - 3, h) for a, h in enumerate(spacing)])


def fd_curl(u, spacing):
    hx, hy, hz = spacing
    d = fd_derivative
    return np.stack(
        [
            d(u[2], -2, hy) - d(u[1], -1, hz),
            d(u[0], -1, hz) - d(u[2], -3, hx),
            d(u[1], -3, hx) - d(u[0], -2, hy),
        ]
    )


def trapezoid(f, spacing):
    """Periodic trapezoid rule: every node carries the full cell weight."""
    return float(np.sum(f) * spacing[0] * spacing[1] * spacing[2])


def _hierarchy(rho, w, pairing, N, spacing):
    v = w / rho
    fn = pairing / rho
    values = [trapezoid(rho * fn, spacing)]
    for _ in range(N):
        fn = np.sum(v * fd_grad(fn, spacing), axis=0)
        values.append(trapezoid(rho * fn, spacing))
    return values


def magnetic_hierarchy(state, N, gauge="transport"):
    h = state.grid.spacing
    potential = state.A_g if gauge == "transport" else state.A
    values = _hierarchy(state.rho, state.B, np.sum(state.B * potential, axis=0), N, h)
    if gauge == "transport":
        values[0] = trapezoid(np.sum(state.B * state.A, axis=0), h)
    return values


def generalized_hierarchy(state, N):
    h = state.grid.spacing
    xi = fd_curl(state.u, h)
    return _hierarchy(state.rho, xi, np.sum(state.u * xi, axis=0), N, h)


def m_hierarchy(state, N):
    h = state.grid.spacing
    xi = fd_curl(state.u, h)
    shifted = state.u - fd_grad(state.phi, h)
    return _hierarchy(state.rho, xi, np.sum(shifted * xi, axis=0), N, h)
