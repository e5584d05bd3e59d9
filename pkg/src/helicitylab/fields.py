"""Analytic and seeded random fields used as initial data and test inputs."""

import numpy as np

from .fieldcalc import TWO_PI


def _scaled_coordinates(grid, shift=(0.0, 0.0, 0.0)):
    x, y, z = grid.coordinates()
    return (
        TWO_PI * x / grid.L[0] + shift[0],
        TWO_PI * y / grid.L[1] + shift[1],
        TWO_PI * z / grid.L[2] + shift[2],
    )


def abc_field(grid, A=1.0, B=1.0, C=1.0, shift=(0.0, 0.0, 0.0)):
    """Arnold-Beltrami-Childress field; ``curl u = u`` on the ``2 pi`` box."""
    x, y, z = _scaled_coordinates(grid, shift)
    u = np.empty((3, *grid.n))
    u[0] = A * np.sin(z) + C * np.cos(y)
    u[1] = B * np.sin(x) + A * np.cos(z)
    u[2] = C * np.sin(y) + B * np.cos(x)
    return u


def taylor_green(grid, amplitude=1.0):
    """Taylor-Green vortex ``(sin x cos y cos z, -cos x sin y cos z, 0)``."""
    x, y, z = _scaled_coordinates(grid)
    u = np.zeros((3, *grid.n))
    u[0] = amplitude * np.sin(x) * np.cos(y) * np.cos(z)
    u[1] = -amplitude * np.cos(x) * np.sin(y) * np.cos(z)
    return u


def random_scalar(grid, rng, kmax=3, mean=False):
    """Band-limited random scalar (modes ``|m_i| <= kmax``), unit sup-norm.

    The spectrum falls off like ``exp(-|m|^2 / kmax^2)`` so the field is
    smooth on the grid.  With ``mean=False`` the zero mode is removed.
    """
    mx, my, mz = grid.mode_numbers
    band = (np.abs(mx) <= kmax) & (np.abs(my) <= kmax) & (np.abs(mz) <= kmax)
    m2 = mx**2 + my**2 + mz**2
    shape = np.broadcast_shapes(mx.shape, my.shape, mz.shape)
    coeff = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    coeff *= band * np.exp(-m2 / max(kmax, 1) ** 2)
    if not mean:
        coeff[0, 0, 0] = 0.0
    f = grid.irfft(coeff)
    return f / np.max(np.abs(f))


def random_vector(grid, rng, kmax=3, mean=False):
    return np.stack([random_scalar(grid, rng, kmax, mean) for _ in range(3)])


def random_solenoidal(grid, rng, kmax=3):
    """Divergence-free, zero-mean random vector field with unit sup-norm."""
    u = grid.leray(random_vector(grid, rng, kmax))
    return u / np.max(np.abs(u))


def beltrami_random(grid, rng):
    """ABC-type field with random coefficients and phases (still ``curl u = u``)."""
    A, B, C = rng.uniform(0.5, 1.5, size=3)
    shift = tuple(rng.uniform(0.0, TWO_PI, size=3))
    return abc_field(grid, A, B, C, shift)


def vector_potential(grid, B):
    """Coulomb-gauge potential ``A`` with ``curl A = B`` for zero-mean solenoidal ``B``."""
    Bh = grid.rfft(B)
    curlB = grid.curl_hat(Bh)
    return grid.irfft(np.stack([-grid.inverse_div_grad_hat(c) for c in curlB]))


def reflect_x(f, kind="scalar"):
    """Mirror ``x -> -x`` on the periodic grid.

    ``kind`` is ``"scalar"``, ``"polar"`` (velocity-like vector, ``x``
    component flips) or ``"axial"`` (magnetic-like pseudovector, ``y`` and
    ``z`` components flip).
    """
    idx = (-np.arange(f.shape[-3])) % f.shape[-3]
    g = np.take(f, idx, axis=-3)
    if kind == "polar":
        g = g * np.array([-1.0, 1.0, 1.0])[:, None, None, None]
    elif kind == "axial":
        g = g * np.array([1.0, -1.0, -1.0])[:, None, None, None]
    elif kind != "scalar":
        raise ValueError(f"unknown reflection kind {kind!r}")
    return g
