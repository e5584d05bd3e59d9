"""Spectral calculus and differential forms on a periodic box.

Fields are plain numpy arrays: a scalar field has shape ``(nx, ny, nz)`` and
a vector field ``(3, nx, ny, nz)``.  Every operator lives on :class:`Grid`,
which owns the wavenumbers, the 2/3 dealiasing mask and the FFT plumbing.

Pointwise products are always followed by dealiasing (the ``dot``, ``cross``,
``mul`` and ``advect`` helpers do this), so a chain of quadratic products
built from band-limited inputs is an exact truncation of the continuum
expression.

Differential forms use vector proxies:

    degree 0   f                       scalar
    degree 1   <a, dx>                 vector a
    degree 2   i_b(d^3x)               vector b
    degree 3   g d^3x                  scalar g

so that ``d`` is grad / curl / div, ``(1 ^ 1)`` is the cross product,
``(1 ^ 2)`` the dot product, and ``i_v`` on a 2-form with proxy ``w`` gives
the 1-form ``w x v``.
"""

import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft
from scipy.ndimage import map_coordinates

from .errors import DegreeError

TWO_PI = 2.0 * np.pi
_AXES = (-3, -2, -1)


def fft_workers():
    """Thread count for the transforms, from ``HELICITYLAB_THREADS`` (default 1)."""
    return max(1, int(os.environ.get("HELICITYLAB_THREADS", "1")))


def _triple(value, cast):
    if np.ndim(value) == 0:
        return (cast(value),) * 3
    value = tuple(cast(v) for v in value)
    if len(value) != 3:
        raise ValueError("expected a scalar or a 3-sequence")
    return value


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on ``[0, Lx) x [0, Ly) x [0, Lz)``.

    Args:
        n: points per axis (int or 3-sequence); each must be even and >= 4.
        L: box side lengths (float or 3-sequence), default ``2 pi``.
    """

    n: tuple = (32, 32, 32)
    L: tuple = (TWO_PI, TWO_PI, TWO_PI)

    def __post_init__(self):
        n = _triple(self.n, int)
        L = _triple(self.L, float)
        for ni in n:
            if ni < 4 or ni % 2:
                raise ValueError(f"grid sizes must be even and >= 4, got {n}")
        for Li in L:
            if not (Li > 0 and np.isfinite(Li)):
                raise ValueError(f"box lengths must be positive, got {L}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "L", L)

    # geometry -----------------------------------------------------------

    @property
    def shape(self):
        return self.n

    @property
    def spacing(self):
        return tuple(Li / ni for Li, ni in zip(self.L, self.n))

    @property
    def volume(self):
        return self.L[0] * self.L[1] * self.L[2]

    @property
    def npoints(self):
        return self.n[0] * self.n[1] * self.n[2]

    def coordinates(self):
        """Broadcastable 1-D coordinate arrays ``(x, y, z)``."""
        out = []
        for axis, (ni, Li) in enumerate(zip(self.n, self.L)):
            c = np.arange(ni) * (Li / ni)
            shape = [1, 1, 1]
            shape[axis] = ni
            out.append(c.reshape(shape))
        return tuple(out)

    def mesh(self):
        """Full ``(X, Y, Z)`` coordinate arrays."""
        x, y, z = self.coordinates()
        return tuple(np.broadcast_to(c, self.n).copy() for c in (x, y, z))

    # wavenumbers --------------------------------------------------------

    @cached_property
    def mode_numbers(self):
        """Integer mode numbers per axis, shaped for the half spectrum."""
        mx = np.fft.fftfreq(self.n[0], 1.0 / self.n[0])
        my = np.fft.fftfreq(self.n[1], 1.0 / self.n[1])
        mz = np.fft.rfftfreq(self.n[2], 1.0 / self.n[2])
        return mx[:, None, None], my[None, :, None], mz[None, None, :]

    @cached_property
    def wavenumbers(self):
        """Physical wavenumbers ``2 pi m / L`` (Nyquist kept)."""
        return tuple(TWO_PI * m / Li for m, Li in zip(self.mode_numbers, self.L))

    @cached_property
    def derivative_wavenumbers(self):
        """Wavenumbers with the Nyquist mode zeroed; used for all first derivatives."""
        out = []
        for k, m, ni in zip(self.wavenumbers, self.mode_numbers, self.n):
            out.append(np.where(np.abs(m) == ni // 2, 0.0, k))
        return tuple(out)

    @cached_property
    def k_squared(self):
        kx, ky, kz = self.wavenumbers
        return kx**2 + ky**2 + kz**2

    @cached_property
    def kd_squared(self):
        kx, ky, kz = self.derivative_wavenumbers
        return kx**2 + ky**2 + kz**2

    @cached_property
    def dealias_mask(self):
        mx, my, mz = self.mode_numbers
        keep = (
            (np.abs(mx) <= self.n[0] / 3.0)
            & (np.abs(my) <= self.n[1] / 3.0)
            & (np.abs(mz) <= self.n[2] / 3.0)
        )
        return keep.astype(float)

    @cached_property
    def _ik(self):
        kx, ky, kz = self.derivative_wavenumbers
        return [1j * kx, 1j * ky, 1j * kz]

    # transforms ---------------------------------------------------------

    def rfft(self, f):
        return scipy.fft.rfftn(f, axes=_AXES, workers=fft_workers())

    def irfft(self, fh):
        return scipy.fft.irfftn(fh, s=self.n, axes=_AXES, workers=fft_workers())

    def fft_forward(self, f):
        """Real-to-complex transform (unnormalised: the zero mode is ``sum(f)``)."""
        f = np.asarray(f, dtype=float)
        if not np.all(np.isfinite(f)):
            raise ValueError("fft_forward: non-finite input")
        return self.rfft(f)

    def fft_backward(self, fh):
        """Inverse of :meth:`fft_forward`."""
        if not np.all(np.isfinite(fh)):
            raise ValueError("fft_backward: non-finite input")
        return self.irfft(fh)

    # vector calculus ----------------------------------------------------

    def grad(self, f):
        fh = self.rfft(f)
        ik = self._ik
        return self.irfft(np.stack([ik[0] * fh, ik[1] * fh, ik[2] * fh]))

    def div(self, F):
        Fh = self.rfft(F)
        ik = self._ik
        return self.irfft(ik[0] * Fh[0] + ik[1] * Fh[1] + ik[2] * Fh[2])

    def curl(self, F):
        return self.irfft(self.curl_hat(self.rfft(F)))

    def curl_hat(self, Fh):
        ik = self._ik
        return np.stack(
            [
                ik[1] * Fh[2] - ik[2] * Fh[1],
                ik[2] * Fh[0] - ik[0] * Fh[2],
                ik[0] * Fh[1] - ik[1] * Fh[0],
            ]
        )

    def jacobian(self, w):
        """``J[j, i] = d_j w_i`` for a vector field ``w``."""
        wh = self.rfft(w)
        ik = self._ik
        return self.irfft(np.stack([ik[0] * wh, ik[1] * wh, ik[2] * wh]))

    def laplacian(self, f):
        return self.irfft(-self.k_squared * self.rfft(f))

    def inverse_laplacian(self, f):
        """Zero-mean solution of ``lap(g) = f - mean(f)``."""
        fh = self.rfft(f)
        k2 = self.k_squared
        with np.errstate(divide="ignore", invalid="ignore"):
            gh = np.where(k2 > 0, -fh / np.where(k2 > 0, k2, 1.0), 0.0)
        return self.irfft(gh)

    def inverse_div_grad_hat(self, fh):
        """Spectral inverse of ``div(grad(.))`` with the Nyquist-free stencil."""
        kd2 = self.kd_squared
        return np.where(kd2 > 0, -fh / np.where(kd2 > 0, kd2, 1.0), 0.0)

    def leray(self, F):
        """Orthogonal projection onto divergence-free fields."""
        Fh = self.rfft(F)
        kx, ky, kz = self.derivative_wavenumbers
        kd2 = self.kd_squared
        kdotF = kx * Fh[0] + ky * Fh[1] + kz * Fh[2]
        c = np.where(kd2 > 0, kdotF / np.where(kd2 > 0, kd2, 1.0), 0.0)
        return self.irfft(np.stack([Fh[0] - kx * c, Fh[1] - ky * c, Fh[2] - kz * c]))

    # truncation and quadrature -------------------------------------------

    def dealias(self, f):
        """Zero every mode with ``|m_i| > n_i / 3``."""
        return self.irfft(self.dealias_mask * self.rfft(f))

    def mean(self, f):
        return np.mean(f, axis=_AXES)

    def integrate(self, f):
        """Box integral ``mean(f) * Lx Ly Lz`` (exact for resolved trigonometric data)."""
        out = self.mean(f) * self.volume
        return float(out) if np.ndim(out) == 0 else out

    def inner(self, f, g):
        """Grid inner product ``integrate(f * g)`` summed over components."""
        return float(np.sum(self.mean(f * g)) * self.volume)

    # dealiased products -------------------------------------------------

    def mul(self, a, b):
        return self.dealias(a * b)

    def dot(self, a, b):
        return self.dealias(np.sum(a * b, axis=0))

    def cross(self, a, b):
        return self.dealias(np.cross(a, b, axis=0))

    def directional(self, v, f):
        """Dealiased ``<v, grad f>`` for a scalar ``f``."""
        return self.dealias(np.sum(v * self.grad(f), axis=0))

    def advect(self, v, w):
        """Dealiased ``(v . grad) w`` for a vector ``w``."""
        J = self.jacobian(w)
        return self.dealias(np.einsum("j...,ji...->i...", v, J))

    # norms --------------------------------------------------------------

    @staticmethod
    def supnorm(f):
        return float(np.max(np.abs(f))) if np.size(f) else 0.0


def lie_derivative_vector(grid, v, w):
    """Lie bracket ``[v, w] = (v . grad) w - (w . grad) v``."""
    return grid.advect(v, w) - grid.advect(w, v)


# ---------------------------------------------------------------------------
# differential forms


_COMPONENTS = {0: 1, 1: 3, 2: 3, 3: 1}


@dataclass(frozen=True)
class KForm:
    """Differential form of degree 0-3 stored through its proxy.

    ``data`` has shape ``(1, nx, ny, nz)`` for degrees 0 and 3 and
    ``(3, nx, ny, nz)`` for degrees 1 and 2.
    """

    degree: int
    grid: Grid
    data: np.ndarray

    def __post_init__(self):
        if self.degree not in _COMPONENTS:
            raise DegreeError(f"form degree must be 0..3, got {self.degree}")
        data = np.asarray(self.data, dtype=float)
        if data.shape == tuple(self.grid.n) and _COMPONENTS[self.degree] == 1:
            data = data[None]
        if data.shape != (_COMPONENTS[self.degree], *self.grid.n):
            raise ValueError(f"degree-{self.degree} form data has shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise ValueError("form components must be finite")
        object.__setattr__(self, "data", data)

    @property
    def proxy(self):
        """Scalar (degrees 0, 3) or vector (degrees 1, 2) proxy field."""
        return self.data[0] if _COMPONENTS[self.degree] == 1 else self.data

    @classmethod
    def zero(cls, grid, degree):
        return cls(degree, grid, np.zeros((_COMPONENTS[degree], *grid.n)))

    def __add__(self, other):
        _check_compatible(self, other)
        return KForm(self.degree, self.grid, self.data + other.data)

    def __sub__(self, other):
        _check_compatible(self, other)
        return KForm(self.degree, self.grid, self.data - other.data)

    def __neg__(self):
        return KForm(self.degree, self.grid, -self.data)

    def scale(self, c):
        return KForm(self.degree, self.grid, c * self.data)


def _check_compatible(a, b):
    if a.degree != b.degree:
        raise DegreeError(f"cannot combine degree {a.degree} and {b.degree} forms")
    if a.grid != b.grid:
        raise ValueError("forms live on different grids")


def exterior_d(form):
    """Exterior derivative: grad (0->1), curl (1->2), div (2->3)."""
    g = form.grid
    if form.degree == 0:
        return KForm(1, g, g.grad(form.proxy))
    if form.degree == 1:
        return KForm(2, g, g.curl(form.proxy))
    if form.degree == 2:
        return KForm(3, g, g.div(form.proxy))
    raise DegreeError("d of a 3-form would be a 4-form; not representable in 3-D")


def wedge(a, b):
    """Graded wedge product of two forms (total degree at most 3)."""
    if a.grid != b.grid:
        raise ValueError("forms live on different grids")
    g = a.grid
    p, q = a.degree, b.degree
    if p + q > 3:
        raise DegreeError(f"wedge of degrees {p} and {q} exceeds 3")
    if p == 0:
        return KForm(q, g, g.dealias(a.data[0] * b.data))
    if q == 0:
        return KForm(p, g, g.dealias(b.data[0] * a.data))
    if p == 1 and q == 1:
        return KForm(2, g, g.cross(a.proxy, b.proxy))
    # (1, 2) or (2, 1): the sign (-1)^(1*2) is +1
    return KForm(3, g, g.dot(a.proxy, b.proxy))


def interior(v, form):
    """Contraction ``i_v`` of a vector field into a form of degree >= 1."""
    g = form.grid
    if form.degree == 0:
        raise DegreeError("interior product of a 0-form is undefined")
    if form.degree == 1:
        return KForm(0, g, g.dot(v, form.proxy))
    if form.degree == 2:
        return KForm(1, g, g.cross(form.proxy, v))
    return KForm(2, g, g.dealias(form.proxy * v))


def lie_derivative(v, form):
    """Lie derivative via Cartan's formula ``L_v = i_v d + d i_v``."""
    if form.degree == 0:
        return interior(v, exterior_d(form))
    if form.degree == 3:
        return exterior_d(interior(v, form))
    return interior(v, exterior_d(form)) + exterior_d(interior(v, form))


# ---------------------------------------------------------------------------
# particles


@dataclass(frozen=True)
class ParticleSet:
    """Tracer positions, shape ``(m, 3)``, wrapped into the box."""

    positions: np.ndarray
    box: tuple = (TWO_PI, TWO_PI, TWO_PI)

    def __post_init__(self):
        box = _triple(self.box, float)
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        if pos.shape[-1] != 3:
            raise ValueError("positions must have shape (m, 3)")
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "positions", np.mod(pos, np.asarray(box)))


def trilinear_sampler(grid, u):
    """Periodic trilinear interpolation of a vector field at arbitrary points."""
    u = np.asarray(u, dtype=float)
    inv_dx = 1.0 / np.asarray(grid.spacing)

    def sample(positions):
        idx = (np.asarray(positions) * inv_dx).T
        return np.stack(
            [map_coordinates(u[c], idx, order=1, mode="grid-wrap") for c in range(3)],
            axis=-1,
        )

    return sample


def spectral_sampler(grid, u):
    """Exact trigonometric interpolation (cost ~ points x grid size)."""
    uh = np.fft.fftn(np.asarray(u, dtype=float), axes=_AXES) / grid.npoints
    ks = []
    for ni, Li in zip(grid.n, grid.L):
        m = np.fft.fftfreq(ni, 1.0 / ni)
        m[ni // 2] = 0.0  # drop the ambiguous Nyquist phase off-grid
        ks.append(TWO_PI * m / Li)
    nyq = np.ones(grid.n)
    nyq[grid.n[0] // 2] = nyq[:, grid.n[1] // 2] = nyq[:, :, grid.n[2] // 2] = 0.0
    uh = uh * nyq

    def sample(positions):
        pos = np.asarray(positions, dtype=float)
        ex = np.exp(1j * pos[:, 0:1] * ks[0])
        ey = np.exp(1j * pos[:, 1:2] * ks[1])
        ez = np.exp(1j * pos[:, 2:3] * ks[2])
        vals = np.einsum("cijk,mi,mj,mk->mc", uh, ex, ey, ez, optimize=True)
        return vals.real

    return sample


def advect_particles(particles, velocity_sampler, dt):
    """One classical RK4 step of ``dx/dt = u(x)`` followed by periodic wrap."""
    if not np.isfinite(dt):
        raise ValueError("dt must be finite")
    x = particles.positions
    k1 = velocity_sampler(x)
    k2 = velocity_sampler(x + 0.5 * dt * k1)
    k3 = velocity_sampler(x + 0.5 * dt * k2)
    k4 = velocity_sampler(x + dt * k3)
    x_new = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return ParticleSet(x_new, particles.box)
