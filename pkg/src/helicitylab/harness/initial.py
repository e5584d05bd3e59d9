"""Canned initial conditions for the MHD and Euler runs."""

import numpy as np

from ..errors import ConfigError
from ..euler import EulerState
from ..fieldcalc import Grid
from ..fields import (
    abc_field,
    beltrami_random,
    random_scalar,
    random_solenoidal,
    random_vector,
    taylor_green,
)
from ..mhd import MhdState


def make_grid(config):
    return Grid(tuple(config.grid.n), tuple(config.grid.L))


def _shape(grid, config, rng, shift=(0.0, 0.0, 0.0)):
    """Unit-amplitude vector field of the configured kind."""
    i = config.init
    if i.kind == "abc":
        return abc_field(grid, *i.amplitudes, shift=shift)
    if i.kind == "beltrami_random":
        return beltrami_random(grid, rng)
    if i.kind == "taylor_green":
        return taylor_green(grid)
    if i.kind == "random_solenoidal":
        return random_solenoidal(grid, rng, i.kmax)
    raise ConfigError(f"unknown init kind {i.kind!r}")


def _thermo(grid, config):
    x, y, _ = grid.mesh()
    eps = config.init.perturbation
    return 1.0 + eps * np.sin(x), eps * np.cos(y)


def init_mhd(config):
    """``A`` of the configured shape, ``B = curl A``, ``u`` of the same kind.

    For ``abc`` the velocity uses the phase ``init.shift`` so that ``u`` and
    ``B`` are not parallel.  The transport-gauge potential starts equal to
    ``A``.
    """
    grid = make_grid(config)
    rng = np.random.default_rng(config.run.seed)
    A = _shape(grid, config, rng)
    B = grid.curl(A)
    bscale = grid.supnorm(B)
    if config.init.kind in ("abc", "beltrami_random"):
        A = config.init.b_amplitude * A
    else:
        A = config.init.b_amplitude * A / (bscale if bscale > 0 else 1.0)
    B = grid.curl(A)
    u = config.init.u_amplitude * _shape(grid, config, rng, shift=tuple(config.init.shift))
    rho, eta = _thermo(grid, config)
    return MhdState(grid, u, rho, eta, B, A, A.copy(), 0.0)


def init_euler(config):
    """Projected velocity of the configured kind; ``phi = 0``.

    The density is uniform unless ``euler.variable_density`` is set.
    """
    grid = make_grid(config)
    rng = np.random.default_rng(config.run.seed)
    u = config.init.u_amplitude * _shape(grid, config, rng)
    if config.euler.variable_density:
        rho, _ = _thermo(grid, config)
    else:
        rho = np.ones(grid.n)
    return EulerState.from_velocity(grid, u, rho=rho)


def init_state(config, mode="mhd"):
    if mode == "mhd":
        return init_mhd(config)
    if mode == "euler":
        return init_euler(config)
    raise ValueError(f"unknown mode {mode!r}")


def random_mhd_state(grid, seed, kmax=2, amplitude=0.5, perturbation=0.1):
    """Smooth generic state: random ``A`` with ``B = curl A``, random ``u``, perturbed ``rho`` and ``eta``."""
    rng = np.random.default_rng(seed)
    A = amplitude * random_vector(grid, rng, kmax)
    B = grid.curl(A)
    u = amplitude * random_vector(grid, rng, kmax)
    rho = 1.0 + perturbation * random_scalar(grid, rng, kmax)
    eta = perturbation * random_scalar(grid, rng, kmax)
    return MhdState(grid, u, rho, eta, B, A, A.copy(), 0.0)


def random_euler_state(grid, seed, kmax=3, rho=None):
    rng = np.random.default_rng(seed)
    return EulerState.from_velocity(grid, random_solenoidal(grid, rng, kmax), rho=rho)


def lowband_states(grid, seed):
    """MHD and Euler states built from modes ``|k_i| <= 1`` only.

    Density is ``1 + 0.05 * (smooth)``, and the transport-gauge potential
    carries a random gradient so the two gauge tracks differ.  These are
    the states on which the finite-difference oracle is sharp.
    """
    rng = np.random.default_rng(seed)
    A = random_vector(grid, rng, 1)
    B = grid.curl(A)
    u = random_solenoidal(grid, rng, 1)
    rho = 1.0 + 0.05 * random_scalar(grid, rng, 1)
    eta = 0.05 * random_scalar(grid, rng, 1)
    A_g = A + grid.grad(random_scalar(grid, rng, 1))
    mhd = MhdState(grid, u, rho, eta, B, A, A_g, 0.0)
    euler = EulerState(grid, u, rho, 0.3 * random_scalar(grid, rng, 1))
    return mhd, euler
