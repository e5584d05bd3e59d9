"""Helicity of a few fields whose answer is known in closed form.

The ABC flow is its own curl, so its helicity is the mean of |u|^2 times the
box volume: 3 (2 pi)^3 for unit amplitudes.  Mirroring it flips the sign.
Taylor-Green has a reflection symmetry that forces zero, and a gradient has
no curl at all.
"""

import numpy as np

from helicitylab.fieldcalc import TWO_PI, Grid
from helicitylab.fields import abc_field, random_scalar, reflect_x, taylor_green
from helicitylab.invariants import kinematic_helicity

g = Grid(32)
exact = 3 * TWO_PI**3

u = abc_field(g)
print(f"ABC (1,1,1)        {kinematic_helicity(g, u):+.12e}   exact {exact:+.12e}")
print(f"mirrored ABC       {kinematic_helicity(g, reflect_x(u, 'polar')):+.12e}")

w = abc_field(g, 1.0, 2.0, 0.5)
print(f"ABC (1,2,0.5)      {kinematic_helicity(g, w):+.12e}   exact {5.25 * TWO_PI**3:+.12e}")

print(f"Taylor-Green       {kinematic_helicity(g, taylor_green(g)):+.3e}")
grad = g.grad(random_scalar(g, np.random.default_rng(0)))
print(f"gradient field     {kinematic_helicity(g, grad):+.3e}")
