"""Property suites: discrete identities and the bracket structure.

Each suite returns a :class:`SuiteReport` listing every property with its
measured value and bound; the exit code is 1 if any bound is violated.
"""

from dataclasses import dataclass, field

import numpy as np

from ..euler import (
    frozen_in_residual,
    residual_scale,
    transported_form_residual,
    vorticity_residual,
)
from ..fieldcalc import Grid, KForm, exterior_d, lie_derivative, lie_derivative_vector, wedge
from ..fields import random_scalar, random_vector
from ..hamiltonian import (
    TERMS,
    VarDerivs,
    builtin_functionals,
    combine,
    diagnose_sign_fault,
    hamiltonian_consistency,
    infer_dynamics_order,
    poisson_bracket,
    validate_var_deriv,
)
from ..mhd import mhd_rhs
from .config import MIN_POINTS
from .initial import random_euler_state, random_mhd_state

IDENTITY_BOUND = 1e-12
CARTAN_BOUND = 1e-10
RESIDUAL_BOUND = 1e-9
ANTISYMMETRY_BOUND = 1e-12
VAR_DERIV_BOUND = 1e-8
CONSISTENCY_BOUND = 1e-4
CONSISTENCY_FUNCTIONALS = ("mass", "momentum_x", "energy", "cross_helicity", "entropy")
# a halving ratio is only meaningful when the error sits above rounding
RATIO_FLOOR = 1e-12
RATIO_RANGE = (3.0, 5.0)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    bound: float
    ok: bool
    relation: str = "<"

    def line(self):
        tag = "PASS" if self.ok else "FAIL"
        if self.relation.startswith("in"):
            return f"{tag}  {self.name:<44} {self.value:.3e} {self.relation}"
        return f"{tag}  {self.name:<44} {self.value:.3e} {self.relation} {self.bound:.1e}"


@dataclass
class SuiteReport:
    title: str
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def below(self, name, value, bound):
        self.checks.append(Check(name, float(value), bound, bool(value < bound)))

    def above(self, name, value, bound):
        self.checks.append(Check(name, float(value), bound, bool(value > bound), ">"))

    def within(self, name, value, lo, hi):
        ok = bool(lo <= value <= hi)
        self.checks.append(Check(name, float(value), hi, ok, f"in [{lo:g}, {hi:g}]"))

    @property
    def ok(self):
        return all(c.ok for c in self.checks)

    @property
    def exit_code(self):
        return 0 if self.ok else 1

    def render(self):
        lines = [self.title, *(c.line() for c in self.checks), *self.notes]
        lines.append("OK" if self.ok else "VIOLATED: " + ", ".join(c.name for c in self.checks if not c.ok))
        return "\n".join(lines)


def _rel(a, scale):
    return Grid.supnorm(a) / max(scale, 1e-300)


# identities -----------------------------------------------------------------


def check_identities(seed=1, n=32):
    """Operator identities on random inputs band-limited so that products stay resolved."""
    if n < MIN_POINTS or n % 2:
        raise ValueError(f"grid size must be even and >= {MIN_POINTS}, got {n}")
    g = Grid(n)
    kmax = max(1, min(3, n // 6))
    rng = np.random.default_rng(seed)
    f = random_scalar(g, rng, kmax)
    F = random_vector(g, rng, kmax)
    v = random_vector(g, rng, kmax)
    gsc = random_scalar(g, rng, kmax)
    rep = SuiteReport(f"identities  grid={n}^3  seed={seed}")

    rep.below("div curl", _rel(g.div(g.curl(F)), Grid.supnorm(F)), IDENTITY_BOUND)
    rep.below("curl grad", _rel(g.curl(g.grad(f)), Grid.supnorm(f)), IDENTITY_BOUND)
    f0 = KForm(0, g, f)
    a1 = KForm(1, g, F)
    rep.below("d d (0-form)", _rel(exterior_d(exterior_d(f0)).proxy, Grid.supnorm(f)), IDENTITY_BOUND)
    rep.below("d d (1-form)", _rel(exterior_d(exterior_d(a1)).proxy, Grid.supnorm(F)), IDENTITY_BOUND)

    direct0 = np.sum(v * g.grad(f), axis=0)
    rep.below("Cartan 0-form", _rel(lie_derivative(v, f0).proxy - direct0, Grid.supnorm(direct0)), CARTAN_BOUND)
    direct1 = g.advect(v, F) + np.einsum("i...,ji...->j...", F, g.jacobian(v))
    rep.below("Cartan 1-form", _rel(lie_derivative(v, a1).proxy - direct1, Grid.supnorm(direct1)), CARTAN_BOUND)
    direct2 = g.advect(v, F) - g.advect(F, v) + F * g.div(v)
    b2 = KForm(2, g, F)
    rep.below("Cartan 2-form", _rel(lie_derivative(v, b2).proxy - direct2, Grid.supnorm(direct2)), CARTAN_BOUND)
    direct3 = g.div(gsc * v)
    w3 = KForm(3, g, gsc)
    rep.below("Cartan 3-form", _rel(lie_derivative(v, w3).proxy - direct3, Grid.supnorm(direct3)), CARTAN_BOUND)

    s11 = wedge(a1, KForm(1, g, v)).proxy + wedge(KForm(1, g, v), a1).proxy
    rep.below("wedge antisymmetry (1,1)", _rel(s11, Grid.supnorm(F) * Grid.supnorm(v)), 1e-13)
    d12 = wedge(a1, KForm(2, g, v)).proxy - wedge(KForm(2, g, v), a1).proxy
    rep.below("wedge symmetry (1,2)", _rel(d12, Grid.supnorm(F) * Grid.supnorm(v)), 1e-13)
    br = lie_derivative_vector(g, v, F) + lie_derivative_vector(g, F, v)
    rep.below("vector bracket antisymmetry", _rel(br, Grid.supnorm(lie_derivative_vector(g, v, F))), 1e-13)
    rep.below("integral of div", abs(g.integrate(g.div(F))) / Grid.supnorm(F), 1e-13)
    df = g.dealias(f)
    rep.below("dealias idempotent", _rel(g.dealias(df) - df, Grid.supnorm(f)), IDENTITY_BOUND)
    adj = abs(g.inner(g.dealias(f), gsc) - g.inner(f, g.dealias(gsc)))
    rep.below("dealias self-adjoint", adj / (g.volume * Grid.supnorm(f) * Grid.supnorm(gsc)), IDENTITY_BOUND)
    P = g.leray(F)
    rep.below("Leray divergence", _rel(g.div(P), Grid.supnorm(F)), IDENTITY_BOUND)
    rep.below("Leray idempotent", _rel(g.leray(P) - P, Grid.supnorm(F)), IDENTITY_BOUND)

    e = random_euler_state(g, seed, kmax)
    scale = residual_scale(e)
    rep.below("vorticity residual", vorticity_residual(e) / scale, RESIDUAL_BOUND)
    rep.below("frozen-in residual", frozen_in_residual(e) / scale, RESIDUAL_BOUND)
    rep.below("transported 1-form residual", transported_form_residual(e) / scale, RESIDUAL_BOUND)

    m = random_mhd_state(g, seed, min(kmax, 2))
    k = mhd_rhs(m)
    rep.below("induction: curl dA = dB", _rel(g.curl(k.dA) - k.dB, Grid.supnorm(k.dB)), IDENTITY_BOUND)
    mass_form = KForm(3, g, m.rho)
    rep.below(
        "L_v(rho d3x) with v = B/rho",
        _rel(lie_derivative(m.B / m.rho, mass_form).proxy, Grid.supnorm(g.curl(m.B))),
        CARTAN_BOUND,
    )
    return rep


# bracket --------------------------------------------------------------------


def _nonzero_components(f, state):
    d = f.var_derivs(state)
    return [name for name, a in zip(VarDerivs._fields, d) if np.any(a != 0)]


def check_bracket(seed=1, fault=None, n_small=16, n_consistency=24):
    """Antisymmetry, derivative validation, consistency with the flow, faults.

    ``fault`` reverses the sign of one bracket term everywhere; the suite
    must then fail and name that term.
    """
    if fault is not None and fault not in TERMS:
        raise ValueError(f"unknown bracket term {fault!r}; choose from {TERMS}")
    lib = builtin_functionals()
    rep = SuiteReport(f"bracket  seed={seed}" + (f"  injected fault: {fault}" if fault else ""))

    small = Grid(n_small)
    worst = 0.0
    for k in range(3):
        s = random_mhd_state(small, seed + k)
        for f in lib.values():
            for h in lib.values():
                r = poisson_bracket(f, h, s, fault=fault)
                worst = max(worst, r.antisymmetry_defect / max(abs(r.value_fg), r.scale, 1e-300))
    rep.below("antisymmetry (all pairs, 3 states)", worst, ANTISYMMETRY_BOUND)

    s = random_mhd_state(small, seed)
    for name, f in lib.items():
        rep.below(f"var deriv {name}", validate_var_deriv(f, s, seed=seed), VAR_DERIV_BOUND)
    weakest = np.inf
    for f in lib.values():
        for comp in _nonzero_components(f, s):
            weakest = min(weakest, validate_var_deriv(f.corrupted(comp), s, seed=seed))
    rep.above("1% corruption flagged (min error)", weakest, VAR_DERIV_BOUND)

    a, b = 0.7, -1.3
    fa, fb, fh = lib["cross_helicity"], lib["entropy"], lib["energy"]
    lhs = poisson_bracket(combine(fa, fb, a, b), fh, s, fault=fault)
    r1, r2 = poisson_bracket(fa, fh, s, fault=fault), poisson_bracket(fb, fh, s, fault=fault)
    lin = abs(lhs.value_fg - a * r1.value_fg - b * r2.value_fg)
    rep.below("bilinearity", lin / max(lhs.scale, 1e-300), ANTISYMMETRY_BOUND)

    big = random_mhd_state(Grid(n_consistency), seed)
    reports = []
    for name in CONSISTENCY_FUNCTIONALS:
        r = hamiltonian_consistency(lib[name], big, fault=fault)
        reports.append(r)
        rep.below(f"consistency {name}", r.error, CONSISTENCY_BOUND)
        if r.error > RATIO_FLOOR and r.error < CONSISTENCY_BOUND:
            r2 = hamiltonian_consistency(lib[name], big, dt=r.dt / 2, fault=fault)
            rep.within(f"dt-halving ratio {name}", r.error / max(r2.error, 1e-300), *RATIO_RANGE)
        else:
            rep.notes.append(f"      {name}: error {r.error:.1e}; no halving ratio (at rounding floor or failed)")
    if fault is None:
        rep.notes.append(f"      dynamics order: df/dt = {{{infer_dynamics_order(big)}}}")
    if not all(r.error < CONSISTENCY_BOUND for r in reports):
        suspects = diagnose_sign_fault(reports)
        if suspects:
            rep.notes.append("      sign fault localized to term(s): " + ", ".join(suspects))
        else:
            rep.notes.append("      inconsistency not explained by a single term sign")
    return rep
