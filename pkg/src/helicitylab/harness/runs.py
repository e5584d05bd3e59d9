"""Trajectory runs: step, sample invariants, serialize, summarize."""

import csv
import json
import math
import os
import time
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .. import __version__
from .. import invariants as inv
from ..errors import BlowupError, ConfigError, NonPositiveDensityError, PressureSolveError
from ..euler import (
    euler_cfl_dt,
    euler_rk4_step,
    frozen_in_residual,
    kinetic_energy,
    residual_scale,
    vorticity_residual,
)
from ..mhd import (
    EosParams,
    cfl_dt,
    divergence_residual,
    gauge_residual,
    rk4_step,
    total_energy,
    total_entropy,
    total_mass,
)
from .initial import init_euler, init_mhd

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_BLOWUP = 2
EXIT_IO = 3
EXIT_CONFIG = 4

MASS_BOUND = 1e-10
DIV_B_BOUND = 1e-10
DIV_U_BOUND = 1e-11
CSV_HEADER = ("t", "name", "order", "value")


@dataclass
class Recorder:
    """Collects invariant samples and per-sample diagnostics."""

    series: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def record(self, t, name, order, value, density_scale=0.0):
        key = (name, order)
        if key not in self.series:
            self.series[key] = inv.InvariantSeries(name, order)
        s = self.series[key]
        s.append(t, value)
        s.density_scale = max(s.density_scale, float(density_scale))

    def note(self, name, value):
        self.diagnostics.setdefault(name, []).append(float(value))

    def drift_reports(self):
        return {key: inv.drift_report(s) for key, s in self.series.items()}

    def names(self):
        out = []
        for name, _ in self.series:
            if name not in out:
                out.append(name)
        return out


@dataclass
class RunResult:
    exit_code: int
    manifest: dict
    drifts: dict
    state: object = None
    manifest_path: str = None
    message: str = ""


def _abs_integral(grid, f):
    return grid.integrate(np.abs(f))


def _hierarchy(rec, t, name, values):
    for n, (value, scale) in enumerate(zip(values, values.scales)):
        rec.record(t, name, n, value, scale)
    rec.note(f"{name}_divergence_residual", values.divergence_residual)


def sample_mhd(rec, state, config, params):
    g = state.grid
    t = state.t
    rec.record(t, "mass", 0, total_mass(state))
    for i, axis in enumerate("xyz"):
        m = state.rho * state.u[i]
        rec.record(t, f"momentum_{axis}", 0, g.integrate(m), _abs_integral(g, m))
    rec.record(t, "energy", 0, total_energy(state, params))
    rec.record(t, "entropy", 0, total_entropy(state), _abs_integral(g, state.rho * state.eta))
    uB = np.sum(state.u * state.B, axis=0)
    rec.record(t, "cross_helicity", 0, g.integrate(uB), _abs_integral(g, uB))
    N = config.invariants.max_n
    track = config.invariants.gauge_track
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", inv.HierarchyWarning)
        if track in ("transport", "both"):
            _hierarchy(rec, t, "magnetic_helicity_transport", inv.magnetic_helicity_hierarchy(state, N, "transport"))
        if track in ("weyl", "both"):
            _hierarchy(rec, t, "magnetic_helicity_weyl", inv.magnetic_helicity_hierarchy(state, N, "weyl"))
    rec.note("div_B", divergence_residual(state))
    rec.note("gauge_residual", gauge_residual(state))


def sample_euler(rec, state, config):
    g = state.grid
    t = state.t
    opts = {"paper_sign": config.euler.paper_sign}
    rec.record(t, "mass", 0, g.integrate(state.rho))
    rec.record(t, "kinetic_energy", 0, kinetic_energy(state))
    N = config.invariants.max_n
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", inv.HierarchyWarning)
        _hierarchy(rec, t, "generalized_helicity", inv.generalized_helicity_hierarchy(state, N))
        _hierarchy(rec, t, "m_invariant", inv.m_hierarchy(state, N))
    xi = g.curl(state.u)
    pairing = np.sum(g.grad(state.phi) * xi, axis=0)
    rec.record(t, "phi_vorticity_pairing", 0, g.integrate(pairing), _abs_integral(g, pairing))
    scale = max(residual_scale(state), 1e-300)
    rec.note("vorticity_residual", vorticity_residual(state, **opts) / scale)
    rec.note("frozen_in_residual", frozen_in_residual(state, **opts) / scale)
    unorm = g.supnorm(state.u)
    rec.note("div_u", g.supnorm(g.div(state.u)) / unorm if unorm > 0 else 0.0)


def _time_loop(state, config, step, dt_of, sample):
    """Advance to ``t_end`` with the CFL step, sampling every k steps and at the end."""
    t_end = config.run.t_end
    k = config.run.sample_every
    tol = 1e-12 * max(t_end, 1.0)
    sample(state)
    steps = 0
    while t_end - state.t > tol:
        if steps >= config.run.max_steps:
            raise RuntimeError(f"max_steps={config.run.max_steps} reached at t={state.t:.6g}")
        dt = min(dt_of(state), t_end - state.t)
        state = step(state, dt)
        steps += 1
        if steps % k == 0 or t_end - state.t <= tol:
            sample(state)
    return state, steps


# serialization ------------------------------------------------------------


def _fmt(x):
    return "%.17g" % x


def write_series(rec, directory, fmt):
    """One file per invariant name; returns ``{name: filename}``."""
    os.makedirs(directory, exist_ok=True)
    files = {}
    for name in rec.names():
        keys = sorted(k for k in rec.series if k[0] == name)
        rows = []
        for key in keys:
            s = rec.series[key]
            rows.extend((t, name, key[1], v) for t, v in zip(s.times, s.values))
        rows.sort(key=lambda r: (r[0], r[2]))
        fname = f"{name}.{fmt}"
        path = os.path.join(directory, fname)
        if fmt == "csv":
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(CSV_HEADER)
                for t, nm, order, v in rows:
                    w.writerow((_fmt(t), nm, order, _fmt(v)))
        else:
            payload = {
                "name": name,
                "samples": [{"t": t, "order": order, "value": v} for t, _, order, v in rows],
            }
            with open(path, "w") as fh:
                json.dump(payload, fh, indent=1)
        files[name] = fname
    return files


def read_series(path):
    """Parse a series file back into ``{(name, order): InvariantSeries}``."""
    out = {}
    if path.endswith(".json"):
        with open(path) as fh:
            payload = json.load(fh)
        rows = [(s["t"], payload["name"], s["order"], s["value"]) for s in payload["samples"]]
    else:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if tuple(header) != CSV_HEADER:
                raise ValueError(f"{path}: unexpected header {header}")
            rows = [(float(t), nm, int(o), float(v)) for t, nm, o, v in reader]
    for t, name, order, value in rows:
        key = (name, int(order))
        if key not in out:
            out[key] = inv.InvariantSeries(name, int(order))
        out[key].append(t, value)
    return out


def _drift_rows(drifts):
    return [asdict(d) for _, d in sorted(drifts.items())]


def _finalize(kind, config, rec, state, steps, wall, exit_code, message, checks):
    out_dir = config.output.path
    try:
        files = write_series(rec, out_dir, config.output.format)
        drifts = rec.drift_reports()
        manifest = {
            "kind": kind,
            "version": __version__,
            "config": config.to_dict(),
            "exit_code": exit_code,
            "message": message,
            "steps": steps,
            "t_final": None if state is None else state.t,
            "wall_time": wall,
            "series": files,
            "drift": _drift_rows(drifts),
            "diagnostics": {k: max(v) for k, v in rec.diagnostics.items()},
            "hard_checks": checks,
        }
        path = os.path.join(out_dir, "manifest.json")
        with open(path, "w") as fh:
            json.dump(manifest, fh, indent=1, default=float)
    except OSError as exc:
        return RunResult(EXIT_IO, {}, {}, state, None, f"output failed: {exc}")
    return RunResult(exit_code, manifest, drifts, state, path, message)


def _hard_check(name, value, bound):
    ok = bool(math.isfinite(value) and value <= bound)
    return {"name": name, "value": float(value), "bound": bound, "ok": ok}


def _run(kind, config, init, step, dt_of, sample, hard):
    try:
        config.validate()
    except ConfigError as exc:
        return RunResult(EXIT_CONFIG, {}, {}, None, None, str(exc))
    rec = Recorder()
    t0 = time.perf_counter()
    state, steps, code, message = None, 0, EXIT_OK, ""
    try:
        state = init(config)
        state, steps = _time_loop(state, config, step, dt_of, lambda s: sample(rec, s))
    except (BlowupError, NonPositiveDensityError, FloatingPointError) as exc:
        code, message = EXIT_BLOWUP, str(exc)
    except (PressureSolveError, RuntimeError) as exc:
        code, message = EXIT_VIOLATION, str(exc)
    wall = time.perf_counter() - t0
    checks = []
    if code == EXIT_OK:
        checks = hard(rec)
        if not all(c["ok"] for c in checks):
            code = EXIT_VIOLATION
            message = "hard invariant violated: " + ", ".join(c["name"] for c in checks if not c["ok"])
    if not rec.series:
        return RunResult(code, {}, {}, state, None, message)
    return _finalize(kind, config, rec, state, steps, wall, code, message, checks)


def run_mhd(config):
    """Integrate compressible MHD to ``run.t_end`` and write series plus manifest."""
    params = EosParams(config.eos.gamma, config.eos.K, config.eos.c_v)

    def hard(rec):
        mass = inv.drift_report(rec.series[("mass", 0)]).rel_drift
        return [
            _hard_check("mass", mass, MASS_BOUND),
            _hard_check("div_B", max(rec.diagnostics["div_B"]), DIV_B_BOUND),
        ]

    return _run(
        "mhd",
        config,
        init_mhd,
        lambda s, dt: rk4_step(s, dt, params),
        lambda s: cfl_dt(s, params, config.run.courant),
        lambda rec, s: sample_mhd(rec, s, config, params),
        hard,
    )


def run_euler(config):
    """Integrate incompressible flow to ``run.t_end`` and write series plus manifest."""
    opts = {"paper_sign": config.euler.paper_sign}

    def hard(rec):
        mass = inv.drift_report(rec.series[("mass", 0)]).rel_drift
        return [
            _hard_check("mass", mass, MASS_BOUND),
            _hard_check("div_u", max(rec.diagnostics["div_u"]), DIV_U_BOUND),
        ]

    return _run(
        "euler",
        config,
        init_euler,
        lambda s, dt: euler_rk4_step(s, dt, **opts),
        lambda s: euler_cfl_dt(s, config.run.courant),
        lambda rec, s: sample_euler(rec, s, config),
        hard,
    )


# report -------------------------------------------------------------------


def render_drift_table(drifts):
    lines = [f"{'name':<34} {'n':>2} {'baseline':>14} {'max |drift|':>12} {'rel drift':>10}"]
    for (name, order), d in sorted(drifts.items()):
        lines.append(
            f"{name:<34} {order:>2} {d.baseline:>14.6e} {d.max_abs_drift:>12.3e} {d.rel_drift:>10.3e}"
        )
    return "\n".join(lines)


def report(manifest_path):
    """Re-read every series named in a manifest and render its drift table.

    Returns ``(text, exit_code)``; a missing or unreadable file gives ``EXIT_IO``.
    Drift scales are taken from the manifest, since the density scale of an
    invariant is not recoverable from its series alone.
    """
    try:
        with open(manifest_path) as fh:
            manifest = json.load(fh)
        base = os.path.dirname(os.path.abspath(manifest_path))
        series = {}
        for fname in manifest["series"].values():
            series.update(read_series(os.path.join(base, fname)))
    except (OSError, ValueError, KeyError) as exc:
        return f"cannot read run: {exc}", EXIT_IO
    stored = {(d["name"], d["order"]): d for d in manifest.get("drift", [])}
    drifts = {}
    for key, s in series.items():
        if key in stored:
            s.density_scale = float(stored[key]["scale"])
        drifts[key] = inv.drift_report(s)
    head = f"{manifest.get('kind', '?')} run, exit {manifest.get('exit_code')}, t = {manifest.get('t_final')}"
    diag = manifest.get("diagnostics", {})
    tail = [f"{k:<34} {v:.3e}" for k, v in sorted(diag.items())]
    return "\n".join([head, render_drift_table(drifts), "diagnostics (max):", *tail]), int(
        manifest.get("exit_code", 0)
    )
