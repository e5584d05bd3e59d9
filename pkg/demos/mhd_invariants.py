"""Run compressible MHD and watch the magnetic helicity hierarchy.

Orders n >= 1 integrate a Lie derivative of a density, so on the periodic
box they are zero up to discretization error; their drift is quoted against
the size of the integrand.  The run then repeats with half the time step to
show which drifts belong to the integrator.  Cross helicity is left out of
the comparison: with a non-uniform entropy it genuinely changes in time.

    python3 demos/mhd_invariants.py [t_end]
"""

import sys
import tempfile
from pathlib import Path

from helicitylab.harness import load_config, run_mhd
from helicitylab.harness.runs import render_drift_table

t_end = float(sys.argv[1]) if len(sys.argv) > 1 else 0.25
config = load_config(Path(__file__).parent / "configs" / "mhd_abc.toml")
config.run.t_end = t_end

with tempfile.TemporaryDirectory() as tmp:
    results = {}
    for courant in (0.25, 0.125):
        config.run.courant = courant
        config.output.path = f"{tmp}/c{courant}"
        r = run_mhd(config)
        results[courant] = r
        print(f"courant {courant}: {r.manifest['steps']} steps, exit {r.exit_code}")
        print(render_drift_table(r.drifts))
        print()

print("drift ratio under dt halving")
for key in [("energy", 0), ("magnetic_helicity_transport", 0), ("momentum_x", 0)]:
    a = results[0.25].drifts[key].rel_drift
    b = results[0.125].drifts[key].rel_drift
    print(f"  {key[0]}[{key[1]}]: {a:.3e} -> {b:.3e}  (x{a / b:.1f})")
