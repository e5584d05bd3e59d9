"""Break the Poisson bracket on purpose and see whether the checks notice.

Each run reverses the sign of one bracket term.  Comparing {f, H} with the
rate of change of f along the simulated flow exposes the fault, and the
per-term values point at the culprit.
"""

from helicitylab.hamiltonian import TERMS
from helicitylab.harness.checks import check_bracket

clean = check_bracket(seed=1)
print(clean.render())
print()
for term in TERMS:
    rep = check_bracket(seed=1, fault=term)
    failed = [c.name for c in rep.checks if not c.ok]
    named = [n.strip() for n in rep.notes if "localized" in n]
    print(f"fault in {term:<16} exit {rep.exit_code}  failed: {len(failed):>2}  {named[0] if named else ''}")
