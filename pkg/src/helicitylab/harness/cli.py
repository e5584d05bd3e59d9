"""Command-line entry point ``helicitylab``.

Exit codes: 0 ok, 1 property violation, 2 numerical blow-up, 3 I/O failure,
4 invalid configuration.
"""

import argparse
import sys

from ..errors import ConfigError
from ..hamiltonian import TERMS
from .checks import check_bracket, check_identities
from .config import load_config
from .runs import EXIT_CONFIG, EXIT_IO, render_drift_table, report, run_euler, run_mhd


def _build_parser():
    p = argparse.ArgumentParser(prog="helicitylab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in (("run-mhd", "integrate compressible MHD"), ("run-euler", "integrate incompressible flow")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("config", help="TOML run configuration")
    sp = sub.add_parser("check-identities", help="discrete calculus and residual identities")
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--n", type=int, default=32, help="grid points per axis")
    sp = sub.add_parser("check-bracket", help="Poisson bracket structure and consistency")
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--inject-fault", choices=TERMS, default=None, help="reverse the sign of one bracket term")
    sp = sub.add_parser("report", help="re-render the drift table of a finished run")
    sp.add_argument("manifest")
    return p


def _run(runner, path):
    try:
        config = load_config(path)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    result = runner(config)
    if result.drifts:
        print(render_drift_table(result.drifts))
    if result.manifest_path:
        print(f"manifest: {result.manifest_path}")
    if result.message:
        print(result.message, file=sys.stderr)
    return result.exit_code


def main(argv=None):
    args = _build_parser().parse_args(argv)
    if args.command == "run-mhd":
        return _run(run_mhd, args.config)
    if args.command == "run-euler":
        return _run(run_euler, args.config)
    if args.command == "check-identities":
        try:
            rep = check_identities(seed=args.seed, n=args.n)
        except ValueError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        print(rep.render())
        return rep.exit_code
    if args.command == "check-bracket":
        rep = check_bracket(seed=args.seed, fault=args.inject_fault)
        print(rep.render())
        return rep.exit_code
    text, code = report(args.manifest)
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
