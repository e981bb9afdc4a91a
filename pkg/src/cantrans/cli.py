"""Command line interface.

Verbs:

* ``verify CONFIG.toml`` runs the checks declared in a job file.
* ``flow`` integrates a single trajectory of a generator's vector field.
* ``examples`` lists, shows, or runs the built-in fixtures.

Exit status: 0 all checks pass, 1 any check fails, 2 configuration error,
3 numeric domain error.
"""

from __future__ import annotations

import argparse
import sys

from . import backend, runner
from .config import CHECKS, JobConfig
from .errors import CantransError, ConfigError
from .fixtures import get_fixture, list_examples
from .phase import PhasePoint, ScalarField
from .reports import ReportDocument, dumps


def _parse_tol_overrides(entries):
    out = {}
    for entry in entries or ():
        if "=" not in entry:
            raise ConfigError("--tol", f"expected CHECK=VALUE, got {entry!r}")
        check, _, value = entry.partition("=")
        if check not in CHECKS:
            raise ConfigError("--tol", f"unknown check {check!r}")
        try:
            out[check] = float(value)
        except ValueError as e:
            raise ConfigError("--tol", f"bad tolerance {value!r}") from e
    return out


def _emit(doc: ReportDocument, json_path, stream):
    for check in doc.checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"[{status}] {check.name}: max_residual={check.max_residual:.6e} "
              f"tolerance={check.tolerance:.1e} samples={check.samples}",
              file=stream)
        for note in check.notes:
            print(f"    note: {note}", file=stream)
    print(f"overall: {'PASS' if doc.passed else 'FAIL'}", file=stream)
    if json_path:
        with open(json_path, "w", encoding="utf-8") as fh:
            fh.write(doc.to_json())
            fh.write("\n")


def _cmd_verify(args, stream):
    config = JobConfig.from_file(args.config)
    config.tolerances.update(_parse_tol_overrides(args.tol))
    doc, code = runner.run(config)
    _emit(doc, args.json, stream)
    return code


def _cmd_examples(args, stream):
    if args.action == "list" or args.name is None:
        for fixture in list_examples():
            print(f"{fixture.name}: {fixture.summary}", file=stream)
            for note in fixture.notes:
                print(f"    note: {note}", file=stream)
        return runner.EXIT_PASS
    fixture = get_fixture(args.name)
    if args.action == "show":
        print(fixture.config().to_toml(), end="", file=stream)
        return runner.EXIT_PASS
    config = fixture.config()
    config.tolerances.update(_parse_tol_overrides(args.tol))
    print(f"fixture {fixture.name}: {fixture.summary}", file=stream)
    for note in fixture.notes:
        print(f"    note: {note}", file=stream)
    doc, code = runner.run(config)
    doc.fixture = fixture.name
    _emit(doc, args.json, stream)
    return code


def _cmd_flow(args, stream):
    params = {}
    for entry in args.param or ():
        if "=" not in entry:
            raise ConfigError("--param", f"expected NAME=VALUE, got {entry!r}")
        name, _, value = entry.partition("=")
        try:
            params[name] = float(value)
        except ValueError as e:
            raise ConfigError("--param", f"bad value {value!r}") from e
    n = args.n
    coords = [float(v) for v in args.start.split(",")]
    if len(coords) != 2 * n:
        raise ConfigError("--from", f"needs 2n = {2 * n} comma-separated values")
    generator = ScalarField.from_source(args.generator, n, params)
    x0 = PhasePoint(tuple(coords[:n]), tuple(coords[n:]), args.t)
    from .flows import integrate_flow

    end = integrate_flow(generator, x0, args.s, args.steps)
    q = ", ".join(repr(v) for v in end.q)
    p = ", ".join(repr(v) for v in end.p)
    print(f"q = [{q}]", file=stream)
    print(f"p = [{p}]", file=stream)
    if args.json:
        payload = {
            "generator": args.generator,
            "s": args.s,
            "steps": args.steps if args.steps else None,
            "start": {"q": list(x0.q), "p": list(x0.p), "t": x0.t},
            "end": {"q": list(end.q), "p": list(end.p), "t": end.t},
        }
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(dumps(payload))
            fh.write("\n")
    return runner.EXIT_PASS


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cantrans",
        description="Verify canonical transformations, flows, generating "
                    "functions and Noether symmetries to configurable "
                    "tolerance.",
    )
    parser.add_argument("--backend-info", action="store_true",
                        help="print the active numeric backend and exit")
    sub = parser.add_subparsers(dest="command")

    p_verify = sub.add_parser("verify", help="run the checks in a job file")
    p_verify.add_argument("config", help="TOML job configuration")
    p_verify.add_argument("--json", help="write the JSON report here")
    p_verify.add_argument("--tol", action="append", metavar="CHECK=VALUE",
                          help="override a check tolerance")

    p_flow = sub.add_parser("flow", help="integrate one flow trajectory")
    p_flow.add_argument("--generator", required=True,
                        help="DSL source of the generator f(q, p, t)")
    p_flow.add_argument("--n", type=int, required=True)
    p_flow.add_argument("--param", action="append", metavar="NAME=VALUE")
    p_flow.add_argument("--from", dest="start", required=True,
                        help="2n comma-separated values: q1..qn,p1..pn")
    p_flow.add_argument("--t", type=float, default=0.0)
    p_flow.add_argument("--s", type=float, required=True)
    p_flow.add_argument("--steps", type=int, default=None)
    p_flow.add_argument("--json", help="write the trajectory endpoint here")

    p_ex = sub.add_parser("examples", help="list or run built-in fixtures")
    p_ex.add_argument("action", nargs="?", default="list",
                      choices=("list", "run", "show"))
    p_ex.add_argument("name", nargs="?", default=None)
    p_ex.add_argument("--json", help="write the JSON report here")
    p_ex.add_argument("--tol", action="append", metavar="CHECK=VALUE")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    stream = sys.stdout
    if args.backend_info:
        print(f"backend: {backend.active}", file=stream)
        return 0
    if args.command is None:
        parser.print_help(stream)
        return runner.EXIT_CONFIG
    try:
        if args.command == "verify":
            return _cmd_verify(args, stream)
        if args.command == "flow":
            return _cmd_flow(args, stream)
        if args.command == "examples":
            return _cmd_examples(args, stream)
    except (ConfigError, KeyError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return runner.EXIT_CONFIG
    except CantransError as e:
        print(f"numeric error: {type(e).__name__}: {e}", file=sys.stderr)
        return runner.EXIT_NUMERIC
    return runner.EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
