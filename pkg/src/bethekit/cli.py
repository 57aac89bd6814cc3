"""Command line front end.

    bethekit solve <config.json>
    bethekit verify <config.json>
    bethekit count <config.json>
    bethekit reproduce-fm --n <N>

Global flags: ``--out PATH``, ``--tol-identity FLOAT``, ``--tol-sumrule FLOAT``,
``--quiet``.  Exit status is 0 when every requested check passes, 1 on a
verification failure and 2 on usage or config errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import BetheError
from .run import (DEFAULT_TOL_IDENTITY, DEFAULT_TOL_SUMRULE, TASKS, ConfigError, _finite,
                  preset_fm, run)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

COMMAND_TASKS = {
    "solve": ("solve",),
    "verify": TASKS,
    "count": ("solve", "classify", "count"),
    "reproduce-fm": TASKS,
}


def _add_common(p, suppress):
    kw = {"default": argparse.SUPPRESS} if suppress else {}
    p.add_argument("--out", help="report destination (default: stdout)",
                   **(kw or {"default": None}))
    p.add_argument("--tol-identity", type=float,
                   **(kw or {"default": DEFAULT_TOL_IDENTITY}))
    p.add_argument("--tol-sumrule", type=float,
                   **(kw or {"default": DEFAULT_TOL_SUMRULE}))
    p.add_argument("--quiet", action="store_true", **(kw or {"default": False}))


def build_parser():
    parser = argparse.ArgumentParser(prog="bethekit", description=__doc__.splitlines()[0])
    _add_common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (("solve", "find all solutions"),
                           ("verify", "solve, classify, check identities, sum rules and counts"),
                           ("count", "compare solution counts with the expected dimensions")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("config", help="JSON config file")
        _add_common(p, suppress=True)
    p = sub.add_parser("reproduce-fm", help="periodic homogeneous six-vertex preset")
    p.add_argument("--n", type=int, required=True, help="even number of sites")
    _add_common(p, suppress=True)
    return parser


def _load(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError([(path, str(exc))])
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([(f"{path}:line {exc.lineno}:col {exc.colno}", exc.msg)])


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc = preset_fm(args.n) if args.command == "reproduce-fm" else _load(args.config)
        report = run(doc, tasks=COMMAND_TASKS[args.command], command=args.command,
                     tol_identity=args.tol_identity, tol_sumrule=args.tol_sumrule)
    except ConfigError as exc:
        for where, msg in exc.problems:
            print(f"config error: {where}: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except BetheError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = json.dumps(_finite(report), indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    summary = report["summary"]
    if not args.quiet:
        status = "PASS" if summary["passed"] else "FAIL"
        print(f"{status}: {summary['n_instances']} instance(s), "
              f"{len(summary['failures'])} failure(s)", file=sys.stderr)
        for f in summary["failures"]:
            print(f"  instance {f['instance']}: {f['check']} "
                  f"(solution {f.get('solution', '-')})", file=sys.stderr)
    return EXIT_OK if summary["passed"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
