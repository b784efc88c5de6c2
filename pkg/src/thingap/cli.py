"""Command-line entry point.

Exit status is 0 when every verification check passes, 2 when any check
fails and 1 on configuration or execution errors.  Informational outcomes
(for instance an inadmissible collision) never fail a run.
"""
from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor

from .config import load_config
from .errors import CheckFailed, ConfigInvalid, ThinGapError
from .reports import emit_report
from .runs import SUBCOMMANDS

log = logging.getLogger("thingap")

ORDER = ("verify-identities", "verify-weak", "scaling", "lemma-cyl", "verify-strong",
         "example4", "collide")


def _call(task):
    fn, kw = task
    return fn(**kw)


def execute(tasks, jobs=1):
    """Run tasks and return results in task order, whatever the pool size."""
    if jobs <= 1 or len(tasks) <= 1:
        return [_call(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_call, tasks, chunksize=1))


def run(subcommand, tree, jobs=1):
    """Compute the reports of one subcommand (or all of them)."""
    names = ORDER if subcommand == "all" else (subcommand,)
    reports = []
    for name in names:
        make, merge = SUBCOMMANDS[name]
        tasks = make(tree)
        log.info("%s: %d tasks on %d worker(s)", name, len(tasks), jobs)
        reports.extend(merge(tree, execute(tasks, jobs)))
    return reports


def _parser():
    p = argparse.ArgumentParser(prog="thingap", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ORDER + ("all",):
        s = sub.add_parser(name)
        s.add_argument("--config", metavar="PATH")
        s.add_argument("--out", metavar="DIR")
        s.add_argument("--set", metavar="KEY=VALUE", action="append", default=[],
                       dest="overrides")
        s.add_argument("--jobs", type=int, default=1)
        s.add_argument("--format", choices=("csv", "json"), action="append")
        if name == "scaling":
            s.add_argument("--alpha", type=float)
            s.add_argument("--component", choices=("u3", "utau", "omtau", "om3", "all"))
        if name == "collide":
            s.add_argument("--alpha", type=float)
            s.add_argument("--theta", type=float)
            s.add_argument("--T", type=float, dest="big_t")
            s.add_argument("--omega3", type=float)
            s.add_argument("--grid", type=int)
    return p


def _shortcut_overrides(args):
    """Translate subcommand flags into config overrides."""
    out = []
    if args.command == "scaling":
        if args.alpha is not None:
            out.append(f"sweep.alphas=[{args.alpha!r}]")
        if args.component is not None:
            out.append(f'sweep.component="{args.component}"')
    if args.command == "collide":
        for flag, key in (("alpha", "alpha"), ("theta", "theta"), ("big_t", "T"),
                          ("omega3", "omega3"), ("grid", "grid")):
            val = getattr(args, flag)
            if val is not None:
                out.append(f"collide.{key}={val!r}")
    return out


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        tree = load_config(args.config, args.overrides + _shortcut_overrides(args))
        if args.out:
            tree["output"]["dir"] = args.out
        if args.format:
            tree["output"]["formats"] = list(dict.fromkeys(args.format))
        if args.jobs < 1:
            raise ConfigInvalid("--jobs must be at least 1")
        reports = run(args.command, tree, args.jobs)
        paths = emit_report(reports, tree["output"]["dir"], tree["output"]["formats"])
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (ThinGapError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    failed = [r.name for r in reports if r.passed is False]
    for r in reports:
        state = "info" if r.passed is None else ("pass" if r.passed else "FAIL")
        print(f"{state:4s}  {r.name}")
    for path in paths:
        log.info("wrote %s", path)
    if failed:
        print(f"{len(failed)} check(s) failed: {', '.join(failed)}", file=sys.stderr)
        return 2
    return 0


def check(reports):
    """Raise CheckFailed if any report failed."""
    bad = [r.name for r in reports if r.passed is False]
    if bad:
        raise CheckFailed(", ".join(bad))


if __name__ == "__main__":
    sys.exit(main())
