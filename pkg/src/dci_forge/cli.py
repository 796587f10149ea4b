"""dci-forge command line.

Exit codes: 0 positive verdict, 1 negative verdict, 2 budget exhausted,
3 construction out of range, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass

from . import __version__
from .ci import (
    DEFAULT_BUDGET,
    Budget,
    decide_ci,
    has_m_dci,
    verify_theorem_prime_power,
)
from .digraph import DEFAULT_ORDER_CAP
from .errors import BudgetExceeded, InvalidConstruction, OutOfRange
from .groups import GroupSpec, connection_set, is_prime, parse_element

EXIT_YES, EXIT_NO, EXIT_BUDGET, EXIT_RANGE, EXIT_USAGE = 0, 1, 2, 3, 64


@dataclass(frozen=True)
class RunConfig:
    budget: int = DEFAULT_BUDGET
    order_cap: int = DEFAULT_ORDER_CAP
    output: str = "json"
    parallelism: int = 1

    def __post_init__(self):
        if min(self.budget, self.order_cap, self.parallelism) < 1:
            raise ValueError("budget, order cap and jobs must be positive")
        if self.output not in ("json", "csv"):
            raise ValueError(f"unknown output format {self.output!r}")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_budget() -> int:
    raw = os.environ.get("DCI_FORGE_BUDGET")
    if not raw:
        return DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"DCI_FORGE_BUDGET must be an integer, got {raw!r}")


def _m_range(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad m range {text!r} (use 1..8 or 1,2,5)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=None, help="work-unit ceiling (env DCI_FORGE_BUDGET)")
    common.add_argument("--order-cap", type=int, default=DEFAULT_ORDER_CAP, help="largest Aut(digraph) order to compute")
    common.add_argument("--output", choices=("json", "csv"), default="json")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")

    p = _Parser(prog="dci-forge", description="CI-subset and m-DCI checks for dihedral and cyclic groups")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check-ci", parents=[common], help="is S a CI-subset of G")
    c.add_argument("group", help="D2n or Zn, e.g. D18 or Z9")
    c.add_argument("elements", nargs="*", help="elements such as a^2, b, b*a^3")

    c = sub.add_parser("mdci", parents=[common], help="does G have the m-DCI property")
    c.add_argument("group")
    c.add_argument("m", type=int)

    c = sub.add_parser("witness", parents=[common], help="build and verify an explicit non-CI pair")
    c.add_argument("kind", choices=("lemma33", "lemma34"))
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--p", type=int)

    c = sub.add_parser("verify-theorem", parents=[common], help="m-DCI verdicts for D_2q^r against the prediction")
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--r", type=int, required=True)
    c.add_argument("--m", type=_m_range, required=True, help="e.g. 1..8")
    return p


def _config(args) -> RunConfig:
    budget = args.budget if args.budget is not None else _default_budget()
    try:
        return RunConfig(budget, args.order_cap, args.output, args.jobs)
    except ValueError as e:
        raise UsageError(str(e))


def _group(text: str) -> GroupSpec:
    try:
        return GroupSpec.parse(text)
    except ValueError as e:
        raise UsageError(str(e))


def _emit(payload: dict, rows: list[dict], cfg: RunConfig, out) -> None:
    if cfg.output == "json":
        out.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return
    buf = io.StringIO()
    keys = list(rows[0]) if rows else []
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in row.items()})
    out.write(buf.getvalue())


def cmd_check_ci(args, cfg: RunConfig, out) -> int:
    G = _group(args.group)
    try:
        S = connection_set(G, [parse_element(G, e) for e in args.elements])
    except ValueError as e:
        raise UsageError(str(e))
    budget = Budget(cfg.budget)
    try:
        rep = decide_ci(G, S, budget, cfg.order_cap)
    except BudgetExceeded:
        payload = {"version": __version__, "seed": 0, "group": G.name, "set": sorted(args.elements),
                   "is_ci": None, "budget_exhausted": True}
        _emit({**payload, "config": asdict(cfg)}, [payload], cfg, out)
        return EXIT_BUDGET
    payload = {**rep.to_json(), "config": asdict(cfg)}
    row = {k: payload[k] for k in ("group", "set", "m", "is_ci", "method")}
    row["witness_T"] = payload["witness"]["T"] if payload["witness"] else ""
    _emit(payload, [row], cfg, out)
    return EXIT_YES if rep.is_ci else EXIT_NO


def cmd_mdci(args, cfg: RunConfig, out) -> int:
    G = _group(args.group)
    if not 1 <= args.m <= G.order - 1:
        raise UsageError(f"m must lie in [1, {G.order - 1}]")
    rep = has_m_dci(G, args.m, Budget(cfg.budget), cfg.order_cap, jobs=cfg.parallelism)
    payload = {**rep.to_json(), "config": asdict(cfg)}
    row = {k: payload[k] for k in ("group", "m", "m_reduced", "has_property", "reps_checked",
                                   "budget_exhausted", "methods", "work_units")}
    row["failures"] = len(rep.failures)
    _emit(payload, [row], cfg, out)
    if rep.budget_exhausted:
        return EXIT_BUDGET
    return EXIT_YES if rep.has_property else EXIT_NO


def cmd_witness(args, cfg: RunConfig, out) -> int:
    from .constructions import lemma33_witness, lemma34_witness, verify_witness

    try:
        if args.kind == "lemma33":
            w = lemma33_witness(args.n, args.m)
        else:
            if args.p is None:
                raise UsageError("lemma34 needs --p")
            w = lemma34_witness(args.n, args.p, args.m)
    except OutOfRange as e:
        payload = {"version": __version__, "kind": args.kind, "n": args.n, "m": args.m,
                   "p": args.p, "out_of_range": str(e)}
        _emit(payload, [payload], cfg, out)
        return EXIT_RANGE
    except InvalidConstruction as e:
        raise UsageError(str(e))
    ver = verify_witness(w)
    payload = {"version": __version__, "seed": 0, **w.to_json(), "verification": ver.to_json(),
               "config": asdict(cfg)}
    row = {k: payload[k] for k in ("group", "case", "S", "T", "non_ci_checked")}
    _emit(payload, [row], cfg, out)
    return EXIT_YES


def cmd_verify_theorem(args, cfg: RunConfig, out) -> int:
    if args.q < 3 or not is_prime(args.q):
        raise UsageError("q must be an odd prime")
    if args.r < 1:
        raise UsageError("r must be positive")
    n = args.q**args.r
    if any(not 1 <= m <= 2 * n - 1 for m in args.m):
        raise UsageError(f"every m must lie in [1, {2 * n - 1}]")
    rep = verify_theorem_prime_power(args.q, args.r, args.m, Budget(cfg.budget), cfg.order_cap,
                                     jobs=cfg.parallelism)
    payload = {**rep.to_json(), "config": asdict(cfg)}
    rows = [{"group": payload["group"], **row} for row in payload["rows"]]
    _emit(payload, rows, cfg, out)
    if rep.mismatches:
        return EXIT_NO
    if not rep.consistent:
        return EXIT_BUDGET
    return EXIT_YES


COMMANDS = {
    "check-ci": cmd_check_ci,
    "mdci": cmd_mdci,
    "witness": cmd_witness,
    "verify-theorem": cmd_verify_theorem,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg, out)
    except UsageError as e:
        print(f"dci-forge: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
