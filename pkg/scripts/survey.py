"""Budgeted m-DCI survey over small dihedral and cyclic groups, written as CSV."""

import argparse
import csv
import sys
from dataclasses import dataclass

from dci_forge.ci import Budget, has_m_dci
from dci_forge.groups import GroupSpec


@dataclass
class SurveyConfig:
    n_min: int = 3
    n_max: int = 9
    m_max: int = 4
    budget: int = 200_000
    cyclic: bool = False


def groups(cfg):
    for n in range(cfg.n_min, cfg.n_max + 1):
        yield GroupSpec.cyclic(n) if cfg.cyclic else GroupSpec.dihedral(n)


def survey(cfg, out):
    w = csv.writer(out)
    w.writerow(["group", "m", "has_property", "reps_checked", "failures", "budget_exhausted"])
    for G in groups(cfg):
        for m in range(1, min(cfg.m_max, G.order - 1) + 1):
            rep = has_m_dci(G, m, Budget(cfg.budget))
            verdict = "" if rep.budget_exhausted else rep.has_property
            w.writerow([G.name, m, verdict, rep.reps_checked, len(rep.failures), rep.budget_exhausted])
            out.flush()


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    d = SurveyConfig()
    ap.add_argument("--n-min", type=int, default=d.n_min)
    ap.add_argument("--n-max", type=int, default=d.n_max)
    ap.add_argument("--m-max", type=int, default=d.m_max)
    ap.add_argument("--budget", type=int, default=d.budget)
    ap.add_argument("--cyclic", action="store_true")
    ap.add_argument("-o", "--output", help="CSV path (default stdout)")
    a = ap.parse_args()
    cfg = SurveyConfig(a.n_min, a.n_max, a.m_max, a.budget, a.cyclic)
    if a.output:
        with open(a.output, "w", newline="") as f:
            survey(cfg, f)
    else:
        survey(cfg, sys.stdout)


if __name__ == "__main__":
    main()
