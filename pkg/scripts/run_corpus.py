"""Run the solver over generated corpora and summarise the verdicts.

Satisfiable instances come with the hidden world they were built from;
unsatisfiable ones add a refuting conjunct.  Every SAT model is re-checked
with the model checker.
"""

from __future__ import annotations

import argparse
import collections
import time
from fractions import Fraction

from evidence_logic.checker import satisfies
from evidence_logic.formula.printer import to_text
from evidence_logic.solver import SolverOptions, Verdict, solve
from evidence_logic.solver.generate import GeneratorConfig, corpus, unsat_corpus


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=200)
    parser.add_argument("--seed", type=int, default=2026)
    parser.add_argument("--unsat", action="store_true", help="use the unsatisfiable corpus")
    parser.add_argument("--equality-rate", type=float, default=GeneratorConfig.equality_rate)
    parser.add_argument("--budget-boxes", type=int, default=SolverOptions.budget_boxes)
    parser.add_argument("--parallel", type=int, default=1)
    parser.add_argument("--verbose", action="store_true", help="print every non-SAT instance")
    args = parser.parse_args()

    cfg = GeneratorConfig(equality_rate=args.equality_rate)
    make = unsat_corpus if args.unsat else corpus
    opts = SolverOptions(budget_boxes=args.budget_boxes, parallel=args.parallel)
    counts: collections.Counter = collections.Counter()
    bad_models = 0
    slowest = 0.0
    start = time.perf_counter()
    for k, inst in enumerate(make(args.seed, args.count, cfg)):
        t = time.perf_counter()
        result = solve(inst.formula, inst.signature, opts)
        slowest = max(slowest, time.perf_counter() - t)
        counts[result.verdict.value] += 1
        if result.sat:
            counts["exact" if result.exact else "approximate"] += 1
            tol = 0 if result.exact else Fraction(opts.tolerance)
            if not satisfies(inst.formula, result.world, tolerance=tol):
                bad_models += 1
                print(f"#{k}: model fails re-check: {to_text(inst.formula)}")
        elif args.verbose:
            print(f"#{k}: {result.verdict.value} ({result.reason}): {to_text(inst.formula)}")
    total = time.perf_counter() - start
    print(
        f"{args.count} instances: SAT {counts['SAT']} (exact {counts['exact']}, approximate "
        f"{counts['approximate']}), UNSAT {counts['UNSAT']}, UNKNOWN {counts['UNKNOWN']}"
    )
    print(f"models failing re-check: {bad_models}; total {total:.1f} s, slowest {slowest:.1f} s")
    if args.unsat and counts[Verdict.SAT.value]:
        raise SystemExit("error: SAT reported on an unsatisfiable instance")


if __name__ == "__main__":
    main()
