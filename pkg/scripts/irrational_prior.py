"""Solve the formula whose only models have an irrational prior and report the model."""

from __future__ import annotations

import math
import time
from pathlib import Path

from evidence_logic.checker import satisfies
from evidence_logic.formula import parse_file_text
from evidence_logic.solver import solve

DATA = Path(__file__).resolve().parent.parent / "data"


def main() -> None:
    f, sig = parse_file_text((DATA / "irrational_prior.txt").read_text())
    start = time.perf_counter()
    result = solve(f, sig)
    elapsed = time.perf_counter() - start
    print(f"verdict: {result.verdict.value} (exact model: {result.exact}) in {elapsed:.2f} s")
    if result.world is None:
        return
    value = float(result.world.weight("ob1", "h1"))
    target = (math.sqrt(17) - 1) / 8
    print(f"w(ob1, h1) = {value!r}")
    print(f"(sqrt(17) - 1) / 8 = {target!r}, difference {abs(value - target):.2e}")
    print(f"largest constraint residual: {result.residual:.2e}")
    print("re-checked within 1e-9:", satisfies(f, result.world, tolerance=1e-9))


if __name__ == "__main__":
    main()
