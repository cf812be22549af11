"""Write the example input files under data/."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from evidence_logic.characterization import WeightTable, table_to_doc
from evidence_logic.checker import EvidentialRun, EvidentialWorld, run_to_doc, world_to_doc
from evidence_logic.evidence import Distribution, coin_space, space_to_doc

DATA = Path(__file__).resolve().parent.parent / "data"

IRRATIONAL_PRIOR = """\
# The only worlds satisfying this formula have an irrational prior.
hypotheses: h1, h2, h3; observations: ob1, ob2;
ob1 & Pr0(h1) = w(ob1, h1) & Pr0(h2) = 1 - Pr0(h1) & Pr(h1) = 1/2 & w(ob1, h2) = 1/4
"""

ROW_SUM = """\
# Two weights of the same observation cannot both be 2/3.
hypotheses: h1, h2; observations: ob;
w(ob, h1) = 2/3 & w(ob, h2) = 2/3
"""


def write(name: str, doc) -> None:
    path = DATA / name
    if isinstance(doc, str):
        path.write_text(doc)
    else:
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print("wrote", path)


def main() -> None:
    DATA.mkdir(exist_ok=True)
    coins = coin_space(100)
    write("coins.json", space_to_doc(coins))
    fair = Distribution(("F", "D"), (Fraction(1, 2), Fraction(1, 2)))
    named = coin_space(100, prefix="heads")
    write("coin_world.json", world_to_doc(EvidentialWorld("F", "heads100", fair, named)))
    quarter, half = Fraction(1, 4), Fraction(1, 2)
    table = WeightTable(("h1", "h2", "h3"), ("ob1", "ob2"), ((quarter, quarter, half), (quarter, half, quarter)))
    write("counterexample_table.json", table_to_doc(table))
    small = coin_space(2, prefix="heads")
    run = EvidentialRun("F", fair, small, ("heads2", "heads1"), ("heads2",))
    write("coin_run.json", run_to_doc(run))
    write("irrational_prior.txt", IRRATIONAL_PRIOR)
    write("row_sum.txt", ROW_SUM)


if __name__ == "__main__":
    main()
