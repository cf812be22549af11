"""Weights and posteriors for a fair coin against a double-headed one after 100 tosses."""

from __future__ import annotations

import argparse
from fractions import Fraction

from evidence_logic.evidence import Distribution, coin_space, posterior, weight_of_evidence


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--tosses", type=int, default=100)
    parser.add_argument("--prior", default="1/2", help="prior probability of the fair coin")
    args = parser.parse_args()

    n = args.tosses
    space = coin_space(n)
    all_heads = str(n)
    for h in ("F", "D"):
        w = weight_of_evidence(space, all_heads, h)
        print(f"w({all_heads} heads, {h}) = {w}  ~{float(w):.6g}")
    others = {
        f"({weight_of_evidence(space, str(m), 'F')}, {weight_of_evidence(space, str(m), 'D')})" for m in range(n)
    }
    print(f"fewer than {n} heads: (w_F, w_D) takes only the values {', '.join(sorted(others))}")

    alpha = Fraction(args.prior)
    prior = Distribution(("F", "D"), (alpha, 1 - alpha))
    post = posterior(space, prior, all_heads)["F"]
    closed_form = alpha / (alpha + (1 - alpha) * 2**n)
    print(f"Pr(F | {all_heads} heads) = {post}  ~{float(post):.6g}")
    print("matches alpha / (alpha + (1 - alpha) 2^n):", post == closed_form)


if __name__ == "__main__":
    main()
