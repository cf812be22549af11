import math
import random
import time
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from evidence_logic.checker import satisfies
from evidence_logic.errors import FragmentUnsupported
from evidence_logic.formula import DYNAMIC, Signature, parse, parse_file_text
from evidence_logic.solver import (
    FRESH_HYPOTHESIS,
    FRESH_OBSERVATION,
    SolverOptions,
    Verdict,
    augment_signature,
    solve,
)
from evidence_logic.solver import interval as I
from evidence_logic.solver import poly as P
from evidence_logic.solver.generate import GeneratorConfig, corpus, random_instance

F = Fraction
DATA = Path(__file__).resolve().parent.parent / "data"
SIG2 = Signature(("h1", "h2"), ("ob1", "ob2"))
SIG3 = Signature(("h1", "h2", "h3"), ("ob1", "ob2"))

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=1000)


# -- interval arithmetic ---------------------------------------------------------------------


@given(fractions)
def test_enclosure_contains_the_rational(q):
    iv = I.enclose(q)
    assert F(iv[0]) <= q <= F(iv[1])


@given(fractions, fractions, fractions, fractions)
def test_arithmetic_is_outward_rounded(a, b, c, d):
    x = I.enclose(min(a, b)), I.enclose(max(a, b))
    y = I.enclose(min(c, d)), I.enclose(max(c, d))
    box_x = (x[0][0], x[1][1])
    box_y = (y[0][0], y[1][1])
    for p in (a, b):
        for q in (c, d):
            assert F(I.add(box_x, box_y)[0]) <= p + q <= F(I.add(box_x, box_y)[1])
            assert F(I.sub(box_x, box_y)[0]) <= p - q <= F(I.sub(box_x, box_y)[1])
            assert F(I.mul(box_x, box_y)[0]) <= p * q <= F(I.mul(box_x, box_y)[1])
        for k in (2, 3):
            assert F(I.power(box_x, k)[0]) <= p**k <= F(I.power(box_x, k)[1])


def test_even_power_of_straddling_interval_starts_at_zero():
    lo, hi = I.power((-2.0, 1.0), 2)
    assert lo == 0.0 and hi >= 4.0


def test_intersection():
    assert I.intersect((0.0, 1.0), (2.0, 3.0)) is None
    assert I.intersect((0.0, 2.0), (1.0, 3.0)) == (1.0, 2.0)


def test_contraction_narrows_a_box():
    # x + y = 1 with x in [0.75, 1] forces y into [0, 0.25]
    c = I.IntervalConstraint(P.sub(P.add(P.var(0), P.var(1)), P.const(1)), True)
    box = [(0.75, 1.0), (0.0, 1.0)]
    assert c.contract(box)
    assert box[1][1] <= 0.25 + 1e-12
    assert not I.IntervalConstraint(P.sub(P.var(0), P.const(2)), False).contract([(0.0, 1.0)])


@given(st.lists(fractions, min_size=2, max_size=2))
def test_compiled_polynomial_matches_exact_value(point):
    p = P.add(P.mul(P.var(0), P.var(1)), P.scale(P.mul(P.var(0), P.var(0)), F(3, 7)), P.const(F(-1, 3)))
    exact = P.evaluate(p, point)
    assert abs(P.CompiledPoly(p).value([float(v) for v in point]) - float(exact)) <= 1e-9 * (1 + abs(float(exact)))
    assert P.degree(p) == 2 and P.variables(p) == {0, 1}


# -- decisions --------------------------------------------------------------------------------


def test_formula_whose_models_need_an_irrational_prior():
    f, sig = parse_file_text((DATA / "irrational_prior.txt").read_text())
    result = solve(f, sig)
    assert result.verdict is Verdict.SAT and not result.exact
    target = (math.sqrt(17) - 1) / 8
    assert abs(float(result.world.weight("ob1", "h1")) - target) <= 1e-6
    assert result.residual <= 1e-9
    assert satisfies(f, result.world, tolerance=F(1, 10**9))


def test_two_hypothesis_variant_is_rational():
    f = parse("Pr0(h1) = w(ob1, h1) & Pr0(h2) = 1 - Pr0(h1) & Pr(h1) = 1/2 & w(ob1, h2) = 1/4", SIG2)
    result = solve(f, SIG2)
    assert result.verdict is Verdict.SAT and result.exact
    assert satisfies(f, result.world)


def test_weights_of_one_observation_sum_to_one():
    f, sig = parse_file_text((DATA / "row_sum.txt").read_text())
    result = solve(f, sig)
    assert result.verdict is Verdict.UNSAT
    assert result.stats.refuted_by_lp >= 1


def test_unrealizable_weight_table_is_unsat():
    text = (
        "w(ob1, h1) = 1/4 & w(ob1, h2) = 1/4 & w(ob1, h3) = 1/2 & "
        "w(ob2, h1) = 1/4 & w(ob2, h2) = 1/2 & w(ob2, h3) = 1/4"
    )
    assert solve(parse(text, SIG3), SIG3).verdict is Verdict.UNSAT
    # with a spare observation to absorb the slack the table is realizable
    sig = augment_signature(parse(text, SIG3))
    result = solve(parse(text, sig), sig)
    assert result.verdict is Verdict.SAT and result.exact


def test_multi_observation_weights_are_refuted():
    f = parse("w(ob1, h1) + w(ob2, h1) > 3/2 & w(ob1, h2) >= 1/3", SIG3)
    assert solve(f, SIG3).verdict is Verdict.UNSAT


def test_probability_contradiction_is_unsat():
    f = parse("Pr(h1) + Pr(h2) >= 2 & Pr(h1) < 1", SIG2)
    assert solve(f, SIG2).verdict is Verdict.UNSAT


def test_atoms_restrict_the_case():
    assert solve(parse("h1 & h2", SIG2), SIG2).verdict is Verdict.UNSAT
    result = solve(parse("h2 & ob2 & w(ob2, h2) = 1", SIG2), SIG2)
    assert result.sat and result.world.h == "h2" and result.world.ob == "ob2"


def test_strict_boundary_is_unknown_not_unsat():
    f = parse("Pr0(h1) * Pr0(h1) > 1", SIG3)
    result = solve(f, SIG3, SolverOptions(budget_boxes=200))
    assert result.verdict is Verdict.UNKNOWN
    # a margin lets the search refute models without visible slack
    assert solve(f, SIG3, SolverOptions(budget_boxes=200, margin=1e-6)).verdict is Verdict.UNSAT


def test_rejects_quantified_and_dynamic_input():
    with pytest.raises(FragmentUnsupported):
        solve(parse("forall x (x >= w(ob1, h1))", SIG2), SIG2)
    with pytest.raises(FragmentUnsupported):
        solve(parse("X(ob1)", SIG2, DYNAMIC), SIG2)


def test_augmented_signature():
    f = parse("w(ob2, h2) > 1/2 & h1", SIG2)
    sig = augment_signature(f)
    assert sig.hypotheses == ("h2", "h1", FRESH_HYPOTHESIS)
    assert sig.observations == ("ob2", FRESH_OBSERVATION)


def test_results_are_deterministic():
    f, sig = parse_file_text((DATA / "irrational_prior.txt").read_text())
    a = solve(f, sig, SolverOptions(seed=3))
    b = solve(f, sig, SolverOptions(seed=3))
    assert a.world == b.world and a.stats == b.stats


@pytest.mark.parametrize("seed", [11, 12])
def test_parallel_search_gives_the_same_verdict(seed):
    for inst in corpus(seed, 15, GeneratorConfig(equality_rate=0.5)):
        one = solve(inst.formula, inst.signature)
        many = solve(inst.formula, inst.signature, SolverOptions(parallel=4))
        assert one.verdict is many.verdict
        if many.sat:
            assert satisfies(inst.formula, many.world, tolerance=F(1, 10**9))


# -- generated instances ------------------------------------------------------------------------


@given(st.integers(0, 2**32))
def test_hidden_world_satisfies_its_formula(seed):
    inst = random_instance(random.Random(seed))
    assert satisfies(inst.formula, inst.world)


def test_corpus_is_reproducible():
    assert corpus(4, 10) == corpus(4, 10)


@settings(max_examples=25)
@given(st.integers(0, 2**32))
def test_solver_finds_generated_instances(seed):
    inst = random_instance(random.Random(seed))
    start = time.perf_counter()
    result = solve(inst.formula, inst.signature)
    assert result.verdict is not Verdict.UNSAT
    if result.sat:
        assert satisfies(inst.formula, result.world, tolerance=F(1, 10**9))
    assert time.perf_counter() - start < 30
