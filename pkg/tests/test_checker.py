import json
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings

from evidence_logic.checker import (
    DYNAMIC_AXIOMS,
    UNNORMALIZED,
    EvidentialRun,
    EvidentialWorld,
    UnboundVariable,
    audit_axioms,
    eval_term,
    hypothesis_pool,
    propositionally_equivalent,
    run_from_doc,
    run_to_doc,
    satisfies,
    satisfies_at,
    world_from_doc,
    world_to_doc,
)
from evidence_logic.errors import FragmentUnsupported, InvalidStructure, QuantifierUnsupported
from evidence_logic.evidence import Distribution, EvidenceSpace, coin_toss_space
from evidence_logic.formula import DYNAMIC, HypAtom, Not, And, Signature, parse

from strategies import oracle_bayes_posterior, oracle_run_posterior, runs, worlds

F = Fraction
DATA = Path(__file__).resolve().parent.parent / "data"


def sweep_world(p):
    """Two hypotheses; ob has weight 2/3 for h1 and 1/3 for h2."""
    space = EvidenceSpace(("h1", "h2"), ("ob", "ob'"), ((F(1), F(0)), (F(1, 2), F(1, 2))))
    return EvidentialWorld("h1", "ob", Distribution(("h1", "h2"), (p, 1 - p)), space)


def test_sweep_world_weights():
    world = sweep_world(F(1, 3))
    assert world.weight("ob", "h1") == F(2, 3) and world.weight("ob", "h2") == F(1, 3)


@pytest.mark.parametrize("denominator", [100, 99, 50, 3, 2])
def test_posterior_bound_formula(denominator):
    p = F(1, denominator)
    world = sweep_world(p)
    sig = world.signature
    assert world.posterior["h1"] == 2 * p / (1 + p)
    f = parse("ob & Pr0(h1) >= 1/100 => Pr(h1) >= 2/101", sig)
    assert satisfies(f, world)
    # the bound is tight at the smallest prior
    tight = parse("ob & Pr0(h1) >= 1/100 => Pr(h1) > 2/101", sig)
    assert satisfies(tight, world) == (denominator != 100)


@given(worlds())
def test_posterior_terms_match_bayes(world):
    sig = world.signature
    expected = oracle_bayes_posterior(world.space, world.prior, world.ob)
    for h in sig.hypotheses:
        value = eval_term(parse(f"Pr({h}) = 0", sig).poly, world)
        assert value == expected[h]


def test_atoms_and_connectives():
    world = EvidentialWorld("F", "H", Distribution.uniform(("F", "D")), coin_toss_space())
    sig = world.signature
    assert satisfies(parse("F & H & !D & !T", sig), world)
    assert satisfies(parse("w(H, F) = 1/3 & w(T, F) = 1", sig), world)
    assert not satisfies(parse("D | T", sig), world)


def test_tolerance_relaxes_only_closed_constraints():
    world = EvidentialWorld("F", "H", Distribution.uniform(("F", "D")), coin_toss_space())
    sig = world.signature
    near = parse("w(H, F) = 333/1000", sig)
    assert not satisfies(near, world)
    # the residual is measured on the integer-scaled comparison: 1000/3 - 333
    assert not satisfies(near, world, tolerance=F(1, 1000))
    assert satisfies(near, world, tolerance=F(1, 3))
    strict = parse("w(H, F) > 1/3", sig)
    assert not satisfies(strict, world, tolerance=F(1, 10))
    # under negation a strict comparison is closed, so it may be relaxed
    assert satisfies(parse("!(w(H, F) > 1/3)", sig), world, tolerance=F(1, 10))
    assert not satisfies(parse("!(w(H, F) >= 333/1000)", sig), world, tolerance=F(1, 10))


def test_variables_need_a_valuation():
    world = EvidentialWorld("F", "H", Distribution.uniform(("F", "D")), coin_toss_space())
    f = parse("x * w(H, F) = 1", world.signature)
    assert satisfies(f, world, {"x": 3})
    with pytest.raises(UnboundVariable):
        satisfies(f, world)
    with pytest.raises(QuantifierUnsupported):
        satisfies(parse("forall x (x * x >= 0)", world.signature), world)


def test_world_rejects_dynamic_features():
    world = EvidentialWorld("F", "H", Distribution.uniform(("F", "D")), coin_toss_space())
    with pytest.raises(FragmentUnsupported):
        satisfies(parse("X(H)", world.signature, DYNAMIC), world)


def test_world_validation():
    space = coin_toss_space()
    with pytest.raises(InvalidStructure):
        EvidentialWorld("Z", "H", Distribution.uniform(("F", "D")), space)
    with pytest.raises(InvalidStructure):
        EvidentialWorld("F", "H", Distribution.uniform(("D", "F")), space)
    with pytest.raises(InvalidStructure):
        EvidentialRun("F", Distribution.uniform(("F", "D")), space, (), ())


def test_documents_round_trip():
    world = world_from_doc(json.loads((DATA / "coin_world.json").read_text()))
    assert world_from_doc(world_to_doc(world)) == world
    run = run_from_doc(json.loads((DATA / "coin_run.json").read_text()))
    assert run_from_doc(run_to_doc(run)) == run
    with pytest.raises(InvalidStructure):
        world_from_doc({"space": world_to_doc(world)["space"]})


def test_coin_world_file():
    world = world_from_doc(json.loads((DATA / "coin_world.json").read_text()))
    f = parse("heads100 & (1 + 2^100) * Pr(F) = 1", world.signature)
    assert satisfies(f, world)


# -- runs -------------------------------------------------------------------------------------


@given(runs())
def test_run_posteriors_follow_stepwise_bayes(run):
    for m in range(6):
        assert run.posterior(m).as_dict() == oracle_run_posterior(run, m)


def test_run_time_zero_has_no_observation():
    run = run_from_doc(json.loads((DATA / "coin_run.json").read_text()))
    sig = run.signature
    assert not satisfies_at(parse("heads0 | heads1 | heads2", sig), run, 0)
    assert satisfies_at(parse("X(heads2) & X(X(heads1)) & X(X(X(heads2)))", sig, DYNAMIC), run, 0)
    assert satisfies_at(parse("Pr(F) = 1/2", sig, DYNAMIC), run, 0)
    assert satisfies_at(parse("X(Pr(F) = 1/5)", sig, DYNAMIC), run, 0)
    assert satisfies_at(parse("w([heads2, heads1], D) = 0", sig, DYNAMIC), run, 3)
    with pytest.raises(ValueError):
        satisfies_at(parse("F", sig), run, -1)


# -- audits -----------------------------------------------------------------------------------


def test_propositional_equivalence():
    a, b = HypAtom("a"), HypAtom("b")
    assert propositionally_equivalent(Not(And(a, b)), Not(And(b, a)))
    assert not propositionally_equivalent(a, b)
    assert len(hypothesis_pool(Signature(("a", "b", "c"), ("o",)))) == 8


@settings(max_examples=30)
@given(worlds())
def test_static_audit_passes(world):
    report = audit_axioms(world)
    assert report.ok, [e.text for e in report.failures]
    assert {"Pr3", "Po4", "E3", "E4"} <= set(report.counts())


def test_audit_detects_a_broken_posterior():
    base = sweep_world(F(1, 2))
    broken = EvidentialWorld(
        base.h, base.ob, base.prior, base.space, posterior_override=Distribution.uniform(("h1", "h2"))
    )
    report = audit_axioms(broken)
    assert not report.ok
    assert {e.axiom for e in report.failures} == {"E3"}


@settings(max_examples=20)
@given(worlds())
def test_unnormalized_audit_passes(world):
    raw = EvidentialWorld(world.h, world.ob, world.prior, world.space, UNNORMALIZED)
    report = audit_axioms(raw)
    assert report.ok, [e.text for e in report.failures]
    assert {"E1'", "E2'"} <= set(report.counts())
    assert raw.posterior == world.posterior


@settings(max_examples=15)
@given(runs(max_hypotheses=2, max_observations=2))
def test_dynamic_audit_passes(run):
    report = audit_axioms(run, horizon=3)
    assert report.ok, [e.text for e in report.failures]
    assert {"E5", "E6", "T1", "T2", "T4", "T5", "T6"} <= set(report.counts()) <= set(DYNAMIC_AXIOMS)


def test_run_audit_needs_horizon():
    run = run_from_doc(json.loads((DATA / "coin_run.json").read_text()))
    with pytest.raises(ValueError):
        audit_axioms(run)
