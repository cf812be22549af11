import math
import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from evidence_logic.checker import EvidentialRun, EvidentialWorld, satisfies, satisfies_at
from evidence_logic.errors import DecodeInconsistent, FragmentUnsupported, ZeroSequenceLikelihood
from evidence_logic.evidence import Distribution, EvidenceSpace
from evidence_logic.formula import DYNAMIC, HypAtom, Signature, parse
from evidence_logic.rcf import (
    binary_numeral,
    decode_witness,
    emit,
    encode_run,
    encode_world,
    eval_formula,
    parse_assignment,
    push_next,
    required_horizon,
    translate_dynamic,
    translate_static,
)
from evidence_logic.rcf import _sexp_parse, _sexp_tokens, _sexp_value
from evidence_logic.solver.generate import GeneratorConfig, random_instance, random_world

from strategies import runs

F = Fraction
SIG = Signature(("h1", "h2"), ("o1", "o2"))


def _phi_hat(problem):
    (hat,) = [a for a in problem.assertions if a.family == "phi_hat"]
    return hat.formula


def _structural_hold(problem, env):
    return all(eval_formula(a.formula, env) for a in problem.assertions if a.family != "phi_hat")


# -- static --------------------------------------------------------------------------------


@settings(max_examples=50)
@given(st.integers(0, 2**32))
def test_encoded_hidden_world_satisfies_every_assertion(seed):
    inst = random_instance(random.Random(seed))
    p = translate_static(inst.formula, inst.signature)
    env = encode_world(inst.world, p)
    assert p.first_violation(env) is None


@given(st.integers(0, 2**32), st.integers(0, 2**32))
def test_translated_formula_agrees_with_the_checker(seed, other):
    """Formulas built around one world, evaluated at another."""
    inst = random_instance(random.Random(seed), GeneratorConfig(max_hypotheses=2, max_observations=2))
    rng = random.Random(other)
    sig = inst.signature
    world = random_world(rng, len(sig.hypotheses), len(sig.observations))
    p = translate_static(inst.formula, sig)
    env = encode_world(world, p)
    assert _structural_hold(p, env)
    assert eval_formula(_phi_hat(p), env) == satisfies(inst.formula, world)


def test_static_families_and_normalizer():
    p = translate_static(parse("w(o1, h1) = 2/3", SIG), SIG)
    assert p.families == ("phi_h", "phi_o", "phi_pr", "phi_po", "phi_w,p", "phi_w,f", "phi_w,up", "phi_hat")
    q = translate_static(parse("Pr(h1) > 1/2", SIG), SIG)
    assert "phi_w,nz" in q.families


def test_undefined_posterior_is_encoded_with_the_prior():
    space = EvidenceSpace(("h1", "h2"), ("o1", "o2"), ((F(1), F(0)), (F(1, 2), F(1, 2))))
    world = EvidentialWorld("h2", "o2", Distribution(("h1", "h2"), (F(1), F(0))), space)
    p = translate_static(parse("w(o2, h2) = 1", SIG), SIG)
    assert p.holds(encode_world(world, p))
    # a formula that reads the posterior needs it to exist
    q = translate_static(parse("Pr(h1) >= 0", SIG), SIG)
    assert q.first_violation(encode_world(world, q)).family == "phi_w,nz"


def test_quantified_formula():
    p = translate_static(parse("forall x (x * x >= 0) & y = w(o1, h1)", SIG), SIG)
    assert any(a.quantified for a in p.assertions)
    assert "|fv_y|" in p.variables
    text = emit(p)
    assert "(set-logic ALL)" in text and "(forall ((|fv_x| Real))" in text
    assert "(set-logic NRA)" in emit(translate_static(parse("h1", SIG), SIG))


def test_static_witness_round_trip():
    space = EvidenceSpace(("h1", "h2"), ("o1", "o2"), ((F(1, 3), F(2, 3)), (F(3, 4), F(1, 4))))
    world = EvidentialWorld("h1", "o1", Distribution(("h1", "h2"), (F(1, 5), F(4, 5))), space)
    f = parse("Pr(h1) > Pr0(h1) - 1 & o1 & 42 * w(o1, h1) < 100", SIG)
    p = translate_static(f, SIG)
    back = decode_witness(p, encode_world(world, p))
    assert (back.h, back.ob, back.prior) == (world.h, world.ob, world.prior)
    assert all(back.weight(o, h) == world.weight(o, h) for o in SIG.observations for h in SIG.hypotheses)
    assert satisfies(f, back)


def test_decode_rejects_bad_assignments():
    p = translate_static(parse("w(o1, h1) = 1/2", SIG), SIG)
    env = {v: F(0) for v in p.variables}
    with pytest.raises(DecodeInconsistent) as info:
        decode_witness(p, env)
    assert info.value.assertion.family == "phi_h"
    with pytest.raises(DecodeInconsistent):
        decode_witness(p, {})


# -- dynamic -------------------------------------------------------------------------------------


def _dynamic_text(rng: random.Random, depth: int) -> str:
    if depth == 0 or rng.random() < 0.3:
        kind = rng.randrange(4)
        if kind == 0:
            return rng.choice(SIG.hypotheses)
        if kind == 1:
            return rng.choice(SIG.observations)
        if kind == 2:
            return f"Pr({rng.choice(SIG.hypotheses)}) >= {rng.randint(0, 6)}/6"
        seq = ", ".join(rng.choice(SIG.observations) for _ in range(rng.randint(1, 3)))
        return f"w([{seq}], {rng.choice(SIG.hypotheses)}) > {rng.randint(0, 5)}/6"
    op = rng.randrange(4)
    if op == 0:
        return f"!({_dynamic_text(rng, depth - 1)})"
    if op == 1:
        return f"X({_dynamic_text(rng, depth - 1)})"
    joiner = " & " if op == 2 else " | "
    return f"({_dynamic_text(rng, depth - 1)}{joiner}{_dynamic_text(rng, depth - 1)})"


@given(runs(max_hypotheses=2, max_observations=2, min_hypotheses=2, min_observations=2), st.integers(0, 2**32))
def test_dynamic_translation_agrees_with_the_checker(run, seed):
    # the strategy names things h1, h2 and o1, o2, matching SIG
    f = parse(_dynamic_text(random.Random(seed), 3), SIG, DYNAMIC)
    p = translate_dynamic(f, SIG, required_horizon(f))
    for m in range(4):
        try:
            truth = satisfies_at(f, run, m)
            env = encode_run(run, m, p)
        except ZeroSequenceLikelihood:
            assume(False)
        assert _structural_hold(p, env)
        assert eval_formula(_phi_hat(p), env) == truth


@settings(max_examples=30)
@given(runs(max_hypotheses=2, max_observations=2, min_hypotheses=2, min_observations=2))
def test_full_sequence_constraints_hold_on_runs(run):
    """Every sequence-weight constraint up to the horizon holds at encoded runs."""
    p = translate_dynamic(parse("h1 | h2", SIG, DYNAMIC), SIG, 3, full_sequences=True)
    assert len(p.sequences) == 4 + 8
    try:
        env = encode_run(run, 0, p)
    except ZeroSequenceLikelihood:
        assume(False)
    assert p.holds(env)


def test_next_vanishes_over_time_independent_formulas():
    assert push_next(parse("X(X(h1))", SIG, DYNAMIC)) == HypAtom("h1")
    pushed = push_next(parse("X(o1 & !h2)", SIG, DYNAMIC))
    assert pushed == parse("X(o1) & !h2", SIG, DYNAMIC)
    assert push_next(parse("X(w([o1, o2], h1) > 0)", SIG, DYNAMIC)) == parse("w([o1, o2], h1) > 0", SIG, DYNAMIC)
    assert required_horizon(parse("X(X(h1)) & X(Pr(h1) > 0)", SIG, DYNAMIC)) == 1


def test_horizon_must_cover_the_formula():
    f = parse("X(X(o1))", SIG, DYNAMIC)
    with pytest.raises(FragmentUnsupported, match="horizon"):
        translate_dynamic(f, SIG, 1)
    with pytest.raises(FragmentUnsupported):
        translate_static(f, SIG)


def test_dynamic_witness_round_trip():
    space = EvidenceSpace(("h1", "h2"), ("o1", "o2"), ((F(1, 3), F(2, 3)), (F(3, 4), F(1, 4))))
    run = EvidentialRun("h1", Distribution.uniform(("h1", "h2")), space, ("o1", "o1"), ("o2",))
    f = parse("X(X(Pr(h1) >= 1/3)) & X(o1) & w([o1, o2], h1) > 0 & !o2", SIG, DYNAMIC)
    p = translate_dynamic(f, SIG, required_horizon(f))
    for m in range(3):
        if not satisfies_at(f, run, m):
            continue
        back, point = decode_witness(p, encode_run(run, m, p))
        assert point == (0 if m == 0 else 1)
        assert satisfies_at(f, back, point)


# -- emission ------------------------------------------------------------------------------------


@given(st.integers(0, 10**12))
def test_binary_numerals_denote_their_value(k):
    text = binary_numeral(k)
    (expr,) = _sexp_parse(_sexp_tokens(text)) if text.startswith("(") else [text]
    assert _sexp_value(expr) == k
    assert set(text) <= set("01+* ()")
    assert len(text) <= 20 * (k.bit_length() + 1)


def test_emission_is_deterministic():
    f = parse("Pr(h1) * w(o2, h2) >= 3/7 | !o1", SIG)
    assert emit(translate_static(f, SIG)) == emit(translate_static(f, SIG))
    text = emit(translate_static(f, SIG))
    assert text.count("(assert") == len(translate_static(f, SIG).assertions)
    assert "(declare-fun z_2_2 () Real) ; w(o2, h2)" in text
    assert "; phi_w,up o1" in text
    assert "(+ 1 1)" in text and " 7" not in text
    assert "(* 7 y_1 z_2_2)" in emit(translate_static(f, SIG), binary_constants=False)


def _doubling_family_size(k: int) -> int:
    text = f"{2 ** (2 ** k)} * w(o1, h1) >= 1"
    return len(emit(translate_static(parse(text, SIG), SIG)))


def test_size_grows_polynomially_in_coefficient_bits():
    base = len(emit(translate_static(parse("w(o1, h1) >= 1", SIG), SIG)))
    growth = [_doubling_family_size(k) - base for k in range(2, 10)]
    # bit length doubles each step; linear growth would double the extra size
    ratios = [b / a for a, b in zip(growth, growth[1:])]
    assert max(ratios) <= 2.5
    assert math.log2(growth[-1] / growth[0]) / (9 - 2) <= 1.3


def test_parse_assignment_formats():
    model = "(model (define-fun x_1 () Real (/ 1.0 3.0)) (define-fun |fv_y| () Real (- 2)))"
    assert parse_assignment(model) == {"x_1": F(1, 3), "|fv_y|": F(-2)}
    assert parse_assignment("a = 1/2\n# note\nb = -3\n") == {"a": F(1, 2), "b": F(-3)}
    with pytest.raises(ValueError):
        parse_assignment("a 1")
    with pytest.raises(ValueError):
        parse_assignment("(model (define-fun a () Real (root-obj (+ (^ x 2) (- 2)) 1)))")
