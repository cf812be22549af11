import random

import pytest
from hypothesis import given, strategies as st

from evidence_logic.errors import InvalidStructure, ParseError
from evidence_logic.formula import (
    DYNAMIC,
    And,
    Compare,
    ForAll,
    Fragment,
    HypAtom,
    Monomial,
    Next,
    Not,
    ObsAtom,
    Op,
    Posterior,
    Prior,
    Signature,
    Var,
    Weight,
    classify_fragment,
    free_vars,
    intension,
    next_depth,
    occurring_names,
    parse,
    parse_file_text,
    to_text,
)
from evidence_logic.formula.analysis import size
from evidence_logic.solver.generate import GeneratorConfig, random_instance

SIG = Signature(("h1", "h2", "h3"), ("ob1", "ob2"))


def w(ob, h):
    return Weight((ob,), h)


def test_signature_validation():
    with pytest.raises(InvalidStructure):
        Signature((), ("a",))
    with pytest.raises(InvalidStructure):
        Signature(("a", "a"), ("b",))
    with pytest.raises(InvalidStructure):
        Signature(("a",), ("a",))


def test_comparison_is_normalized_to_integers():
    f = parse("w(ob1, h1) <= 1/2 + 1/3 * w(ob1, h2)", SIG)
    # 1/2 + w2/3 - w1 >= 0, scaled by 6: 2*w2 - 6*w1 >= -3
    assert f.op is Op.GE and f.constant == -3
    assert set(f.poly) == {Monomial(-6, (w("ob1", "h1"),)), Monomial(2, (w("ob1", "h2"),))}


def test_powers_and_products_expand():
    f = parse("(w(ob1, h1) + 1) * (w(ob1, h1) - 1) = 2^3/4", SIG)
    assert f == Compare((Monomial(1, (w("ob1", "h1"), w("ob1", "h1"))),), Op.EQ, 3)


def test_derived_connectives():
    a, b = parse("h1", SIG), parse("ob1", SIG)
    assert a == HypAtom("h1") and b == ObsAtom("ob1")
    assert parse("h1 | ob1", SIG) == Not(And(Not(a), Not(b)))
    assert parse("h1 => ob1", SIG) == Not(And(a, Not(b)))
    assert parse("w(ob1, h1) != 0", SIG) == Not(Compare((Monomial(1, (w("ob1", "h1"),)),), Op.EQ, 0))
    assert parse("exists x (x > 0)", SIG) == Not(ForAll("x", Not(Compare((Monomial(1, (Var("x"),)),), Op.GT, 0))))


def test_implication_is_right_associative():
    assert parse("h1 => h2 => h3", SIG) == parse("h1 => (h2 => h3)", SIG)


def test_probability_terms():
    f = parse("Pr0(h1 | h2) > Pr(!h3)", SIG)
    rho = Not(And(Not(HypAtom("h1")), Not(HypAtom("h2"))))
    assert isinstance(f, Compare)
    assert {m.factors[0] for m in f.poly} == {Prior(rho), Posterior(Not(HypAtom("h3")))}
    assert intension(rho, SIG) == {"h1", "h2"}


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("w(ob1, h1) >= 1/2", Fragment.LW),
        ("w(ob1, h1) * w(ob2, h2) >= 1/2", Fragment.LEV),
        ("Pr0(h1) >= 1/2", Fragment.LEV),
        ("forall x (x * x >= 0)", Fragment.FOEV),
    ],
)
def test_fragments(text, fragment):
    assert classify_fragment(parse(text, SIG)) is fragment


def test_dynamic_dialect():
    f = parse("X(ob1) & w([ob1, ob2], h1) > 0", SIG, DYNAMIC)
    assert classify_fragment(f) is Fragment.DYN
    assert next_depth(parse("X(X(ob1)) & X(h1)", SIG, DYNAMIC)) == 2
    with pytest.raises(ParseError, match="dynamic"):
        parse("X(ob1)", SIG)
    with pytest.raises(ParseError, match="Pr0"):
        parse("Pr0(h1) > 0", SIG, DYNAMIC)
    with pytest.raises(ParseError, match="sequences"):
        parse("w([ob1, ob2], h1) > 0", SIG)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("w(ob3, h1) > 0", "undeclared observation"),
        ("w(ob1, h9) > 0", "undeclared hypothesis"),
        ("h1 &", "term"),
        ("w(ob1, h1) >", "term"),
        ("w(ob1, h1) > 1/0", "division by zero"),
        ("w(ob1, h1) > 1/x", "numeric literals"),
        ("w(ob1, h1) > x/2", "unexpected"),
        ("Pr(ob1) > 0", "hypothesis formula"),
        ("forall h1 (h1)", "signature name"),
        ("h1 + 1 > 0", "used as a number"),
        ("(h1", "expected"),
    ],
)
def test_parse_errors_carry_positions(text, fragment):
    with pytest.raises(ParseError, match=fragment) as info:
        parse(text, SIG)
    assert info.value.position is not None


def test_shadowing_warns():
    with pytest.warns(UserWarning, match="shadows"):
        parse("forall x (forall x (x > 0))", SIG)


def test_free_variables_and_names():
    f = parse("forall x (x * y > w(ob2, h3)) & h1", SIG)
    assert free_vars(f) == {"y"}
    assert occurring_names(f) == (("h3", "h1"), ("ob2",))
    assert size(parse("h1 & w(ob1, h1) > 0", SIG)) == 5


def test_file_header():
    f, sig = parse_file_text("# note\nhypotheses: a, b; observations: o;\nw(o, a) = 1/2\n")
    assert sig == Signature(("a", "b"), ("o",))
    assert isinstance(f, Compare)


@given(st.integers(0, 10**6))
def test_printer_round_trip_on_generated_formulas(seed):
    inst = random_instance(random.Random(seed), GeneratorConfig(disjunction_rate=0.5, atom_rate=0.8))
    once = parse(to_text(inst.formula), inst.signature)
    assert parse(to_text(once), inst.signature) == once


@pytest.mark.parametrize(
    "text",
    [
        "forall x (x * x >= 0 & !(x = 1/3))",
        "Pr0(h1 & !h2) * w(ob1, h3) + 2 * Pr(h2) > 7/5",
        "h1 => ob2 | !(w(ob2, h2) = 0)",
    ],
)
def test_printer_round_trip_on_written_formulas(text):
    f = parse(text, SIG)
    assert parse(to_text(f), SIG) == f


def test_printer_round_trip_for_next():
    f = parse("X(!X(ob1) & w([ob1, ob1], h2) >= 1/4)", SIG, DYNAMIC)
    assert isinstance(f, Next)
    assert parse(to_text(f), SIG, DYNAMIC) == f
