import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from evidence_logic.errors import (
    InvalidStructure,
    MoreThanTwoHypotheses,
    OrthogonalMeasures,
    UnknownName,
    ZeroSequenceLikelihood,
)
from evidence_logic.evidence import (
    Distribution,
    EvidenceSpace,
    JointDistribution,
    as_rational,
    bayes_check,
    coin_space,
    coin_toss_space,
    dempster_combine,
    format_rational,
    log_likelihood_ratio,
    posterior,
    product_space,
    sequence_likelihood,
    sequence_weight,
    sequence_weight_column,
    shafer_weight,
    space_from_doc,
    space_to_doc,
    unnormalized_posterior,
    unnormalized_weight,
    weight_column,
    weight_of_evidence,
)

from strategies import (
    distributions,
    oracle_bayes_posterior,
    oracle_sequence_weight,
    oracle_weight,
    spaces,
)

F = Fraction


# -- construction ------------------------------------------------------------------------


def test_as_rational_accepts_exact_inputs():
    assert as_rational(3) == 3
    assert as_rational("2/6") == F(1, 3)
    assert as_rational(F(5, 7)) == F(5, 7)


@pytest.mark.parametrize("bad", [0.5, True, None])
def test_as_rational_rejects_inexact_inputs(bad):
    with pytest.raises(TypeError):
        as_rational(bad)


def test_as_rational_rejects_malformed_text():
    with pytest.raises(InvalidStructure):
        as_rational("1/0")


def test_format_rational():
    assert format_rational(F(4, 2)) == "2"
    assert format_rational(F(-1, 3)) == "-1/3"


def test_distribution_must_sum_to_one():
    with pytest.raises(InvalidStructure):
        Distribution(("a", "b"), (F(1, 2), F(1, 3)))
    with pytest.raises(InvalidStructure):
        Distribution(("a", "b"), (F(3, 2), F(-1, 2)))


def test_distribution_lookup_and_mass():
    d = Distribution.from_mapping({"a": "1/4", "b": "3/4"})
    assert d["b"] == F(3, 4)
    assert d.mass(["a", "b", "a"]) == 1
    with pytest.raises(UnknownName):
        d["c"]


def test_space_rejects_irrelevant_observation():
    with pytest.raises(InvalidStructure, match="not relevant"):
        EvidenceSpace(("h",), ("a", "b"), ((F(1), F(0)),))


def test_space_rejects_bad_rows():
    with pytest.raises(InvalidStructure):
        EvidenceSpace(("h",), ("a", "b"), ((F(1, 2), F(1, 3)),))
    with pytest.raises(InvalidStructure):
        EvidenceSpace(("h", "a"), ("a",), ((F(1),), (F(1),)))


def test_space_document_round_trip():
    space = coin_toss_space()
    assert space_from_doc(space_to_doc(space)) == space


# -- weights ------------------------------------------------------------------------------


def test_coin_weights_for_all_heads():
    space = coin_space(100)
    assert weight_of_evidence(space, "100", "F") == F(1, 1 + 2**100)
    assert weight_of_evidence(space, "100", "D") == F(2**100, 1 + 2**100)


@pytest.mark.parametrize("m", [0, 1, 50, 99])
def test_coin_weights_below_all_heads(m):
    space = coin_space(100)
    assert weight_of_evidence(space, str(m), "F") == 1
    assert weight_of_evidence(space, str(m), "D") == 0


@given(spaces())
def test_weight_matches_oracle(space):
    for o in space.observations:
        for h in space.hypotheses:
            assert weight_of_evidence(space, o, h) == oracle_weight(space, o, h)


@given(spaces())
def test_weight_columns_are_distributions(space):
    for o in space.observations:
        assert sum(weight_column(space, o).masses) == 1


# -- combination and updating ----------------------------------------------------------------


def test_dempster_rejects_orthogonal_inputs():
    a = Distribution(("x", "y"), (F(1), F(0)))
    b = Distribution(("x", "y"), (F(0), F(1)))
    with pytest.raises(OrthogonalMeasures):
        dempster_combine(a, b)


def test_dempster_rejects_different_supports():
    with pytest.raises(InvalidStructure):
        dempster_combine(Distribution.uniform(("x", "y")), Distribution.uniform(("x", "z")))


@given(st.data())
def test_dempster_is_commutative_and_associative(data):
    support = ("a", "b", "c")
    a, b, c = (data.draw(distributions(support, positive=True)) for _ in range(3))
    assert dempster_combine(a, b) == dempster_combine(b, a)
    assert dempster_combine(dempster_combine(a, b), c) == dempster_combine(a, dempster_combine(b, c))


@given(st.data())
def test_uniform_is_neutral_for_dempster(data):
    support = ("a", "b", "c")
    a = data.draw(distributions(support))
    assert dempster_combine(a, Distribution.uniform(support)) == a


@given(st.data())
def test_posterior_matches_bayes_conditioning(data):
    space = data.draw(spaces())
    prior = data.draw(distributions(space.hypotheses))
    for o in space.observations:
        expected = oracle_bayes_posterior(space, prior, o) if any(
            prior[h] * space.likelihood(h, o) for h in space.hypotheses
        ) else None
        if expected is None:
            with pytest.raises(OrthogonalMeasures):
                posterior(space, prior, o)
        else:
            assert posterior(space, prior, o).as_dict() == expected


@given(st.data())
def test_bayes_check_accepts_induced_joint(data):
    space = data.draw(spaces())
    prior = data.draw(distributions(space.hypotheses, positive=True))
    assert bayes_check(space, JointDistribution.from_prior(space, prior)).ok


def test_coin_posterior_after_all_heads():
    space = coin_space(100)
    for alpha in (F(1, 2), F(1, 10**100), F(3, 7)):
        prior = Distribution(("F", "D"), (alpha, 1 - alpha))
        got = posterior(space, prior, "100")["F"]
        assert got == alpha / (alpha + (1 - alpha) * 2**100)


# -- sequences -------------------------------------------------------------------------------


@given(st.data())
def test_sequence_weight_three_routes(data):
    space = data.draw(spaces(max_hypotheses=3, max_observations=3))
    seq = data.draw(st.lists(st.sampled_from(space.observations), min_size=1, max_size=4))
    if all(sequence_likelihood(space, h, seq) == 0 for h in space.hypotheses):
        with pytest.raises(ZeroSequenceLikelihood):
            sequence_weight(space, seq, space.hypotheses[0])
        return
    product = product_space(space, len(seq))
    name = ",".join(seq)
    folded = weight_column(space, seq[0])
    for o in seq[1:]:
        folded = dempster_combine(folded, weight_column(space, o))
    for h in space.hypotheses:
        direct = sequence_weight(space, seq, h)
        assert direct == oracle_sequence_weight(space, seq, h)
        assert direct == weight_of_evidence(product, name, h)
        assert direct == folded[h]


def test_sequence_weight_rejects_strings():
    with pytest.raises(TypeError):
        sequence_weight(coin_toss_space(), "HH", "F")


def test_product_space_drops_impossible_sequences():
    space = coin_toss_space()
    prod = product_space(space, 2)
    assert set(prod.observations) == {"H,H", "H,T", "T,H", "T,T"}
    assert prod.likelihood("D", "H,H") == 1
    assert sum(sequence_weight_column(space, ["H", "H"]).masses) == 1


# -- alternative measures ------------------------------------------------------------------


def test_log_likelihood_ratio_needs_two_hypotheses():
    space = EvidenceSpace(("a", "b", "c"), ("o",), ((F(1),), (F(1),), (F(1),)))
    with pytest.raises(MoreThanTwoHypotheses):
        log_likelihood_ratio(space, "o", "a")


def test_log_likelihood_ratio_values():
    space = coin_toss_space()
    assert log_likelihood_ratio(space, "H", "F") == F(1, 2)
    assert log_likelihood_ratio(space, "T", "F") == math.inf


@given(st.data())
def test_unnormalized_update_equals_normalized_update(data):
    space = data.draw(spaces())
    prior = data.draw(distributions(space.hypotheses, positive=True))
    for o in space.observations:
        assert unnormalized_posterior(space, prior, o) == posterior(space, prior, o)
        for h in space.hypotheses:
            assert unnormalized_weight(space, o, h) == space.likelihood(h, o)


@given(spaces())
def test_shafer_weight_peaks_at_one(space):
    for o in space.observations:
        values = [shafer_weight(space, o, h) for h in space.hypotheses]
        assert max(values) == 1 and min(values) >= 0
