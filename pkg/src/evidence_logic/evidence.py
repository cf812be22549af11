"""Evidence spaces, weight of evidence and Dempster-style updating.

Every quantity is an exact :class:`fractions.Fraction`.  The coin example
used throughout the tests has likelihoods of order 2**-100, where floating
point is useless, so no float ever enters this module.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .errors import (
    ConditionalMismatch,
    InvalidStructure,
    MoreThanTwoHypotheses,
    OrthogonalMeasures,
    UndefinedRatio,
    UnknownName,
    ZeroSequenceLikelihood,
)

ZERO = Fraction(0)
ONE = Fraction(1)


def as_rational(value) -> Fraction:
    """Coerce an int, Fraction or "p/q" string to a Fraction.

    Floats are rejected: a float has already lost the exact value.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidStructure(f"not a rational literal: {value!r}") from exc
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _check_names(names: Sequence[str], what: str) -> None:
    if not names:
        raise InvalidStructure(f"{what} must be nonempty")
    if len(set(names)) != len(names):
        raise InvalidStructure(f"{what} contain duplicates: {list(names)}")


@dataclass(frozen=True)
class Distribution:
    """A probability distribution on a finite ordered support."""

    support: tuple[str, ...]
    masses: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(self.support))
        object.__setattr__(self, "masses", tuple(as_rational(m) for m in self.masses))
        _check_names(self.support, "support names")
        if len(self.masses) != len(self.support):
            raise InvalidStructure("support and masses differ in length")
        if any(m < 0 for m in self.masses):
            raise InvalidStructure(f"negative mass in {self.as_dict()}")
        if sum(self.masses) != 1:
            raise InvalidStructure(f"masses sum to {sum(self.masses)}, not 1")

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, object], support: Sequence[str] | None = None):
        if support is None:
            support = list(mapping)
        missing = set(mapping) - set(support)
        if missing:
            raise UnknownName(f"names outside the support: {sorted(missing)}")
        return cls(tuple(support), tuple(as_rational(mapping.get(s, 0)) for s in support))

    @classmethod
    def uniform(cls, support: Sequence[str]):
        n = len(support)
        return cls(tuple(support), (Fraction(1, n),) * n)

    @classmethod
    def point(cls, support: Sequence[str], name: str):
        if name not in support:
            raise UnknownName(name)
        return cls(tuple(support), tuple(ONE if s == name else ZERO for s in support))

    def __getitem__(self, name: str) -> Fraction:
        try:
            return self.masses[self.support.index(name)]
        except ValueError:
            raise UnknownName(f"{name!r} not in support {list(self.support)}") from None

    def mass(self, names: Iterable[str]) -> Fraction:
        """Total mass of a set of support points."""
        return sum((self[n] for n in set(names)), ZERO)

    def as_dict(self) -> dict[str, Fraction]:
        return dict(zip(self.support, self.masses))


@dataclass(frozen=True)
class EvidenceSpace:
    """Hypotheses, observations and one likelihood function per hypothesis.

    ``table[i][j]`` is the probability of observation ``j`` under hypothesis
    ``i``.  Every row is a probability measure and every observation is
    relevant (positive under some hypothesis).
    """

    hypotheses: tuple[str, ...]
    observations: tuple[str, ...]
    table: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "hypotheses", tuple(self.hypotheses))
        object.__setattr__(self, "observations", tuple(self.observations))
        object.__setattr__(
            self, "table", tuple(tuple(as_rational(x) for x in row) for row in self.table)
        )
        _check_names(self.hypotheses, "hypotheses")
        _check_names(self.observations, "observations")
        if set(self.hypotheses) & set(self.observations):
            raise InvalidStructure("hypothesis and observation names overlap")
        if len(self.table) != len(self.hypotheses) or any(
            len(row) != len(self.observations) for row in self.table
        ):
            raise InvalidStructure("likelihood table has the wrong shape")
        for h, row in zip(self.hypotheses, self.table):
            if any(x < 0 for x in row):
                raise InvalidStructure(f"negative likelihood under {h}")
            if sum(row) != 1:
                raise InvalidStructure(f"likelihoods under {h} sum to {sum(row)}, not 1")
        for j, ob in enumerate(self.observations):
            if all(row[j] == 0 for row in self.table):
                raise InvalidStructure(f"observation {ob} is not relevant to any hypothesis")

    @classmethod
    def from_mapping(
        cls,
        likelihoods: Mapping[str, Mapping[str, object]],
        hypotheses: Sequence[str] | None = None,
        observations: Sequence[str] | None = None,
    ):
        if hypotheses is None:
            hypotheses = list(likelihoods)
        if observations is None:
            seen: dict[str, None] = {}
            for h in hypotheses:
                seen.update(dict.fromkeys(likelihoods.get(h, {})))
            observations = list(seen)
        for h, row in likelihoods.items():
            if h not in hypotheses:
                raise UnknownName(f"unknown hypothesis {h!r}")
            for ob in row:
                if ob not in observations:
                    raise UnknownName(f"unknown observation {ob!r}")
        table = tuple(
            tuple(as_rational(likelihoods.get(h, {}).get(ob, 0)) for ob in observations)
            for h in hypotheses
        )
        return cls(tuple(hypotheses), tuple(observations), table)

    def h_index(self, h: str) -> int:
        try:
            return self.hypotheses.index(h)
        except ValueError:
            raise UnknownName(f"unknown hypothesis {h!r}") from None

    def ob_index(self, ob: str) -> int:
        try:
            return self.observations.index(ob)
        except ValueError:
            raise UnknownName(f"unknown observation {ob!r}") from None

    def likelihood(self, h: str, ob: str) -> Fraction:
        return self.table[self.h_index(h)][self.ob_index(ob)]

    def likelihood_function(self, h: str) -> Distribution:
        return Distribution(self.observations, self.table[self.h_index(h)])


# -- weight of evidence -----------------------------------------------------


def weight_of_evidence(space: EvidenceSpace, ob: str, h: str) -> Fraction:
    """Normalized likelihood mu_h(ob) / sum over h' of mu_h'(ob)."""
    j = space.ob_index(ob)
    i = space.h_index(h)
    total = sum(row[j] for row in space.table)
    return space.table[i][j] / total


def weight_column(space: EvidenceSpace, ob: str) -> Distribution:
    j = space.ob_index(ob)
    column = [row[j] for row in space.table]
    total = sum(column)
    return Distribution(space.hypotheses, tuple(x / total for x in column))


def dempster_combine(a: Distribution, b: Distribution) -> Distribution:
    if a.support != b.support:
        raise InvalidStructure("cannot combine distributions over different supports")
    products = [x * y for x, y in zip(a.masses, b.masses)]
    total = sum(products)
    if total == 0:
        raise OrthogonalMeasures(f"{a.as_dict()} and {b.as_dict()} are orthogonal")
    return Distribution(a.support, tuple(p / total for p in products))


def posterior(space: EvidenceSpace, prior: Distribution, ob: str) -> Distribution:
    if prior.support != space.hypotheses:
        raise InvalidStructure("prior support differs from the space's hypotheses")
    return dempster_combine(prior, weight_column(space, ob))


# -- sequences --------------------------------------------------------------


def _check_sequence(space: EvidenceSpace, seq: Sequence[str]) -> tuple[int, ...]:
    if isinstance(seq, str):
        raise TypeError("pass observation sequences as a list or tuple, not a string")
    if len(seq) == 0:
        raise InvalidStructure("observation sequence must be nonempty")
    return tuple(space.ob_index(ob) for ob in seq)


def sequence_likelihood(space: EvidenceSpace, h: str, seq: Sequence[str]) -> Fraction:
    """mu*_h of a sequence of independent observations."""
    idx = _check_sequence(space, seq)
    row = space.table[space.h_index(h)]
    return math.prod((row[j] for j in idx), start=ONE)


@lru_cache(maxsize=65536)
def _sequence_weights(space: EvidenceSpace, idx: tuple[int, ...]) -> tuple[Fraction, ...]:
    products = []
    for i in range(len(space.hypotheses)):
        p = ONE
        for j in idx:
            col_total = sum(row[j] for row in space.table)
            p *= space.table[i][j] / col_total
        products.append(p)
    total = sum(products)
    if total == 0:
        names = [space.observations[j] for j in idx]
        raise ZeroSequenceLikelihood(f"sequence {names} has probability 0 under every hypothesis")
    return tuple(p / total for p in products)


def sequence_weight(space: EvidenceSpace, seq: Sequence[str], h: str) -> Fraction:
    """Weight of a sequence, built from the single-observation weights.

    The product of the per-observation weights for ``h`` divided by the same
    product summed over all hypotheses.
    """
    idx = _check_sequence(space, seq)
    return _sequence_weights(space, idx)[space.h_index(h)]


def sequence_weight_column(space: EvidenceSpace, seq: Sequence[str]) -> Distribution:
    idx = _check_sequence(space, seq)
    return Distribution(space.hypotheses, _sequence_weights(space, idx))


def product_space(space: EvidenceSpace, length: int, sep: str = ",") -> EvidenceSpace:
    """The space of observation sequences of exactly ``length`` observations.

    Sequences impossible under every hypothesis are dropped; they carry no
    mass so each likelihood row still sums to one.
    """
    if length < 1:
        raise InvalidStructure("length must be positive")
    names, columns = [], []
    for seq in itertools.product(range(len(space.observations)), repeat=length):
        col = tuple(math.prod((row[j] for j in seq), start=ONE) for row in space.table)
        if any(col):
            names.append(sep.join(space.observations[j] for j in seq))
            columns.append(col)
    table = tuple(tuple(col[i] for col in columns) for i in range(len(space.hypotheses)))
    return EvidenceSpace(space.hypotheses, tuple(names), table)


# -- alternative measures -----------------------------------------------------


def log_likelihood_ratio(space: EvidenceSpace, ob: str, h: str):
    """Argument of the log-likelihood ratio for a two-hypothesis space.

    Returns ``mu_h(ob) / mu_other(ob)`` as a Fraction, or ``math.inf`` when
    only the other hypothesis rules the observation out.  The logarithm is
    monotone, so comparisons on the ratio are comparisons on the measure.
    """
    if len(space.hypotheses) != 2:
        raise MoreThanTwoHypotheses(
            f"likelihood ratio needs exactly two hypotheses, got {len(space.hypotheses)}"
        )
    i = space.h_index(h)
    j = space.ob_index(ob)
    mine, other = space.table[i][j], space.table[1 - i][j]
    if other == 0:
        if mine == 0:
            raise UndefinedRatio(f"both likelihoods of {ob} vanish")
        return math.inf
    return mine / other


def unnormalized_weight(space: EvidenceSpace, ob: str, h: str) -> Fraction:
    return space.likelihood(h, ob)


def unnormalized_posterior(space: EvidenceSpace, prior: Distribution, ob: str) -> Distribution:
    """Update by the raw likelihoods mu_h(ob), without normalizing them first."""
    if prior.support != space.hypotheses:
        raise InvalidStructure("prior support differs from the space's hypotheses")
    j = space.ob_index(ob)
    products = [p * row[j] for p, row in zip(prior.masses, space.table)]
    total = sum(products)
    if total == 0:
        raise OrthogonalMeasures(f"prior {prior.as_dict()} rules out every cause of {ob}")
    return Distribution(space.hypotheses, tuple(p / total for p in products))


def shafer_weight(space: EvidenceSpace, ob: str, h: str) -> Fraction:
    """mu_h(ob) scaled by the largest likelihood of ob."""
    j = space.ob_index(ob)
    top = max(row[j] for row in space.table)
    return space.table[space.h_index(h)][j] / top


# -- joint distributions --------------------------------------------------------


@dataclass(frozen=True)
class JointDistribution:
    rows: tuple[str, ...]
    cols: tuple[str, ...]
    masses: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "cols", tuple(self.cols))
        object.__setattr__(
            self, "masses", tuple(tuple(as_rational(x) for x in r) for r in self.masses)
        )
        if len(self.masses) != len(self.rows) or any(len(r) != len(self.cols) for r in self.masses):
            raise InvalidStructure("joint mass table has the wrong shape")
        if any(x < 0 for r in self.masses for x in r):
            raise InvalidStructure("negative joint mass")
        if sum(sum(r) for r in self.masses) != 1:
            raise InvalidStructure("joint masses do not sum to 1")

    @classmethod
    def from_prior(cls, space: EvidenceSpace, prior: Distribution):
        """P(h, ob) = prior(h) * mu_h(ob)."""
        return cls(
            space.hypotheses,
            space.observations,
            tuple(
                tuple(p * x for x in row) for p, row in zip(prior.masses, space.table)
            ),
        )

    def marginal_rows(self) -> Distribution:
        return Distribution(self.rows, tuple(sum(r) for r in self.masses))


@dataclass(frozen=True)
class BayesReport:
    ok: bool
    violation: tuple[str, str] | None = None
    expected: Fraction | None = None
    got: Fraction | None = None


def bayes_check(space: EvidenceSpace, joint: JointDistribution) -> BayesReport:
    """Compare Dempster updating with Bayesian conditioning of a joint."""
    if joint.rows != space.hypotheses or joint.cols != space.observations:
        raise ConditionalMismatch("joint rows/cols do not match the space")
    for i, h in enumerate(space.hypotheses):
        row_mass = sum(joint.masses[i])
        if row_mass == 0:
            continue
        for j, ob in enumerate(space.observations):
            if joint.masses[i][j] / row_mass != space.table[i][j]:
                raise ConditionalMismatch(
                    f"P(ob={ob} | h={h}) = {joint.masses[i][j] / row_mass}, "
                    f"likelihood is {space.table[i][j]}"
                )
    prior = joint.marginal_rows()
    for j, ob in enumerate(space.observations):
        col_mass = sum(r[j] for r in joint.masses)
        if col_mass == 0:
            continue
        updated = posterior(space, prior, ob)
        for i, h in enumerate(space.hypotheses):
            conditioned = joint.masses[i][j] / col_mass
            if updated.masses[i] != conditioned:
                return BayesReport(False, (ob, h), conditioned, updated.masses[i])
    return BayesReport(True)


# -- documents ---------------------------------------------------------------------


def space_to_doc(space: EvidenceSpace) -> dict:
    return {
        "hypotheses": list(space.hypotheses),
        "observations": list(space.observations),
        "likelihoods": {
            h: {ob: format_rational(x) for ob, x in zip(space.observations, row)}
            for h, row in zip(space.hypotheses, space.table)
        },
    }


def space_from_doc(doc: Mapping) -> EvidenceSpace:
    try:
        hyps, obs, lik = doc["hypotheses"], doc["observations"], doc["likelihoods"]
    except KeyError as exc:
        raise InvalidStructure(f"evidence-space document lacks field {exc}") from None
    return EvidenceSpace.from_mapping(lik, hyps, obs)


def distribution_to_doc(dist: Distribution) -> dict:
    return {name: format_rational(m) for name, m in zip(dist.support, dist.masses)}


def coin_space(tosses: int = 100, prefix: str = "", hypotheses=("F", "D")) -> EvidenceSpace:
    """Fair versus double-headed coin, observing the number of heads.

    Observation ``m`` is named ``f"{prefix}{m}"``.
    """
    n = tosses
    fair = tuple(Fraction(math.comb(n, m), 2**n) for m in range(n + 1))
    double = tuple(ONE if m == n else ZERO for m in range(n + 1))
    names = tuple(f"{prefix}{m}" for m in range(n + 1))
    return EvidenceSpace(tuple(hypotheses), names, (fair, double))


def coin_toss_space() -> EvidenceSpace:
    """Fair versus double-headed coin, one toss per observation."""
    return EvidenceSpace(
        ("F", "D"), ("H", "T"), ((Fraction(1, 2), Fraction(1, 2)), (ONE, ZERO))
    )
