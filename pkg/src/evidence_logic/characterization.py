"""Which weight tables come from an evidence space, and which space.

A table ``f(ob, h)`` is the weight function of some evidence space exactly
when

* every row ``f(ob, .)`` is a probability distribution over hypotheses, and
* there are strictly positive scalars ``x_ob`` with
  ``sum_ob f(ob, h) * x_ob == 1`` for every hypothesis ``h``.

The second condition is an LP feasibility question with a strict
inequality.  We maximise ``t`` subject to ``x_ob >= t`` and the equalities;
the condition holds iff the exact optimum is positive.  Substituting
``x = t + s`` with ``s >= 0`` puts the problem in standard form.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import InvalidStructure, NotRealizable, UnknownName
from .evidence import (
    ONE,
    ZERO,
    EvidenceSpace,
    _check_names,
    as_rational,
    format_rational,
    weight_of_evidence,
)
from .lp import LPStatus, solve_linear_system, solve_lp

WF1 = "WF1"
WF2 = "WF2"


@dataclass(frozen=True)
class WeightTable:
    """Candidate weight function; ``entries[i][j]`` is ``f(observations[i], hypotheses[j])``.

    Rows need not sum to one: unrealizable tables must be representable so
    that they can be rejected.
    """

    hypotheses: tuple[str, ...]
    observations: tuple[str, ...]
    entries: tuple[tuple[Fraction, ...], ...]
    check_range: InitVar[bool] = True

    def __post_init__(self, check_range):
        object.__setattr__(self, "hypotheses", tuple(self.hypotheses))
        object.__setattr__(self, "observations", tuple(self.observations))
        object.__setattr__(
            self, "entries", tuple(tuple(as_rational(x) for x in row) for row in self.entries)
        )
        _check_names(self.hypotheses, "hypotheses")
        _check_names(self.observations, "observations")
        if len(self.entries) != len(self.observations) or any(
            len(row) != len(self.hypotheses) for row in self.entries
        ):
            raise InvalidStructure("weight table has the wrong shape")
        if check_range and any(not ZERO <= x <= ONE for row in self.entries for x in row):
            raise InvalidStructure("weight table entries must lie in [0, 1]")

    @classmethod
    def from_mapping(
        cls,
        weights: Mapping[str, Mapping[str, object]],
        hypotheses: Sequence[str] | None = None,
        observations: Sequence[str] | None = None,
        check_range: bool = True,
    ):
        """Build from ``{ob: {h: value}}``; missing entries are zero."""
        if observations is None:
            observations = list(weights)
        if hypotheses is None:
            seen: dict[str, None] = {}
            for ob in observations:
                seen.update(dict.fromkeys(weights.get(ob, {})))
            hypotheses = list(seen)
        for ob, row in weights.items():
            if ob not in observations:
                raise UnknownName(f"unknown observation {ob!r}")
            for h in row:
                if h not in hypotheses:
                    raise UnknownName(f"unknown hypothesis {h!r}")
        entries = tuple(
            tuple(as_rational(weights.get(ob, {}).get(h, 0)) for h in hypotheses)
            for ob in observations
        )
        return cls(tuple(hypotheses), tuple(observations), entries, check_range)

    def entry(self, ob: str, h: str) -> Fraction:
        try:
            return self.entries[self.observations.index(ob)][self.hypotheses.index(h)]
        except ValueError:
            raise UnknownName(f"unknown name in entry({ob!r}, {h!r})") from None


def weight_table(space: EvidenceSpace) -> WeightTable:
    """The weight function of ``space`` as a table."""
    return WeightTable(
        space.hypotheses,
        space.observations,
        tuple(
            tuple(weight_of_evidence(space, ob, h) for h in space.hypotheses)
            for ob in space.observations
        ),
    )


@dataclass(frozen=True)
class Wf1Report:
    ok: bool
    observation: str | None = None
    row_sum: Fraction | None = None
    reason: str | None = None

    def __bool__(self):
        return self.ok


def check_wf1(table: WeightTable) -> Wf1Report:
    """Every row must be a distribution over hypotheses; report the first row that is not."""
    for ob, row in zip(table.observations, table.entries):
        total = sum(row, ZERO)
        if any(x < 0 or x > 1 for x in row):
            return Wf1Report(False, ob, total, "entry outside [0, 1]")
        if total != 1:
            return Wf1Report(False, ob, total, f"row sums to {format_rational(total)}")
    return Wf1Report(True)


@dataclass(frozen=True)
class Wf2Certificate:
    """Strictly positive scalars, one per observation, in table order."""

    observations: tuple[str, ...]
    scalars: tuple[Fraction, ...]

    def scalar(self, ob: str) -> Fraction:
        return self.scalars[self.observations.index(ob)]

    def verify(self, table: WeightTable) -> bool:
        if any(x <= 0 for x in self.scalars):
            return False
        return all(
            sum((table.entries[i][j] * x for i, x in enumerate(self.scalars)), ZERO) == 1
            for j in range(len(table.hypotheses))
        )


@dataclass(frozen=True)
class Wf2Infeasible:
    """Why no positive scalars exist.

    ``status`` is ``"inconsistent"`` when the equalities have no solution at
    all, ``"no-nonnegative"`` when every solution has a negative scalar and
    ``"not-positive"`` when the best achievable minimum scalar is zero.
    """

    status: str
    optimum: Fraction | None = None

    def __bool__(self):
        return False


def check_wf2(table: WeightTable) -> Wf2Certificate | Wf2Infeasible:
    """Look for positive scalars making every hypothesis column sum to one."""
    n = len(table.observations)
    rows = [[table.entries[i][j] for i in range(n)] for j in range(len(table.hypotheses))]
    ones = [ONE] * len(rows)
    if solve_linear_system(rows, ones) is None:
        return Wf2Infeasible("inconsistent")
    # variables: t, s_1..s_n with x_i = t + s_i
    a_eq = [[sum(r, ZERO)] + r for r in rows]
    res = solve_lp([ONE] + [ZERO] * n, a_eq, ones, maximize=True)
    if res.status is LPStatus.INFEASIBLE:
        return Wf2Infeasible("no-nonnegative")
    if res.status is LPStatus.UNBOUNDED:  # pragma: no cover - excluded when rows are distributions
        raise InvalidStructure("scalar LP is unbounded; rows are not distributions")
    t = res.x[0]
    if t <= 0:
        return Wf2Infeasible("not-positive", t)
    return Wf2Certificate(table.observations, tuple(t + s for s in res.x[1:]))


def reconstruct(table: WeightTable) -> EvidenceSpace:
    """An evidence space whose weight function is exactly ``table``.

    Raises :class:`NotRealizable` naming the failed condition.
    """
    wf1 = check_wf1(table)
    if not wf1:
        raise NotRealizable(WF1, f"at observation {wf1.observation}: {wf1.reason}")
    cert = check_wf2(table)
    if not cert:
        raise NotRealizable(WF2, f"infeasible ({cert.status})")
    likelihoods = tuple(
        tuple(table.entries[i][j] * cert.scalars[i] for i in range(len(table.observations)))
        for j in range(len(table.hypotheses))
    )
    space = EvidenceSpace(table.hypotheses, table.observations, likelihoods)
    if weight_table(space) != table:  # pragma: no cover - guaranteed by the algebra
        raise AssertionError("reconstructed space does not reproduce the table")
    return space


def table_to_doc(table: WeightTable) -> dict:
    return {
        "hypotheses": list(table.hypotheses),
        "observations": list(table.observations),
        "weights": {
            ob: {h: format_rational(x) for h, x in zip(table.hypotheses, row)}
            for ob, row in zip(table.observations, table.entries)
        },
    }


def table_from_doc(doc: Mapping) -> WeightTable:
    try:
        hyps, obs, weights = doc["hypotheses"], doc["observations"], doc["weights"]
    except KeyError as exc:
        raise InvalidStructure(f"weight-table document lacks field {exc}") from None
    # file input may carry out-of-range entries; check_wf1 reports them
    return WeightTable.from_mapping(weights, hyps, obs, check_range=False)
