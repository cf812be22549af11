"""Model checking at evidential worlds and at points of evidential runs.

A *world* fixes the true hypothesis, the observation made, a prior and an
evidence space.  A *run* fixes hypothesis, prior and space and then feeds
an infinite (eventually periodic) stream of observations; time ``m`` has
seen the first ``m`` of them.  At time 0 nothing has been observed yet, so
every observation atom is false there and the posterior is the prior.

Evaluation is exact.  ``satisfies`` accepts an optional tolerance for
models whose numbers only approximate the true (possibly irrational)
values; it relaxes non-strict comparisons and equalities only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .characterization import check_wf2, weight_table
from .errors import EvidenceError, FragmentUnsupported, InvalidStructure, QuantifierUnsupported
from .evidence import (
    ONE,
    ZERO,
    Distribution,
    EvidenceSpace,
    as_rational,
    dempster_combine,
    distribution_to_doc,
    posterior,
    sequence_weight,
    sequence_weight_column,
    space_from_doc,
    space_to_doc,
    unnormalized_posterior,
    weight_of_evidence,
)
from .formula.analysis import intension
from .formula.ast import (
    And,
    Compare,
    ForAll,
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
    conj,
    disj,
    iff,
    implies,
    true_formula,
)
from .formula.printer import to_text

NORMALIZED = "normalized"
UNNORMALIZED = "unnormalized"

Valuation = Mapping[str, Fraction]


class UnboundVariable(EvidenceError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


@lru_cache(maxsize=None)
def _intension(rho, sig: Signature) -> frozenset[str]:
    return intension(rho, sig)


# -- structures -------------------------------------------------------------------------


@dataclass(frozen=True)
class EvidentialWorld:
    """True hypothesis ``h``, observation ``ob``, ``prior`` and ``space``.

    ``weights`` selects how weight terms are read: ``"normalized"`` uses the
    normalized likelihood, ``"unnormalized"`` the raw likelihood.

    ``posterior_override`` replaces the computed posterior.  It exists so that
    tests can build deliberately broken worlds; nothing else should set it.
    """

    h: str
    ob: str
    prior: Distribution
    space: EvidenceSpace
    weights: str = NORMALIZED
    posterior_override: Distribution | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.h not in self.space.hypotheses:
            raise InvalidStructure(f"hypothesis {self.h!r} not in the space")
        if self.ob not in self.space.observations:
            raise InvalidStructure(f"observation {self.ob!r} not in the space")
        if self.prior.support != self.space.hypotheses:
            raise InvalidStructure("prior support differs from the space's hypotheses")
        if self.weights not in (NORMALIZED, UNNORMALIZED):
            raise InvalidStructure(f"unknown weight reading {self.weights!r}")

    @cached_property
    def signature(self) -> Signature:
        return Signature.of_space(self.space)

    @cached_property
    def posterior(self) -> Distribution:
        if self.posterior_override is not None:
            return self.posterior_override
        if self.weights == UNNORMALIZED:
            return unnormalized_posterior(self.space, self.prior, self.ob)
        return posterior(self.space, self.prior, self.ob)

    def weight(self, ob: str, h: str) -> Fraction:
        if self.weights == UNNORMALIZED:
            return self.space.likelihood(h, ob)
        return weight_of_evidence(self.space, ob, h)


@dataclass(frozen=True)
class EvidentialRun:
    """Hypothesis, prior and space plus the stream ``prefix + cycle + cycle + ...``."""

    h: str
    prior: Distribution
    space: EvidenceSpace
    trace_prefix: tuple[str, ...]
    trace_cycle: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "trace_prefix", tuple(self.trace_prefix))
        object.__setattr__(self, "trace_cycle", tuple(self.trace_cycle))
        if isinstance(self.trace_prefix, str) or isinstance(self.trace_cycle, str):
            raise TypeError("traces are sequences of observation names")
        if not self.trace_cycle:
            raise InvalidStructure("the cyclic tail of a trace must be nonempty")
        if self.h not in self.space.hypotheses:
            raise InvalidStructure(f"hypothesis {self.h!r} not in the space")
        if self.prior.support != self.space.hypotheses:
            raise InvalidStructure("prior support differs from the space's hypotheses")
        for ob in self.trace_prefix + self.trace_cycle:
            if ob not in self.space.observations:
                raise InvalidStructure(f"trace mentions unknown observation {ob!r}")

    @cached_property
    def signature(self) -> Signature:
        return Signature.of_space(self.space)

    def observation(self, m: int) -> str | None:
        """The ``m``-th observation (1-based); None at time 0."""
        if m < 0:
            raise ValueError("time must be nonnegative")
        if m == 0:
            return None
        k = m - 1
        if k < len(self.trace_prefix):
            return self.trace_prefix[k]
        return self.trace_cycle[(k - len(self.trace_prefix)) % len(self.trace_cycle)]

    def history(self, m: int) -> tuple[str, ...]:
        return tuple(self.observation(k) for k in range(1, m + 1))

    @cached_property
    def _posteriors(self) -> dict[int, Distribution]:
        return {0: self.prior}

    def posterior(self, m: int) -> Distribution:
        if m not in self._posteriors:
            seq = self.history(m)
            self._posteriors[m] = dempster_combine(self.prior, sequence_weight_column(self.space, seq))
        return self._posteriors[m]


# -- evaluation -------------------------------------------------------------------------


class _WorldPoint:
    __slots__ = ("world",)

    def __init__(self, world: EvidentialWorld):
        self.world = world

    sig = property(lambda self: self.world.signature)
    hypothesis = property(lambda self: self.world.h)
    observation = property(lambda self: self.world.ob)

    def prior(self, hs):
        return self.world.prior.mass(hs)

    def posterior(self, hs):
        return self.world.posterior.mass(hs)

    def weight(self, seq, h):
        if len(seq) != 1:
            raise FragmentUnsupported("sequence weights need a run")
        return self.world.weight(seq[0], h)

    def next(self):
        raise FragmentUnsupported("the next-time operator needs a run")


class _RunPoint:
    __slots__ = ("run", "m")

    def __init__(self, run: EvidentialRun, m: int):
        self.run = run
        self.m = m

    sig = property(lambda self: self.run.signature)
    hypothesis = property(lambda self: self.run.h)
    observation = property(lambda self: self.run.observation(self.m))

    def prior(self, hs):
        return self.run.prior.mass(hs)

    def posterior(self, hs):
        return self.run.posterior(self.m).mass(hs)

    def weight(self, seq, h):
        return sequence_weight(self.run.space, seq, h)

    def next(self):
        return _RunPoint(self.run, self.m + 1)


def _factor_value(x, point, valuation: Valuation) -> Fraction:
    if isinstance(x, Var):
        try:
            return as_rational(valuation[x.name])
        except KeyError:
            raise UnboundVariable(f"variable {x.name!r} has no value") from None
    if isinstance(x, Prior):
        return point.prior(_intension(x.rho, point.sig))
    if isinstance(x, Posterior):
        return point.posterior(_intension(x.rho, point.sig))
    if isinstance(x, Weight):
        return point.weight(x.seq, x.h)
    raise TypeError(f"not a factor: {x!r}")


def _poly_value(poly, point, valuation: Valuation) -> Fraction:
    total = ZERO
    for m in poly:
        value = Fraction(m.coef)
        for x in m.factors:
            value *= _factor_value(x, point, valuation)
            if not value:
                break
        total += value
    return total


def _holds(f, point, valuation: Valuation, tol: Fraction, positive: bool = True) -> bool:
    if isinstance(f, HypAtom):
        return point.hypothesis == f.name
    if isinstance(f, ObsAtom):
        return point.observation == f.name
    if isinstance(f, Not):
        return not _holds(f.body, point, valuation, tol, not positive)
    if isinstance(f, And):
        return _holds(f.left, point, valuation, tol, positive) and _holds(
            f.right, point, valuation, tol, positive
        )
    if isinstance(f, Compare):
        lhs = _poly_value(f.poly, point, valuation)
        c = f.constant
        if not tol:
            if f.op is Op.GE:
                return lhs >= c
            if f.op is Op.GT:
                return lhs > c
            return lhs == c
        # with a tolerance, relax only the constraints that are closed in the
        # polarity at which they occur; open ones are checked exactly
        if f.op is Op.GE:
            return lhs >= c - tol if positive else lhs >= c
        if f.op is Op.GT:
            return lhs > c if positive else lhs > c + tol
        return abs(lhs - c) <= tol if positive else lhs == c
    if isinstance(f, Next):
        return _holds(f.body, point.next(), valuation, tol, positive)
    if isinstance(f, ForAll):
        raise QuantifierUnsupported("quantified formulas cannot be checked at a single structure")
    raise TypeError(f"not a formula: {f!r}")


def _tolerance(tol) -> Fraction:
    # a tolerance is a bound, not a model value, so a float is acceptable here
    return Fraction(tol) if isinstance(tol, float) else as_rational(tol)


def eval_term(poly, world: EvidentialWorld, valuation: Valuation | None = None) -> Fraction:
    """Exact value of a polynomial term (a tuple of monomials) at a world."""
    if isinstance(poly, Monomial):
        poly = (poly,)
    return _poly_value(poly, _WorldPoint(world), valuation or {})


def eval_term_at(poly, run: EvidentialRun, m: int, valuation: Valuation | None = None) -> Fraction:
    if isinstance(poly, Monomial):
        poly = (poly,)
    return _poly_value(poly, _RunPoint(run, m), valuation or {})


def satisfies(f, world: EvidentialWorld, valuation: Valuation | None = None, tolerance=0) -> bool:
    return _holds(f, _WorldPoint(world), valuation or {}, _tolerance(tolerance))


def satisfies_at(
    f, run: EvidentialRun, m: int, valuation: Valuation | None = None, tolerance=0
) -> bool:
    if m < 0:
        raise ValueError("time must be nonnegative")
    return _holds(f, _RunPoint(run, m), valuation or {}, _tolerance(tolerance))


# -- documents ------------------------------------------------------------------------------


def _load_space(doc: Mapping, base: Path | None) -> EvidenceSpace:
    if "space" in doc:
        return space_from_doc(doc["space"])
    if "space_file" in doc:
        import json

        path = Path(doc["space_file"])
        if base is not None and not path.is_absolute():
            path = base / path
        return space_from_doc(json.loads(path.read_text()))
    raise InvalidStructure("document needs an embedded 'space' or a 'space_file' reference")


def world_to_doc(world: EvidentialWorld) -> dict:
    doc = {
        "hypothesis": world.h,
        "observation": world.ob,
        "prior": distribution_to_doc(world.prior),
        "space": space_to_doc(world.space),
    }
    if world.weights != NORMALIZED:
        doc["weights"] = world.weights
    return doc


def world_from_doc(doc: Mapping, base: Path | None = None) -> EvidentialWorld:
    space = _load_space(doc, base)
    try:
        prior = Distribution.from_mapping(doc["prior"], space.hypotheses)
        return EvidentialWorld(
            doc["hypothesis"], doc["observation"], prior, space, doc.get("weights", NORMALIZED)
        )
    except KeyError as exc:
        raise InvalidStructure(f"world document lacks field {exc}") from None


def run_to_doc(run: EvidentialRun) -> dict:
    return {
        "hypothesis": run.h,
        "prior": distribution_to_doc(run.prior),
        "space": space_to_doc(run.space),
        "trace_prefix": list(run.trace_prefix),
        "trace_cycle": list(run.trace_cycle),
    }


def run_from_doc(doc: Mapping, base: Path | None = None) -> EvidentialRun:
    space = _load_space(doc, base)
    try:
        prior = Distribution.from_mapping(doc["prior"], space.hypotheses)
        return EvidentialRun(
            doc["hypothesis"], prior, space, doc.get("trace_prefix", ()), doc["trace_cycle"]
        )
    except KeyError as exc:
        raise InvalidStructure(f"run document lacks field {exc}") from None


# -- axiom audits -----------------------------------------------------------------------------


@dataclass(frozen=True)
class AuditEntry:
    axiom: str
    formula: object
    ok: bool
    time: int | None = None
    note: str = ""

    @property
    def text(self) -> str:
        if isinstance(self.formula, str):
            return self.formula
        return to_text(self.formula)


@dataclass(frozen=True)
class AuditReport:
    entries: tuple[AuditEntry, ...]

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    @property
    def failures(self) -> tuple[AuditEntry, ...]:
        return tuple(e for e in self.entries if not e.ok)

    def counts(self) -> dict[str, tuple[int, int]]:
        """axiom -> (instances, failures)."""
        out: dict[str, list[int]] = {}
        for e in self.entries:
            c = out.setdefault(e.axiom, [0, 0])
            c[0] += 1
            c[1] += not e.ok
        return {k: (v[0], v[1]) for k, v in out.items()}


STATIC_AXIOMS = (
    "H1", "H2", "O1", "O2",
    "Pr1", "Pr2", "Pr3", "Pr4",
    "Po1", "Po2", "Po3", "Po4",
    "E1", "E2", "E3", "E4",
)
UNNORMALIZED_AXIOMS = ("H1", "H2", "O1", "O2", "Pr1", "Pr2", "Pr3", "Pr4",
                       "Po1", "Po2", "Po3", "Po4", "E1'", "E2'", "E3")
DYNAMIC_AXIOMS = (
    "H1", "H2", "O1", "O2", "Po1", "Po2", "Po3", "Po4",
    "E1", "E2", "E4", "E5", "E6",
    "T1", "T2", "T3", "T4", "T5", "T6",
)


def _cmp(monomials: Iterable[tuple[int, tuple]], op: Op, c: int) -> Compare:
    return Compare(tuple(Monomial(k, fs) for k, fs in monomials), op, c)


def _big_or(parts: Sequence):
    out = parts[0]
    for p in parts[1:]:
        out = disj(out, p)
    return out


def _subset_formula(subset: Sequence[str], sig: Signature):
    if not subset:
        return Not(true_formula(sig))
    return _big_or([HypAtom(h) for h in subset])


def _prop_atoms(rho) -> set[str]:
    if isinstance(rho, HypAtom):
        return {rho.name}
    if isinstance(rho, Not):
        return _prop_atoms(rho.body)
    return _prop_atoms(rho.left) | _prop_atoms(rho.right)


def _prop_eval(rho, true_atoms: set[str]) -> bool:
    if isinstance(rho, HypAtom):
        return rho.name in true_atoms
    if isinstance(rho, Not):
        return not _prop_eval(rho.body, true_atoms)
    return _prop_eval(rho.left, true_atoms) and _prop_eval(rho.right, true_atoms)


def propositionally_equivalent(a, b) -> bool:
    """Truth-table check over all assignments to the atoms (not only one-hot ones)."""
    atoms = sorted(_prop_atoms(a) | _prop_atoms(b))
    for bits in itertools.product((False, True), repeat=len(atoms)):
        true_atoms = {x for x, bit in zip(atoms, bits) if bit}
        if _prop_eval(a, true_atoms) != _prop_eval(b, true_atoms):
            return False
    return True


def hypothesis_pool(sig: Signature, limit: int = 16) -> list:
    """Representative hypothesis formulas: one per subset when there are few subsets."""
    hs = sig.hypotheses
    if 2 ** len(hs) <= limit:
        subsets = [c for k in range(len(hs) + 1) for c in itertools.combinations(hs, k)]
    else:
        subsets = [()] + [(h,) for h in hs] + [tuple(x for x in hs if x != h) for h in hs]
        subsets += list(itertools.combinations(hs, 2))[: max(0, limit - len(subsets))]
        subsets.append(hs)
    return [_subset_formula(s, sig) for s in subsets]


def _equivalent_variants(rho) -> list:
    """Syntactically different formulas that are propositional tautological equivalents."""
    variants = [Not(Not(rho)), And(rho, rho), And(rho, disj(rho, Not(rho)))]
    if isinstance(rho, And):
        variants.append(And(rho.right, rho.left))
    if isinstance(rho, Not) and isinstance(rho.body, And):
        a, b = rho.body.left, rho.body.right
        variants.append(Not(And(b, a)))
    return [v for v in variants if propositionally_equivalent(rho, v)]


def _probability_instances(prefix: str, term, sig: Signature, pool_limit: int):
    """Instances of the four probability axioms for Pr0 (``term=Prior``) or Pr."""
    pool = hypothesis_pool(sig, pool_limit)
    yield f"{prefix}1", _cmp([(1, (term(true_formula(sig)),))], Op.EQ, 1)
    for rho in pool:
        yield f"{prefix}2", _cmp([(1, (term(rho),))], Op.GE, 0)
    for r1, r2 in itertools.product(pool, repeat=2):
        yield f"{prefix}3", _cmp(
            [(1, (term(And(r1, r2)),)), (1, (term(And(r1, Not(r2))),)), (-1, (term(r1),))],
            Op.EQ,
            0,
        )
    for rho in pool:
        for other in _equivalent_variants(rho):
            yield f"{prefix}4", _cmp([(1, (term(rho),)), (-1, (term(other),))], Op.EQ, 0)


def _hypothesis_observation_instances(sig: Signature):
    yield "H1", _big_or([HypAtom(h) for h in sig.hypotheses])
    for a, b in itertools.permutations(sig.hypotheses, 2):
        yield "H2", implies(HypAtom(a), Not(HypAtom(b)))
    yield "O1", _big_or([ObsAtom(o) for o in sig.observations])
    for a, b in itertools.permutations(sig.observations, 2):
        yield "O2", implies(ObsAtom(a), Not(ObsAtom(b)))


def _weight_instances(sig: Signature, unnormalized: bool = False):
    for ob in sig.observations:
        for h in sig.hypotheses:
            yield ("E1'" if unnormalized else "E1"), _cmp([(1, (Weight((ob,), h),))], Op.GE, 0)
    if unnormalized:
        for h in sig.hypotheses:
            yield "E2'", _cmp([(1, (Weight((o,), h),)) for o in sig.observations], Op.EQ, 1)
    else:
        for ob in sig.observations:
            yield "E2", _cmp([(1, (Weight((ob,), h),)) for h in sig.hypotheses], Op.EQ, 1)


def _update_instance(ob: str, h: str, sig: Signature):
    """ob => Pr0(h) w(ob,h) = sum_i Pr(h) Pr0(h_i) w(ob,h_i)."""
    lhs = [(1, _sorted((Prior(HypAtom(h)), Weight((ob,), h))))]
    rhs = [
        (-1, _sorted((Posterior(HypAtom(h)), Prior(HypAtom(hi)), Weight((ob,), hi))))
        for hi in sig.hypotheses
    ]
    return implies(ObsAtom(ob), _cmp(lhs + rhs, Op.EQ, 0))


def _sorted(factors) -> tuple:
    from .formula.printer import factor_text

    return tuple(sorted(factors, key=factor_text))


def _wf2_entry(space: EvidenceSpace, time=None) -> AuditEntry:
    cert = check_wf2(weight_table(space))
    note = "" if cert else f"no positive scalars ({cert.status})"
    return AuditEntry("E4", "exists x1..xn > 0 solving the weight equations", bool(cert), time, note)


def _audit_world(world: EvidentialWorld, which: set[str], pool_limit: int) -> list[AuditEntry]:
    sig = world.signature
    unnormalized = world.weights == UNNORMALIZED
    instances = list(_hypothesis_observation_instances(sig))
    instances += _probability_instances("Pr", Prior, sig, pool_limit)
    instances += _probability_instances("Po", Posterior, sig, pool_limit)
    instances += _weight_instances(sig, unnormalized)
    for ob in sig.observations:
        for h in sig.hypotheses:
            instances.append(("E3", _update_instance(ob, h, sig)))
    entries = [AuditEntry(name, f, satisfies(f, world)) for name, f in instances if name in which]
    if "E4" in which and not unnormalized:
        entries.append(_wf2_entry(world.space))
    return entries


def _run_formula_pool(run: EvidentialRun, horizon: int) -> list:
    """A small, deterministic set of formulas used to instantiate the temporal axioms."""
    sig = run.signature
    h0, ob0 = sig.hypotheses[0], sig.observations[0]
    p1 = run.posterior(1)[h0]
    thresholds = sorted({p1, run.prior[h0]})
    pool = [HypAtom(h0), ObsAtom(ob0)]
    for q in thresholds:
        pool.append(_cmp([(q.denominator, (Posterior(HypAtom(h0)),))], Op.GE, q.numerator))
    w = weight_of_evidence(run.space, ob0, h0)
    pool.append(_cmp([(w.denominator, (Weight((ob0,), h0),))], Op.EQ, w.numerator))
    pool.append(And(ObsAtom(ob0), pool[2]))
    pool.append(Not(pool[1]))
    return pool


def _audit_run(run: EvidentialRun, which: set[str], horizon: int) -> list[AuditEntry]:
    sig = run.signature
    space = run.space
    entries: list[AuditEntry] = []

    def record(name, f, m, valuation=None):
        if name in which:
            entries.append(AuditEntry(name, f, satisfies_at(f, run, m, valuation), m))

    pool = hypothesis_pool(sig, 8)
    static = list(_hypothesis_observation_instances(sig))
    static += _probability_instances("Po", Posterior, sig, 8)
    static += _weight_instances(sig)
    for m in range(horizon + 1):
        for name, f in static:
            # before the first observation no observation atom is true
            if name == "O1" and m == 0:
                continue
            record(name, f, m)
    if "E4" in which:
        entries.append(_wf2_entry(space))

    # E5: the update from time m to m+1 by the observation made at m+1
    x = Var("x")
    for m in range(horizon):
        for ob in sig.observations:
            for h in sig.hypotheses:
                body = implies(
                    Next(_cmp([(1, (Posterior(HypAtom(h)),)), (-1, (x,))], Op.EQ, 0)),
                    _cmp(
                        [(1, _sorted((Posterior(HypAtom(h)), Weight((ob,), h))))]
                        + [
                            (-1, _sorted((x, Posterior(HypAtom(hi)), Weight((ob,), hi))))
                            for hi in sig.hypotheses
                        ],
                        Op.EQ,
                        0,
                    ),
                )
                f = implies(Next(ObsAtom(ob)), body)
                # the universally quantified x only matters at the next posterior
                record("E5", f, m, {"x": run.posterior(m + 1)[h]})
                record("E5", f, m, {"x": run.posterior(m + 1)[h] + ONE})

    if "E6" in which:
        for k in range(2, horizon + 1):
            for seq in itertools.product(sig.observations, repeat=k):
                try:
                    sequence_weight_column(space, seq)
                except EvidenceError:
                    continue
                for h in sig.hypotheses:
                    lhs = [(1, _sorted(tuple(Weight((o,), h) for o in seq)))]
                    rhs = [
                        (-1, _sorted((Weight(tuple(seq), h),) + tuple(Weight((o,), hi) for o in seq)))
                        for hi in sig.hypotheses
                    ]
                    record("E6", _cmp(lhs + rhs, Op.EQ, 0), 0)

    formulas = _run_formula_pool(run, horizon)
    grid = [ZERO, Fraction(1, 3), ONE]
    for m in range(horizon):
        for phi, psi in itertools.product(formulas, repeat=2):
            record("T1", implies(conj(Next(phi), Next(implies(phi, psi))), Next(psi)), m)
        for phi in formulas:
            record("T2", iff(Next(Not(phi)), Not(Next(phi))), m)
        for rho in pool:
            record("T4", iff(Next(rho), rho), m)
        for ob in sig.observations:
            for h in sig.hypotheses:
                c = _cmp([(3, (Weight((ob,), h),)), (-1, (x,))], Op.GE, 1)
                for v in grid:
                    record("T5", iff(Next(c), c), m, {"x": v})
        if "T6" in which:
            # the valuation does not depend on time, so the next-time operator
            # commutes with the quantifier pointwise in x
            body = _cmp([(1, (Posterior(HypAtom(sig.hypotheses[0])),)), (-1, (x,))], Op.GE, 0)
            for v in grid:
                lhs = satisfies_at(Next(body), run, m, {"x": v})
                rhs = satisfies_at(body, run, m + 1, {"x": v})
                entries.append(AuditEntry("T6", Next(body), lhs == rhs, m, f"x = {v}"))
    if "T3" in which:
        # rule: a formula true at every audited point stays true one step later
        for phi in formulas + [disj(f, Not(f)) for f in formulas]:
            truths = [satisfies_at(phi, run, m) for m in range(horizon + 2)]
            if all(truths):
                ok = all(satisfies_at(Next(phi), run, m) for m in range(horizon + 1))
                entries.append(AuditEntry("T3", phi, ok, None, "premise valid on the horizon"))
    return entries


def audit_axioms(
    structure: EvidentialWorld | EvidentialRun,
    which: Iterable[str] | None = None,
    horizon: int | None = None,
    pool_limit: int = 16,
) -> AuditReport:
    """Check every instance of the selected axioms on ``structure``.

    Worlds default to the static axioms (or the unnormalized set for worlds
    reading weights as raw likelihoods); runs to the dynamic set and need a
    ``horizon``.
    """
    if isinstance(structure, EvidentialRun):
        if horizon is None:
            raise ValueError("run audits need a time horizon")
        chosen = set(DYNAMIC_AXIOMS if which is None else which)
        return AuditReport(tuple(_audit_run(structure, chosen, horizon)))
    default = UNNORMALIZED_AXIOMS if structure.weights == UNNORMALIZED else STATIC_AXIOMS
    chosen = set(default if which is None else which)
    return AuditReport(tuple(_audit_world(structure, chosen, pool_limit)))
