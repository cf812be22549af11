"""Random satisfiable instances built around a hidden world.

A hidden world is drawn first; every comparison of the generated formula is
then read off that world, so the formula is satisfiable by construction and
the hidden world is a witness.  Comparisons are either slack inequalities
(the true value sits strictly inside the allowed range) or exact
equalities.  Atom literals agree with the hidden hypothesis and observation.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from ..checker import EvidentialWorld, eval_term
from ..evidence import Distribution, EvidenceSpace
from ..formula.ast import Compare, HypAtom, Monomial, Not, ObsAtom, Op, Posterior, Prior, Signature, Weight, conj, disj
from ..formula.printer import factor_text


@dataclass(frozen=True)
class GeneratorConfig:
    max_hypotheses: int = 3
    max_observations: int = 3
    max_comparisons: int = 6
    equality_rate: float = 0.2
    polynomial_rate: float = 0.5
    probability_rate: float = 0.5
    atom_rate: float = 0.3
    disjunction_rate: float = 0.15
    max_weight: int = 4


@dataclass(frozen=True)
class Instance:
    formula: object
    signature: Signature
    world: EvidentialWorld
    polynomial: bool


def random_world(rng: random.Random, n_hyp: int, n_obs: int, max_weight: int = 4) -> EvidentialWorld:
    """Small rational space with a full-support prior and random true case."""
    hs = tuple(f"h{k + 1}" for k in range(n_hyp))
    os_ = tuple(f"ob{k + 1}" for k in range(n_obs))
    while True:
        rows = []
        for _ in hs:
            counts = [rng.randint(0, max_weight) for _ in os_]
            if not any(counts):
                counts[rng.randrange(n_obs)] = 1
            total = sum(counts)
            rows.append(tuple(Fraction(c, total) for c in counts))
        if all(any(r[j] for r in rows) for j in range(n_obs)):
            break
    space = EvidenceSpace(hs, os_, tuple(rows))
    counts = [rng.randint(1, max_weight) for _ in hs]
    prior = Distribution(hs, tuple(Fraction(c, sum(counts)) for c in counts))
    h = rng.choice(hs)
    # the observation must be possible under the prior so the posterior exists
    ob = rng.choice([o for o in os_ if space.likelihood(h, o) > 0])
    return EvidentialWorld(h, ob, prior, space)


def _random_factor(rng: random.Random, sig: Signature, with_probability: bool):
    if with_probability and rng.random() < 0.5:
        k = rng.randint(1, len(sig.hypotheses))
        hyps = rng.sample(sig.hypotheses, k)
        rho = HypAtom(hyps[0])
        for name in hyps[1:]:
            rho = disj(rho, HypAtom(name))
        return (Prior if rng.random() < 0.5 else Posterior)(rho)
    return Weight((rng.choice(sig.observations),), rng.choice(sig.hypotheses))


def _random_poly(rng: random.Random, sig: Signature, polynomial: bool, with_probability: bool):
    monos = []
    for _ in range(rng.randint(1, 3)):
        degree = rng.randint(1, 2) if polynomial else 1
        facs = tuple(sorted((_random_factor(rng, sig, with_probability) for _ in range(degree)), key=factor_text))
        coef = rng.choice([-3, -2, -1, 1, 1, 2, 3])
        monos.append(Monomial(coef, facs))
    merged: dict = {}
    for m in monos:
        merged[m.factors] = merged.get(m.factors, 0) + m.coef
    out = tuple(Monomial(c, f) for f, c in merged.items() if c)
    return tuple(sorted(out, key=lambda m: "*".join(factor_text(x) for x in m.factors)))


def _scaled(poly, denominator: int):
    return tuple(Monomial(m.coef * denominator, m.factors) for m in poly)


def _comparison(rng: random.Random, poly, value: Fraction, equality: bool):
    """A comparison true at ``value``; slack ones keep a visible margin."""
    if equality:
        d = value.denominator
        return Compare(_scaled(poly, d), Op.EQ, value.numerator)
    slack = Fraction(rng.randint(1, 10), rng.choice([10, 20, 50]))
    if rng.random() < 0.5:
        bound = value - slack
        op = Op.GE if rng.random() < 0.5 else Op.GT
        d = bound.denominator
        return Compare(_scaled(poly, d), op, bound.numerator)
    # value < bound, written as the negation of p >= bound
    bound = value + slack
    d = bound.denominator
    return Not(Compare(_scaled(poly, d), Op.GE, bound.numerator))


def random_instance(rng: random.Random, cfg: GeneratorConfig = GeneratorConfig()) -> Instance:
    n_hyp = rng.randint(2, cfg.max_hypotheses)
    n_obs = rng.randint(1, cfg.max_observations)
    world = random_world(rng, n_hyp, n_obs, cfg.max_weight)
    sig = world.signature
    polynomial = rng.random() < cfg.polynomial_rate
    with_probability = polynomial and rng.random() < cfg.probability_rate
    parts = []
    for _ in range(rng.randint(1, cfg.max_comparisons)):
        poly = _random_poly(rng, sig, polynomial, with_probability)
        if not poly:
            continue
        value = eval_term(poly, world)
        parts.append(_comparison(rng, poly, value, rng.random() < cfg.equality_rate))
    if not parts:
        parts.append(Compare((Monomial(1, (Weight((sig.observations[0],), sig.hypotheses[0]),)),), Op.GE, 0))
    if rng.random() < cfg.atom_rate:
        parts.append(HypAtom(world.h) if rng.random() < 0.5 else ObsAtom(world.ob))
    if rng.random() < cfg.disjunction_rate and len(parts) > 1:
        # weaken one conjunct with a disjunct that the hidden world refutes
        k = rng.randrange(len(parts))
        others = [h for h in sig.hypotheses if h != world.h]
        if others:
            parts[k] = disj(parts[k], HypAtom(rng.choice(others)))
    return Instance(conj(*parts), sig, world, polynomial)


def corpus(seed: int, count: int, cfg: GeneratorConfig = GeneratorConfig()) -> list[Instance]:
    rng = random.Random(seed)
    return [random_instance(rng, cfg) for _ in range(count)]


def coefficient_bits(instance: Instance) -> int:
    """Bit length of the largest integer constant; a rough hardness gauge."""
    from ..formula.analysis import subformulas

    big = 1
    for g in subformulas(instance.formula):
        if isinstance(g, Compare):
            big = max([big, abs(g.constant)] + [abs(m.coef) for m in g.poly])
    return int(math.log2(big)) + 1


def _weight_row(sig: Signature, ob: str):
    return tuple(Monomial(1, (Weight((ob,), h),)) for h in sig.hypotheses)


def _posterior_row(sig: Signature):
    return tuple(Monomial(1, (Posterior(HypAtom(h)),)) for h in sig.hypotheses)


def unsat_instance(rng: random.Random, cfg: GeneratorConfig = GeneratorConfig()) -> Instance:
    """A formula with no model: a satisfiable core plus one refuting conjunct.

    The refutation is one of: a weight row summing to something other than
    one, a posterior row doing the same, a weight above one, or a polynomial
    bounded on both sides by an empty range.  ``world`` is the hidden world
    of the core, which the refuting conjunct falsifies.
    """
    core = random_instance(rng, cfg)
    sig, world = core.signature, core.world
    kind = rng.randrange(4)
    if kind == 0:
        ob = rng.choice(sig.observations)
        total = rng.choice([Fraction(1, 2), Fraction(3, 4), Fraction(5, 4), Fraction(2)])
        bad = Compare(_scaled(_weight_row(sig, ob), total.denominator), Op.EQ, total.numerator)
    elif kind == 1:
        bad = Compare(_posterior_row(sig), Op.GE, 2)
    elif kind == 2:
        w = Weight((rng.choice(sig.observations),), rng.choice(sig.hypotheses))
        bad = Compare((Monomial(1, (w,)),), Op.GT, 1)
    else:
        poly = _random_poly(rng, sig, core.polynomial, core.polynomial)
        if not poly:
            poly = _weight_row(sig, sig.observations[0])
        c = rng.randint(-3, 3)
        bad = conj(Compare(poly, Op.GE, c), Not(Compare(poly, Op.GE, c)))
    return Instance(conj(core.formula, bad), sig, world, core.polynomial)


def unsat_corpus(seed: int, count: int, cfg: GeneratorConfig = GeneratorConfig()) -> list[Instance]:
    rng = random.Random(seed)
    return [unsat_instance(rng, cfg) for _ in range(count)]
