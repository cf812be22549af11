"""Translate evidence-logic formulas into sentences of real arithmetic.

The static translation describes one evidential world with real variables:

* ``u_i`` is 1 exactly for the true hypothesis and ``v_i`` exactly for the
  observation made,
* ``x_i`` and ``y_i`` are the prior and posterior of hypothesis ``i``,
* ``z_i_j`` is the weight of observation ``i`` for hypothesis ``j``, and
  ``s_i`` are the positive scalars certifying that ``z`` is a weight table.

The dynamic translation describes a point of an evidential run together with
the next ``horizon`` time steps.  Time 0 is the evaluated point; ``v0_i`` is
all zero when that point is the start of the run and one-hot otherwise, in
which case ``q_j`` is the distribution just before the point.  ``yn_j`` is
the probability of hypothesis ``j`` at time ``n`` and ``z_i1.i2_j`` the
weight of a sequence of observations.

Assertions carry the name of the constraint family they belong to, and
``emit`` renders the problem as SMT-LIB 2 text for nonlinear real
arithmetic solvers.  Integer constants are written in binary form with
only the numerals 0 and 1, so a constant ``k`` costs ``O(log k)`` symbols.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .checker import EvidentialRun, EvidentialWorld
from .errors import DecodeInconsistent, EvidenceError, FragmentUnsupported, QuantifierUnsupported
from .evidence import Distribution, EvidenceSpace, as_rational
from .formula.analysis import intension
from .formula.ast import (
    And,
    Compare,
    ForAll,
    HypAtom,
    Next,
    Not,
    ObsAtom,
    Posterior,
    Prior,
    Signature,
    Var,
    Weight,
)

# -- expressions --------------------------------------------------------------------------
#
# Terms:    ("num", k) ("var", name) ("add", terms) ("mul", terms) ("neg", term)
# Formulas: ("cmp", op, lhs, rhs) ("and", parts) ("or", parts) ("not", f)
#           ("implies", a, b) ("forall", name, f)


def num(k: int):
    return ("num", int(k))


def var(name: str):
    return ("var", name)


def add(terms: Sequence):
    terms = tuple(terms)
    if not terms:
        return num(0)
    return terms[0] if len(terms) == 1 else ("add", terms)


def mul(terms: Sequence):
    terms = tuple(terms)
    if not terms:
        return num(1)
    return terms[0] if len(terms) == 1 else ("mul", terms)


def cmp(op: str, lhs, rhs):
    return ("cmp", op, lhs, rhs)


def conj(parts: Iterable):
    parts = tuple(parts)
    return parts[0] if len(parts) == 1 else ("and", parts)


def disj(parts: Iterable):
    parts = tuple(parts)
    return parts[0] if len(parts) == 1 else ("or", parts)


def eval_term(t, env: Mapping[str, Fraction]) -> Fraction:
    tag = t[0]
    if tag == "num":
        return Fraction(t[1])
    if tag == "var":
        return env[t[1]]
    if tag == "add":
        return sum((eval_term(a, env) for a in t[1]), Fraction(0))
    if tag == "mul":
        out = Fraction(1)
        for a in t[1]:
            out *= eval_term(a, env)
        return out
    if tag == "neg":
        return -eval_term(t[1], env)
    raise ValueError(f"unknown term {t!r}")


def eval_formula(f, env: Mapping[str, Fraction]) -> bool:
    """Exact truth value; universal quantifiers cannot be evaluated."""
    tag = f[0]
    if tag == "cmp":
        a, b = eval_term(f[2], env), eval_term(f[3], env)
        return a == b if f[1] == "=" else (a >= b if f[1] == ">=" else a > b)
    if tag == "and":
        return all(eval_formula(p, env) for p in f[1])
    if tag == "or":
        return any(eval_formula(p, env) for p in f[1])
    if tag == "not":
        return not eval_formula(f[1], env)
    if tag == "implies":
        return (not eval_formula(f[1], env)) or eval_formula(f[2], env)
    if tag == "forall":
        raise QuantifierUnsupported("cannot evaluate a universal quantifier by substitution")
    raise ValueError(f"unknown formula {f!r}")


def _has_forall(f) -> bool:
    tag = f[0]
    if tag == "forall":
        return True
    if tag in ("and", "or"):
        return any(_has_forall(p) for p in f[1])
    if tag == "not":
        return _has_forall(f[1])
    if tag == "implies":
        return _has_forall(f[1]) or _has_forall(f[2])
    return False


# -- SMT-LIB rendering -----------------------------------------------------------------------


def binary_numeral(k: int) -> str:
    """``k >= 0`` as a term over 0 and 1 of size logarithmic in ``k``.

    Even numbers become ``(* (+ 1 1) half)`` and odd ones ``(+ 1 rest)``.
    """
    if k < 0:
        raise ValueError("binary_numeral takes a nonnegative integer")
    if k <= 1:
        return str(k)
    # Horner's scheme over the bits, most significant first; a loop keeps
    # constants with thousands of bits clear of the recursion limit
    text = "1"
    for bit in bin(k)[3:]:
        text = "(+ 1 1)" if text == "1" else f"(* (+ 1 1) {text})"
        if bit == "1":
            text = f"(+ 1 {text})"
    return text


def _render_term(t, binary: bool) -> str:
    tag = t[0]
    if tag == "num":
        k = t[1]
        text = binary_numeral(abs(k)) if binary else str(abs(k))
        return f"(- {text})" if k < 0 else text
    if tag == "var":
        return t[1]
    if tag == "neg":
        return f"(- {_render_term(t[1], binary)})"
    op = "+" if tag == "add" else "*"
    return f"({op} " + " ".join(_render_term(a, binary) for a in t[1]) + ")"


def _render(f, binary: bool) -> str:
    tag = f[0]
    if tag == "cmp":
        return f"({f[1]} {_render_term(f[2], binary)} {_render_term(f[3], binary)})"
    if tag in ("and", "or"):
        return f"({tag} " + " ".join(_render(p, binary) for p in f[1]) + ")"
    if tag == "not":
        return f"(not {_render(f[1], binary)})"
    if tag == "implies":
        return f"(=> {_render(f[1], binary)} {_render(f[2], binary)})"
    if tag == "forall":
        return f"(forall (({f[1]} Real)) {_render(f[2], binary)})"
    raise ValueError(f"unknown formula {f!r}")


# -- problems ----------------------------------------------------------------------------------


@dataclass(frozen=True)
class Assertion:
    family: str
    formula: tuple
    note: str = ""

    @property
    def quantified(self) -> bool:
        return _has_forall(self.formula)


@dataclass
class RcfProblem:
    """Declared real variables, assertions and what each variable stands for."""

    signature: Signature
    mode: str
    variables: list[str] = field(default_factory=list)
    meanings: dict[str, str] = field(default_factory=dict)
    assertions: list[Assertion] = field(default_factory=list)
    horizon: int = 0
    sequences: tuple[tuple[str, ...], ...] = ()

    def declare(self, name: str, meaning: str) -> str:
        if name in self.meanings:
            raise ValueError(f"variable {name} declared twice")
        self.variables.append(name)
        self.meanings[name] = meaning
        return name

    def assert_(self, family: str, formula, note: str = "") -> None:
        self.assertions.append(Assertion(family, formula, note))

    @property
    def provenance(self) -> dict[int, str]:
        return {k: a.family for k, a in enumerate(self.assertions)}

    @property
    def families(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(a.family for a in self.assertions))

    def first_violation(self, assignment: Mapping[str, Fraction]) -> Assertion | None:
        """The first assertion false under ``assignment``; quantified ones are skipped."""
        for a in self.assertions:
            if a.quantified:
                continue
            if not eval_formula(a.formula, assignment):
                return a
        return None

    def holds(self, assignment: Mapping[str, Fraction]) -> bool:
        return self.first_violation(assignment) is None


def _hyp_var(sig: Signature, h: str) -> str:
    return f"u_{sig.hypotheses.index(h) + 1}"


def _one_hot(names: Sequence[str], allow_zero: bool = False):
    parts = [disj([cmp("=", var(n), num(0)), cmp("=", var(n), num(1))]) for n in names]
    total = add([var(n) for n in names])
    if allow_zero:
        parts.append(disj([cmp("=", total, num(0)), cmp("=", total, num(1))]))
    else:
        parts.append(cmp("=", total, num(1)))
    return conj(parts)


def _simplex(names: Sequence[str]):
    return conj([cmp(">=", var(n), num(0)) for n in names] + [cmp("=", add([var(n) for n in names]), num(1))])


def _update(before: Sequence[str], after: Sequence[str], weights: Sequence[str]):
    """``before_j * w_j = after_j * sum_k before_k * w_k`` for every ``j``."""
    normalizer = [mul([var(b), var(w)]) for b, w in zip(before, weights)]
    return conj(
        [
            cmp("=", mul([var(b), var(w)]), add([mul([var(a), n]) for n in normalizer]))
            for b, a, w in zip(before, after, weights)
        ]
    )


def _positive_normalizer(before: Sequence[str], weights: Sequence[str]):
    return cmp(">", add([mul([var(b), var(w)]) for b, w in zip(before, weights)]), num(0))


def _user_var(name: str) -> str:
    return f"|fv_{name}|"


class _Translator:
    """Shared formula translation; subclasses decide what each factor means."""

    def __init__(self, problem: RcfProblem):
        self.p = problem
        self.sig = problem.signature
        self.bound: list[str] = []

    def factor(self, fac, time: int):
        raise NotImplementedError

    def observation(self, name: str, time: int):
        raise NotImplementedError

    def term(self, poly, time: int):
        out = []
        for m in poly:
            parts = [self.factor(f, time) for f in m.factors]
            if m.coef == -1 and parts:
                out.append(("neg", mul(parts)))
            elif m.coef == 1 and parts:
                out.append(mul(parts))
            else:
                out.append(mul([num(m.coef)] + parts))
        return add(out)

    def formula(self, f, time: int = 0):
        if isinstance(f, HypAtom):
            return cmp("=", var(_hyp_var(self.sig, f.name)), num(1))
        if isinstance(f, ObsAtom):
            return self.observation(f.name, time)
        if isinstance(f, Not):
            return ("not", self.formula(f.body, time))
        if isinstance(f, And):
            return ("and", (self.formula(f.left, time), self.formula(f.right, time)))
        if isinstance(f, Compare):
            return cmp(f.op.value, self.term(f.poly, time), num(f.constant))
        if isinstance(f, ForAll):
            self.bound.append(f.var)
            try:
                return ("forall", _user_var(f.var), self.formula(f.body, time))
            finally:
                self.bound.pop()
        if isinstance(f, Next):
            return self.next(f.body, time)
        raise TypeError(f"not a formula: {f!r}")

    def next(self, body, time: int):
        raise FragmentUnsupported("the next-time operator needs translate_dynamic")

    def variable(self, name: str):
        if name not in self.bound:
            full = _user_var(name)
            if full not in self.p.meanings:
                self.p.declare(full, f"free variable {name}")
        return var(_user_var(name))


def _indices(sig: Signature, rho) -> list[int]:
    hs = intension(rho, sig)
    return [i for i, h in enumerate(sig.hypotheses) if h in hs]


class _StaticTranslator(_Translator):
    def __init__(self, problem: RcfProblem):
        super().__init__(problem)
        self.uses_posterior = False

    def observation(self, name, time):
        return cmp("=", var(f"v_{self.sig.observations.index(name) + 1}"), num(1))

    def factor(self, fac, time):
        if isinstance(fac, Prior):
            return add([var(f"x_{i + 1}") for i in _indices(self.sig, fac.rho)])
        if isinstance(fac, Posterior):
            self.uses_posterior = True
            return add([var(f"y_{i + 1}") for i in _indices(self.sig, fac.rho)])
        if isinstance(fac, Weight):
            if len(fac.seq) != 1:
                raise FragmentUnsupported("sequence weights need translate_dynamic")
            i = self.sig.observations.index(fac.seq[0]) + 1
            j = self.sig.hypotheses.index(fac.h) + 1
            return var(f"z_{i}_{j}")
        if isinstance(fac, Var):
            return self.variable(fac.name)
        raise TypeError(f"not a factor: {fac!r}")


def _weight_block(p: RcfProblem, sig: Signature, zname) -> None:
    """Row simplices for single-observation weights and the scalar certificate."""
    hs, os_ = range(1, len(sig.hypotheses) + 1), range(1, len(sig.observations) + 1)
    for i in os_:
        p.assert_("phi_w,p", _simplex([zname(i, j) for j in hs]), sig.observations[i - 1])
    for i in os_:
        p.assert_("phi_w,f", cmp(">", var(f"s_{i}"), num(0)))
    for j in hs:
        col = add([mul([var(zname(i, j)), var(f"s_{i}")]) for i in os_])
        p.assert_("phi_w,f", cmp("=", col, num(1)), sig.hypotheses[j - 1])


def translate_static(f, sig: Signature) -> RcfProblem:
    """Existential real-arithmetic problem satisfiable iff ``f`` holds at some world over ``sig``."""
    p = RcfProblem(sig, "static")
    nh, no = len(sig.hypotheses), len(sig.observations)
    hs, os_ = range(1, nh + 1), range(1, no + 1)
    for j in hs:
        p.declare(f"u_{j}", f"hypothesis {sig.hypotheses[j - 1]} is true")
    for i in os_:
        p.declare(f"v_{i}", f"observation {sig.observations[i - 1]} was made")
    for j in hs:
        p.declare(f"x_{j}", f"Pr0({sig.hypotheses[j - 1]})")
    for j in hs:
        p.declare(f"y_{j}", f"Pr({sig.hypotheses[j - 1]})")
    for i in os_:
        for j in hs:
            p.declare(f"z_{i}_{j}", f"w({sig.observations[i - 1]}, {sig.hypotheses[j - 1]})")
    for i in os_:
        p.declare(f"s_{i}", f"scalar for {sig.observations[i - 1]}")

    tr = _StaticTranslator(p)
    body = tr.formula(f)

    p.assert_("phi_h", _one_hot([f"u_{j}" for j in hs]))
    p.assert_("phi_o", _one_hot([f"v_{i}" for i in os_]))
    p.assert_("phi_pr", _simplex([f"x_{j}" for j in hs]))
    p.assert_("phi_po", _simplex([f"y_{j}" for j in hs]))
    _weight_block(p, sig, lambda i, j: f"z_{i}_{j}")
    xs, ys = [f"x_{j}" for j in hs], [f"y_{j}" for j in hs]
    for i in os_:
        zs = [f"z_{i}_{j}" for j in hs]
        guard = cmp("=", var(f"v_{i}"), num(1))
        p.assert_("phi_w,up", ("implies", guard, _update(xs, ys, zs)), sig.observations[i - 1])
        if tr.uses_posterior:
            p.assert_("phi_w,nz", ("implies", guard, _positive_normalizer(xs, zs)), sig.observations[i - 1])
    p.assert_("phi_hat", body)
    return p


# -- dynamic translation ----------------------------------------------------------------------


def _mentions_posterior(poly) -> bool:
    return any(isinstance(fac, Posterior) for m in poly for fac in m.factors)


def push_next(f, shift: int = 0):
    """Push every next-time operator down to observation atoms and Pr comparisons.

    Returns a formula in which ``Next`` only wraps observation atoms or
    comparisons mentioning ``Pr``.  Hypothesis atoms and Pr-free comparisons
    do not change over time, so shifts around them disappear.
    """
    if isinstance(f, Next):
        return push_next(f.body, shift + 1)
    if isinstance(f, HypAtom):
        return f
    if isinstance(f, ObsAtom) or (isinstance(f, Compare) and _mentions_posterior(f.poly)):
        for _ in range(shift):
            f = Next(f)
        return f
    if isinstance(f, Compare):
        return f
    if isinstance(f, Not):
        return Not(push_next(f.body, shift))
    if isinstance(f, And):
        return And(push_next(f.left, shift), push_next(f.right, shift))
    if isinstance(f, ForAll):
        return ForAll(f.var, push_next(f.body, shift))
    raise TypeError(f"not a formula: {f!r}")


def required_horizon(f) -> int:
    """Largest time offset an atom is read at, after pushing next-time operators down."""

    def walk(g, shift):
        if isinstance(g, Next):
            return walk(g.body, shift + 1)
        if isinstance(g, ObsAtom) or (isinstance(g, Compare) and _mentions_posterior(g.poly)):
            return shift
        if isinstance(g, Not):
            return walk(g.body, shift)
        if isinstance(g, And):
            return max(walk(g.left, shift), walk(g.right, shift))
        if isinstance(g, ForAll):
            return walk(g.body, shift)
        return 0

    return walk(f, 0)


def _seq_key(sig: Signature, seq: Sequence[str]) -> str:
    return ".".join(str(sig.observations.index(o) + 1) for o in seq)


def _zdyn(sig: Signature, seq: Sequence[str], h: str) -> str:
    return f"z_{_seq_key(sig, seq)}_{sig.hypotheses.index(h) + 1}"


class _DynamicTranslator(_Translator):
    def __init__(self, problem: RcfProblem):
        super().__init__(problem)
        self.sequences: dict[tuple[str, ...], None] = {}

    def observation(self, name, time):
        return cmp("=", var(f"v{time}_{self.sig.observations.index(name) + 1}"), num(1))

    def next(self, body, time):
        return self.formula(body, time + 1)

    def factor(self, fac, time):
        if isinstance(fac, Posterior):
            return add([var(f"y{time}_{i + 1}") for i in _indices(self.sig, fac.rho)])
        if isinstance(fac, Prior):
            raise FragmentUnsupported("Pr0 is not part of the dynamic language")
        if isinstance(fac, Weight):
            self.sequences[tuple(fac.seq)] = None
            return var(_zdyn(self.sig, fac.seq, fac.h))
        if isinstance(fac, Var):
            return self.variable(fac.name)
        raise TypeError(f"not a factor: {fac!r}")


def translate_dynamic(f, sig: Signature, horizon: int, full_sequences: bool = False) -> RcfProblem:
    """Real-arithmetic problem satisfiable iff ``f`` holds at some point of some run over ``sig``.

    ``horizon`` must cover the deepest time offset of ``f``.  Only the
    sequences that occur in ``f`` (and their prefixes) get sequence-weight
    constraints unless ``full_sequences`` asks for every sequence of length
    at most ``horizon``.
    """
    need = required_horizon(f)
    if horizon < need:
        raise FragmentUnsupported(f"horizon {horizon} is below the formula's next-time depth {need}")
    normal = push_next(f)
    p = RcfProblem(sig, "dynamic", horizon=horizon)
    nh, no = len(sig.hypotheses), len(sig.observations)
    hs, os_ = range(1, nh + 1), range(1, no + 1)
    for j in hs:
        p.declare(f"u_{j}", f"hypothesis {sig.hypotheses[j - 1]} is true")
    for n in range(horizon + 1):
        for i in os_:
            p.declare(f"v{n}_{i}", f"observation {sig.observations[i - 1]} at time {n}")
    for j in hs:
        p.declare(f"q_{j}", f"Pr({sig.hypotheses[j - 1]}) just before time 0")
    for n in range(horizon + 1):
        for j in hs:
            p.declare(f"y{n}_{j}", f"Pr({sig.hypotheses[j - 1]}) at time {n}")

    tr = _DynamicTranslator(p)
    body = tr.formula(normal)

    seqs: dict[tuple[str, ...], None] = {}
    if full_sequences:
        for k in range(2, max(horizon, 1) + 1):
            for seq in itertools.product(sig.observations, repeat=k):
                seqs[seq] = None
    for seq in tr.sequences:
        for k in range(2, len(seq) + 1):
            seqs[tuple(seq[:k])] = None
    ordered = sorted(seqs, key=lambda s: (len(s), [sig.observations.index(o) for o in s]))
    p.sequences = tuple(ordered)

    def single(i, j):
        return f"z_{i}_{j}"

    for i in os_:
        for j in hs:
            p.declare(single(i, j), f"w({sig.observations[i - 1]}, {sig.hypotheses[j - 1]})")
    for seq in ordered:
        for h in sig.hypotheses:
            p.declare(_zdyn(sig, seq, h), f"w([{', '.join(seq)}], {h})")
    for i in os_:
        p.declare(f"s_{i}", f"scalar for {sig.observations[i - 1]}")

    p.assert_("phi_h", _one_hot([f"u_{j}" for j in hs]))
    p.assert_("phi_o^0", _one_hot([f"v0_{i}" for i in os_], allow_zero=True))
    for n in range(1, horizon + 1):
        p.assert_(f"phi_o^{n}", _one_hot([f"v{n}_{i}" for i in os_]))
    p.assert_("phi_p^pre", _simplex([f"q_{j}" for j in hs]))
    for n in range(horizon + 1):
        p.assert_(f"phi_p^{n}", _simplex([f"y{n}_{j}" for j in hs]))
    _weight_block(p, sig, single)
    for n in range(horizon + 1):
        before = [f"q_{j}" for j in hs] if n == 0 else [f"y{n - 1}_{j}" for j in hs]
        after = [f"y{n}_{j}" for j in hs]
        for i in os_:
            zs = [single(i, j) for j in hs]
            guard = cmp("=", var(f"v{n}_{i}"), num(1))
            step = conj([_update(before, after, zs), _positive_normalizer(before, zs)])
            p.assert_(f"phi_w,up^{n}", ("implies", guard, step), sig.observations[i - 1])
    for seq in ordered:
        idx = [sig.observations.index(o) + 1 for o in seq]
        prods = {j: mul([var(single(i, j)) for i in idx]) for j in hs}
        for j, h in zip(hs, sig.hypotheses):
            zseq = var(_zdyn(sig, seq, h))
            rhs = add([mul([zseq, prods[k]]) for k in hs])
            p.assert_("phi_w,c", cmp("=", prods[j], rhs), f"[{', '.join(seq)}] {h}")
    p.assert_("phi_hat", body)
    return p


# -- emission ------------------------------------------------------------------------------


def emit(p: RcfProblem, check_sat: bool = True, binary_constants: bool = True) -> str:
    """SMT-LIB 2 text, one assertion per line with its family as a comment."""
    lines = ["; real-arithmetic encoding of an evidence-logic formula", f"; mode: {p.mode}"]
    lines.append("; hypotheses: " + ", ".join(f"{k + 1}={h}" for k, h in enumerate(p.signature.hypotheses)))
    lines.append("; observations: " + ", ".join(f"{k + 1}={o}" for k, o in enumerate(p.signature.observations)))
    if p.mode == "dynamic":
        lines.append(f"; horizon: {p.horizon}")
    lines.append("(set-logic NRA)" if not any(a.quantified for a in p.assertions) else "(set-logic ALL)")
    for v in p.variables:
        lines.append(f"(declare-fun {v} () Real) ; {p.meanings[v]}")
    for a in p.assertions:
        note = f" {a.note}" if a.note else ""
        flag = " [quantified]" if a.quantified else ""
        lines.append(f"; {a.family}{note}{flag}")
        lines.append(f"(assert {_render(a.formula, binary_constants)})")
    if check_sat:
        lines.append("(check-sat)")
        lines.append("(get-model)")
    return "\n".join(lines) + "\n"


# -- encoding structures as assignments -------------------------------------------------------


def _one_hot_values(prefix: str, names: Sequence[str], chosen: str | None) -> dict[str, Fraction]:
    return {f"{prefix}{k + 1}": Fraction(int(n == chosen)) for k, n in enumerate(names)}


def encode_world(world: EvidentialWorld, p: RcfProblem, valuation: Mapping[str, object] | None = None):
    """Assignment of ``p``'s variables describing ``world``.

    The posterior is included only when it is defined; free formula variables
    take their values from ``valuation``.
    """
    sig, space = p.signature, world.space
    if tuple(space.hypotheses) != sig.hypotheses or tuple(space.observations) != sig.observations:
        raise EvidenceError("the world's space does not match the problem's signature")
    env = _one_hot_values("u_", sig.hypotheses, world.h)
    env.update(_one_hot_values("v_", sig.observations, world.ob))
    for j, h in enumerate(sig.hypotheses, 1):
        env[f"x_{j}"] = world.prior[h]
    try:
        post = world.posterior
    except EvidenceError:
        post = world.prior
    for j, h in enumerate(sig.hypotheses, 1):
        env[f"y_{j}"] = post[h]
    _encode_weights(env, space, sig)
    _encode_free(env, p, valuation)
    return env


def _encode_weights(env: dict, space: EvidenceSpace, sig: Signature) -> None:
    from .evidence import weight_of_evidence

    for i, o in enumerate(sig.observations, 1):
        env[f"s_{i}"] = sum(space.likelihood(h, o) for h in sig.hypotheses)
        for j, h in enumerate(sig.hypotheses, 1):
            env[f"z_{i}_{j}"] = weight_of_evidence(space, o, h)


def _encode_free(env: dict, p: RcfProblem, valuation) -> None:
    for v, meaning in p.meanings.items():
        if meaning.startswith("free variable "):
            name = meaning[len("free variable ") :]
            if valuation is None or name not in valuation:
                raise EvidenceError(f"no value for free variable {name}")
            env[v] = as_rational(valuation[name])


def encode_run(run: EvidentialRun, m: int, p: RcfProblem, valuation: Mapping[str, object] | None = None):
    """Assignment of a dynamic problem describing point ``m`` of ``run``."""
    from .evidence import sequence_weight

    sig, space = p.signature, run.space
    if tuple(space.hypotheses) != sig.hypotheses or tuple(space.observations) != sig.observations:
        raise EvidenceError("the run's space does not match the problem's signature")
    env = _one_hot_values("u_", sig.hypotheses, run.h)
    for n in range(p.horizon + 1):
        ob = run.observation(m + n) if m + n > 0 else None
        env.update(_one_hot_values(f"v{n}_", sig.observations, ob))
        for j, h in enumerate(sig.hypotheses, 1):
            env[f"y{n}_{j}"] = run.posterior(m + n)[h]
    before = run.posterior(m - 1) if m > 0 else run.prior
    for j, h in enumerate(sig.hypotheses, 1):
        env[f"q_{j}"] = before[h]
    _encode_weights(env, space, sig)
    for seq in p.sequences:
        for h in sig.hypotheses:
            env[_zdyn(sig, seq, h)] = sequence_weight(space, seq, h)
    _encode_free(env, p, valuation)
    return env


# -- witnesses ----------------------------------------------------------------------------------


_NUMBER = re.compile(r"^[+-]?\d+(\.\d+)?$")


def _sexp_tokens(text: str) -> list[str]:
    text = re.sub(r";[^\n]*", " ", text)
    return re.findall(r"\(|\)|\|[^|]*\||[^\s()]+", text)


def _sexp_parse(tokens: list[str]):
    stack: list[list] = [[]]
    for tok in tokens:
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise ValueError("unbalanced parentheses in model text")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise ValueError("unbalanced parentheses in model text")
    return stack[0]


def _sexp_value(e) -> Fraction:
    if isinstance(e, str):
        if not _NUMBER.match(e):
            raise ValueError(f"not a rational value: {e}")
        return Fraction(e)
    head, *args = e
    vals = [_sexp_value(a) for a in args]
    if head == "-":
        return -vals[0] if len(vals) == 1 else vals[0] - sum(vals[1:])
    if head == "+":
        return sum(vals, Fraction(0))
    if head == "*":
        out = Fraction(1)
        for v in vals:
            out *= v
        return out
    if head == "/":
        out = vals[0]
        for v in vals[1:]:
            out /= v
        return out
    raise ValueError(f"unsupported value form ({head} ...); only rational models can be decoded")


def parse_assignment(text: str) -> dict[str, Fraction]:
    """Read ``(define-fun name () Real value)`` model text or ``name = p/q`` lines."""
    if "define-fun" in text:
        out = {}

        def walk(items):
            for it in items:
                if isinstance(it, list):
                    if it and it[0] == "define-fun":
                        if len(it) != 5:
                            raise ValueError(f"malformed definition {it!r}")
                        out[it[1]] = _sexp_value(it[4])
                    else:
                        walk(it)

        walk(_sexp_parse(_sexp_tokens(text)))
        return out
    out = {}
    for k, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {k}: expected 'name = value'")
        name, value = (s.strip() for s in line.split("=", 1))
        try:
            out[name] = Fraction(value)
        except ValueError:
            raise ValueError(f"line {k}: {value!r} is not a rational number") from None
    return out


def _chosen(env, prefix: str, names: Sequence[str], allow_none: bool = False) -> str | None:
    hits = [n for k, n in enumerate(names) if env[f"{prefix}{k + 1}"] == 1]
    if len(hits) == 1:
        return hits[0]
    if allow_none and not hits:
        return None
    raise DecodeInconsistent(f"indicators {prefix}* do not pick exactly one name", None)


def decode_witness(p: RcfProblem, assignment: Mapping[str, object]):
    """Turn a satisfying assignment back into a structure.

    Static problems give an ``EvidentialWorld``.  Dynamic problems give
    ``(run, m)`` where ``m`` is the evaluated point; the run's observations
    after the horizon repeat one observation the true hypothesis can produce.
    """
    env = {}
    for v in p.variables:
        if v not in assignment:
            raise DecodeInconsistent(f"no value for variable {v}", None)
        env[v] = as_rational(assignment[v])
    bad = p.first_violation(env)
    if bad is not None:
        raise DecodeInconsistent(f"assertion of family {bad.family} is false", bad)
    sig = p.signature
    hs, os_ = sig.hypotheses, sig.observations
    table = tuple(
        tuple(env[f"z_{i}_{j}"] * env[f"s_{i}"] for i in range(1, len(os_) + 1))
        for j in range(1, len(hs) + 1)
    )
    space = EvidenceSpace(hs, os_, table)
    h = _chosen(env, "u_", hs)
    if p.mode == "static":
        ob = _chosen(env, "v_", os_)
        prior = Distribution(hs, tuple(env[f"x_{j}"] for j in range(1, len(hs) + 1)))
        return EvidentialWorld(h, ob, prior, space)
    first = _chosen(env, "v0_", os_, allow_none=True)
    later = tuple(_chosen(env, f"v{n}_", os_) for n in range(1, p.horizon + 1))
    last = [env[f"y{p.horizon}_{j}"] for j in range(1, len(hs) + 1)]
    tail = next(o for o in os_ if sum(m * space.likelihood(hh, o) for m, hh in zip(last, hs)) > 0)
    if first is None:
        prior = Distribution(hs, tuple(env[f"y0_{j}"] for j in range(1, len(hs) + 1)))
        return EvidentialRun(h, prior, space, later, (tail,)), 0
    prior = Distribution(hs, tuple(env[f"q_{j}"] for j in range(1, len(hs) + 1)))
    return EvidentialRun(h, prior, space, (first,) + later, (tail,)), 1
