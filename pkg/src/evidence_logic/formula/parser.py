"""Recursive-descent parser for the concrete syntax.

Grammar, loosest binding first::

    formula  := imp ('<=>' imp)*
    imp      := or ('=>' imp)?
    or       := and ('|' and)*
    and      := unary ('&' unary)*
    unary    := '!' unary | 'forall' VAR '(' formula ')' | 'exists' VAR '(' formula ')'
              | 'X' '(' formula ')' | primary
    primary  := 'true' | 'false' | NAME | comparison | '(' formula ')'
    comparison := sum RELOP sum          RELOP in >= > = <= < !=
    sum      := product (('+' | '-') product)*
    product  := factor ('*' factor)*
    factor   := '-' factor | literal | VAR | '(' sum ')'
              | 'Pr0' '(' formula ')' | 'Pr' '(' formula ')'
              | 'w' '(' OBS ',' HYP ')' | 'w' '(' '[' OBS (',' OBS)* ']' ',' HYP ')'
    literal  := INT ('^' INT)? ('/' INT ('^' INT)?)?

Comparisons are normalized on the spot: everything moves to the left,
constants to the right, and the whole thing is multiplied by the least
common denominator so that coefficients and constant are integers.
"""

from __future__ import annotations

import math
import re
import warnings
from fractions import Fraction

from ..errors import ParseError
from .ast import (
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
    disj,
    exists,
    false_formula,
    iff,
    implies,
    true_formula,
)
from .printer import factor_text

STATIC = "static"
DYNAMIC = "dynamic"

RESERVED = {"Pr0", "Pr", "w", "forall", "exists", "true", "false"}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*'*)
  | (?P<op><=>|=>|<=|>=|!=|[<>=&|!()\[\],+\-*/^])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


def strip_comments(text: str) -> str:
    return "\n".join(line.split("#", 1)[0] for line in text.splitlines())


class _Parser:
    def __init__(self, text: str, sig: Signature, dialect: str):
        if dialect not in (STATIC, DYNAMIC):
            raise ValueError(f"unknown dialect {dialect!r}")
        self.text = text
        self.sig = sig
        self.dialect = dialect
        self.tokens = tokenize(text)
        self.i = 0
        self.bound: list[str] = []

    # -- token helpers --------------------------------------------------------------

    def peek(self, offset: int = 0):
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def at(self, value: str, offset: int = 0) -> bool:
        kind, text, _ = self.peek(offset)
        return text == value and kind != "eof"

    def next(self):
        tok = self.tokens[self.i]
        if tok[0] != "eof":
            self.i += 1
        return tok

    def error(self, message: str, tok=None):
        tok = tok or self.peek()
        return ParseError(message, tok[2], self.text)

    def expect(self, value: str):
        tok = self.next()
        if tok[1] != value or tok[0] == "eof":
            found = tok[1] or "end of input"
            raise self.error(f"expected {value!r} but found {found!r}", tok)
        return tok

    # -- formulas ---------------------------------------------------------------------

    def parse(self):
        f = self.formula()
        if self.peek()[0] != "eof":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return f

    def formula(self):
        f = self.implication()
        while self.at("<=>"):
            self.next()
            f = iff(f, self.implication())
        return f

    def implication(self):
        f = self.disjunction()
        if self.at("=>"):
            self.next()
            return implies(f, self.implication())
        return f

    def disjunction(self):
        f = self.conjunction()
        while self.at("|"):
            self.next()
            f = disj(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.unary()
        while self.at("&"):
            self.next()
            f = And(f, self.unary())
        return f

    def unary(self):
        if self.at("!"):
            self.next()
            return Not(self.unary())
        if self.at("forall") or self.at("exists"):
            which = self.next()[1]
            kind, name, pos = self.next()
            if kind != "ident" or name in RESERVED:
                raise ParseError("expected a variable name after quantifier", pos, self.text)
            if name in self.sig:
                raise ParseError(f"cannot bind signature name {name!r}", pos, self.text)
            if name in self.bound:
                warnings.warn(f"variable {name!r} shadows an outer binding", stacklevel=4)
            self.expect("(")
            self.bound.append(name)
            body = self.formula()
            self.bound.pop()
            self.expect(")")
            return ForAll(name, body) if which == "forall" else exists(name, body)
        if self.at("X") and self.at("(", 1) and "X" not in self.sig:
            if self.dialect != DYNAMIC:
                raise self.error("next-time operator X(...) needs the dynamic dialect")
            self.next()
            self.next()
            body = self.formula()
            self.expect(")")
            return Next(body)
        return self.primary()

    def primary(self):
        kind, text, pos = self.peek()
        if text == "true" and kind == "ident":
            self.next()
            return true_formula(self.sig)
        if text == "false" and kind == "ident":
            self.next()
            return false_formula(self.sig)
        if kind == "ident" and text in self.sig and not self._starts_arith(1):
            self.next()
            if text in self.sig.hypotheses:
                return HypAtom(text)
            return ObsAtom(text)
        if text == "(":
            start = self.i
            try:
                return self.comparison()
            except ParseError as first:
                self.i = start
                self.next()
                try:
                    f = self.formula()
                    self.expect(")")
                except ParseError as second:
                    # report whichever attempt got further
                    raise max(first, second, key=lambda e: e.position or 0) from None
                return f
        return self.comparison()

    def _starts_arith(self, offset: int) -> bool:
        return self.peek(offset)[1] in {"+", "-", "*", ">=", "<=", ">", "<", "=", "!="}

    # -- comparisons ------------------------------------------------------------------

    def comparison(self):
        lhs = self.sum()
        kind, op, pos = self.next()
        if op not in {">=", ">", "=", "<=", "<", "!="} or kind == "eof":
            raise ParseError(
                f"expected a comparison operator but found {op or 'end of input'!r}", pos, self.text
            )
        rhs = self.sum()
        if op in ("<=", "<"):
            lhs, rhs = rhs, lhs
            op = ">=" if op == "<=" else ">"
        diff = _poly_add(lhs, _poly_scale(rhs, Fraction(-1)))
        constant = -diff.pop((), Fraction(0))
        scale = math.lcm(constant.denominator, *(c.denominator for c in diff.values()))
        poly = tuple(
            Monomial(int(c * scale), factors) for factors, c in diff.items() if c != 0
        )
        if op == "!=":
            return Not(Compare(poly, Op.EQ, int(constant * scale)))
        kind = {">=": Op.GE, ">": Op.GT, "=": Op.EQ}[op]
        return Compare(poly, kind, int(constant * scale))

    def sum(self):
        total = self.product()
        while self.at("+") or self.at("-"):
            sign = Fraction(1) if self.next()[1] == "+" else Fraction(-1)
            total = _poly_add(total, _poly_scale(self.product(), sign))
        return total

    def product(self):
        out = self.factor()
        while self.at("*"):
            self.next()
            out = _poly_mul(out, self.factor())
        return out

    def factor(self):
        kind, text, pos = self.peek()
        if text == "-" and kind == "op":
            self.next()
            return _poly_scale(self.factor(), Fraction(-1))
        if kind == "num":
            return {(): self.literal()}
        if text == "(" and kind == "op":
            self.next()
            inner = self.sum()
            self.expect(")")
            return inner
        if kind == "ident" and text in ("Pr0", "Pr") and self.at("(", 1):
            if text == "Pr0" and self.dialect == DYNAMIC:
                raise self.error("Pr0 is not part of the dynamic language")
            self.next()
            self.next()
            rho = self.formula()
            self.expect(")")
            self._check_hypothesis_formula(rho, pos)
            term = Prior(rho) if text == "Pr0" else Posterior(rho)
            return {(term,): Fraction(1)}
        if kind == "ident" and text == "w" and self.at("(", 1):
            self.next()
            self.next()
            return {(self.weight_args(),): Fraction(1)}
        if kind == "ident":
            if text in self.sig:
                raise self.error(f"signature name {text!r} used as a number")
            if text in RESERVED or text == "X" and self.at("(", 1):
                raise self.error(f"unexpected keyword {text!r}")
            self.next()
            return {(Var(text),): Fraction(1)}
        raise self.error(f"expected a term but found {text or 'end of input'!r}")

    def literal(self) -> Fraction:
        value = Fraction(self.integer_power())
        if self.at("/"):
            slash = self.next()
            if self.peek()[0] != "num":
                raise self.error("division is only allowed between numeric literals", slash)
            denom = self.integer_power()
            if denom == 0:
                raise self.error("division by zero", slash)
            value /= denom
        return value

    def integer_power(self) -> int:
        base = int(self.next()[1])
        if self.at("^"):
            self.next()
            kind, text, pos = self.next()
            if kind != "num":
                raise ParseError("exponent must be a nonnegative integer literal", pos, self.text)
            return base ** int(text)
        return base

    def weight_args(self) -> Weight:
        if self.at("["):
            open_tok = self.next()
            seq = [self.observation_name()]
            while self.at(","):
                self.next()
                seq.append(self.observation_name())
            self.expect("]")
            if len(seq) > 1 and self.dialect != DYNAMIC:
                raise self.error("observation sequences need the dynamic dialect", open_tok)
        else:
            seq = [self.observation_name()]
        self.expect(",")
        kind, h, pos = self.next()
        if h not in self.sig.hypotheses:
            raise ParseError(f"undeclared hypothesis {h!r}", pos, self.text)
        self.expect(")")
        return Weight(tuple(seq), h)

    def observation_name(self) -> str:
        kind, ob, pos = self.next()
        if ob not in self.sig.observations:
            raise ParseError(f"undeclared observation {ob!r}", pos, self.text)
        return ob

    def _check_hypothesis_formula(self, rho, pos):
        stack = [rho]
        while stack:
            g = stack.pop()
            if isinstance(g, HypAtom):
                continue
            if isinstance(g, Not):
                stack.append(g.body)
            elif isinstance(g, And):
                stack.extend((g.left, g.right))
            else:
                raise ParseError("probability terms take a hypothesis formula", pos, self.text)


def _factor_key(f):
    return factor_text(f)


def _poly_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, Fraction(0)) + v
    return out


def _poly_scale(a: dict, c: Fraction) -> dict:
    return {k: v * c for k, v in a.items()}


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = tuple(sorted(ka + kb, key=_factor_key))
            out[k] = out.get(k, Fraction(0)) + va * vb
    return out


def parse(text: str, sig: Signature, dialect: str = STATIC):
    """Parse one formula over ``sig``; derived connectives are expanded."""
    return _Parser(strip_comments(text), sig, dialect).parse()


_HEADER = re.compile(
    r"^\s*hypotheses\s*:\s*(?P<h>[^;]*);\s*observations\s*:\s*(?P<o>[^;]*);", re.DOTALL
)


def parse_file_text(text: str, sig: Signature | None = None, dialect: str = STATIC):
    """Parse formula-file contents: optional signature header, then one formula.

    Returns ``(formula, signature)``.  A header overrides ``sig``.
    """
    body = strip_comments(text)
    m = _HEADER.match(body)
    if m:
        split = lambda s: tuple(x.strip() for x in s.split(",") if x.strip())  # noqa: E731
        sig = Signature(split(m.group("h")), split(m.group("o")))
        body = body[m.end():]
    if sig is None:
        raise ParseError("no signature: add a header or supply one")
    return _Parser(body, sig, dialect).parse(), sig
