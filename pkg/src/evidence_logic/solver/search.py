"""Satisfiability for the quantifier-free static fragments.

The search has three layers.

1. *Cases and patterns.*  The true hypothesis and observation are fixed in
   turn, which makes every atom a constant; the remaining boolean structure
   is unfolded into conjunctions of comparison literals.  Each conjunction
   is a *branch*.
2. *Exact linear reasoning* for formulas that only talk linearly about
   weights.  When every comparison mentions a single observation, clearing
   the denominator of the weight turns each comparison into a linear
   constraint on the likelihoods themselves, so one exact LP decides the
   branch.  Otherwise an LP over the weights (dropping the condition that
   makes them a weight function) can still refute a branch, and a
   relative-interior point of it is tried as a model.
3. *Interval branch and bound* on the polynomial problem, with local
   polishing of box midpoints to find models.  A box is discarded only
   when outward-rounded interval arithmetic proves a constraint fails on
   all of it, so an UNSAT answer is a proof; SAT answers are re-checked
   on an exact world built from the numerical point.
"""

from __future__ import annotations

import enum
import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import least_squares

from ..characterization import WeightTable, check_wf2
from ..checker import EvidentialWorld, satisfies
from ..errors import EvidenceError, FragmentUnsupported, InvalidStructure
from ..evidence import ONE, ZERO, Distribution, EvidenceSpace
from ..formula.analysis import Fragment, classify_fragment, factors, occurring_names
from ..formula.ast import And, Compare, ForAll, HypAtom, Next, Not, ObsAtom, Posterior, Prior, Signature, Weight
from ..formula.printer import to_text
from ..lp import LPStatus, solve_lp
from . import interval as I
from . import poly as P
from .problem import EQ, GE, GT, FeasibilityProblem, VariableLayout, build_problem, literal_constraints

FRESH_HYPOTHESIS = "h*"
FRESH_OBSERVATION = "ob*"
SNAP_DENOMINATORS = (12, 60, 1000, 10**4, 10**6, 10**9, 10**12)


class Verdict(enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class SolverOptions:
    budget_boxes: int = 3000
    max_depth: int = 60
    tolerance: float = 1e-9
    margin: float = 0.0
    seed: int = 0
    starts: int = 4
    polish_every: int = 3
    max_polish: int = 40
    parallel: int = 1


@dataclass
class SolverStats:
    cases: int = 0
    branches: int = 0
    refuted_by_lp: int = 0
    refuted_by_intervals: int = 0
    boxes: int = 0
    max_depth: int = 0
    polish_calls: int = 0
    lp_calls: int = 0
    elapsed: float = field(default=0.0, compare=False)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    def absorb(self, other: "SolverStats") -> None:
        """Fold in the counters of a branch searched separately."""
        self.boxes += other.boxes
        self.polish_calls += other.polish_calls
        self.max_depth = max(self.max_depth, other.max_depth)


@dataclass
class SatResult:
    verdict: Verdict
    signature: Signature
    world: EvidentialWorld | None = None
    exact: bool = False
    residual: float | None = None
    reason: str = ""
    stats: SolverStats = field(default_factory=SolverStats)

    @property
    def sat(self) -> bool:
        return self.verdict is Verdict.SAT


def augment_signature(f) -> Signature:
    """Names occurring in ``f`` plus one fresh hypothesis and one fresh observation."""
    hyps, obs = occurring_names(f)
    return Signature(hyps + (FRESH_HYPOTHESIS,), obs + (FRESH_OBSERVATION,))


# -- cases and patterns --------------------------------------------------------------------


def _implicants(f, h: str, ob: str, cap: int = 4096) -> list[dict]:
    """Conjunctions of comparison literals that make ``f`` true in case (h, ob)."""

    def go(g, pos: bool) -> list[dict]:
        if isinstance(g, HypAtom):
            return [{}] if (g.name == h) == pos else []
        if isinstance(g, ObsAtom):
            return [{}] if (g.name == ob) == pos else []
        if isinstance(g, Compare):
            return [{g: pos}]
        if isinstance(g, Not):
            return go(g.body, not pos)
        if isinstance(g, And):
            if not pos:
                return _dedupe(go(g.left, False) + go(g.right, False))
            left = go(g.left, True)
            if not left:
                return []
            right = go(g.right, True)
            out = []
            for a in left:
                for b in right:
                    if all(a.get(k, v) == v for k, v in b.items()):
                        out.append({**a, **b})
                        if len(out) > cap:
                            raise FragmentUnsupported("too many boolean patterns to enumerate")
            return _dedupe(out)
        if isinstance(g, (ForAll, Next)):
            raise FragmentUnsupported("quantifiers and next-time belong to the RCF translation")
        raise TypeError(f"not a formula: {g!r}")

    return go(f, True)


def _dedupe(items: list[dict]) -> list[dict]:
    seen, out = set(), []
    for d in items:
        key = frozenset(d.items())
        if key not in seen:
            seen.add(key)
            out.append(d)
    return out


def _constant_truth(value: int, kind: str) -> bool:
    return value == 0 if kind == EQ else (value >= 0 if kind == GE else value > 0)


@dataclass
class _Branch:
    h: str
    ob: str
    literals: list  # (Compare, sign, kind)
    key: tuple


def _branches(f, sig: Signature, uses_probability: bool, stats: SolverStats) -> list[_Branch]:
    text_cache: dict = {}

    def text(c):
        if c not in text_cache:
            text_cache[c] = to_text(c)
        return text_cache[c]

    out: dict = {}
    for ob in sig.observations:
        for h in sig.hypotheses:
            stats.cases += 1
            for imp in _implicants(f, h, ob):
                lits = sorted(imp.items(), key=lambda kv: (text(kv[0]), kv[1]))
                options = [[(cmp, alt) for alt in literal_constraints((cmp, pos))] for cmp, pos in lits]
                for choice in itertools.product(*options):
                    literals = []
                    alive = True
                    for cmp, alt in choice:
                        for kind, sign in alt:
                            if not cmp.poly:
                                alive &= _constant_truth(-sign * cmp.constant, kind)
                            else:
                                literals.append((cmp, sign, kind))
                    if not alive:
                        continue
                    key = (ob if uses_probability else None,) + tuple(
                        (text(c), s, k) for c, s, k in literals
                    )
                    if key not in out:
                        out[key] = _Branch(h, ob, literals, key)
    return list(out.values())


# -- exact linear reasoning ---------------------------------------------------------------


def _single_observation(cmp: Compare) -> str | None:
    obs = {x.seq[0] for m in cmp.poly for x in m.factors}
    return obs.pop() if len(obs) == 1 else None


def _likelihood_lp(branch: _Branch, sig: Signature, stats: SolverStats):
    """Decide a branch of single-observation linear weight literals exactly.

    Returns an EvidenceSpace or None when the branch is infeasible.
    """
    hs, os_ = sig.hypotheses, sig.observations
    nh, no = len(hs), len(os_)
    col = lambda h, o: hs.index(h) * no + os_.index(o)  # noqa: E731
    eps = nh * no
    width = eps + 1
    a_eq, b_eq, a_ub, b_ub = [], [], [], []
    for h in hs:
        row = [ZERO] * width
        for o in os_:
            row[col(h, o)] = ONE
        a_eq.append(row)
        b_eq.append(ONE)
    for o in os_:
        row = [ZERO] * width
        for h in hs:
            row[col(h, o)] = -ONE
        row[eps] = ONE
        a_ub.append(row)
        b_ub.append(ZERO)
    cap = [ZERO] * width
    cap[eps] = ONE
    a_ub.append(cap)
    b_ub.append(ONE)
    for cmp, sign, kind in branch.literals:
        o = _single_observation(cmp)
        row = [ZERO] * width
        # sign * (sum a_k mu_{h_k,o} - c * sum_h mu_{h,o}) kind 0
        for m in cmp.poly:
            row[col(m.factors[0].h, o)] += sign * m.coef
        for h in hs:
            row[col(h, o)] -= sign * cmp.constant
        if kind == EQ:
            a_eq.append(row)
            b_eq.append(ZERO)
        else:
            neg = [-a for a in row]
            if kind == GT:
                neg[eps] += ONE
            a_ub.append(neg)
            b_ub.append(ZERO)
    stats.lp_calls += 1
    objective = [ZERO] * eps + [ONE]
    res = solve_lp(objective, a_eq, b_eq, a_ub, b_ub, maximize=True)
    if res.status is not LPStatus.OPTIMAL or res.value <= 0:
        return None
    table = tuple(tuple(res.x[col(h, o)] for o in os_) for h in hs)
    return EvidenceSpace(hs, os_, table)


def _weight_lp_rows(branch: _Branch, layout: VariableLayout):
    sig = layout.sig
    zcols = {idx: k for k, idx in enumerate(layout.z.values())}
    eps = len(zcols)
    width = eps + 1
    a_eq, b_eq, a_ub, b_ub = [], [], [], []
    for o in sig.observations:
        row = [ZERO] * width
        for h in sig.hypotheses:
            row[zcols[layout.z[(o, h)]]] = ONE
        a_eq.append(row)
        b_eq.append(ONE)
    for cmp, sign, kind in branch.literals:
        expr = P.scale(layout.comparison_poly(cmp), sign)
        row = [ZERO] * width
        for m, c in expr.items():
            if m:
                row[zcols[m[0]]] = c
        rhs = -expr.get((), ZERO)
        if kind == EQ:
            a_eq.append(row)
            b_eq.append(rhs)
        else:
            neg = [-a for a in row]
            if kind == GT:
                neg[eps] = ONE
            a_ub.append(neg)
            b_ub.append(-rhs)
    cap = [ZERO] * width
    cap[eps] = ONE
    a_ub.append(cap)
    b_ub.append(ONE)
    return a_eq, b_eq, a_ub, b_ub, zcols, width


def _weight_lp(branch: _Branch, layout: VariableLayout, opts: SolverOptions, stats: SolverStats):
    """LP over weights without the weight-function condition.

    Returns ``"refuted"``, or a list of candidate weight tables.
    """
    a_eq, b_eq, a_ub, b_ub, zcols, width = _weight_lp_rows(branch, layout)
    eps = width - 1
    objective = [ZERO] * eps + [ONE]
    stats.lp_calls += 1
    res = solve_lp(objective, a_eq, b_eq, a_ub, b_ub, maximize=True)
    if res.status is not LPStatus.OPTIMAL:
        return "refuted"
    has_strict = any(kind == GT for _, _, kind in branch.literals)
    if has_strict and res.value <= 0:
        return "refuted"
    candidates = [res.x]
    # average a few vertices to land in the relative interior
    floor = [ZERO] * width
    floor[eps] = -ONE
    a_ub2 = a_ub + [floor]
    b_ub2 = b_ub + [-(res.value / 2)]
    rng = np.random.default_rng(opts.seed)
    vertices = []
    for _ in range(2 * eps):
        direction = [Fraction(int(v)) for v in rng.integers(-3, 4, size=eps)] + [ZERO]
        stats.lp_calls += 1
        r = solve_lp(direction, a_eq, b_eq, a_ub2, b_ub2, maximize=True)
        if r.status is LPStatus.OPTIMAL:
            vertices.append(r.x)
    if vertices:
        candidates.append(tuple(sum(v[k] for v in vertices) / len(vertices) for k in range(width)))
    sig = layout.sig
    tables = []
    for cand in candidates:
        entries = tuple(
            tuple(cand[zcols[layout.z[(o, h)]]] for h in sig.hypotheses) for o in sig.observations
        )
        tables.append(WeightTable(sig.hypotheses, sig.observations, entries))
    return tables


# -- worlds from numbers ----------------------------------------------------------------------


def _snap(values, denominator) -> tuple[Fraction, ...] | None:
    qs = []
    for v in values:
        q = Fraction(max(float(v), 0.0))
        if denominator is not None:
            q = q.limit_denominator(denominator)
        qs.append(q)
    total = sum(qs)
    if total == 0:
        return None
    return tuple(q / total for q in qs)


def _world(h, ob, prior, table, sig) -> EvidentialWorld | None:
    try:
        space = EvidenceSpace(sig.hypotheses, sig.observations, table)
        return EvidentialWorld(h, ob, Distribution(sig.hypotheses, prior), space)
    except InvalidStructure:
        return None


def _space_from_weights(table: WeightTable):
    cert = check_wf2(table)
    if not cert:
        return None
    return tuple(
        tuple(table.entries[i][j] * cert.scalars[i] for i in range(len(table.observations)))
        for j in range(len(table.hypotheses))
    )


def _candidate_worlds(point, layout: VariableLayout, h: str, ob: str):
    sig = layout.sig
    hs, os_ = sig.hypotheses, sig.observations
    z = [[point[layout.z[(o, hh)]] for hh in hs] for o in os_]
    s = [point[layout.s[o]] for o in os_]
    x = [point[layout.x[hh]] for hh in hs] if layout.with_prior else [1.0] * len(hs)
    for d in SNAP_DENOMINATORS:
        rows = [_snap(r, d) for r in z]
        prior = _snap(x, d)
        if prior is None or any(r is None for r in rows):
            continue
        table = _space_from_weights(WeightTable(hs, os_, tuple(rows)))
        if table is not None:
            yield _world(h, ob, prior, table, sig)
    mu = [[z[i][j] * s[i] for i in range(len(os_))] for j in range(len(hs))]
    for d in SNAP_DENOMINATORS + (None,):
        rows = [_snap(r, d) for r in mu]
        prior = _snap(x, d)
        if prior is None or any(r is None for r in rows):
            continue
        yield _world(h, ob, prior, tuple(rows), sig)


def _check(f, world, tolerance) -> bool:
    try:
        return satisfies(f, world, tolerance=tolerance)
    except EvidenceError:
        return False


def _accept(f, point, layout, h, ob, tol: Fraction):
    """An exact world satisfying ``f``, else the finest one within tolerance, else None."""
    fallback = None
    for world in _candidate_worlds(point, layout, h, ob):
        if world is None:
            continue
        if _check(f, world, 0):
            return world, True
        if _check(f, world, tol):
            fallback = world
    if fallback is not None:
        return fallback, False
    return None


def world_residual(world: EvidentialWorld, problem: FeasibilityProblem, layout: VariableLayout) -> float:
    """Largest constraint violation of ``problem`` at the encoding of ``world``."""
    sig = layout.sig
    point = [ZERO] * len(layout.names)
    space = world.space
    for hh, i in layout.x.items():
        point[i] = world.prior[hh]
    for hh, i in layout.y.items():
        point[i] = world.posterior[hh]
    for (o, hh), i in layout.z.items():
        point[i] = world.weight(o, hh)
    for o, i in layout.s.items():
        point[i] = sum(space.likelihood(hh, o) for hh in sig.hypotheses)
    point[layout.t] = min(point[i] for i in layout.s.values())
    return problem.residual(point)


# -- numerical search ------------------------------------------------------------------------


class _Numeric:
    """Float views of one problem: interval constraints and a least-squares residual."""

    def __init__(self, problem: FeasibilityProblem, opts: SolverOptions):
        self.problem = problem
        self.lo = np.array([float(v) for v in problem.lower])
        self.hi = np.array([float(v) for v in problem.upper])
        self.intervals = [
            I.IntervalConstraint(c.poly, c.kind == EQ, opts.margin if c.kind == GT else 0.0)
            for c in problem.constraints
        ]
        self.compiled = []
        for c in problem.constraints:
            scale = max((abs(v) for v in c.poly.values()), default=ONE)
            self.compiled.append((P.CompiledPoly(P.scale(c.poly, 1 / scale)), c.kind))
        self.strict_floor = max(opts.margin, 1e-7)

    def residuals(self, v):
        vals = v.tolist()
        out = np.empty(len(self.compiled))
        for k, (cp, kind) in enumerate(self.compiled):
            r = cp.value(vals)
            if kind == EQ:
                out[k] = r
            elif kind == GE:
                out[k] = min(r, 0.0)
            else:
                out[k] = min(r - self.strict_floor, 0.0)
        return out

    def jacobian(self, v):
        vals = v.tolist()
        jac = np.zeros((len(self.compiled), len(vals)))
        for k, (cp, kind) in enumerate(self.compiled):
            if kind != EQ:
                r = cp.value(vals)
                floor = 0.0 if kind == GE else self.strict_floor
                if r >= floor:
                    continue
            cp.gradient_into(vals, jac[k])
        return jac

    def polish(self, start) -> np.ndarray:
        x0 = np.clip(start, self.lo, self.hi)
        span = self.hi - self.lo
        x0 = np.where(span > 0, np.clip(x0, self.lo + 1e-12 * span, self.hi - 1e-12 * span), x0)
        fixed = span <= 0
        if fixed.any():
            # least_squares wants strictly ordered bounds
            hi = np.where(fixed, np.nextafter(self.hi, np.inf), self.hi)
        else:
            hi = self.hi
        res = least_squares(
            self.residuals,
            x0,
            jac=self.jacobian,
            bounds=(self.lo, hi),
            method="trf",
            xtol=1e-15,
            ftol=1e-15,
            gtol=1e-15,
            max_nfev=100,
        )
        return res.x

    def contract(self, box: list, rounds: int = 12) -> bool:
        for _ in range(rounds):
            before = sum(I.width(b) for b in box)
            for ic in self.intervals:
                if not ic.contract(box):
                    return False
            after = sum(I.width(b) for b in box)
            if after > 0.98 * before:
                break
        return True


def _search_branch(
    f, numeric: _Numeric, layout, branch, opts, stats, budget: int, tol, rng, polish_root: bool
):
    """Returns ("sat", world, exact) | ("pruned",) | ("open", reason)."""
    box = [(float(a), float(b)) for a, b in zip(numeric.problem.lower, numeric.problem.upper)]
    if not numeric.contract(box):
        return ("pruned",)
    if polish_root:
        starts = [np.array([I.midpoint(b) for b in box])]
        for _ in range(max(opts.starts - 1, 0)):
            starts.append(np.array([rng.uniform(b[0], b[1]) for b in box]))
        for st in starts:
            stats.polish_calls += 1
            found = _accept(f, numeric.polish(st), layout, branch.h, branch.ob, tol)
            if found:
                return ("sat",) + found
        return ("open", "root polish found no model")
    stack = [(box, 0)]
    used = 0
    polished = 0
    unresolved = False
    while stack:
        if used >= budget:
            return ("open", "box budget exhausted")
        box, depth = stack.pop()
        used += 1
        stats.boxes += 1
        stats.max_depth = max(stats.max_depth, depth)
        if not numeric.contract(box):
            continue
        if depth % opts.polish_every == 0 and polished < opts.max_polish:
            polished += 1
            stats.polish_calls += 1
            found = _accept(f, numeric.polish(np.array([I.midpoint(b) for b in box])), layout, branch.h, branch.ob, tol)
            if found:
                return ("sat",) + found
        widths = [I.width(b) / max(float(hi - lo), 1e-300) for b, lo, hi in zip(box, numeric.problem.lower, numeric.problem.upper)]
        k = int(np.argmax(widths))
        if depth >= opts.max_depth or widths[k] < 1e-12:
            unresolved = True
            continue
        mid = I.midpoint(box[k])
        left, right = list(box), list(box)
        left[k] = (box[k][0], mid)
        right[k] = (mid, box[k][1])
        stack.append((right, depth + 1))
        stack.append((left, depth + 1))
    if unresolved:
        return ("open", "depth limit reached on boxes that could not be refuted")
    return ("pruned",)


# -- driver ---------------------------------------------------------------------------------


def _search_sequential(f, survivors, layout, opts, stats, tol, rng):
    """Search branches in order, handing unused box budget to later branches."""
    outcomes = []
    remaining = opts.budget_boxes
    for k, (br, pb, num) in enumerate(survivors):
        share = remaining // (len(survivors) - k)
        before = stats.boxes
        out = _search_branch(f, num, layout, br, opts, stats, share, tol, rng, polish_root=False)
        remaining -= stats.boxes - before
        outcomes.append(out)
        if out[0] == "sat":
            break
    return outcomes


def _search_parallel(f, survivors, layout, opts, stats, tol):
    """Search branches concurrently with fixed budget shares and private random streams.

    Every branch runs to completion, so the outcome list, and hence the
    verdict, does not depend on scheduling.
    """
    share = opts.budget_boxes // len(survivors)

    def work(k):
        br, pb, num = survivors[k]
        own = SolverStats()
        rng = np.random.default_rng([opts.seed, k])
        return _search_branch(f, num, layout, br, opts, own, share, tol, rng, polish_root=False), own

    with ThreadPoolExecutor(max_workers=opts.parallel) as pool:
        results = list(pool.map(work, range(len(survivors))))
    for _, own in results:
        stats.absorb(own)
    return [out for out, _ in results]


def solve(f, sig: Signature, opts: SolverOptions | None = None) -> SatResult:
    """Decide whether ``f`` holds in some evidential world over ``sig``."""
    opts = opts or SolverOptions()
    started = time.perf_counter()
    stats = SolverStats()
    fragment = classify_fragment(f)
    if fragment not in (Fragment.LW, Fragment.LEV):
        raise FragmentUnsupported(
            f"formula is in {fragment.value}; use the RCF translation for quantified or dynamic input"
        )
    for g in factors(f):
        if isinstance(g, Weight) and len(g.seq) != 1:
            raise FragmentUnsupported("sequence weights are dynamic")
    tol = Fraction(opts.tolerance)
    uses_prior = any(isinstance(g, Prior) for g in factors(f))
    uses_posterior = any(isinstance(g, Posterior) for g in factors(f))
    layout = VariableLayout(sig, uses_prior, uses_posterior)
    branches = _branches(f, sig, uses_prior or uses_posterior, stats)
    stats.branches = len(branches)

    def finish(verdict, world=None, exact=False, reason="", problem=None):
        residual = None
        if world is not None and problem is not None:
            residual = world_residual(world, problem, layout)
        stats.elapsed = time.perf_counter() - started
        return SatResult(verdict, sig, world, exact, residual, reason, stats)

    open_branches = []
    for br in branches:
        problem = build_problem(layout, br.h, br.ob, br.literals)
        if fragment is Fragment.LW:
            if all(_single_observation(c) for c, _, _ in br.literals):
                space = _likelihood_lp(br, sig, stats)
                if space is None:
                    stats.refuted_by_lp += 1
                    continue
                world = EvidentialWorld(br.h, br.ob, Distribution.uniform(sig.hypotheses), space)
                if _check(f, world, 0):
                    return finish(Verdict.SAT, world, True, problem=problem)
                # cannot happen unless the formula and branch disagree
                open_branches.append((br, problem))
                continue
            outcome = _weight_lp(br, layout, opts, stats)
            if outcome == "refuted":
                stats.refuted_by_lp += 1
                continue
            prior = tuple(Fraction(1, len(sig.hypotheses)) for _ in sig.hypotheses)
            for table in outcome:
                likelihoods = _space_from_weights(table)
                if likelihoods is not None:
                    world = _world(br.h, br.ob, prior, likelihoods, sig)
                    if world is not None and _check(f, world, 0):
                        return finish(Verdict.SAT, world, True, problem=problem)
        open_branches.append((br, problem))

    if not open_branches:
        return finish(Verdict.UNSAT, reason="every branch refuted")

    rng = np.random.default_rng(opts.seed)
    numerics = [(br, pb, _Numeric(pb, opts)) for br, pb in open_branches]
    survivors = []
    for br, pb, num in numerics:
        out = _search_branch(f, num, layout, br, opts, stats, 0, tol, rng, polish_root=True)
        if out[0] == "sat":
            return finish(Verdict.SAT, out[1], out[2], problem=pb)
        if out[0] == "pruned":
            stats.refuted_by_intervals += 1
        else:
            survivors.append((br, pb, num))
    if not survivors:
        return finish(Verdict.UNSAT, reason="every branch refuted")
    reasons = []
    if opts.parallel > 1 and len(survivors) > 1:
        outcomes = _search_parallel(f, survivors, layout, opts, stats, tol)
    else:
        outcomes = _search_sequential(f, survivors, layout, opts, stats, tol, rng)
    for (br, pb, num), out in zip(survivors, outcomes):
        if out[0] == "sat":
            return finish(Verdict.SAT, out[1], out[2], problem=pb)
        if out[0] == "pruned":
            stats.refuted_by_intervals += 1
        else:
            reasons.append(out[1])
    if not reasons:
        return finish(Verdict.UNSAT, reason="every branch refuted")
    return finish(Verdict.UNKNOWN, reason="; ".join(sorted(set(reasons))))
