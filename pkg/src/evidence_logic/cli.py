"""Command-line interface: ``evlogic <command> ...``.

Exit status is 0 for true / SAT / realizable / clean audits, 1 for false /
UNSAT / not realizable / failed audits, 2 for UNKNOWN and 3 for usage,
input or parse errors.

File formats (all JSON unless noted):

* evidence space: ``{"hypotheses": [...], "observations": [...],
  "likelihoods": {h: {ob: "p/q"}}}``
* world: ``{"hypothesis", "observation", "prior": {h: "p/q"}, "space"}``,
  where ``"space_file"`` may replace ``"space"`` with a relative path
* run: ``{"hypothesis", "prior", "space", "trace_prefix": [...],
  "trace_cycle": [...]}``
* weight table: ``{"hypotheses", "observations", "weights": {ob: {h: "p/q"}}}``
* formula file (text): optional header ``hypotheses: a, b; observations:
  u, v;`` then one formula; ``#`` starts a comment
* witness (text): SMT-LIB ``(define-fun name () Real value)`` model output
  or ``name = p/q`` lines
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path

from . import rcf
from .characterization import reconstruct, table_from_doc
from .checker import (
    EvidentialRun,
    audit_axioms,
    run_from_doc,
    satisfies,
    satisfies_at,
    world_from_doc,
    world_to_doc,
    run_to_doc,
)
from .errors import DecodeInconsistent, EvidenceError, NotRealizable
from .evidence import (
    Distribution,
    dempster_combine,
    format_rational,
    sequence_weight_column,
    shafer_weight,
    space_from_doc,
    space_to_doc,
    unnormalized_weight,
    weight_column,
    weight_of_evidence,
)
from .formula import DYNAMIC, STATIC, Signature, parse_file_text, to_text
from .solver import SolverOptions, Verdict, augment_signature, solve

TOLERANCE_ENV = "EVLOGIC_TOLERANCE"

EXIT_TRUE, EXIT_FALSE, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- helpers --------------------------------------------------------------------------------


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: not valid JSON ({exc})") from None


class _Printer:
    """Rationals as ``p/q``, optionally followed by a decimal approximation."""

    def __init__(self, approx: int | None):
        self.approx = approx

    def q(self, value: Fraction) -> str:
        text = format_rational(value)
        if self.approx is None:
            return text
        with localcontext() as ctx:
            ctx.prec = max(self.approx, 1)
            decimal = Decimal(value.numerator) / Decimal(value.denominator)
        return f"{text}  ~{decimal}"


def _signature_from_text(text: str) -> Signature:
    parts = dict(
        (k.strip(), v) for k, v in (seg.split(":", 1) for seg in text.split(";") if seg.strip())
    )
    try:
        hyps = tuple(x.strip() for x in parts["hypotheses"].split(",") if x.strip())
        obs = tuple(x.strip() for x in parts["observations"].split(",") if x.strip())
    except KeyError as exc:
        raise UsageError(f"signature text lacks {exc}") from None
    return Signature(hyps, obs)


def _load_formula(args, sig: Signature | None, dialect: str):
    if args.formula is not None and args.formula_file is not None:
        raise UsageError("give a formula or --formula-file, not both")
    if args.formula_file is not None:
        text = Path(args.formula_file).read_text()
    elif args.formula is not None:
        text = args.formula
    else:
        raise UsageError("no formula given")
    return parse_file_text(text, sig, dialect)


def _signature_option(args) -> Signature | None:
    if getattr(args, "signature", None):
        return _signature_from_text(args.signature)
    if getattr(args, "space", None):
        return Signature.of_space(space_from_doc(_read_json(args.space)))
    return None


def _emit(args, doc: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _default_tolerance() -> float:
    raw = os.environ.get(TOLERANCE_ENV)
    if raw is None:
        return 1e-9
    try:
        return float(raw)
    except ValueError:
        raise UsageError(f"{TOLERANCE_ENV}={raw!r} is not a number") from None


def _structure(args):
    """World or run named by --world / --run; the run flag wins if both are set."""
    if args.run:
        doc = _read_json(args.run)
        return run_from_doc(doc.get("run", doc), Path(args.run).parent)
    if args.world:
        doc = _read_json(args.world)
        return world_from_doc(doc.get("world", doc), Path(args.world).parent)
    raise UsageError("give --world FILE or --run FILE")


# -- commands -------------------------------------------------------------------------------


def cmd_eval(args) -> int:
    structure = _structure(args)
    is_run = isinstance(structure, EvidentialRun)
    f, _ = _load_formula(args, structure.signature, DYNAMIC if is_run else STATIC)
    valuation = {}
    for item in args.let or ():
        if "=" not in item:
            raise UsageError(f"--let expects NAME=VALUE, got {item!r}")
        name, value = item.split("=", 1)
        valuation[name.strip()] = Fraction(value.strip())
    tol = args.tolerance if args.tolerance is not None else 0
    if is_run:
        value = satisfies_at(f, structure, args.time, valuation, tolerance=tol)
    else:
        value = satisfies(f, structure, valuation, tolerance=tol)
    doc = {"command": "eval", "formula": to_text(f), "value": value}
    if is_run:
        doc["time"] = args.time
    _emit(args, doc, ["true" if value else "false"])
    return EXIT_TRUE if value else EXIT_FALSE


def _solver_options(args) -> SolverOptions:
    tol = args.tolerance if args.tolerance is not None else _default_tolerance()
    return SolverOptions(
        budget_boxes=args.budget_boxes,
        max_depth=args.max_depth,
        tolerance=tol,
        margin=args.margin,
        seed=args.seed,
        parallel=args.parallel,
    )


def cmd_sat(args) -> int:
    f, sig = _load_formula(args, _signature_option(args), STATIC)
    if args.auto_signature:
        sig = augment_signature(f)
    result = solve(f, sig, _solver_options(args))
    stats = result.stats.as_dict()
    stats.pop("elapsed", None)
    doc = {
        "command": "sat",
        "formula": to_text(f),
        "signature": {"hypotheses": list(sig.hypotheses), "observations": list(sig.observations)},
        "verdict": result.verdict.value,
        "stats": stats,
    }
    lines = [result.verdict.value + (" (exact model)" if result.sat and result.exact else "")]
    if result.sat:
        doc["exact"] = result.exact
        doc["residual"] = result.residual
        doc["world"] = world_to_doc(result.world)
        pr = _Printer(args.approx)
        w = result.world
        lines.append(f"hypothesis: {w.h}")
        lines.append(f"observation: {w.ob}")
        for h in sig.hypotheses:
            lines.append(f"prior {h}: {pr.q(w.prior[h])}")
        for h in sig.hypotheses:
            for o in sig.observations:
                lines.append(f"likelihood {h} {o}: {pr.q(w.space.likelihood(h, o))}")
        if not result.exact:
            lines.append(f"approximate model, largest residual {result.residual:.3g}")
    else:
        doc["reason"] = result.reason
        lines.append(result.reason)
    _emit(args, doc, lines)
    return {Verdict.SAT: EXIT_TRUE, Verdict.UNSAT: EXIT_FALSE, Verdict.UNKNOWN: EXIT_UNKNOWN}[result.verdict]


WEIGHT_MODES = {
    "normalized": weight_of_evidence,
    "unnormalized": unnormalized_weight,
    "shafer": shafer_weight,
}


def cmd_weights(args) -> int:
    space = space_from_doc(_read_json(args.space_file))
    measure = WEIGHT_MODES[args.mode]
    obs = space.observations
    if args.observation:
        for o in args.observation:
            space.ob_index(o)
        obs = tuple(args.observation)
    pr = _Printer(args.approx)
    table = {o: {h: measure(space, o, h) for h in space.hypotheses} for o in obs}
    doc = {
        "command": "weights",
        "mode": args.mode,
        "weights": {o: {h: format_rational(v) for h, v in row.items()} for o, row in table.items()},
    }
    lines = [f"{o}\t{h}\t{pr.q(v)}" for o, row in table.items() for h, v in row.items()]
    _emit(args, doc, lines)
    return EXIT_TRUE


def _prior(args, space) -> Distribution:
    if args.prior_file:
        return Distribution.from_mapping(_read_json(args.prior_file), space.hypotheses)
    if args.prior:
        masses = {}
        for item in args.prior.split(","):
            name, value = item.split("=", 1)
            masses[name.strip()] = Fraction(value.strip())
        return Distribution.from_mapping(masses, space.hypotheses)
    return Distribution.uniform(space.hypotheses)


def cmd_combine(args) -> int:
    space = space_from_doc(_read_json(args.space_file))
    seq = [s.strip() for s in args.sequence.split(",") if s.strip()]
    if not seq:
        raise UsageError("--sequence needs at least one observation")
    prior = _prior(args, space)
    combined = sequence_weight_column(space, seq)
    stepwise = weight_column(space, seq[0])
    for o in seq[1:]:
        stepwise = dempster_combine(stepwise, weight_column(space, o))
    if combined != stepwise:  # pragma: no cover - the two routes agree by construction
        raise EvidenceError("sequence weight and repeated combination disagree")
    post = dempster_combine(prior, combined)
    pr = _Printer(args.approx)
    doc = {
        "command": "combine",
        "sequence": seq,
        "prior": {h: format_rational(prior[h]) for h in space.hypotheses},
        "weight": {h: format_rational(combined[h]) for h in space.hypotheses},
        "posterior": {h: format_rational(post[h]) for h in space.hypotheses},
    }
    lines = [f"weight {h}: {pr.q(combined[h])}" for h in space.hypotheses]
    lines += [f"posterior {h}: {pr.q(post[h])}" for h in space.hypotheses]
    _emit(args, doc, lines)
    return EXIT_TRUE


def cmd_reconstruct(args) -> int:
    table = table_from_doc(_read_json(args.table_file))
    try:
        space = reconstruct(table)
    except NotRealizable as exc:
        doc = {"command": "reconstruct", "realizable": False, "condition": exc.condition, "detail": exc.detail}
        _emit(args, doc, [f"not realizable: {exc.condition} {exc.detail}"])
        return EXIT_FALSE
    pr = _Printer(args.approx)
    doc = {"command": "reconstruct", "realizable": True, "space": space_to_doc(space)}
    lines = ["realizable"] + [
        f"likelihood {h} {o}: {pr.q(space.likelihood(h, o))}"
        for h in space.hypotheses
        for o in space.observations
    ]
    _emit(args, doc, lines)
    return EXIT_TRUE


def cmd_audit(args) -> int:
    structure = _structure(args)
    which = [a.strip() for a in args.axioms.split(",")] if args.axioms else None
    horizon = args.horizon if isinstance(structure, EvidentialRun) else None
    report = audit_axioms(structure, which, horizon, args.pool_limit)
    counts = report.counts()
    doc = {
        "command": "audit",
        "ok": report.ok,
        "counts": {k: {"instances": n, "failures": bad} for k, (n, bad) in sorted(counts.items())},
        "failures": [
            {"axiom": e.axiom, "formula": e.text, "time": e.time, "note": e.note} for e in report.failures
        ],
    }
    lines = [f"{k}: {n} instances, {bad} failures" for k, (n, bad) in sorted(counts.items())]
    for e in report.failures:
        at = f" at time {e.time}" if e.time is not None else ""
        lines.append(f"FAILED {e.axiom}{at}: {e.text} {e.note}".rstrip())
    lines.append("all instances hold" if report.ok else f"{len(report.failures)} failing instances")
    _emit(args, doc, lines)
    return EXIT_TRUE if report.ok else EXIT_FALSE


def cmd_emit_rcf(args) -> int:
    dialect = DYNAMIC if args.dynamic else STATIC
    f, sig = _load_formula(args, _signature_option(args), dialect)
    if args.auto_signature:
        sig = augment_signature(f)
    if args.dynamic:
        horizon = args.horizon if args.horizon is not None else rcf.required_horizon(f)
        problem = rcf.translate_dynamic(f, sig, horizon, full_sequences=args.full_sequences)
    else:
        problem = rcf.translate_static(f, sig)
    if args.decode:
        assignment = rcf.parse_assignment(Path(args.decode).read_text())
        try:
            decoded = rcf.decode_witness(problem, assignment)
        except DecodeInconsistent as exc:
            doc = {"command": "emit-rcf", "decoded": False, "reason": str(exc)}
            _emit(args, doc, [f"inconsistent witness: {exc}"])
            return EXIT_FALSE
        if args.dynamic:
            run, m = decoded
            holds = satisfies_at(f, run, m)
            doc = {"command": "emit-rcf", "decoded": True, "holds": holds, "time": m, "run": run_to_doc(run)}
        else:
            holds = satisfies(f, decoded)
            doc = {"command": "emit-rcf", "decoded": True, "holds": holds, "world": world_to_doc(decoded)}
        print(json.dumps(doc, indent=2, sort_keys=True))
        return EXIT_TRUE if holds else EXIT_FALSE
    text = rcf.emit(problem, check_sat=not args.no_check_sat, binary_constants=not args.decimal_constants)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_TRUE


# -- parser ---------------------------------------------------------------------------------


def _formula_args(p) -> None:
    p.add_argument("formula", nargs="?", help="formula text (or use --formula-file)")
    p.add_argument("-f", "--formula-file", help="file holding one formula, optionally with a signature header")


def _structure_args(p) -> None:
    p.add_argument("--world", help="world document (JSON)")
    p.add_argument("--run", help="run document (JSON)")


def _output_args(p, default) -> None:
    p.add_argument("--json", action="store_true", default=default, help="print a JSON document instead of text")
    p.add_argument(
        "--approx", type=int, metavar="K", default=default, help="add a K-digit decimal next to each rational"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="evlogic",
        description="Evaluate, audit, solve and translate formulas of the logic of evidence.",
        epilog=__doc__.split("\n\n", 2)[2],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    _output_args(parser, argparse.SUPPRESS)
    common = _Parser(add_help=False)
    _output_args(common, argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    p = sub.add_parser("eval", help="check a formula at a world or at a point of a run")
    _formula_args(p)
    _structure_args(p)
    p.add_argument("--time", type=int, default=0, help="time point for runs (default 0)")
    p.add_argument("--let", action="append", metavar="NAME=VALUE", help="value of a free variable")
    p.add_argument("--tolerance", type=float, help="slack for equalities and non-strict comparisons")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("sat", help="decide satisfiability of a quantifier-free static formula")
    _formula_args(p)
    p.add_argument("--signature", help="'hypotheses: a, b; observations: u, v'")
    p.add_argument("--space", help="take the signature from an evidence-space file")
    p.add_argument("--auto-signature", action="store_true", help="use the formula's names plus h* and ob*")
    p.add_argument("--budget-boxes", type=int, default=SolverOptions.budget_boxes)
    p.add_argument("--max-depth", type=int, default=SolverOptions.max_depth)
    p.add_argument(
        "--tolerance", type=float, help=f"residual tolerance for approximate models (default from {TOLERANCE_ENV} or 1e-9)"
    )
    p.add_argument("--margin", type=float, default=0.0, help="slack demanded of strict constraints when pruning")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--parallel", type=int, default=1, metavar="N", help="search open branches on N threads")
    p.set_defaults(handler=cmd_sat)

    p = sub.add_parser("weights", help="print the weight table of an evidence space")
    p.add_argument("space_file")
    p.add_argument("--mode", choices=sorted(WEIGHT_MODES), default="normalized")
    p.add_argument("--observation", action="append", help="restrict to this observation (repeatable)")
    p.set_defaults(handler=cmd_weights)

    p = sub.add_parser("combine", help="combine a sequence of observations and update a prior")
    p.add_argument("space_file")
    p.add_argument("--sequence", required=True, help="comma-separated observations")
    p.add_argument("--prior", help="'h1=1/2, h2=1/2' (default uniform)")
    p.add_argument("--prior-file", help="prior as a JSON object")
    p.set_defaults(handler=cmd_combine)

    p = sub.add_parser("reconstruct", help="find an evidence space with a given weight table")
    p.add_argument("table_file")
    p.set_defaults(handler=cmd_reconstruct)

    p = sub.add_parser("audit", help="check axiom instances on a world or run")
    _structure_args(p)
    p.add_argument("--horizon", type=int, default=5, help="last time point audited on runs")
    p.add_argument("--axioms", help="comma-separated axiom names (default: all that apply)")
    p.add_argument("--pool-limit", type=int, default=16, help="hypothesis formulas per instance family")
    p.set_defaults(handler=cmd_audit)

    p = sub.add_parser("emit-rcf", help="translate a formula into SMT-LIB 2 real arithmetic")
    _formula_args(p)
    p.add_argument("--signature", help="'hypotheses: a, b; observations: u, v'")
    p.add_argument("--space", help="take the signature from an evidence-space file")
    p.add_argument("--auto-signature", action="store_true", help="use the formula's names plus h* and ob*")
    p.add_argument("--dynamic", action="store_true", help="formula uses X(...) and sequence weights")
    p.add_argument("--horizon", type=int, help="time steps to encode (default: the formula's depth)")
    p.add_argument("--full-sequences", action="store_true", help="constrain every sequence up to the horizon")
    p.add_argument("--no-check-sat", action="store_true", help="omit check-sat and get-model")
    p.add_argument("--decimal-constants", action="store_true", help="write integers as plain numerals")
    p.add_argument("-o", "--output", help="write the SMT-LIB text here")
    p.add_argument("--decode", metavar="WITNESS", help="decode a solver model and check it against the formula")
    p.set_defaults(handler=cmd_emit_rcf)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.json = getattr(args, "json", False)
    args.approx = getattr(args, "approx", None)
    try:
        return args.handler(args)
    except (UsageError, EvidenceError, OSError, ValueError, KeyError) as exc:
        print(f"evlogic {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
