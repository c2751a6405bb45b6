"""Command-line front end.

Subcommands: ``reduce`` an equation file, ``check`` a trace document,
``example`` (build a collision-family equation and compare the
single-pass strategy against the full loop), and ``fuzz`` (differential
campaign).  Exit codes: 0 success, 1 verification violations, 2 parse
error, 3 precondition error, 4 internal invariant error.

Equation file format: header lines ``p=``, ``e=`` (default 1),
``modulus=`` (required iff e > 1), ``vars=`` (comma separated), then
one ``term <exp>: <coefficient>`` line per exponent with exp <= 0; exp 0
is the constant term.  Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import argparse
import sys

from .certificate import trace_from_json, trace_to_json, verify_trace
from .diffcheck import (
    GenConfig,
    differential_campaign,
    make_collision_family,
    report_to_json,
    run_single_pass_claim,
)
from .equation import ASEquation, compute_sets, reduce
from .errors import InternalInvariantError, ParseError, PreconditionError
from .fields import FieldParams, parse_modulus, parse_ratfunc

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_INTERNAL = 4


def parse_equation_file(text: str) -> ASEquation:
    """Parse an equation file into an unramified equation."""
    headers: dict[str, tuple[str, int]] = {}
    term_lines: list[tuple[int, str, str]] = []
    in_terms = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("term"):
            in_terms = True
            body = line[4:]
            if ":" not in body:
                raise ParseError("term line needs 'term <exp>: <coefficient>'", line=lineno)
            exp_text, coeff_text = body.split(":", 1)
            term_lines.append((lineno, exp_text.strip(), coeff_text.strip()))
        else:
            if in_terms:
                raise ParseError("header lines must precede term lines", line=lineno)
            if "=" not in line:
                raise ParseError("expected 'key=value' header", line=lineno)
            key, value = line.split("=", 1)
            key = key.strip()
            if key in headers:
                raise ParseError(f"duplicate header {key!r}", line=lineno)
            headers[key] = (value.strip(), lineno)

    def header(key, default=None):
        return headers.pop(key, (default, None))

    p_text, p_line = header("p")
    if p_text is None:
        raise ParseError("missing header 'p'")
    e_text, e_line = header("e", "1")
    vars_text, vars_line = header("vars")
    if vars_text is None:
        raise ParseError("missing header 'vars'")
    modulus_text, modulus_line = header("modulus")
    if headers:
        key, (_, lineno) = next(iter(headers.items()))
        raise ParseError(f"unknown header {key!r}", line=lineno)

    def to_int(text, what, lineno):
        try:
            return int(text)
        except ValueError:
            raise ParseError(f"{what} must be an integer, got {text!r}", line=lineno) from None

    p = to_int(p_text, "p", p_line)
    e = to_int(e_text, "e", e_line)
    modulus = None
    if modulus_text is not None:
        try:
            modulus = parse_modulus(modulus_text, p)
        except ParseError as exc:
            raise exc.at_line(modulus_line)
    names = tuple(v.strip() for v in vars_text.split(",") if v.strip())
    try:
        fp = FieldParams(p=p, e=e, vars=names, modulus=modulus)
    except ValueError as exc:
        raise ParseError(str(exc), line=p_line) from None

    terms = {}
    a0 = None
    seen = set()
    for lineno, exp_text, coeff_text in term_lines:
        exp = to_int(exp_text, "exponent", lineno)
        if exp > 0:
            raise ParseError(f"term exponent must be <= 0, got {exp}", line=lineno)
        if exp in seen:
            raise ParseError(f"duplicate term exponent {exp}", line=lineno)
        seen.add(exp)
        try:
            coeff = parse_ratfunc(coeff_text, fp)
        except ParseError as exc:
            raise exc.at_line(lineno)
        if exp == 0:
            a0 = coeff
        else:
            terms[-exp] = coeff
    return ASEquation(fp, terms, a0)


def format_equation_file(eq: ASEquation) -> str:
    fp = eq.fp
    lines = [f"p={fp.p}", f"e={fp.e}"]
    if fp.modulus is not None:
        from .fields import format_modulus
        lines.append(f"modulus={format_modulus(fp.modulus)}")
    lines.append("vars=" + ",".join(fp.vars))
    for m in sorted(eq.terms, reverse=True):
        lines.append(f"term -{m}: {eq.terms[m]}")
    if not eq.a0.is_zero():
        lines.append(f"term 0: {eq.a0}")
    return "\n".join(lines) + "\n"


def cmd_reduce(args, out) -> int:
    with open(args.file, encoding="utf-8") as fh:
        text = fh.read()
    eq = parse_equation_file(text)
    terminal, trace = reduce(eq, args.max_passes)
    j_sizes = [len(rec.sets.J) for rec in trace.passes]
    print(f"initial: z^p - z = {eq}", file=out)
    print(f"passes: {len(trace.passes)}", file=out)
    for i, rec in enumerate(trace.passes, start=1):
        merges = ",".join(str(m) for m in rec.merges) or "-"
        print(f"  pass {i}: nu={rec.nu} mu={rec.mu} kstep={rec.kstep} "
              f"|J|={len(rec.sets.J)} merges={merges}", file=out)
    if j_sizes:
        print("|J| sequence: " + " -> ".join(str(n) for n in j_sizes), file=out)
    print(f"terminal: {terminal.tag.value}", file=out)
    print(f"uniformizer: t^{eq.fp.p ** terminal.level} = pi  (E = {terminal.level})", file=out)
    print(f"final: z^p - z = {terminal.equation}", file=out)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(trace_to_json(trace))
        print(f"trace written to {args.trace}", file=out)
    return EXIT_OK


def cmd_check(args, out) -> int:
    with open(args.trace, encoding="utf-8") as fh:
        text = fh.read()
    trace = trace_from_json(text)
    violations = verify_trace(trace)
    if not violations:
        print(f"trace OK: {len(trace.passes)} pass(es), "
              f"terminal {trace.terminal.tag.value}", file=out)
        return EXIT_OK
    print(f"{len(violations)} violation(s):", file=out)
    for v in violations:
        print(f"  {v}", file=out)
    return EXIT_VIOLATIONS


def cmd_example(args, out) -> int:
    modulus = parse_modulus(args.modulus, args.p) if args.modulus else None
    fp = FieldParams(p=args.p, e=args.e, vars=(args.var,), modulus=modulus)
    c0 = parse_ratfunc(args.c0, fp)
    c1 = parse_ratfunc(args.c1, fp)
    eq = make_collision_family(fp, c0, c1, args.m1)
    print(f"input: z^p - z = {eq}", file=out)
    claim = run_single_pass_claim(eq)
    lead = "none (all terms cancelled)" if claim.leading is None else str(claim.leading)
    print("single pass: leading coefficient after one pass: " + lead, file=out)
    print(f"single pass: claim that it avoids p-th powers: "
          f"{'holds' if claim.asserted else 'FAILS'}", file=out)
    print("full loop:", file=out)
    terminal, trace = reduce(eq)
    for i, rec in enumerate(trace.passes, start=1):
        merges = ",".join(str(m) for m in rec.merges) or "-"
        print(f"  pass {i}: nu={rec.nu} mu={rec.mu} kstep={rec.kstep} "
              f"|J|={len(rec.sets.J)} merges={merges}", file=out)
    print(f"  terminal: {terminal.tag.value} after {len(trace.passes)} pass(es), "
          f"E = {terminal.level}", file=out)
    print(f"  final: z^p - z = {terminal.equation}", file=out)
    return EXIT_OK


def cmd_fuzz(args, out) -> int:
    modulus = parse_modulus(args.modulus, args.p) if args.modulus else None
    fp = FieldParams(p=args.p, e=args.e, vars=(args.var,), modulus=modulus)
    lo, _, hi = args.terms.partition(":")
    cfg = GenConfig(fp=fp, terms=(int(lo), int(hi or lo)), max_exp=args.max_exp,
                    max_deg=args.max_deg, seed=args.seed,
                    family_weight=args.family_weight)
    report = differential_campaign(cfg, args.count)
    print(f"runs: {report.runs}", file=out)
    print(f"single-pass claim holds: {report.claim_holds} "
          f"(of which vacuous: {report.vacuous})", file=out)
    print(f"counterexamples: {len(report.counterexamples)}", file=out)
    print(f"verifier violations: {report.verifier_violations}", file=out)
    for tag, n in sorted(report.terminal_counts.items()):
        print(f"terminal {tag}: {n}", file=out)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(report_to_json(report))
        print(f"report written to {args.report}", file=out)
    return EXIT_INTERNAL if report.verifier_violations else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="asreduce",
        description="Reduce Artin-Schreier equations over Laurent series "
                    "fields and check reduction certificates.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_reduce = sub.add_parser("reduce", help="reduce an equation file")
    p_reduce.add_argument("file")
    p_reduce.add_argument("--trace", metavar="PATH", help="write the trace document")
    p_reduce.add_argument("--max-passes", type=int, default=None)
    p_reduce.set_defaults(func=cmd_reduce)

    p_check = sub.add_parser("check", help="verify a trace document")
    p_check.add_argument("trace")
    p_check.set_defaults(func=cmd_check)

    p_example = sub.add_parser("example", help="collision-family comparison")
    p_example.add_argument("--p", type=int, default=2)
    p_example.add_argument("--e", type=int, default=1)
    p_example.add_argument("--modulus", default=None)
    p_example.add_argument("--var", default="u")
    p_example.add_argument("--c0", default="u")
    p_example.add_argument("--c1", default="0")
    p_example.add_argument("--m1", type=int, default=1)
    p_example.set_defaults(func=cmd_example)

    p_fuzz = sub.add_parser("fuzz", help="differential campaign")
    p_fuzz.add_argument("--p", type=int, default=2)
    p_fuzz.add_argument("--e", type=int, default=1)
    p_fuzz.add_argument("--modulus", default=None)
    p_fuzz.add_argument("--var", default="u")
    p_fuzz.add_argument("--seed", type=int, default=0)
    p_fuzz.add_argument("--count", type=int, default=100)
    p_fuzz.add_argument("--terms", default="1:4", help="term count range lo:hi")
    p_fuzz.add_argument("--max-exp", type=int, default=8)
    p_fuzz.add_argument("--max-deg", type=int, default=4)
    p_fuzz.add_argument("--family-weight", type=float, default=0.5)
    p_fuzz.add_argument("--report", metavar="PATH", help="write the report document")
    p_fuzz.set_defaults(func=cmd_fuzz)
    return parser


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (PreconditionError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except InternalInvariantError as exc:
        print(f"internal invariant error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
