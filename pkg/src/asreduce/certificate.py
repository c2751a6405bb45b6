"""Independent verification and serialization of reduction traces.

The key identity: replacing a batch of p-th power terms by their roots
changes the right-hand side F into F - (D^p - D) where D is the sum of
the introduced Laurent monomials (the unknown shifts z -> z - d compose
additively because X^p - X is additive in characteristic p).  A pass is
therefore checkable without re-running the engine: rewrite the incoming
equation through the recorded base change, subtract the recorded
result, and compare against D^p - D built from the recorded
replacements.  The remaining checks are arithmetic on the recorded
selection data (nu, mu, depths, target shape).

Violations are collected, never raised, so a tampered document reports
everything wrong with it.  Serialization is plain JSON with every
integer as a decimal string (exponents outgrow machine words quickly)
and coefficients in the textual grammar of :mod:`asreduce.fields`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import ParseError
from .equation import (
    ASEquation,
    PassRecord,
    ReductionTrace,
    Replacement,
    SetsIJ,
    TerminalState,
    TerminalTag,
    classify,
    compute_sets,
    ramify,
)
from .fields import FieldParams, RatFunc, format_modulus, format_ratfunc, parse_modulus, parse_ratfunc

__all__ = [
    "LaurentPoly",
    "as_operator",
    "Violation",
    "verify_pass",
    "verify_trace",
    "equation_to_doc",
    "equation_from_doc",
    "trace_to_doc",
    "trace_from_doc",
    "trace_to_json",
    "trace_from_json",
    "doc_dumps",
]


class LaurentPoly:
    """Sparse Laurent polynomial in the current uniformizer: exponent
    (any sign) -> nonzero coefficient in L."""

    __slots__ = ("fp", "terms")

    def __init__(self, fp: FieldParams, terms=None):
        clean: dict[int, RatFunc] = {}
        if terms:
            for n, c in (terms.items() if isinstance(terms, dict) else terms):
                if not c.is_zero():
                    n = int(n)
                    acc = clean.get(n)
                    c = c if acc is None else acc + c
                    if c.is_zero():
                        clean.pop(n, None)
                    else:
                        clean[n] = c
        self.fp = fp
        self.terms = clean

    @classmethod
    def zero(cls, fp: FieldParams) -> "LaurentPoly":
        return cls(fp)

    @classmethod
    def monomial(cls, fp: FieldParams, n: int, c: RatFunc) -> "LaurentPoly":
        return cls(fp, {n: c})

    @classmethod
    def from_equation(cls, eq: ASEquation) -> "LaurentPoly":
        terms = {-m: c for m, c in eq.terms.items()}
        if not eq.a0.is_zero():
            terms[0] = eq.a0
        return cls(eq.fp, terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.terms)
        for n, c in other.terms.items():
            s = out.get(n)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(n, None)
            else:
                out[n] = s
        return LaurentPoly(self.fp, out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.fp, {n: -c for n, c in self.terms.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def frobenius(self) -> "LaurentPoly":
        p = self.fp.p
        return LaurentPoly(self.fp, {n * p: c.frobenius() for n, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        return (isinstance(other, LaurentPoly) and self.fp == other.fp
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.fp, frozenset(self.terms.items())))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({self.terms[n]})*tau^{n}" for n in sorted(self.terms))


def as_operator(d: LaurentPoly) -> LaurentPoly:
    """d^p - d, the change a shift z -> z - d makes to the right-hand
    side of z^p - z = F."""
    return d.frobenius() - d


@dataclass(frozen=True)
class Violation:
    check: str
    where: str
    detail: str

    def __str__(self) -> str:
        return f"[{self.check}] {self.where}: {self.detail}"


def _shift_sum(fp: FieldParams, replacements) -> LaurentPoly:
    return LaurentPoly(fp, [(-r.target, r.coeff) for r in replacements])


def verify_pass(before: ASEquation, rec: PassRecord, where: str = "pass") -> list[Violation]:
    """Re-check one pass against the equation it claims to transform.

    Checks the recorded I/J partition and depths against recomputation,
    the nu and mu selection rules, the shape of the implied targets
    (divisible by p for J, strictly below all J targets for I), and the
    shift identity rewritten-input - result = D^p - D.
    """
    out: list[Violation] = []
    bad = lambda check, detail: out.append(Violation(check, where, detail))
    fp = before.fp
    p = fp.p

    computed = compute_sets(before)
    if rec.sets != computed:
        bad("sets", f"recorded I={rec.sets.I} J={rec.sets.J}, "
                    f"computed I={computed.I} J={computed.J}")

    # depths and mu
    depths_ok = True
    if set(rec.depths) != set(rec.sets.J):
        depths_ok = False
        bad("depths", "recorded depth keys do not match recorded J")
    for m, d in rec.depths.items():
        c = before.terms.get(m)
        if c is None:
            depths_ok = False
            bad("depths", f"exponent {m} is not a term of the incoming equation")
        elif c.is_constant() or c.depth() != d:
            depths_ok = False
            bad("depths", f"depth at {m}: recorded {d}, "
                          f"computed {'inf' if c.is_constant() else c.depth()}")
    if rec.depths and rec.mu != max(rec.depths.values()):
        bad("mu", f"mu={rec.mu} is not the maximum recorded depth")
    if not rec.depths:
        bad("mu", "pass has no J depths; passes require a nonempty J")

    # nu selection
    if rec.nu < 1:
        bad("nu", f"nu={rec.nu} must be >= 1")
    elif computed.J:
        lo = min(computed.J)
        hi = max(computed.I) if computed.I else None
        if hi is not None and lo * p ** rec.nu <= hi:
            bad("nu", f"min(J)*p^nu = {lo * p ** rec.nu} does not exceed max(I) = {hi}")
        if hi is None and rec.nu != 1:
            bad("nu", f"I is empty but nu={rec.nu} is not minimal")
        if hi is not None and rec.nu > 1 and lo * p ** (rec.nu - 1) > hi:
            bad("nu", f"nu={rec.nu} is not minimal; nu-1 already satisfies the bound")

    if rec.kstep != rec.nu + rec.mu:
        bad("kstep", f"kstep={rec.kstep} differs from nu+mu={rec.nu + rec.mu}")

    # target shape implied by the recorded selection data
    if depths_ok and rec.kstep >= 1:
        j_targets = []
        shape_ok = True
        for m in rec.sets.J:
            surplus = rec.kstep - rec.depths[m]
            if surplus < 0:
                shape_ok = False
                bad("shape", f"depth at {m} exceeds nu+mu")
                continue
            t = m * p ** surplus
            j_targets.append(t)
            if t % p:
                shape_ok = False
                bad("shape", f"J target {t} (from {m}) is not divisible by p")
        if shape_ok and rec.sets.I and j_targets:
            if max(rec.sets.I) >= min(j_targets):
                bad("shape", f"I target {max(rec.sets.I)} is not below all J targets")

    # the shift identity
    if rec.kstep >= 1:
        lhs = (LaurentPoly.from_equation(ramify(before, rec.kstep))
               - LaurentPoly.from_equation(rec.result))
        rhs = as_operator(_shift_sum(fp, rec.replacements))
        if lhs != rhs:
            diff = lhs - rhs
            bad("identity", "rewritten input minus result is not D^p - D "
                            f"(difference at exponents {sorted(diff.terms)})")
    else:
        bad("kstep", f"kstep={rec.kstep} must be >= 1")

    if rec.result.level != before.level + rec.kstep:
        bad("level", f"result level {rec.result.level} != "
                     f"{before.level} + {rec.kstep}")
    return out


def verify_trace(trace: ReductionTrace) -> list[Violation]:
    """Re-check a whole trace: every pass, the chaining between passes,
    the strict shrinking of J across restarts, terminal tag soundness,
    and the ramification bookkeeping.  Empty result means valid."""
    out: list[Violation] = []
    if trace.initial.level != 0:
        out.append(Violation("level", "initial", "initial equation is already ramified"))
    before = trace.initial
    prev_j = None
    for i, rec in enumerate(trace.passes):
        where = f"pass {i + 1}"
        if i > 0 and classify(before) is not None:
            out.append(Violation("chain", where, "continues past a terminal equation"))
        j_size = len(compute_sets(before).J)
        if prev_j is not None and j_size >= prev_j:
            out.append(Violation("j_monotonic", where,
                                 f"|J| went {prev_j} -> {j_size} across a restart"))
        out.extend(verify_pass(before, rec, where))
        prev_j = j_size
        before = rec.result

    term = trace.terminal
    if term.equation != before:
        out.append(Violation("chain", "terminal",
                             "terminal equation is not the last pass result"))
    if term.level != term.equation.level:
        out.append(Violation("level", "terminal",
                             f"terminal level {term.level} != equation level "
                             f"{term.equation.level}"))
    actual = classify(term.equation)
    if actual is None:
        out.append(Violation("terminal_tag", "terminal",
                             "final equation does not classify as terminal"))
    elif actual.tag != term.tag:
        out.append(Violation("terminal_tag", "terminal",
                             f"recorded {term.tag.value}, computed {actual.tag.value}"))
    return out


# ---------------------------------------------------------------------------
# document form

def _istr(n: int) -> str:
    return str(int(n))


def _as_int(value, what: str, minimum: int | None = None) -> int:
    if not isinstance(value, str) or not value.lstrip("-").isdigit():
        raise ParseError(f"{what} must be a decimal string, got {value!r}")
    n = int(value)
    if minimum is not None and n < minimum:
        raise ParseError(f"{what} must be >= {minimum}, got {n}")
    return n


def _expect(doc, key: str, what: str):
    if not isinstance(doc, dict) or key not in doc:
        raise ParseError(f"{what} is missing field {key!r}")
    return doc[key]


def params_to_doc(fp: FieldParams) -> dict:
    return {
        "p": _istr(fp.p),
        "e": _istr(fp.e),
        "modulus": None if fp.modulus is None else format_modulus(fp.modulus),
        "vars": list(fp.vars),
    }


def params_from_doc(doc) -> FieldParams:
    p = _as_int(_expect(doc, "p", "params"), "p", 2)
    e = _as_int(_expect(doc, "e", "params"), "e", 1)
    raw_vars = _expect(doc, "vars", "params")
    if not isinstance(raw_vars, list) or not all(isinstance(v, str) for v in raw_vars):
        raise ParseError("params field 'vars' must be a list of names")
    raw_mod = doc.get("modulus")
    modulus = None if raw_mod is None else parse_modulus(raw_mod, p)
    try:
        return FieldParams(p=p, e=e, vars=tuple(raw_vars), modulus=modulus)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def equation_to_doc(eq: ASEquation) -> dict:
    return {
        "terms": {_istr(m): format_ratfunc(c) for m, c in sorted(eq.terms.items())},
        "a0": format_ratfunc(eq.a0),
        "E": _istr(eq.level),
    }


def equation_from_doc(doc, fp: FieldParams) -> ASEquation:
    raw = _expect(doc, "terms", "equation")
    if not isinstance(raw, dict):
        raise ParseError("equation field 'terms' must be an object")
    terms = {}
    for key, expr in raw.items():
        m = _as_int(key, "term exponent", 1)
        if not isinstance(expr, str):
            raise ParseError(f"coefficient at {key} must be a string")
        terms[m] = parse_ratfunc(expr, fp)
    a0 = parse_ratfunc(_expect(doc, "a0", "equation"), fp)
    level = _as_int(_expect(doc, "E", "equation"), "E", 0)
    return ASEquation(fp, terms, a0, level)


def _pass_to_doc(rec: PassRecord) -> dict:
    return {
        "I": [_istr(m) for m in rec.sets.I],
        "J": [_istr(m) for m in rec.sets.J],
        "nu": _istr(rec.nu),
        "mu": _istr(rec.mu),
        "depths": {_istr(m): _istr(d) for m, d in sorted(rec.depths.items())},
        "kstep": _istr(rec.kstep),
        "replacements": [
            {"coeff": format_ratfunc(r.coeff), "source": _istr(r.source),
             "target": _istr(r.target)}
            for r in rec.replacements
        ],
        "merges": [_istr(m) for m in rec.merges],
        "result": equation_to_doc(rec.result),
    }


def _pass_from_doc(doc, fp: FieldParams) -> PassRecord:
    def int_list(key):
        raw = _expect(doc, key, "pass")
        if not isinstance(raw, list):
            raise ParseError(f"pass field {key!r} must be a list")
        return tuple(_as_int(x, key, 1) for x in raw)

    raw_depths = _expect(doc, "depths", "pass")
    if not isinstance(raw_depths, dict):
        raise ParseError("pass field 'depths' must be an object")
    raw_reps = _expect(doc, "replacements", "pass")
    if not isinstance(raw_reps, list):
        raise ParseError("pass field 'replacements' must be a list")
    replacements = []
    for r in raw_reps:
        coeff = _expect(r, "coeff", "replacement")
        if not isinstance(coeff, str):
            raise ParseError("replacement field 'coeff' must be a string")
        replacements.append(Replacement(
            coeff=parse_ratfunc(coeff, fp),
            source=_as_int(_expect(r, "source", "replacement"), "source", 1),
            target=_as_int(_expect(r, "target", "replacement"), "target", 1)))
    return PassRecord(
        sets=SetsIJ(I=int_list("I"), J=int_list("J")),
        nu=_as_int(_expect(doc, "nu", "pass"), "nu"),
        mu=_as_int(_expect(doc, "mu", "pass"), "mu", 0),
        depths={_as_int(k, "depth exponent", 1): _as_int(v, "depth", 0)
                for k, v in raw_depths.items()},
        kstep=_as_int(_expect(doc, "kstep", "pass"), "kstep"),
        replacements=tuple(replacements),
        merges=int_list("merges"),
        result=equation_from_doc(_expect(doc, "result", "pass"), fp),
    )


def trace_to_doc(trace: ReductionTrace) -> dict:
    return {
        "params": params_to_doc(trace.fp),
        "initial": equation_to_doc(trace.initial),
        "passes": [_pass_to_doc(rec) for rec in trace.passes],
        "terminal": {
            "tag": trace.terminal.tag.value,
            "equation": equation_to_doc(trace.terminal.equation),
            "E": _istr(trace.terminal.level),
        },
    }


def trace_from_doc(doc) -> ReductionTrace:
    fp = params_from_doc(_expect(doc, "params", "trace"))
    initial = equation_from_doc(_expect(doc, "initial", "trace"), fp)
    raw_passes = _expect(doc, "passes", "trace")
    if not isinstance(raw_passes, list):
        raise ParseError("trace field 'passes' must be a list")
    passes = tuple(_pass_from_doc(p, fp) for p in raw_passes)
    raw_term = _expect(doc, "terminal", "trace")
    tag_text = _expect(raw_term, "tag", "terminal")
    try:
        tag = TerminalTag(tag_text)
    except ValueError:
        raise ParseError(f"unknown terminal tag {tag_text!r}") from None
    equation = equation_from_doc(_expect(raw_term, "equation", "terminal"), fp)
    level = _as_int(_expect(raw_term, "E", "terminal"), "E", 0)
    return ReductionTrace(fp, initial, passes,
                          TerminalState(tag, equation, level))


def doc_dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def trace_to_json(trace: ReductionTrace) -> str:
    return doc_dumps(trace_to_doc(trace))


def trace_from_json(text: str) -> ReductionTrace:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return trace_from_doc(doc)
