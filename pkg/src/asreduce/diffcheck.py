"""Seeded generators and the differential harness.

The harness contrasts two strategies on the same input: the naive
single-pass strategy, which runs one pass and expects the leading
coefficient to land outside the p-th powers, and the full loop from
:func:`asreduce.equation.reduce`.  The single-pass expectation breaks
exactly when distinct terms collide on a target exponent and their sum
falls back into L^p; the generator plants such collision instances at a
configurable rate so every campaign exercises the interesting case.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .certificate import doc_dumps, equation_to_doc, params_to_doc, verify_trace
from .equation import (
    ASEquation,
    TerminalTag,
    apply_pass,
    compute_sets,
    plan_pass,
    reduce,
)
from .errors import PreconditionError
from .fields import FieldParams, Poly, RatFunc

__all__ = [
    "GenConfig",
    "SinglePassClaim",
    "Counterexample",
    "DiffReport",
    "make_collision_family",
    "run_single_pass_claim",
    "generate_equation",
    "differential_campaign",
    "report_to_doc",
    "report_to_json",
]


def make_collision_family(fp: FieldParams, c0: RatFunc, c1: RatFunc,
                          m1: int) -> ASEquation:
    """Equation engineered so the first pass collides two terms.

    Requires c0 outside both K and L^p and c1 inside L^p (zero counts).
    The terms are c0^p at exponent m1*p and c1 - c0 at exponent m1; the
    pass sends both to the same target exponent, where they sum to c1.
    """
    if m1 < 1:
        raise PreconditionError(f"m1 must be >= 1, got {m1}")
    if c0.is_zero() or c0.is_constant():
        raise PreconditionError("c0 must lie outside K")
    if c0.pth_root() is not None:
        raise PreconditionError("c0 must not be a p-th power")
    if not c1.is_zero() and c1.pth_root() is None:
        raise PreconditionError("c1 must be a p-th power (or zero)")
    return ASEquation(fp, {m1 * fp.p: c0.frobenius(), m1: c1 - c0})


@dataclass(frozen=True)
class SinglePassClaim:
    """Outcome of the single-pass strategy: ``asserted`` is True when
    the leading coefficient after one pass exists and is not a p-th
    power; ``vacuous`` marks inputs with no nonconstant coefficients,
    where the claim holds by convention."""

    asserted: bool
    leading: RatFunc | None
    vacuous: bool = False


def run_single_pass_claim(eq: ASEquation) -> SinglePassClaim:
    sets = compute_sets(eq)
    if not sets.J:
        return SinglePassClaim(asserted=True, leading=None, vacuous=True)
    result, _, _ = apply_pass(eq, plan_pass(eq, sets))
    if not result.terms:
        return SinglePassClaim(asserted=False, leading=None)
    _, coeff = result.leading()
    return SinglePassClaim(asserted=coeff.pth_root() is None, leading=coeff)


# ---------------------------------------------------------------------------
# generation

@dataclass(frozen=True)
class GenConfig:
    fp: FieldParams
    terms: tuple[int, int] = (1, 4)      # inclusive range of term counts
    max_exp: int = 8
    max_deg: int = 4
    seed: int = 0
    family_weight: float = 0.5           # share of collision-family draws

    def __post_init__(self):
        lo, hi = self.terms
        if not (1 <= lo <= hi):
            raise ValueError(f"bad term-count range {self.terms}")
        if self.max_exp < 1 or self.max_deg < 0:
            raise ValueError("max_exp must be >= 1 and max_deg >= 0")
        if not 0.0 <= self.family_weight <= 1.0:
            raise ValueError("family_weight must lie in [0, 1]")


def _random_fq(rng: random.Random, fp: FieldParams, nonzero=False):
    while True:
        c = fp.fq_coeffs(rng.randrange(fp.p) for _ in range(fp.e))
        if not (nonzero and c.is_zero()):
            return c


def _random_poly(rng: random.Random, fp: FieldParams, max_deg: int) -> Poly:
    acc = Poly.zero(fp)
    for _ in range(rng.randint(1, 3)):
        ev = [0] * fp.k
        for _ in range(rng.randint(0, max_deg)):
            ev[rng.randrange(fp.k)] += 1
        acc = acc + Poly.monomial(fp, ev, _random_fq(rng, fp, nonzero=True))
    return acc


def _random_ratfunc(rng: random.Random, fp: FieldParams, max_deg: int) -> RatFunc:
    """Nonzero random coefficient, stratified so constants, p-th powers
    and deeper powers all occur."""
    roll = rng.random()
    if roll < 0.2 or max_deg == 0:
        return RatFunc.constant(fp, _random_fq(rng, fp, nonzero=True))
    while True:
        num = _random_poly(rng, fp, max_deg)
        den = _random_poly(rng, fp, max_deg)
        if not num.is_zero() and not den.is_zero():
            base = RatFunc.make(num, den)
            break
    if roll < 0.45:
        return base.frobenius()
    if roll < 0.55:
        return base.frobenius().frobenius()
    return base


def _random_family(rng: random.Random, cfg: GenConfig) -> ASEquation:
    fp = cfg.fp
    c0 = None
    for _ in range(64):
        cand = _random_ratfunc(rng, fp, cfg.max_deg)
        if not cand.is_constant() and cand.pth_root() is None:
            c0 = cand
            break
    if c0 is None:
        c0 = RatFunc.variable(fp, fp.vars[0])
    roll = rng.random()
    if roll < 1 / 3:
        c1 = RatFunc.zero(fp)
    elif roll < 2 / 3:
        c1 = _random_ratfunc(rng, fp, cfg.max_deg).frobenius()
    else:
        c1 = RatFunc.constant(fp, _random_fq(rng, fp, nonzero=True))
    m1 = rng.randint(1, max(1, cfg.max_exp // fp.p))
    return make_collision_family(fp, c0, c1, m1)


def generate_equation(rng: random.Random, cfg: GenConfig) -> ASEquation:
    """One random equation: a collision-family instance with probability
    ``family_weight``, otherwise terms at distinct random exponents with
    stratified random coefficients."""
    if rng.random() < cfg.family_weight:
        return _random_family(rng, cfg)
    fp = cfg.fp
    count = min(rng.randint(*cfg.terms), cfg.max_exp)
    exponents = rng.sample(range(1, cfg.max_exp + 1), count)
    terms = {m: _random_ratfunc(rng, fp, cfg.max_deg) for m in exponents}
    a0 = RatFunc.zero(fp) if rng.random() < 0.5 else _random_ratfunc(rng, fp, cfg.max_deg)
    return ASEquation(fp, terms, a0)


# ---------------------------------------------------------------------------
# the campaign

@dataclass(frozen=True)
class Counterexample:
    equation: ASEquation
    first_pass_merges: tuple[int, ...]
    terminal: TerminalTag


@dataclass(frozen=True)
class DiffReport:
    config: GenConfig
    runs: int
    claim_holds: int
    vacuous: int                      # subset of claim_holds (empty J)
    counterexamples: tuple[Counterexample, ...]
    verifier_violations: int
    terminal_counts: dict[str, int] = field(default_factory=dict)


def differential_campaign(cfg: GenConfig, runs: int) -> DiffReport:
    """Run both strategies on ``runs`` generated equations, verifying
    every trace.  Deterministic for a fixed config (seed included)."""
    rng = random.Random(cfg.seed)
    holds = 0
    vacuous = 0
    violations = 0
    counterexamples = []
    terminal_counts: dict[str, int] = {}
    for _ in range(runs):
        eq = generate_equation(rng, cfg)
        claim = run_single_pass_claim(eq)
        terminal, trace = reduce(eq)
        violations += len(verify_trace(trace))
        terminal_counts[terminal.tag.value] = terminal_counts.get(terminal.tag.value, 0) + 1
        if claim.asserted:
            holds += 1
            if claim.vacuous:
                vacuous += 1
        else:
            counterexamples.append(Counterexample(
                equation=eq,
                first_pass_merges=trace.passes[0].merges,
                terminal=terminal.tag))
    counterexamples.sort(key=lambda cx: doc_dumps(equation_to_doc(cx.equation)))
    return DiffReport(config=cfg, runs=runs, claim_holds=holds, vacuous=vacuous,
                      counterexamples=tuple(counterexamples),
                      verifier_violations=violations,
                      terminal_counts=terminal_counts)


def report_to_doc(report: DiffReport) -> dict:
    cfg = report.config
    return {
        "config": {
            "params": params_to_doc(cfg.fp),
            "terms": [str(cfg.terms[0]), str(cfg.terms[1])],
            "max_exp": str(cfg.max_exp),
            "max_deg": str(cfg.max_deg),
            "seed": str(cfg.seed),
            "family_weight": repr(cfg.family_weight),
        },
        "runs": str(report.runs),
        "claim_holds": str(report.claim_holds),
        "vacuous": str(report.vacuous),
        "counterexamples": [
            {
                "input": equation_to_doc(cx.equation),
                "first_pass_merges": [str(m) for m in cx.first_pass_merges],
                "terminal": cx.terminal.value,
            }
            for cx in report.counterexamples
        ],
        "verifier_violations": str(report.verifier_violations),
        "terminals": {tag: str(n) for tag, n in sorted(report.terminal_counts.items())},
    }


def report_to_json(report: DiffReport) -> str:
    return doc_dumps(report_to_doc(report))
