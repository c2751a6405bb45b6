"""Artin-Schreier right-hand sides over a Laurent uniformizer and the
reduction engine.

An ``ASEquation`` holds the right-hand side of ``z^p - z = RHS`` as a
sparse map from positive integers m to nonzero coefficients in L (the
term in tau^-m), plus a constant term and the cumulative ramification
level: after ``level`` accumulated base changes the current uniformizer
tau satisfies tau^(p^level) = pi.

A reduction pass picks a ramified base change tau -> t with
t^(p^(nu+mu)) = tau, rewrites every term in t, and then repeatedly
replaces p-th power terms c*t^-n (p | n, c a p-th power) by their p-th
roots.  Constant coefficients are peeled all the way down; nonconstant
ones are peeled exactly as far as their p-th-root depth allows, which
lands them on exponents divisible by p with coefficients outside L^p.
Distinct terms can land on the same target exponent; the merged sum may
fall back into L^p (or K, or vanish), in which case the loop simply
starts over on the new equation.  Every merge removes at least one
exponent from the set of non-constant-coefficient terms, so the number
of passes is bounded by the initial size of that set.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import inf

from .errors import InternalInvariantError, PreconditionError
from .fields import FieldParams, RatFunc

__all__ = [
    "ASEquation",
    "SetsIJ",
    "PlanItem",
    "PassPlan",
    "Replacement",
    "PassRecord",
    "TerminalTag",
    "TerminalState",
    "ReductionTrace",
    "compute_sets",
    "choose_nu",
    "compute_mu",
    "ramify",
    "plan_pass",
    "apply_pass",
    "classify",
    "reduce",
]


@dataclass(frozen=True)
class ASEquation:
    """Right-hand side of z^p - z = sum_m terms[m] * tau^-m + a0.

    ``level`` is the cumulative ramification level: the current
    uniformizer tau satisfies tau^(p^level) = pi.  Zero coefficients are
    dropped on construction; exponents must be >= 1.
    """

    fp: FieldParams
    terms: dict[int, RatFunc]
    a0: RatFunc | None = None
    level: int = 0

    def __post_init__(self):
        clean = {}
        for m, c in self.terms.items():
            m = int(m)
            if m < 1:
                raise ValueError(f"term exponent must be >= 1, got {m}")
            if not c.is_zero():
                clean[m] = c
        object.__setattr__(self, "terms", clean)
        if self.a0 is None:
            object.__setattr__(self, "a0", RatFunc.zero(self.fp))
        if self.level < 0:
            raise ValueError("ramification level must be nonnegative")

    def leading(self) -> tuple[int, RatFunc]:
        m = max(self.terms)
        return m, self.terms[m]

    def __str__(self) -> str:
        tau = "pi" if self.level == 0 else "t"
        parts = []
        for m in sorted(self.terms, reverse=True):
            c = str(self.terms[m])
            if "+" in c or "/" in c:
                c = f"({c})"
            parts.append(f"{c}*{tau}^-{m}")
        if not self.a0.is_zero() or not parts:
            a0 = str(self.a0)
            parts.append(f"({a0})" if "/" in a0 else a0)
        return " + ".join(parts)


@dataclass(frozen=True)
class SetsIJ:
    """Partition of the term exponents: I has constant coefficients
    (values in K), J has the rest."""

    I: tuple[int, ...]
    J: tuple[int, ...]


def compute_sets(eq: ASEquation) -> SetsIJ:
    const = sorted(m for m, c in eq.terms.items() if c.is_constant())
    rest = sorted(m for m, c in eq.terms.items() if not c.is_constant())
    return SetsIJ(I=tuple(const), J=tuple(rest))


def choose_nu(sets: SetsIJ, p: int) -> int:
    """Smallest nu >= 1 with min(J) * p^nu > max(I); 1 when I is empty."""
    if not sets.J:
        raise PreconditionError("nu is only defined while J is nonempty")
    if not sets.I:
        return 1
    lo, hi = min(sets.J), max(sets.I)
    nu = 1
    while lo * p ** nu <= hi:
        nu += 1
    return nu


def compute_mu(eq: ASEquation, sets: SetsIJ) -> tuple[int, dict[int, int]]:
    """Per-exponent p-th-root depths of the J coefficients and their
    maximum.  Depths are finite for every member of J."""
    if not sets.J:
        raise PreconditionError("mu is only defined while J is nonempty")
    depths = {}
    for m in sets.J:
        d = eq.terms[m].depth()
        if d is inf:
            raise InternalInvariantError(f"constant coefficient listed in J at {m}")
        depths[m] = d
    return max(depths.values()), depths


def ramify(eq: ASEquation, kstep: int) -> ASEquation:
    """Base change to t with t^(p^kstep) = tau: every exponent scales by
    p^kstep, coefficients and the constant term are untouched."""
    if kstep < 1:
        raise PreconditionError("ramification step must be >= 1")
    scale = eq.fp.p ** kstep
    return ASEquation(eq.fp, {m * scale: c for m, c in eq.terms.items()},
                      eq.a0, eq.level + kstep)


@dataclass(frozen=True)
class PlanItem:
    """Fate of one source term within a pass: how many root replacements
    it undergoes after the base change and where it lands."""

    m: int
    in_j: bool
    depth: int | None      # None for constant coefficients
    roots: int
    target_exp: int
    target_coeff: RatFunc


@dataclass(frozen=True)
class PassPlan:
    nu: int
    mu: int
    kstep: int
    items: tuple[PlanItem, ...]


def plan_pass(eq: ASEquation, sets: SetsIJ) -> PassPlan:
    """Plan one pass: nu and mu selection plus the per-term targets.

    Constant coefficients take nu+mu roots and return to their original
    exponent; the others take depth-many roots and land on exponents
    divisible by p, strictly above every constant-coefficient target.
    Both shape facts are validated here.
    """
    p = eq.fp.p
    nu = choose_nu(sets, p)
    mu, depths = compute_mu(eq, sets)
    kstep = nu + mu
    items = []
    for m in sorted(eq.terms):
        in_j = m in depths
        roots = depths[m] if in_j else kstep
        coeff = eq.terms[m]
        for _ in range(roots):
            nxt = coeff.pth_root()
            if nxt is None:
                raise InternalInvariantError(f"missing p-th root while planning term {m}")
            coeff = nxt
        items.append(PlanItem(m=m, in_j=in_j, depth=depths.get(m),
                              roots=roots, target_exp=m * p ** (kstep - roots),
                              target_coeff=coeff))
    j_targets = [it.target_exp for it in items if it.in_j]
    i_targets = [it.target_exp for it in items if not it.in_j]
    if any(t % p for t in j_targets):
        raise InternalInvariantError("J target exponent not divisible by p")
    if i_targets and j_targets and max(i_targets) >= min(j_targets):
        raise InternalInvariantError("I target does not stay below all J targets")
    return PassPlan(nu=nu, mu=mu, kstep=kstep, items=tuple(items))


@dataclass(frozen=True)
class Replacement:
    """One root replacement: the term coeff*tau^-source was a p-th
    power and was replaced by its root at tau^-target (target =
    source/p).  The Laurent monomial coeff*tau^-target is exactly the
    shift d applied to the unknown (z -> z - d) by this step."""

    coeff: RatFunc
    source: int
    target: int


def apply_pass(eq: ASEquation, plan: PassPlan):
    """Execute a planned pass.

    Returns (new equation, replacements, merges).  Each source term is
    peeled independently along its own chain of roots and the results
    are summed at their target exponents in increasing source order;
    merges lists the target exponents that received more than one term.
    Zero sums are dropped.  The constant term is untouched and the
    ramification level advances by the pass's base-change step.
    """
    p = eq.fp.p
    scale = p ** plan.kstep
    replacements = []
    acc: dict[int, RatFunc] = {}
    hits: dict[int, int] = {}
    for item in plan.items:
        n = item.m * scale
        c = eq.terms[item.m]
        for _ in range(item.roots):
            root = c.pth_root()
            if root is None:
                raise InternalInvariantError(f"missing p-th root while applying term {item.m}")
            n //= p
            replacements.append(Replacement(coeff=root, source=n * p, target=n))
            c = root
        if n != item.target_exp or c != item.target_coeff:
            raise InternalInvariantError(f"pass execution diverged from plan at term {item.m}")
        hits[n] = hits.get(n, 0) + 1
        acc[n] = acc[n] + c if n in acc else c
    merges = tuple(sorted(n for n, count in hits.items() if count >= 2))
    terms = {n: c for n, c in acc.items() if not c.is_zero()}
    result = ASEquation(eq.fp, terms, eq.a0, eq.level + plan.kstep)
    return result, tuple(replacements), merges


class TerminalTag(Enum):
    TRIVIAL = "TRIVIAL"
    NORMAL_FORM = "NORMAL_FORM"
    J_EMPTY = "J_EMPTY"


@dataclass(frozen=True)
class TerminalState:
    """Classification of a finished equation, re-checkable from the
    equation alone (see classify)."""

    tag: TerminalTag
    equation: ASEquation
    level: int


def classify(eq: ASEquation) -> TerminalState | None:
    """Terminal classification, or None when reduction must continue.

    * TRIVIAL: no negative-exponent terms and no base change was ever
      performed (there was nothing to do).
    * J_EMPTY: every remaining coefficient lies in K (vacuously so when
      the terms collapsed to nothing during reduction).
    * NORMAL_FORM: the leading exponent is divisible by p and its
      coefficient is not a p-th power.
    """
    if not eq.terms:
        tag = TerminalTag.TRIVIAL if eq.level == 0 else TerminalTag.J_EMPTY
        return TerminalState(tag, eq, eq.level)
    if all(c.is_constant() for c in eq.terms.values()):
        return TerminalState(TerminalTag.J_EMPTY, eq, eq.level)
    m, c = eq.leading()
    if m % eq.fp.p == 0 and c.pth_root() is None:
        return TerminalState(TerminalTag.NORMAL_FORM, eq, eq.level)
    return None


@dataclass(frozen=True)
class PassRecord:
    """Everything one pass did, redundantly enough that a verifier can
    re-check it without trusting the engine."""

    sets: SetsIJ
    nu: int
    mu: int
    depths: dict[int, int]
    kstep: int
    replacements: tuple[Replacement, ...]
    merges: tuple[int, ...]
    result: ASEquation


@dataclass(frozen=True)
class ReductionTrace:
    fp: FieldParams
    initial: ASEquation
    passes: tuple[PassRecord, ...]
    terminal: TerminalState


def reduce(eq: ASEquation, max_passes: int | None = None):
    """Run passes until the equation classifies as terminal.

    Each pass either finishes the job or merges at least two terms with
    nonconstant coefficients, strictly shrinking J, so at most |J|
    passes run; ``max_passes`` (default |J| + 1) is a safety net whose
    violation is an internal error carrying the partial trace.
    Returns (terminal state, full trace).
    """
    if eq.level != 0:
        raise PreconditionError("reduction starts from an unramified equation")
    budget = max_passes if max_passes is not None else len(compute_sets(eq).J) + 1
    passes: list[PassRecord] = []
    cur = eq
    while True:
        terminal = classify(cur)
        if terminal is not None:
            trace = ReductionTrace(eq.fp, eq, tuple(passes), terminal)
            return terminal, trace
        if len(passes) >= budget:
            raise InternalInvariantError(
                f"no terminal state after {len(passes)} passes",
                partial=(eq, tuple(passes)))
        sets = compute_sets(cur)
        plan = plan_pass(cur, sets)
        nxt, replacements, merges = apply_pass(cur, plan)
        passes.append(PassRecord(
            sets=sets, nu=plan.nu, mu=plan.mu,
            depths={it.m: it.depth for it in plan.items if it.in_j},
            kstep=plan.kstep, replacements=replacements, merges=merges,
            result=nxt))
        if classify(nxt) is None:
            # a pass that does not finish must have merged something,
            # dropped the leading coefficient into the p-th powers, and
            # strictly shrunk J; anything else is a bug
            if nxt.terms and nxt.leading()[1].pth_root() is None:
                raise InternalInvariantError(
                    "leading coefficient escaped the p-th powers on a non-terminal pass",
                    partial=(eq, tuple(passes)))
            if not merges:
                raise InternalInvariantError(
                    "non-terminal pass without a merge", partial=(eq, tuple(passes)))
            if len(compute_sets(nxt).J) >= len(sets.J):
                raise InternalInvariantError(
                    "J did not shrink across a restart", partial=(eq, tuple(passes)))
        cur = nxt
