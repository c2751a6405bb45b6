import dataclasses

import pytest

from asreduce.equation import (
    ASEquation,
    PassRecord,
    ReductionTrace,
    TerminalState,
    TerminalTag,
)
from asreduce.fields import FieldParams, parse_ratfunc


@pytest.fixture
def f2():
    return FieldParams(2)


@pytest.fixture
def f3():
    return FieldParams(3)


@pytest.fixture
def f9():
    # F_9 = F_3[g]/(g^2 + 1)
    return FieldParams(3, e=2, modulus=(1, 0, 1))


@pytest.fixture
def f2uv():
    return FieldParams(2, vars=("u", "v"))


def rf(text, fp):
    return parse_ratfunc(text, fp)


def equation(fp, terms, a0=None, level=0):
    return ASEquation(fp, {m: rf(c, fp) for m, c in terms.items()},
                      None if a0 is None else rf(a0, fp), level)


# ---------------------------------------------------------------------------
# single-field tamper helpers shared by the certificate and acceptance tests

def _with_pass(trace, index, rec):
    passes = list(trace.passes)
    passes[index] = rec
    return dataclasses.replace(trace, passes=tuple(passes))


def tamper_coefficient(trace):
    """Perturb one coefficient of the initial equation."""
    eq = trace.initial
    m = min(eq.terms)
    bump = rf("u", eq.fp)
    c = eq.terms[m]
    c = c + bump if c != -bump else c + rf("1", eq.fp)
    terms = dict(eq.terms)
    terms[m] = c
    return dataclasses.replace(trace, initial=dataclasses.replace(eq, terms=terms))


def tamper_exponent(trace):
    """Move one initial term to a fresh exponent."""
    eq = trace.initial
    m = min(eq.terms)
    terms = dict(eq.terms)
    terms[max(terms) + 1] = terms.pop(m)
    return dataclasses.replace(trace, initial=dataclasses.replace(eq, terms=terms))


def tamper_nu(trace):
    rec = trace.passes[0]
    return _with_pass(trace, 0, dataclasses.replace(rec, nu=rec.nu + 1))


def tamper_mu(trace):
    rec = trace.passes[0]
    return _with_pass(trace, 0, dataclasses.replace(rec, mu=rec.mu + 1))


def tamper_tag(trace):
    tags = [t for t in TerminalTag if t != trace.terminal.tag]
    return dataclasses.replace(
        trace, terminal=dataclasses.replace(trace.terminal, tag=tags[0]))


def tamper_level(trace):
    return dataclasses.replace(
        trace, terminal=dataclasses.replace(trace.terminal,
                                            level=trace.terminal.level + 1))


TAMPERS = {
    "coefficient": tamper_coefficient,
    "exponent": tamper_exponent,
    "nu": tamper_nu,
    "mu": tamper_mu,
    "tag": tamper_tag,
    "E": tamper_level,
}
