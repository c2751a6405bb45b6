import random

import pytest

from asreduce.diffcheck import GenConfig, generate_equation
from asreduce.equation import (
    ASEquation,
    SetsIJ,
    TerminalTag,
    apply_pass,
    choose_nu,
    classify,
    compute_mu,
    compute_sets,
    plan_pass,
    ramify,
    reduce,
)
from asreduce.errors import InternalInvariantError, PreconditionError
from asreduce.fields import FieldParams, RatFunc

from conftest import equation, rf


# ---------------------------------------------------------------------------
# construction

def test_equation_drops_zero_coefficients(f2):
    eq = ASEquation(f2, {2: rf("u", f2), 1: RatFunc.zero(f2)})
    assert set(eq.terms) == {2}
    assert eq.a0.is_zero()
    assert eq.level == 0


def test_equation_rejects_bad_exponent(f2):
    with pytest.raises(ValueError):
        ASEquation(f2, {0: rf("u", f2)})


# ---------------------------------------------------------------------------
# I/J partition

def test_compute_sets_examples(f2):
    eq = equation(f2, {2: "u^2", 1: "u"})
    assert compute_sets(eq) == SetsIJ(I=(), J=(1, 2))

    eq = equation(f2, {3: "1"})
    assert compute_sets(eq) == SetsIJ(I=(3,), J=())

    eq = equation(f2, {2: "u", 1: "1"})
    assert compute_sets(eq) == SetsIJ(I=(1,), J=(2,))


# ---------------------------------------------------------------------------
# nu and mu selection

def test_choose_nu_examples():
    assert choose_nu(SetsIJ(I=(3,), J=(1,)), 2) == 2   # 1*2 <= 3 < 1*4
    assert choose_nu(SetsIJ(I=(), J=(5,)), 3) == 1     # vacuous bound
    assert choose_nu(SetsIJ(I=(1,), J=(2,)), 2) == 1   # 2*2 = 4 > 1


def test_choose_nu_requires_j():
    with pytest.raises(PreconditionError):
        choose_nu(SetsIJ(I=(1,), J=()), 2)


def test_compute_mu_examples(f2):
    eq = equation(f2, {1: "u", 2: "u^2"})
    mu, depths = compute_mu(eq, compute_sets(eq))
    assert depths == {1: 0, 2: 1}
    assert mu == 1

    eq = equation(f2, {1: "u"})
    assert compute_mu(eq, compute_sets(eq)) == (0, {1: 0})

    eq = equation(f2, {1: "u^4+1"})
    assert compute_mu(eq, compute_sets(eq)) == (2, {1: 2})


# ---------------------------------------------------------------------------
# ramified base change

def test_ramify_examples(f2, f3):
    eq = equation(f2, {2: "u^2", 1: "u"})
    out = ramify(eq, 2)
    assert set(out.terms) == {8, 4}
    assert out.terms[8] == rf("u^2", f2)
    assert out.terms[4] == rf("u", f2)
    assert out.level == 2
    assert out.a0 == eq.a0

    empty = ASEquation(f2, {})
    assert ramify(empty, 3).level == 3
    assert not ramify(empty, 3).terms

    eq3 = equation(f3, {1: "u"})
    assert set(ramify(eq3, 1).terms) == {3}


def test_ramify_scales_exponent_multiset(f2):
    rng = random.Random(5)
    cfg = GenConfig(fp=f2, seed=5)
    for _ in range(25):
        eq = generate_equation(rng, cfg)
        k = rng.randint(1, 3)
        out = ramify(eq, k)
        assert sorted(out.terms) == sorted(m * 2 ** k for m in eq.terms)


# ---------------------------------------------------------------------------
# pass planning

def test_plan_pass_collision_example(f2):
    eq = equation(f2, {2: "u^2", 1: "u"})
    plan = plan_pass(eq, compute_sets(eq))
    assert (plan.nu, plan.mu, plan.kstep) == (1, 1, 2)
    by_m = {it.m: it for it in plan.items}
    assert by_m[2].target_exp == 4 and by_m[2].target_coeff == rf("u", f2)
    assert by_m[1].target_exp == 4 and by_m[1].target_coeff == rf("u", f2)


def test_plan_pass_single_term(f2):
    eq = equation(f2, {1: "u"})
    plan = plan_pass(eq, compute_sets(eq))
    assert (plan.nu, plan.mu) == (1, 0)
    item, = plan.items
    assert item.target_exp == 2 and item.target_coeff == rf("u", f2)


def test_plan_pass_constant_roots(f2):
    eq = equation(f2, {2: "u", 1: "1"})
    plan = plan_pass(eq, compute_sets(eq))
    by_m = {it.m: it for it in plan.items}
    assert not by_m[1].in_j
    assert by_m[1].roots == plan.nu + plan.mu
    assert by_m[1].target_exp == 1
    assert by_m[1].target_coeff == rf("1", f2)


def test_plan_pass_shape_invariants(f2):
    rng = random.Random(11)
    cfg = GenConfig(fp=f2, seed=11)
    checked = 0
    for _ in range(40):
        eq = generate_equation(rng, cfg)
        sets = compute_sets(eq)
        if not sets.J:
            continue
        plan = plan_pass(eq, sets)
        j_targets = [it.target_exp for it in plan.items if it.in_j]
        i_targets = [it.target_exp for it in plan.items if not it.in_j]
        assert all(t % 2 == 0 for t in j_targets)
        assert all(i < j for i in i_targets for j in j_targets)
        checked += 1
    assert checked > 10


# ---------------------------------------------------------------------------
# pass execution

def test_apply_pass_collapse(f2):
    eq = equation(f2, {2: "u^2", 1: "u"})
    result, replacements, merges = apply_pass(eq, plan_pass(eq, compute_sets(eq)))
    assert not result.terms          # u + u = 0 at the shared target
    assert merges == (4,)
    assert result.level == 2
    assert [(str(r.coeff), r.source, r.target) for r in replacements] == [("u", 8, 4)]


def test_apply_pass_merge_into_square(f2):
    eq = equation(f2, {2: "u^2", 1: "u^2+u"})  # collision sums to u^2
    result, _, merges = apply_pass(eq, plan_pass(eq, compute_sets(eq)))
    assert merges == (4,)
    assert {m: str(c) for m, c in result.terms.items()} == {4: "u^2"}
    # the merged value is (c1 - c0) + c0 = c1
    assert result.terms[4] == rf("u^2", f2)


def test_apply_pass_no_collision(f2):
    eq = equation(f2, {1: "u"})
    result, replacements, merges = apply_pass(eq, plan_pass(eq, compute_sets(eq)))
    assert {m: str(c) for m, c in result.terms.items()} == {2: "u"}
    assert merges == ()
    assert replacements == ()        # depth 0: no roots taken


def test_apply_pass_keeps_a0(f2):
    eq = equation(f2, {1: "u"}, a0="u+1")
    result, _, _ = apply_pass(eq, plan_pass(eq, compute_sets(eq)))
    assert result.a0 == rf("u+1", f2)


# ---------------------------------------------------------------------------
# classification

def test_classify_empty_fresh_is_trivial(f2):
    state = classify(ASEquation(f2, {}))
    assert state.tag is TerminalTag.TRIVIAL


def test_classify_empty_after_ramification_is_j_empty(f2):
    state = classify(ASEquation(f2, {}, None, level=2))
    assert state.tag is TerminalTag.J_EMPTY


def test_classify_constants(f2):
    state = classify(equation(f2, {3: "1", 1: "1"}))
    assert state.tag is TerminalTag.J_EMPTY


def test_classify_normal_form(f2):
    state = classify(equation(f2, {8: "u"}))
    assert state.tag is TerminalTag.NORMAL_FORM


def test_classify_continue_cases(f2):
    assert classify(equation(f2, {8: "u^2"})) is None  # leading a square
    assert classify(equation(f2, {3: "u"})) is None    # odd leading exponent
    assert classify(equation(f2, {3: "1", 1: "u"})) is None


# ---------------------------------------------------------------------------
# the loop

def test_reduce_collapse(f2):
    eq = equation(f2, {2: "u^2", 1: "u"})
    terminal, trace = reduce(eq)
    assert terminal.tag is TerminalTag.J_EMPTY
    assert not terminal.equation.terms
    assert terminal.equation.a0.is_zero()
    assert terminal.level == 2
    assert len(trace.passes) == 1


def test_reduce_two_pass_variant(f2):
    eq = equation(f2, {2: "u^2", 1: "u^2+u"})
    terminal, trace = reduce(eq)
    assert terminal.tag is TerminalTag.NORMAL_FORM
    assert len(trace.passes) == 2
    assert [len(r.sets.J) for r in trace.passes] == [2, 1]
    assert terminal.level == 4
    assert {m: str(c) for m, c in terminal.equation.terms.items()} == {8: "u"}


def test_reduce_constants_in_zero_passes(f2):
    terminal, trace = reduce(equation(f2, {3: "1"}))
    assert terminal.tag is TerminalTag.J_EMPTY
    assert not trace.passes
    assert terminal.level == 0


def test_reduce_rejects_ramified_start(f2):
    eq = ASEquation(f2, {2: rf("u", f2)}, None, level=1)
    with pytest.raises(PreconditionError):
        reduce(eq)


def test_reduce_max_passes_exceeded(f2):
    with pytest.raises(InternalInvariantError) as info:
        reduce(equation(f2, {1: "u"}), max_passes=0)
    assert info.value.partial is not None


def test_reduce_restart_bookkeeping(f2, f3):
    rng = random.Random(3)
    for fp in (f2, f3):
        cfg = GenConfig(fp=fp, seed=3)
        for _ in range(40):
            eq = generate_equation(rng, cfg)
            j0 = len(compute_sets(eq).J)
            terminal, trace = reduce(eq)
            assert len(trace.passes) <= max(j0, 0) or j0 == 0
            # restarts strictly shrink J and follow a merge
            before = eq
            for i, rec in enumerate(trace.passes):
                if i > 0:
                    assert trace.passes[i - 1].merges
                    assert len(compute_sets(before).J) < len(trace.passes[i - 1].sets.J)
                before = rec.result
            # E accumulates the kstep of every pass
            assert terminal.level == sum(r.kstep for r in trace.passes)
            # terminal tag is recomputable from the final equation
            assert classify(terminal.equation).tag is terminal.tag
