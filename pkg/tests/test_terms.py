from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cinf.errors import ArityError, ArityMismatch, DomainError, SexprSyntaxError, UnknownSymbol
from cinf.random_instances import random_map, rng_from
from cinf.sexpr import parse_term
from cinf.terms import (
    App,
    Const,
    DefApp,
    SmoothMap,
    Var,
    compose,
    derivative,
    differentiate,
    evaluate,
    evaluate_exact,
    evaluate_many,
    free_support,
    normalize,
    slot,
    to_sexpr,
)

from oracles import central_difference


def norm(text):
    return to_sexpr(normalize(parse_term(text)))


def smooth(text, names):
    return SmoothMap.from_term(parse_term(text), names)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("(+ 2 3)", "5"),
        ("(* x 0)", "0"),
        ("(+ x (neg x))", "0"),
        ("(* (+ x 1) (+ x 1))", "(+ 1 (* 2 x) (* x x))"),
        ("(+ (sin 0) (cos 0) (exp 0) (log 1) (atan 0))", "2"),
        ("(recip 4)", "1/4"),
        ("(+ (* -1 x) (* x x))", "(+ (* -1 x) (* x x))"),
        ("(sin (+ x 0))", "(sin x)"),
        ("(+)", "0"),
        ("(*)", "1"),
        ("(+ x)", "x"),
    ],
)
def test_normal_forms(text, expected):
    assert norm(text) == expected


def test_normal_form_is_order_independent():
    assert normalize(parse_term("(+ (* y x) (sin x))")) == normalize(parse_term("(+ (sin x) (* x y))"))


def test_projection_axiom_example():
    # p_2^3(x, y*z, sin x) is the second argument
    args = [smooth("x", ["x", "y", "z"]), smooth("(* y z)", ["x", "y", "z"]), smooth("(sin x)", ["x", "y", "z"])]
    assert compose(SmoothMap.projection(2, 3), args) == args[1]


def test_composition_expands_definitions():
    square = smooth("(* x x)", ["x"])
    shifted = compose(square, [smooth("(+ x 1)", ["x"])])
    assert to_sexpr(shifted.body) == "(+ 1 (* 2 v1) (* v1 v1))"
    assert evaluate(shifted, [2]) == 9.0
    nested = DefApp(square, (DefApp(square, (Var("x"),)),))
    assert normalize(nested) == normalize(parse_term("(* x x x x)"))


def test_free_support_sees_through_projections():
    p1 = SmoothMap.projection(1, 2)
    t = DefApp(p1, (Var("x"), Var("y")))
    assert free_support(t) == {"x"}


def test_derivative_examples():
    assert to_sexpr(derivative(parse_term("(sin (* x x))"), "x")) == "(* 2 x (cos (* x x)))"
    assert to_sexpr(derivative(parse_term("(exp y)"), "x")) == "0"
    d = differentiate(smooth("(* x y)", ["x", "y"]), 2)
    assert d == SmoothMap.projection(1, 2)


def test_exact_evaluation_of_rational_maps():
    f = smooth("(+ (* x x) (recip 3))", ["x"])
    assert evaluate_exact(f, [Fraction(1, 2)]) == Fraction(7, 12)
    assert evaluate_exact(smooth("(sin x)", ["x"]), [0]) is None


def test_partial_primitives_raise_domain_error():
    with pytest.raises(DomainError):
        evaluate(smooth("(log x)", ["x"]), [-1.0])
    with pytest.raises(DomainError):
        evaluate(smooth("(recip x)", ["x"]), [0.0])
    vals = evaluate_many(smooth("(log x)", ["x"]), np.array([[1.0], [-1.0]]))
    assert vals[0] == 0.0 and np.isnan(vals[1])


def test_arity_checks():
    with pytest.raises(ArityMismatch):
        compose(SmoothMap.projection(1, 2), [SmoothMap.projection(1, 1)])
    with pytest.raises(ArityMismatch):
        SmoothMap(1, slot(2))
    with pytest.raises(ArityMismatch):
        SmoothMap.from_term(parse_term("(+ x y)"), ["x"])


@pytest.mark.parametrize(
    "text, error, where",
    [
        ("(+ x", SexprSyntaxError, (1, 1)),
        ("x)", SexprSyntaxError, (1, 2)),
        ("(foo x)", UnknownSymbol, (1, 2)),
        ("(sin x y)", ArityError, (1, 2)),
        ("\n  (neg)", ArityError, (2, 4)),
        ("(+ 1/0 x)", SexprSyntaxError, (1, 4)),
    ],
)
def test_parse_errors_carry_locations(text, error, where):
    with pytest.raises(error) as info:
        parse_term(text)
    assert (info.value.line, info.value.column) == where


def test_rationals_and_comments_parse():
    assert parse_term("; comment\n(* -3/4 x)") == App("mul", (Const(Fraction(-3, 4)), Var("x")))


seeds = st.integers(min_value=0, max_value=10**6)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_normalize_is_idempotent(seed):
    rng = rng_from(seed)
    f = random_map(rng, 3, 3)
    assert normalize(f.body) == f.body
    assert SmoothMap(3, f.body) == f


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_normalization_preserves_values(seed):
    rng = rng_from(seed)
    raw = random_map(rng, 2, 3)
    # Re-wrap in an unnormalized tree: f(x) + 0 * g(x) evaluated numerically.
    p = rng.uniform(-2, 2, 2)
    tree = App("add", (raw.body, App("mul", (Const(0), slot(1)))))
    assert evaluate(SmoothMap(2, tree), p) == pytest.approx(evaluate(raw, p), rel=1e-12, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_derivative_matches_central_differences(seed):
    rng = rng_from(seed)
    f = random_map(rng, 2, 3)
    p = rng.uniform(-1.5, 1.5, 2)
    for i in (1, 2):
        exact = evaluate(differentiate(f, i), p)
        approx = central_difference(lambda q: evaluate(f, q), p, i - 1)
        assert exact == pytest.approx(approx, rel=1e-5, abs=1e-6)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_composition_is_associative(seed):
    rng = rng_from(seed)
    f = random_map(rng, 2, 2)
    g = [random_map(rng, 1, 2) for _ in range(2)]
    h = [random_map(rng, 2, 2)]
    left = compose(compose(f, g), h)
    right = compose(f, [compose(gi, h) for gi in g])
    assert left == right


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_polynomial_normal_form_is_canonical(seed):
    rng = rng_from(seed)
    f = random_map(rng, 2, 3, transcendental=False)
    g = random_map(rng, 2, 3, transcendental=False)
    assert (f * g) == (g * f)
    assert (f + g) * f == f * f + g * f
