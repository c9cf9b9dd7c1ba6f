import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cinf import quadrature
from cinf.errors import DomainError, NotPolynomial, QuadratureFailure
from cinf.hadamard import (
    SegmentIntegral,
    cofactor_text,
    evaluate_cofactor,
    hadamard_decompose,
    hadamard_exact,
    hadamard_quadrature,
    symbolic_residual,
    verify_decomposition,
)
from cinf.random_instances import random_map, random_polynomial, rng_from
from cinf.sexpr import parse_term
from cinf.terms import SmoothMap, differentiate, evaluate, to_sexpr

from oracles import quadpack_segment


def smooth(text, names):
    return SmoothMap.from_term(parse_term(text), names)


XY1 = ["x1", "y1"]


def test_square_cofactor_is_x_plus_y():
    d = hadamard_exact(smooth("(* x x)", ["x"]))
    assert [cofactor_text(g, XY1) for g in d.cofactors] == ["(+ x1 y1)"]
    assert evaluate(d.cofactors[0], [3, 1]) == 4


def test_product_cofactors_are_symmetric_averages():
    d = hadamard_exact(smooth("(* x y)", ["x", "y"]))
    names = ["x1", "x2", "y1", "y2"]
    assert [cofactor_text(g, names) for g in d.cofactors] == [
        "(+ (* 1/2 x2) (* 1/2 y2))",
        "(+ (* 1/2 x1) (* 1/2 y1))",
    ]
    assert verify_decomposition(d) == 0.0


def test_exact_mode_rejects_transcendental_maps():
    with pytest.raises(NotPolynomial):
        hadamard_exact(smooth("(sin x)", ["x"]))


def test_transcendental_cofactors_are_segment_integrals():
    d = hadamard_decompose(smooth("(sin x)", ["x"]))
    assert d.mode == "quadrature"
    assert isinstance(d.cofactors[0], SegmentIntegral)
    assert verify_decomposition(d) <= 1e-12


def test_exp_cofactor_value():
    g = hadamard_quadrature(smooth("(exp x)", ["x"]), [1.0], [0.0])
    assert g[0] == pytest.approx(math.e - 1, abs=1e-12)


def test_cofactor_at_coincident_points_is_gradient():
    f = smooth("(+ (sin (* x y)) (exp y))", ["x", "y"])
    p = [0.3, -0.7]
    g = hadamard_quadrature(f, p, p)
    for i in range(2):
        assert g[i] == pytest.approx(evaluate(differentiate(f, i + 1), p), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_exact_residual_is_zero_term(seed):
    rng = rng_from(seed)
    n = int(rng.integers(1, 4))
    f = random_polynomial(rng, n, 4, 4, 5)
    d = hadamard_exact(f)
    assert symbolic_residual(f, d.cofactors).is_zero


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_quadrature_agrees_with_quadpack(seed):
    rng = rng_from(seed)
    n = int(rng.integers(1, 3))
    f = random_map(rng, n, 3)
    x, y = rng.uniform(-2, 2, n), rng.uniform(-2, 2, n)
    ours = hadamard_quadrature(f, x, y)
    for i in range(n):
        df = differentiate(f, i + 1)
        ref = quadpack_segment(lambda p: evaluate(df, p), x, y)
        assert ours[i] == pytest.approx(ref, abs=1e-9, rel=1e-9)


def test_segment_integral_evaluates_like_quadpack():
    f = smooth("(cos (* x y))", ["x", "y"])
    d = hadamard_decompose(f)
    x, y = np.array([1.2, -0.4]), np.array([-0.3, 0.9])
    for i, g in enumerate(d.cofactors):
        ref = quadpack_segment(lambda p: evaluate(differentiate(f, i + 1), p), x, y)
        assert evaluate_cofactor(g, list(x) + list(y)) == pytest.approx(ref, abs=1e-10)


def test_integrator_on_known_integrals():
    value, err = quadrature.integrate(np.exp, 0.0, 1.0)
    assert value == pytest.approx(math.e - 1, abs=1e-14)
    value, _ = quadrature.integrate(lambda t: np.sqrt(t), 0.0, 1.0)
    assert value == pytest.approx(2 / 3, abs=1e-10)


def test_integrator_budget_and_domain_errors():
    with pytest.raises(QuadratureFailure):
        quadrature.integrate(lambda t: np.sin(1 / (t + 1e-9)), 0.0, 1.0, 1e-14, 4)
    with pytest.raises(DomainError), np.errstate(divide="ignore", invalid="ignore"):
        quadrature.integrate(lambda t: np.log(t - 0.5), 0.0, 1.0)


def test_partial_cofactor_outside_domain_raises():
    d = hadamard_decompose(smooth("(log x)", ["x"]))
    with pytest.raises(DomainError):
        evaluate_cofactor(d.cofactors[0], [1.0, -1.0])
    assert to_sexpr(d.cofactors[0].integrand.body).startswith("(recip")
