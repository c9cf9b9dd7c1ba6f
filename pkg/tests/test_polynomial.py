from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cinf.polynomial import CapExceeded, GroebnerBasis, groebner_basis, map_from_poly, poly_from_map, poly_mul
from cinf.random_instances import membership_instance, rng_from
from cinf.sexpr import parse_term
from cinf.terms import SmoothMap

from oracles import macaulay_member, sympy_member


def poly(text, names):
    return poly_from_map(SmoothMap.from_term(parse_term(text), names))


def combine(cofactors, gens):
    total = {}
    for h, g in zip(cofactors, gens):
        for m, c in poly_mul(h, g).items():
            total[m] = total.get(m, 0) + c
    return {m: c for m, c in total.items() if c}


def test_circle_and_diagonal():
    names = ["x", "y"]
    gens = [poly("(+ (* x x) (* y y) -1)", names), poly("(+ x (neg y))", names)]
    basis = GroebnerBasis(gens, 2)
    target = poly("(+ (* 2 y y) -1)", names)
    cof = basis.membership(target)
    assert combine(cof, gens) == target
    assert basis.membership(poly("x", names)) is None


def test_roundtrip_between_maps_and_dicts():
    f = SmoothMap.from_term(parse_term("(+ (* 3 x y y) (* -1/2 x) 7)"), ["x", "y"])
    assert map_from_poly(poly_from_map(f), 2) == f
    with pytest.raises(ValueError):
        poly_from_map(SmoothMap.from_term(parse_term("(sin x)"), ["x"]))


def test_degree_cap():
    gens = [{(13,): Fraction(1)}]
    with pytest.raises(CapExceeded):
        groebner_basis(gens, 1)


def test_macaulay_oracle_recovers_cofactors():
    names = ["x", "y"]
    gens = [poly("(+ (* x x) (* y y) -1)", names), poly("(+ x (neg y))", names)]
    target = poly("(+ (* 2 y y) -1)", names)
    cof = macaulay_member(target, gens, 2, 1)
    assert cof is not None and combine(cof, gens) == target


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_membership_agrees_with_sympy(seed):
    rng = rng_from(seed)
    e, gens, n = membership_instance(rng)
    ge, gg = poly_from_map(e), [poly_from_map(g) for g in gens]
    cof = groebner_basis(gg, n).membership(ge)
    assert (cof is not None) == sympy_member(ge, gg, n)
    if cof is not None:
        assert combine(cof, gg) == {m: c for m, c in ge.items() if c}


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_bounded_cofactor_search_implies_membership(seed):
    rng = rng_from(seed)
    e, gens, n = membership_instance(rng, max_n=2, max_gens=2, max_degree=2)
    ge, gg = poly_from_map(e), [poly_from_map(g) for g in gens]
    found = macaulay_member(ge, gg, n, 2)
    if found is not None:
        assert groebner_basis(gg, n).membership(ge) is not None
