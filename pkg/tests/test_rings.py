import pytest
from hypothesis import given, settings, strategies as st

from cinf.errors import (
    ArityMismatch,
    DuplicateName,
    MissingImage,
    PreconditionUnverified,
    RingMismatch,
    TargetMismatch,
    WitnessMissing,
)
from cinf.ideals import Congruence, Ideal, ProvenIn, RefutedNumerically, congruence_from_pairs
from cinf.random_instances import random_element, random_map, random_presented_ring, rng_from
from cinf.rings import (
    FinitelyPresentedRing,
    apply,
    counit,
    elements_equal,
    free_inclusion,
    free_ring,
    ftt_factor,
    hom_apply,
    hom_compose,
    identity_hom,
    image_presentation,
    in_generated_subring,
    kernel_contains,
    make_hom,
    quotient,
    universal_extend,
)
from cinf.sexpr import parse_term
from cinf.terms import SmoothMap, evaluate, to_sexpr

R1 = free_ring(["x"])
R2 = free_ring(["x", "y"])


def rel(ring, *texts):
    return Ideal(ring.arity, [ring.element(parse_term(t)).representative for t in texts])


def el(ring, text):
    return ring.element(parse_term(text))


def test_free_rings():
    r0 = free_ring([])
    assert r0.arity == 0 and r0.is_free
    assert r0.element(3).representative == SmoothMap.constant(3, 0)
    assert R1.generator("x").representative == SmoothMap.projection(1, 1)
    with pytest.raises(DuplicateName):
        free_ring(["x", "x"])


def test_universal_extension_substitutes_images():
    r0 = free_ring([])
    h = universal_extend({"x": r0.element(2)}, R1)
    assert hom_apply(h, el(R1, "(* x x)")).representative == SmoothMap.constant(4, 0)
    assert hom_apply(h, R1.generator(1)) == r0.element(2)
    ident = universal_extend({"x": R1.generator(1)}, R1)
    assert ident.image_maps() == identity_hom(R1).image_maps()
    with pytest.raises(MissingImage):
        universal_extend({}, R1)
    with pytest.raises(PreconditionUnverified):
        universal_extend({"x": R1.generator(1)}, quotient(R1, rel(R1, "x"))[0])


def test_quotient_examples():
    a, q = quotient(R1, rel(R1, "x"))
    assert q.status.verified
    assert isinstance(elements_equal(a.generator(1), a.zero()), ProvenIn)
    same, q0 = quotient(R1, Ideal.zero(1))
    assert same == R1 and q0.image_maps() == identity_hom(R1).image_maps()
    b, _ = quotient(R2, rel(R2, "y"))
    assert isinstance(elements_equal(el(b, "(+ (sin y) x)"), el(b, "x")), ProvenIn)
    with pytest.raises(ArityMismatch):
        quotient(R1, Ideal.zero(2))


def test_element_equality_examples():
    assert isinstance(elements_equal(el(R1, "(sin x)"), el(R1, "(sin x)")), ProvenIn)
    a, _ = quotient(R1, rel(R1, "x"))
    v = elements_equal(el(a, "(+ (* x x) x)"), a.zero())
    assert isinstance(v, ProvenIn) and v.certificate == (el(R1, "(+ x 1)").representative,)
    b, _ = quotient(R1, rel(R1, "(+ x -1)"))
    v = elements_equal(b.generator(1), b.zero())
    assert isinstance(v, RefutedNumerically) and v.witness[0] == pytest.approx(1)
    with pytest.raises(RingMismatch):
        elements_equal(a.zero(), b.zero())


def test_hom_check_examples():
    sq, _ = quotient(R1, rel(R1, "(* x x)"))
    lin, _ = quotient(R1, rel(R1, "x"))
    shifted, _ = quotient(R1, rel(R1, "(+ x -1)"))
    assert make_hom(sq, lin, [lin.generator(1)]).status.verified
    assert make_hom(sq, sq, sq.generators()).status.verified
    h = make_hom(shifted, lin, [lin.generator(1)])
    assert h.status.kind == "refuted" and h.status.refuted_at == 0
    assert str(h.status) == "RefutedAt 0"


def test_ring_element_arithmetic_and_apply():
    a, b = el(R2, "x"), el(R2, "y")
    assert (a * b + a - b).representative == el(R2, "(+ (* x y) x (neg y))").representative
    sin = SmoothMap.from_term(parse_term("(sin v1)"), ["v1"])
    assert apply(sin, a + b) == el(R2, "(sin (+ x y))")
    with pytest.raises(RingMismatch):
        a + R1.generator(1)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_hom_laws(seed):
    rng = rng_from(seed)
    a = random_presented_ring(rng, 2, 0)
    b = random_presented_ring(rng, 2, 0, names=("u", "v"))
    c = random_presented_ring(rng, 2, 0, names=("s",))
    f = make_hom(a, b, [random_element(rng, b) for _ in range(a.arity)])
    g = make_hom(b, c, [random_element(rng, c) for _ in range(b.arity)])
    x = random_element(rng, a, 3)
    assert hom_apply(identity_hom(a), x) == x
    assert hom_apply(hom_compose(g, f), x) == hom_apply(g, hom_apply(f, x))


def test_compose_requires_matching_rings():
    f = identity_hom(R1)
    with pytest.raises(TargetMismatch):
        hom_compose(identity_hom(R2), f)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_homs_out_of_free_ring_are_determined_by_generators(seed):
    rng = rng_from(seed)
    target = random_presented_ring(rng, 2, 1, names=("u", "v"))
    images = {"x": random_element(rng, target), "y": random_element(rng, target)}
    h = universal_extend(images, R2)
    k = make_hom(R2, target, [images["x"], images["y"]])
    for _ in range(50):
        z = random_element(rng, R2, 3)
        assert hom_apply(h, z) == hom_apply(k, z)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_quotient_map_commutes_with_smooth_operations(seed):
    rng = rng_from(seed)
    ring = random_presented_ring(rng, 2, 1)
    _, q = quotient(ring, Ideal(ring.arity, [random_map(rng, ring.arity, 2, False)]))
    f = random_map(rng, 2, 2)
    args = [random_element(rng, ring), random_element(rng, ring)]
    assert hom_apply(q, apply(f, *args)).representative == \
        apply(f, *[hom_apply(q, a) for a in args]).representative


def test_kernel_and_factorization():
    lin, _ = quotient(R1, rel(R1, "x"))
    phi = make_hom(R1, lin, [lin.generator(1)])
    assert isinstance(kernel_contains(phi, el(R1, "(* x x)")), ProvenIn)
    r = congruence_from_pairs([(el(R1, "(* x x)").representative, SmoothMap.zero(1))])
    factor = ftt_factor(phi, r)
    assert factor.status.verified
    assert factor.source.relations == rel(R1, "(* x x)")
    assert hom_compose(factor, quotient(R1, r.underlying)[1]).image_maps() == phi.image_maps()
    same = ftt_factor(phi, Congruence(Ideal.zero(1)))
    assert same.source == R1 and same.image_maps() == phi.image_maps()
    with pytest.raises(PreconditionUnverified):
        ftt_factor(phi, congruence_from_pairs([(SmoothMap.constant(1, 1), SmoothMap.zero(1))]))


def test_factor_through_kernel_is_injective_on_samples():
    lin, _ = quotient(R2, rel(R2, "y"))
    phi = make_hom(R2, lin, lin.generators())
    factor = ftt_factor(phi, Congruence(rel(R2, "y")))
    src = factor.source
    for a, b in [("(+ x (sin y))", "x"), ("(exp y)", "1"), ("x", "(+ x 1)")]:
        same_image = elements_equal(hom_apply(factor, el(src, a)), hom_apply(factor, el(src, b)))
        same_class = elements_equal(el(src, a), el(src, b))
        assert isinstance(same_image, ProvenIn) == isinstance(same_class, ProvenIn)


def test_image_presentation():
    a, q = quotient(R2, rel(R2, "(* x y)"))
    assert image_presentation(q, {"x": R2.generator(1), "y": R2.generator(2)}) == a
    bigger, inc = free_inclusion(R1, ["y"])
    with pytest.raises(WitnessMissing):
        image_presentation(inc, {"x": R1.generator(1)})
    with pytest.raises(WitnessMissing):
        image_presentation(inc, {"x": R1.generator(1), "y": R1.generator(1)})
    back = make_hom(bigger, R1, [R1.generator(1), R1.element(0)])
    composite = hom_compose(back, inc)
    assert image_presentation(composite, {"x": R1.generator(1)}) == R1


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_counit_is_verified_and_onto_generators(seed):
    ring = random_presented_ring(rng_from(seed), 3, 2)
    eps = counit(ring)
    assert eps.status.verified and eps.source.is_free
    assert [hom_apply(eps, g) for g in eps.source.generators()] == ring.generators()
    assert image_presentation(eps, dict(zip(ring.generator_names, eps.source.generators()))) == ring


def test_free_inclusion_extends_support():
    bigger, inc = free_inclusion(R1, ["y", "z"])
    assert bigger.generator_names == ("x", "y", "z")
    assert to_sexpr(bigger.term(hom_apply(inc, el(R1, "(sin x)")))) == "(sin x)"


def test_generated_subring_is_syntactic():
    x, y = R2.generators()
    assert in_generated_subring(el(R2, "(exp (* x 2))"), [x]) is True
    assert in_generated_subring(el(R2, "(+ x y)"), [el(R2, "(+ x y)")]) is True
    assert in_generated_subring(el(R2, "(* x y)"), [x]) is None


def test_presented_ring_validation():
    with pytest.raises(ArityMismatch):
        FinitelyPresentedRing(("x",), Ideal.zero(2))
    with pytest.raises(DuplicateName):
        FinitelyPresentedRing(("x", "x"), Ideal.zero(2))
    assert evaluate(el(R2, "(* x y)").representative, [2, 3]) == 6
