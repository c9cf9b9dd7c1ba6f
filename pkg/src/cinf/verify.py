"""Randomized property suites over the whole kernel.

Each suite draws seeded random instances, checks one family of laws, and
returns a :class:`SuiteResult`.  The CLI ``verify`` subcommand and the
acceptance tests both run these suites; sizes and tolerances are parameters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import constructions as C
from . import rings as R
from .errors import DomainError
from .hadamard import hadamard_exact, hadamard_quadrature, symbolic_residual
from .ideals import (
    Congruence,
    Ideal,
    ProvenIn,
    RefutedNumerically,
    Unknown,
    compatibility_certificate,
    congruence_from_pairs,
    congruence_to_ideal,
    ideal_join,
    ideal_membership,
    ideal_to_congruence,
)
from .polynomial import poly_from_map
from .random_instances import (
    membership_instance,
    random_element,
    random_inclusion_chain,
    random_map,
    random_polynomial,
    random_presented_ring,
    random_quotient,
    rng_from,
)
from .terms import (
    App,
    SmoothMap,
    compose,
    evaluate,
    evaluate_exact,
    evaluate_many,
    slot,
)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    summary: str
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.summary}"


def _close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(b))


# -- axioms ------------------------------------------------------------------


def axioms_suite(seed=0, projections: int = 1000, composites: int = 500,
                 tol_polynomial: float = 1e-12, tol_transcendental: float = 1e-9) -> SuiteResult:
    """Projection axiom by exact term equality; composition axiom numerically."""
    rng = rng_from(seed)
    proj_fail = 0
    for _ in range(projections):
        n = int(rng.integers(1, 5))
        i = int(rng.integers(1, n + 1))
        m = int(rng.integers(0, 4))
        args = [random_map(rng, m, 2, rng.random() < 0.5) for _ in range(n)]
        if compose(SmoothMap.projection(i, n), args, arity=m) != args[i - 1]:
            proj_fail += 1
    comp_fail, worst = 0, 0.0
    done = 0
    while done < composites:
        k = int(rng.integers(1, 4))
        m = int(rng.integers(1, 4))
        transcendental = rng.random() < 0.5
        f = random_map(rng, k, 3, transcendental)
        gs = [random_map(rng, m, 2, transcendental) for _ in range(k)]
        h = compose(f, gs, arity=m)
        p = rng.uniform(-2, 2, m)
        exact_h = evaluate_exact(h, p)
        inner = [evaluate_exact(g, p) for g in gs]
        exact_f = evaluate_exact(f, inner) if all(v is not None for v in inner) else None
        try:
            if exact_h is not None and exact_f is not None:
                lhs, rhs = float(exact_h), float(exact_f)
                tol = tol_polynomial
            else:
                lhs = evaluate(h, p)
                rhs = evaluate(f, [evaluate(g, p) for g in gs])
                tol = tol_polynomial if h.is_polynomial else tol_transcendental
        except DomainError:
            continue
        done += 1
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
        if not _close(lhs, rhs, tol):
            comp_fail += 1
    passed = proj_fail == 0 and comp_fail == 0
    return SuiteResult(
        "axioms",
        passed,
        f"projection failures {proj_fail}/{projections}, composition failures {comp_fail}/{composites}, "
        f"worst scaled error {worst:.3g}",
        {"projection_failures": proj_fail, "composition_failures": comp_fail, "worst": worst},
    )


# -- Hadamard ----------------------------------------------------------------


def _quadrature_family():
    v1, v2, v3 = slot(1), slot(2), slot(3)
    out = []
    for op in ("sin", "cos", "exp"):
        out.append(SmoothMap(1, App(op, (v1,))))
        out.append(SmoothMap(2, App(op, (v1 * v2,))))
        out.append(SmoothMap(3, App(op, (v1 + v2 * v3 - v3,))))
    return out


def hadamard_suite(seed=0, polynomials: int = 200, pairs: int = 100, tol: float = 1e-8) -> SuiteResult:
    rng = rng_from(seed)
    sym_fail = 0
    for _ in range(polynomials):
        n = int(rng.integers(1, 4))
        f = random_polynomial(rng, n, 4, 4, 5)
        d = hadamard_exact(f)
        if not symbolic_residual(f, d.cofactors).is_zero:
            sym_fail += 1
    worst = 0.0
    for f in _quadrature_family():
        n = f.arity
        for _ in range(pairs):
            x, y = rng.uniform(-2, 2, n), rng.uniform(-2, 2, n)
            g = hadamard_quadrature(f, x, y)
            res = abs(evaluate(f, x) - evaluate(f, y) - float(np.dot(x - y, g)))
            worst = max(worst, res)
    passed = sym_fail == 0 and worst <= tol
    return SuiteResult(
        "hadamard",
        passed,
        f"nonzero symbolic residuals {sym_fail}/{polynomials}, worst quadrature residual {worst:.3g}",
        {"symbolic_failures": sym_fail, "worst_quadrature_residual": worst},
    )


# -- ideal/congruence dictionary ---------------------------------------------


def dictionary_suite(seed=0, roundtrips: int = 100, instances: int = 100, config=None) -> SuiteResult:
    rng = rng_from(seed)
    rt_fail = 0
    for _ in range(roundtrips):
        n = int(rng.integers(1, 4))
        ideal = Ideal(n, [random_map(rng, n, 2, rng.random() < 0.5) for _ in range(int(rng.integers(0, 4)))])
        cong = ideal_to_congruence(ideal)
        if congruence_to_ideal(cong) != ideal:
            rt_fail += 1
        if ideal_to_congruence(congruence_to_ideal(cong)) != cong:
            rt_fail += 1
        pairs = [(random_map(rng, n, 2), random_map(rng, n, 2)) for _ in range(2)]
        if congruence_to_ideal(congruence_from_pairs(pairs, n)) != Ideal(n, [a - b for a, b in pairs]):
            rt_fail += 1
    cert_fail = 0
    quadrature_certs = 0
    for _ in range(instances):
        n = int(rng.integers(1, 3))
        gens = [random_polynomial(rng, n, 2, 2, 3) for _ in range(int(rng.integers(1, 3)))]
        ideal = Ideal(n, gens)
        k = int(rng.integers(1, 3))
        f = random_map(rng, k, 2, rng.random() < 0.5)
        pairs = []
        for _ in range(k):
            a = random_map(rng, n, 2, rng.random() < 0.3)
            delta = SmoothMap.zero(n)
            for g in ideal.generators:
                delta = delta + random_polynomial(rng, n, 1, 2, 2, nonzero=False) * g
            pairs.append((a, a + delta))
        try:
            v = compatibility_certificate(Congruence(ideal), f, pairs, config)
        except Exception:
            cert_fail += 1
            continue
        quadrature_certs += v.quadrature
        if not isinstance(v, ProvenIn):
            cert_fail += 1
    passed = rt_fail == 0 and cert_fail == 0
    return SuiteResult(
        "ideal-congruence",
        passed,
        f"roundtrip failures {rt_fail}, compatibility failures {cert_fail}/{instances} "
        f"({quadrature_certs} quadrature certificates)",
        {"roundtrip_failures": rt_fail, "compatibility_failures": cert_fail},
    )


# -- polynomial membership against an oracle ---------------------------------


def polynomial_membership_suite(oracle: Callable, seed=0, instances: int = 100,
                                max_unknown_rate: float = 0.2, config=None) -> SuiteResult:
    """Compare verdicts with an independent oracle for polynomial-ring membership.

    ``oracle(element, generators, n)`` takes exponent dicts.  A disagreement
    is a ProvenIn the oracle rejects or a refutation of an oracle member.
    """
    rng = rng_from(seed)
    disagreements, unknown = 0, 0
    counts = {"proven": 0, "refuted": 0, "unknown": 0}
    for _ in range(instances):
        e, gens, n = membership_instance(rng)
        v = ideal_membership(e, Ideal(n, gens), config)
        member = oracle(poly_from_map(e), [poly_from_map(g) for g in gens], n)
        counts[v.kind] += 1
        if isinstance(v, ProvenIn) and not member:
            disagreements += 1
        elif isinstance(v, RefutedNumerically) and member:
            disagreements += 1
        elif isinstance(v, Unknown):
            unknown += 1
    rate = unknown / instances
    passed = disagreements == 0 and rate < max_unknown_rate
    return SuiteResult(
        "polynomial-membership",
        passed,
        f"disagreements {disagreements}/{instances}, unknown rate {rate:.2f} "
        f"(proven {counts['proven']}, refuted {counts['refuted']})",
        {"disagreements": disagreements, "unknown_rate": rate, **counts},
    )


# -- factorization through quotients -----------------------------------------


def _ftt_instance(rng):
    """A hom phi and a congruence R inside its kernel, by construction.

    Target: m generators with random relations J.  Source: m + k generators;
    the first m go to the target generators and the rest to polynomials q_j.
    Then v_{m+j} - q_j and the lifted relations lie in ker(phi).
    """
    m = int(rng.integers(1, 3))
    k = int(rng.integers(1, 3))
    target = random_presented_ring(rng, max_relations=2, names=[f"y{i}" for i in range(1, m + 1)])
    source = R.free_ring([f"x{i}" for i in range(1, m + k + 1)])
    n = m + k
    qs = [random_polynomial(rng, m, 2, 2, 3) for _ in range(k)]
    images = target.generators() + [target.element(q) for q in qs]
    phi = R.Homomorphism(source, target, tuple(images), R.VERIFIED)
    first = [SmoothMap.projection(i, n) for i in range(1, m + 1)]
    kernel = [SmoothMap.projection(m + j + 1, n) - compose(q, first, arity=n) for j, q in enumerate(qs)]
    kernel += [compose(g, first, arity=n) for g in target.relations.generators]
    pairs = []
    for _ in range(int(rng.integers(1, 3))):
        combo = SmoothMap.zero(n)
        for g in kernel:
            if rng.random() < 0.6:
                combo = combo + random_polynomial(rng, n, 1, 2, 2, nonzero=False) * g
        pairs.append((combo, SmoothMap.zero(n)))
    return phi, congruence_from_pairs(pairs, n)


def ftt_suite(seed=0, instances: int = 50, elements: int = 20, config=None) -> SuiteResult:
    rng = rng_from(seed)
    gen_fail, verdict_fail, failures = 0, 0, 0
    for _ in range(instances):
        phi, cong = _ftt_instance(rng)
        try:
            factor = R.ftt_factor(phi, cong, config)
        except Exception:
            failures += 1
            continue
        _, q = R.quotient(phi.source, congruence_to_ideal(cong))
        if R.hom_compose(factor, q).image_maps() != phi.image_maps():
            gen_fail += 1
        for _ in range(elements):
            a = random_element(rng, phi.source, 2, rng.random() < 0.5)
            b = random_element(rng, phi.target, 2, rng.random() < 0.5)
            direct = R.elements_equal(R.hom_apply(phi, a), b, config)
            via = R.elements_equal(R.hom_apply(factor, R.hom_apply(q, a)), b, config)
            if direct.kind != via.kind:
                verdict_fail += 1
    passed = gen_fail == 0 and verdict_fail == 0 and failures == 0
    return SuiteResult(
        "factorization",
        passed,
        f"construction failures {failures}/{instances}, generator mismatches {gen_fail}, "
        f"verdict mismatches {verdict_fail}/{instances * elements}",
        {"failures": failures, "generator_mismatches": gen_fail, "verdict_mismatches": verdict_fail},
    )


# -- coproducts --------------------------------------------------------------


def coproduct_suite(seed=0, instances: int = 50, max_free: int = 4, config=None) -> SuiteResult:
    rng = rng_from(seed)
    free_fail = 0
    for m in range(max_free + 1):
        for n in range(max_free + 1):
            a = R.free_ring([f"a{i}" for i in range(m)])
            b = R.free_ring([f"b{i}" for i in range(n)])
            ring, _, _ = C.coproduct(a, b)
            if ring.arity != m + n or not ring.is_free:
                free_fail += 1
    med_fail = 0
    for t in range(instances):
        a = random_presented_ring(rng, max_relations=1)
        b = random_presented_ring(rng, max_relations=1, names=a.generator_names)
        ring, iota_a, iota_b = C.coproduct(a, b)
        if t % 2 == 0:
            # Verified homs into a quotient of the coproduct: q o iota.
            target, q = random_quotient(rng, ring)
            h_a, h_b = R.hom_compose(q, iota_a), R.hom_compose(q, iota_b)
        else:
            target = random_presented_ring(rng, max_relations=1, names=["z1", "z2"])
            h_a = R.make_hom(a, target, [random_element(rng, target) for _ in range(a.arity)], config)
            h_b = R.make_hom(b, target, [random_element(rng, target) for _ in range(b.arity)], config)
        med = C.coproduct_mediator(h_a, h_b, ring, config)
        if R.hom_compose(med, iota_a).image_maps() != h_a.image_maps():
            med_fail += 1
        if R.hom_compose(med, iota_b).image_maps() != h_b.image_maps():
            med_fail += 1
        if h_a.status.verified and h_b.status.verified and not med.status.verified:
            med_fail += 1
        if C.coproduct(a, R.free_ring(()))[0] != a:
            med_fail += 1
    passed = free_fail == 0 and med_fail == 0
    return SuiteResult(
        "coproduct",
        passed,
        f"free-case failures {free_fail}/{(max_free + 1) ** 2}, mediator failures {med_fail} over {instances}",
        {"free_failures": free_fail, "mediator_failures": med_fail},
    )


# -- colimits ----------------------------------------------------------------


def colimit_suite(seed=0, trials: int = 500, pairs: int = 100, config=None) -> SuiteResult:
    rng = rng_from(seed)
    stage_fail = 0
    diagrams = [random_inclusion_chain(rng) for _ in range(20)]
    for t in range(trials):
        d = diagrams[t % len(diagrams)]
        k = int(rng.integers(1, 3))
        f = random_map(rng, k, 2, rng.random() < 0.5)
        args = []
        for _ in range(k):
            s = int(rng.integers(0, 3))
            args.append(C.ColimitElement(s, random_element(rng, d.objects[s], 2)))
        low = C.colimit_apply(d, f, *args)
        later = int(rng.integers(low.stage, 3))
        pushed = d.push(low, later)
        direct = C.colimit_apply(d, f, *args, stage=later)
        if pushed.representative != direct.element.representative:
            stage_fail += 1
    eq_fail = 0
    for t in range(pairs):
        d = diagrams[t % len(diagrams)]
        s = int(rng.integers(0, 3))
        u = C.ColimitElement(s, random_element(rng, d.objects[s], 2))
        w = _equal_variant(rng, d, u)
        z = _equal_variant(rng, d, w)
        if not isinstance(C.colimit_equal(d, u, u, config), ProvenIn):
            eq_fail += 1
        uw, wu = C.colimit_equal(d, u, w, config), C.colimit_equal(d, w, u, config)
        if uw.kind != wu.kind:
            eq_fail += 1
        wz = C.colimit_equal(d, w, z, config)
        if isinstance(uw, ProvenIn) and isinstance(wz, ProvenIn):
            if not isinstance(C.colimit_equal(d, u, z, config), ProvenIn):
                eq_fail += 1
        other = C.ColimitElement(s, random_element(rng, d.objects[s], 2))
        a, b = C.colimit_equal(d, u, other, config), C.colimit_equal(d, other, u, config)
        if isinstance(a, ProvenIn) != isinstance(b, ProvenIn):
            eq_fail += 1
    med_fail = 0
    for d in diagrams:
        top = d.bound(*d.indices)
        cocone = {s: d.connecting(s, top) for s in d.indices}
        theta = C.colimit_mediator(d, cocone)
        for s in d.indices:
            for g in d.objects[s].generators():
                if theta(C.ColimitElement(s, g)) != R.hom_apply(cocone[s], g):
                    med_fail += 1
    passed = stage_fail == 0 and eq_fail == 0 and med_fail == 0
    return SuiteResult(
        "colimit",
        passed,
        f"stage-dependence {stage_fail}/{trials}, equivalence failures {eq_fail}/{pairs}, "
        f"mediator failures {med_fail}",
        {"stage_failures": stage_fail, "equivalence_failures": eq_fail, "mediator_failures": med_fail},
    )


def _equal_variant(rng, d, u):
    """An element equal to u in the colimit: pushed later, plus a relation multiple."""
    later = int(rng.integers(u.stage, len(d.indices)))
    pushed = d.push(u, later)
    ring = d.objects[later]
    extra = SmoothMap.zero(ring.arity)
    for g in ring.relations.generators:
        extra = extra + random_polynomial(rng, ring.arity, 1, 2, 2, nonzero=False) * g
    return C.ColimitElement(later, R.RingElement(ring, pushed.representative + extra))


# -- ideals along chains -----------------------------------------------------


def correspondence_suite(seed=0, instances: int = 50, config=None) -> SuiteResult:
    rng = rng_from(seed)
    fail = 0
    for _ in range(instances):
        d = random_inclusion_chain(rng, int(rng.integers(1, 4)))
        top = d.bound(*d.indices)
        ring = d.objects[top]
        j = Ideal(ring.arity, [random_polynomial(rng, ring.arity, 2, 2, 3)
                               for _ in range(int(rng.integers(0, 3)))])
        family = C.colimit_ideal_restrict(d, j, config)
        assembled = C.colimit_ideal_assemble(d, family)
        full_j = ideal_join(j, ring.relations)
        full_a = ideal_join(assembled, ring.relations)
        for g in j.generators:
            if not isinstance(ideal_membership(g, full_a, config), ProvenIn):
                fail += 1
        for g in assembled.generators:
            if not isinstance(ideal_membership(g, full_j, config), ProvenIn):
                fail += 1
        for s, restricted in family.items():
            for g in restricted.generators:
                if not isinstance(restricted.contains(R.RingElement(d.objects[s], g), config), ProvenIn):
                    fail += 1
    return SuiteResult(
        "ideal-correspondence",
        fail == 0,
        f"roundtrip membership failures {fail} over {instances} chains",
        {"failures": fail},
    )


# -- derived ring laws -------------------------------------------------------


def _laws(a, b, c, ring):
    zero, one = ring.zero(), ring.one()
    return {
        "add-commutative": (a + b, b + a),
        "mul-commutative": (a * b, b * a),
        "add-associative": ((a + b) + c, a + (b + c)),
        "mul-associative": ((a * b) * c, a * (b * c)),
        "distributive": (a * (b + c), a * b + a * c),
        "add-zero": (a + zero, a),
        "mul-one": (a * one, a),
        "add-inverse": (a + (-a), zero),
    }


def ring_laws_suite(seed=0, rings: int = 10, points: int = 100, tol: float = 1e-9) -> SuiteResult:
    rng = rng_from(seed)
    numeric_fail, symbolic_fail = 0, 0
    for _ in range(rings):
        ring = random_presented_ring(rng, transcendental=True)
        a, b, c = (random_element(rng, ring, 3) for _ in range(3))
        pts = rng.uniform(-2, 2, (points, ring.arity))
        for lhs, rhs in _laws(a, b, c, ring).values():
            x = evaluate_many(lhs.representative, pts)
            y = evaluate_many(rhs.representative, pts)
            ok = np.isfinite(x) & np.isfinite(y)
            if np.any(np.abs(x[ok] - y[ok]) > tol * np.maximum(1.0, np.abs(y[ok]))) or not np.all(ok):
                numeric_fail += 1
            if lhs.representative.is_polynomial and lhs.representative != rhs.representative:
                symbolic_fail += 1
    return SuiteResult(
        "ring-laws",
        numeric_fail == 0 and symbolic_fail == 0,
        f"numeric failures {numeric_fail}, symbolic failures {symbolic_fail} over {rings} rings x 8 laws",
        {"numeric_failures": numeric_fail, "symbolic_failures": symbolic_fail},
    )


def default_oracle():
    """Polynomial-membership oracle for the CLI: sympy's Gröbner bases if installed."""
    try:
        import sympy
    except ImportError:  # pragma: no cover - sympy ships with the test extra
        return None

    def oracle(element, generators, n):
        xs = sympy.symbols(f"z1:{n + 1}")
        def expr(p):
            return sum((sympy.Rational(c.numerator, c.denominator) * sympy.Mul(*[x ** e for x, e in zip(xs, m)])
                        for m, c in p.items()), sympy.Integer(0))
        gens = [expr(g) for g in generators if g]
        if not gens:
            return not element
        return sympy.groebner(gens, *xs, order="grevlex").contains(expr(element))

    return oracle


def run_all(seed=0, scale: float = 1.0, oracle=None) -> list:
    """Every suite at sizes multiplied by ``scale``."""
    def k(x):
        return max(1, int(round(x * scale)))

    results = [
        axioms_suite(seed, k(1000), k(500)),
        hadamard_suite(seed, k(200), k(100)),
        dictionary_suite(seed, k(100), k(100)),
    ]
    oracle = oracle or default_oracle()
    if oracle is not None:
        results.append(polynomial_membership_suite(oracle, seed, k(100)))
    results += [
        ftt_suite(seed, k(50), k(20)),
        coproduct_suite(seed, k(50)),
        colimit_suite(seed, k(500), k(100)),
        correspondence_suite(seed, k(50)),
        ring_laws_suite(seed, k(10)),
    ]
    return results
