"""Seeded random generators for maps, ideals, presented rings and chains.

Partial primitives only ever receive arguments of the form 1 + u^2, so every
generated map is total on R^n.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .ideals import Ideal
from .rings import FinitelyPresentedRing, free_inclusion, free_ring, make_hom, quotient
from .terms import App, Const, SmoothMap, slot


def rng_from(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_rational(rng, bound=3, denominators=(1, 1, 1, 2)) -> Fraction:
    return Fraction(int(rng.integers(-bound, bound + 1)), int(rng.choice(denominators)))


def random_polynomial(rng, n: int, degree: int = 3, terms: int = 3, bound: int = 3,
                      nonzero: bool = True) -> SmoothMap:
    """Sparse polynomial with small integer coefficients and total degree <= degree."""
    while True:
        body = Const(0)
        for _ in range(int(rng.integers(1, terms + 1))):
            c = int(rng.integers(-bound, bound + 1))
            mono = Const(c)
            if n:
                for _ in range(int(rng.integers(0, degree + 1))):
                    mono = mono * slot(int(rng.integers(1, n + 1)))
            body = body + mono
        f = SmoothMap(n, body)
        if not (nonzero and f.is_zero):
            return f


def _random_body(rng, n, depth, transcendental):
    leaf = depth == 0 or rng.random() < 0.2
    if leaf:
        if n and rng.random() < 0.8:
            return slot(int(rng.integers(1, n + 1)))
        return Const(random_rational(rng))
    choices = ["add", "mul", "neg"]
    if transcendental:
        choices += ["sin", "cos", "exp", "atan", "recip", "log"]
    op = choices[int(rng.integers(len(choices)))]
    if op in ("add", "mul"):
        return App(op, (_random_body(rng, n, depth - 1, transcendental),
                        _random_body(rng, n, depth - 1, transcendental)))
    arg = _random_body(rng, n, depth - 1, transcendental)
    if op in ("recip", "log"):
        arg = Const(1) + arg * arg
    if op == "exp":
        arg = App("sin", (arg,))  # keep values moderate
    return App(op, (arg,))


def random_map(rng, n: int, depth: int = 3, transcendental: bool = True) -> SmoothMap:
    return SmoothMap(n, _random_body(rng, n, depth, transcendental))


def random_point(rng, n: int, box: float = 2.0) -> np.ndarray:
    return rng.uniform(-box, box, n)


def membership_instance(rng, max_n: int = 3, max_gens: int = 3, max_degree: int = 3):
    """Random polynomial ideal with a shared rational zero, and a test element.

    Half of the elements are combinations sum h_j g_j (members); the other
    half are random polynomials.  Returns (element, generators, n).
    """
    n = int(rng.integers(1, max_n + 1))
    k = int(rng.integers(1, max_gens + 1))
    p = [random_rational(rng, 2) for _ in range(n)]
    gens = []
    while len(gens) < k:
        g = random_polynomial(rng, n, max_degree, 3, 3)
        g = g - SmoothMap.constant(_value(g, p), n)
        if not g.is_zero and g not in gens:
            gens.append(g)
    if rng.random() < 0.5:
        e = SmoothMap.zero(n)
        for g in gens:
            e = e + random_polynomial(rng, n, 1, 2, 2, nonzero=False) * g
    else:
        e = random_polynomial(rng, n, max_degree, 3, 3, nonzero=False)
    return e, gens, n


def _value(f: SmoothMap, point) -> Fraction:
    from .terms import evaluate_exact

    return evaluate_exact(f, point)


def random_presented_ring(rng, max_gens: int = 3, max_relations: int = 2, names=None,
                          transcendental: bool = False) -> FinitelyPresentedRing:
    n = int(rng.integers(1, max_gens + 1)) if names is None else len(names)
    names = tuple(names) if names is not None else tuple(f"x{i}" for i in range(1, n + 1))
    rels = []
    for _ in range(int(rng.integers(0, max_relations + 1))):
        rels.append(random_map(rng, n, 2, True) if transcendental and rng.random() < 0.3
                    else random_polynomial(rng, n, 2, 2, 3))
    return FinitelyPresentedRing(names, Ideal(n, rels))


def random_inclusion_chain(rng, length: int = 3, with_relations: bool = True):
    """Chain of presented rings A_0 -> A_1 -> ... whose homs include generators.

    Stage k has the generators of stage k-1 plus one or two fresh ones, and
    its relations contain the earlier relations (reindexed) plus possibly a
    new polynomial one.  Returns the chain as a DirectedDiagram.
    """
    from .constructions import DirectedDiagram

    base = free_ring((f"x{i}" for i in range(1, int(rng.integers(1, 3)) + 1)))
    free_stages = [base]
    counter = base.arity
    for _ in range(length - 1):
        extra = [f"x{counter + i}" for i in range(1, int(rng.integers(1, 3)) + 1)]
        counter += len(extra)
        bigger, _ = free_inclusion(free_stages[-1], extra)
        free_stages.append(bigger)
    objects = []
    rels = []
    for stage in free_stages:
        n = stage.arity
        rels = [SmoothMap(n, g.body) for g in rels]
        if with_relations and rng.random() < 0.6:
            rels.append(random_polynomial(rng, n, 2, 2, 3))
        objects.append(FinitelyPresentedRing(stage.generator_names, Ideal(n, rels)))
    homs = [make_hom(objects[i], objects[i + 1], objects[i + 1].generators()[: objects[i].arity])
            for i in range(len(objects) - 1)]
    assert all(h.status.verified for h in homs)
    return DirectedDiagram.chain(objects, homs)


def random_element(rng, ring: FinitelyPresentedRing, depth: int = 2, transcendental: bool = True):
    return ring.element(random_map(rng, ring.arity, depth, transcendental))


def random_quotient(rng, ring: FinitelyPresentedRing, max_relations: int = 2):
    gens = [random_polynomial(rng, ring.arity, 2, 2, 3) for _ in range(int(rng.integers(1, max_relations + 1)))]
    return quotient(ring, Ideal(ring.arity, gens))
