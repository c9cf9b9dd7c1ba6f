"""Products, coproducts, adjoined variables, directed colimits and finite limits.

Products are models (tuples of elements with componentwise operations),
not presentations.  Coproducts of presented rings concatenate generators
and join the reindexed relations.  Directed diagrams carry their own
upper-bound chooser so that "directed" is effective.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .errors import (
    ArityMismatch,
    CoconeIncoherent,
    NoUpperBound,
    NotAChain,
    RingMismatch,
    ShapeMismatch,
    TargetMismatch,
)
from .ideals import (
    Congruence,
    Ideal,
    MembershipConfig,
    ProvenIn,
    conjunction,
    ideal_join,
    ideal_membership,
)
from .rings import (
    VERIFIED,
    FinitelyPresentedRing,
    Homomorphism,
    RingElement,
    apply,
    elements_equal,
    free_ring,
    hom_apply,
    hom_check,
    hom_compose,
    identity_hom,
)
from .terms import SmoothMap, compose


# -- products ----------------------------------------------------------------


@dataclass(frozen=True)
class ProductElement:
    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def factors(self) -> tuple:
        return tuple(c.ring for c in self.components)


def product_apply(f: SmoothMap, *args: ProductElement) -> ProductElement:
    """Componentwise interpretation of f on elements of a product."""
    if len(args) != f.arity:
        raise ShapeMismatch(f"map of arity {f.arity} applied to {len(args)} element(s)")
    if not args:
        raise ShapeMismatch("nullary application needs the factor list; use product_constant")
    factors = args[0].factors
    if any(a.factors != factors for a in args):
        raise ShapeMismatch("arguments have different factor structure")
    return ProductElement(
        tuple(apply(f, *[a.components[i] for a in args]) for i in range(len(factors)))
    )


def product_constant(factors: Sequence[FinitelyPresentedRing], c) -> ProductElement:
    return ProductElement(tuple(r.element(SmoothMap.constant(c, r.arity)) for r in factors))


def product_projection(x: ProductElement, i: int) -> RingElement:
    return x.components[i]


# -- coproducts --------------------------------------------------------------


def _fresh(name: str, taken: set) -> str:
    k = 2
    while f"{name}_{k}" in taken:
        k += 1
    return f"{name}_{k}"


def coproduct_names(left: Sequence[str], right: Sequence[str]) -> tuple:
    """Right-hand names, renamed with a numeric suffix where they collide."""
    taken = set(left)
    out = []
    for name in right:
        if name in taken:
            name = _fresh(name, taken | set(right))
        taken.add(name)
        out.append(name)
    return tuple(out)


def coproduct(a: FinitelyPresentedRing, b: FinitelyPresentedRing, name: str = ""):
    """The C∞ tensor product with its canonical homs from each factor."""
    m, n = a.arity, b.arity
    names = a.generator_names + coproduct_names(a.generator_names, b.generator_names)
    left = [g.reindex(range(1, m + 1), m + n) for g in a.relations.generators]
    right = [g.reindex(range(m + 1, m + n + 1), m + n) for g in b.relations.generators]
    ring = FinitelyPresentedRing(names, Ideal(m + n, left + right), name)
    gens = ring.generators()
    iota_a = Homomorphism(a, ring, tuple(gens[:m]), VERIFIED)
    iota_b = Homomorphism(b, ring, tuple(gens[m:]), VERIFIED)
    return ring, iota_a, iota_b


def coproduct_mediator(h_a: Homomorphism, h_b: Homomorphism, ring: FinitelyPresentedRing | None = None,
                       config: MembershipConfig | None = None) -> Homomorphism:
    """The hom out of the coproduct agreeing with h_a and h_b on generators."""
    if h_a.target != h_b.target:
        raise TargetMismatch("mediator needs a common target")
    if ring is None:
        ring, _, _ = coproduct(h_a.source, h_b.source)
    if ring.arity != h_a.source.arity + h_b.source.arity:
        raise ArityMismatch("coproduct ring does not match the two sources")
    images = h_a.images + h_b.images
    if h_a.status.verified and h_b.status.verified:
        status = VERIFIED
    else:
        status = hom_check(Homomorphism(ring, h_a.target, images), config)
    return Homomorphism(ring, h_a.target, images, status)


def polynomial_adjunction(a: FinitelyPresentedRing, new_names: Sequence[str], name: str = ""):
    """A with free variables adjoined, and the adjoined variables as elements."""
    ring, _, iota = coproduct(a, free_ring(tuple(new_names)), name)
    return ring, [hom_apply(iota, g) for g in iota.source.generators()]


# -- directed diagrams and colimits ------------------------------------------


@dataclass(frozen=True)
class ColimitElement:
    stage: object
    element: RingElement


@dataclass
class DirectedDiagram:
    """Objects indexed by a directed set, with connecting homs for related pairs.

    ``homs`` maps (alpha, beta) with alpha < beta to the connecting hom;
    ``upper_bound`` picks some gamma >= alpha, beta.
    """

    indices: tuple
    leq: Callable
    upper_bound: Callable
    objects: Mapping
    homs: Mapping
    name: str = field(default="", compare=False)

    def __post_init__(self):
        self.indices = tuple(self.indices)
        for (a, b), h in self.homs.items():
            if h.source != self.objects[a] or h.target != self.objects[b]:
                raise ShapeMismatch(f"connecting hom {a}->{b} has wrong endpoints")
            if not h.status.verified:
                raise ShapeMismatch(f"connecting hom {a}->{b} is not verified")
        self.check_functorial()

    @classmethod
    def chain(cls, objects: Sequence[FinitelyPresentedRing], homs: Sequence[Homomorphism], name: str = ""):
        """Chain A_0 -> A_1 -> ... from consecutive homs; composites filled in."""
        objects = list(objects)
        if len(homs) != max(len(objects) - 1, 0):
            raise ShapeMismatch("a chain of k objects needs k-1 homs")
        table = {}
        for i, h in enumerate(homs):
            table[(i, i + 1)] = h
        for length in range(2, len(objects)):
            for i in range(len(objects) - length):
                table[(i, i + length)] = hom_compose(table[(i + 1, i + length)], table[(i, i + 1)])
        return cls(
            tuple(range(len(objects))),
            lambda a, b: a <= b,
            max,
            dict(enumerate(objects)),
            table,
            name,
        )

    @property
    def is_chain(self) -> bool:
        return all(self.leq(a, b) or self.leq(b, a) for a in self.indices for b in self.indices)

    def connecting(self, a, b) -> Homomorphism:
        if a == b:
            return identity_hom(self.objects[a])
        if (a, b) not in self.homs:
            raise NoUpperBound(f"no connecting hom {a} -> {b}")
        return self.homs[(a, b)]

    def bound(self, *stages):
        if not stages:
            raise NoUpperBound("upper bound of no stages")
        gamma = stages[0]
        for s in stages[1:]:
            nxt = self.upper_bound(gamma, s)
            if nxt not in self.objects or not (self.leq(gamma, nxt) and self.leq(s, nxt)):
                raise NoUpperBound(f"chooser returned {nxt!r} for {gamma!r}, {s!r}")
            gamma = nxt
        return gamma

    def check_functorial(self):
        for (a, b), h_ab in self.homs.items():
            for (b2, c), h_bc in self.homs.items():
                if b2 != b:
                    continue
                if (a, c) not in self.homs:
                    raise ShapeMismatch(f"missing composite hom {a} -> {c}")
                if hom_compose(h_bc, h_ab).image_maps() != self.homs[(a, c)].image_maps():
                    raise ShapeMismatch(f"composite {a}->{b}->{c} differs from {a}->{c}")

    def push(self, u: ColimitElement, gamma) -> RingElement:
        return hom_apply(self.connecting(u.stage, gamma), u.element)

    def insert(self, stage, value) -> ColimitElement:
        return ColimitElement(stage, self.objects[stage].element(value))


def colimit_equal(d: DirectedDiagram, u: ColimitElement, w: ColimitElement,
                  config: MembershipConfig | None = None):
    gamma = d.bound(u.stage, w.stage)
    return elements_equal(d.push(u, gamma), d.push(w, gamma), config)


def colimit_apply(d: DirectedDiagram, f: SmoothMap, *elements: ColimitElement, stage=None) -> ColimitElement:
    """f applied at a common stage (the chosen bound of the arguments' stages)."""
    if len(elements) != f.arity:
        raise ArityMismatch(f"map of arity {f.arity} applied to {len(elements)} element(s)")
    if stage is None:
        stage = d.bound(*[e.stage for e in elements])
    else:
        stage = d.bound(stage, *[e.stage for e in elements])
    ring = d.objects[stage]
    if not elements:
        return ColimitElement(stage, ring.element(f.body))
    return ColimitElement(stage, apply(f, *[d.push(e, stage) for e in elements]))


@dataclass(frozen=True)
class ColimitMediator:
    diagram: DirectedDiagram
    cocone: Mapping

    @property
    def target(self) -> FinitelyPresentedRing:
        return next(iter(self.cocone.values())).target

    def __call__(self, u: ColimitElement) -> RingElement:
        return hom_apply(self.cocone[u.stage], u.element)


def colimit_mediator(d: DirectedDiagram, cocone: Mapping) -> ColimitMediator:
    """theta([a, alpha]) = zeta_alpha(a), after checking the cocone commutes."""
    if set(cocone) != set(d.indices):
        raise CoconeIncoherent("cocone must give one hom per stage")
    targets = {h.target for h in cocone.values()}
    if len(targets) != 1:
        raise CoconeIncoherent("cocone homs have different targets")
    for (a, b), mu in d.homs.items():
        if hom_compose(cocone[b], mu).image_maps() != cocone[a].image_maps():
            raise CoconeIncoherent(f"zeta_{b} o mu_{a}{b} differs from zeta_{a}")
    return ColimitMediator(d, dict(cocone))


def coproduct_chain(rings: Sequence[FinitelyPresentedRing], name: str = "") -> DirectedDiagram:
    """Coproduct of a family as the colimit of its finite partial coproducts."""
    if not rings:
        return DirectedDiagram.chain([free_ring(())], [], name)
    stages = [rings[0]]
    homs = []
    for r in rings[1:]:
        nxt, iota, _ = coproduct(stages[-1], r)
        stages.append(nxt)
        homs.append(iota)
    return DirectedDiagram.chain(stages, homs, name)


# -- finite limits -----------------------------------------------------------


def finite_limit_membership(objects: Sequence[FinitelyPresentedRing], arrows: Sequence,
                            candidate: Sequence[RingElement], config: MembershipConfig | None = None):
    """Whether a tuple is a compatible family for a finite diagram.

    ``arrows`` lists (source index, target index, hom).  The verdict is the
    conjunction over arrows; a refutation reports the arrow index in ``at``.
    """
    if len(candidate) != len(objects):
        raise ShapeMismatch(f"{len(candidate)} component(s) for {len(objects)} object(s)")
    for ring, c in zip(objects, candidate):
        if c.ring != ring:
            raise RingMismatch("candidate component lies in the wrong ring")
    verdicts = []
    for i, j, h in arrows:
        if h.source != objects[i] or h.target != objects[j]:
            raise ShapeMismatch(f"arrow {i}->{j} has wrong endpoints")
        verdicts.append(elements_equal(hom_apply(h, candidate[i]), candidate[j], config))
    return conjunction(verdicts)


# -- ideals along directed colimits ------------------------------------------


def _inclusion_positions(h: Homomorphism):
    """Slot positions when h sends generators injectively to target generators."""
    positions = []
    for m in h.image_maps():
        support = m.support()
        if len(support) != 1:
            return None
        (p,) = support
        if m != SmoothMap.projection(p, h.target.arity):
            return None
        positions.append(p)
    return positions if len(set(positions)) == len(positions) else None


@dataclass(frozen=True)
class RestrictedIdeal:
    """Preimage of a top-stage ideal J at one stage of a chain.

    Membership is always available; ``generators`` is a sound list (each is
    ProvenIn the preimage) and is complete for inclusion stages in the cases
    the split argument covers, which is all the roundtrip needs.
    """

    stage: object
    ring: FinitelyPresentedRing
    to_top: Homomorphism
    top_ideal: Ideal
    generators: tuple

    def contains(self, a, config: MembershipConfig | None = None):
        image = hom_apply(self.to_top, a)
        return ideal_membership(image.representative, ideal_join(self.top_ideal, self.to_top.target.relations), config)

    def as_ideal(self) -> Ideal:
        return Ideal(self.ring.arity, self.generators)


def colimit_ideal_restrict(d: DirectedDiagram, j: Ideal, config: MembershipConfig | None = None) -> dict:
    """Family of preimages of J (given at the top stage) along a finite chain."""
    if not d.is_chain:
        raise NotAChain("ideal restriction is implemented for chains")
    top = d.bound(*d.indices)
    if j.arity != d.objects[top].arity:
        raise ArityMismatch("ideal does not live at the top stage")
    family = {}
    for stage in d.indices:
        mu = d.connecting(stage, top)
        family[stage] = RestrictedIdeal(stage, d.objects[stage], mu, j, _pullback_generators(mu, j, config))
    return family


def _pullback_generators(mu: Homomorphism, j: Ideal, config):
    n = mu.source.arity
    positions = _inclusion_positions(mu)
    if positions is None:
        return ()
    back = {p: i + 1 for i, p in enumerate(positions)}
    m = mu.target.arity
    out = []
    full = ideal_join(j, mu.target.relations)
    for g in j.generators:
        candidate = compose(g, [SmoothMap.projection(back[p], n) if p in back else SmoothMap.zero(n)
                                for p in range(1, m + 1)], arity=n)
        if g.support() <= set(back):
            out.append(candidate)
            continue
        # Setting the slots outside the stage to zero gives a candidate that
        # is kept only when its image is certified in J.
        if candidate.is_zero:
            continue
        image = hom_apply(mu, RingElement(mu.source, candidate)).representative
        if isinstance(ideal_membership(image, full, config), ProvenIn):
            out.append(candidate)
    return tuple(Ideal(n, out).generators)


def colimit_ideal_assemble(d: DirectedDiagram, family: Mapping) -> Ideal:
    """Ideal at the top stage generated by all pushed-forward stage generators."""
    top = d.bound(*d.indices)
    gens = []
    for stage in d.indices:
        mu = d.connecting(stage, top)
        for g in family[stage].generators:
            gens.append(hom_apply(mu, RingElement(d.objects[stage], g)).representative)
    return Ideal(d.objects[top].arity, gens)


def colimit_congruence_restrict(d: DirectedDiagram, r: Congruence, config: MembershipConfig | None = None) -> dict:
    return colimit_ideal_restrict(d, r.underlying, config)


def colimit_congruence_assemble(d: DirectedDiagram, family: Mapping) -> Congruence:
    return Congruence(colimit_ideal_assemble(d, family))
