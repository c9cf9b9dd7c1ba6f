"""Finitely presented C∞-rings C∞(R^n)/I and homomorphisms between them.

Elements carry representatives rather than classes; equality of elements is
a membership verdict for the difference in the relations ideal.  A
homomorphism out of a presentation is fixed by its generator images, so
checking it reduces to checking that every relation is sent into the
target's relations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import (
    ArityMismatch,
    DuplicateName,
    MissingImage,
    PreconditionUnverified,
    RingMismatch,
    TargetMismatch,
    WitnessMissing,
)
from .ideals import (
    Ideal,
    MembershipConfig,
    ProvenIn,
    RefutedNumerically,
    Congruence,
    congruence_to_ideal,
    ideal_join,
    ideal_membership,
)
from .terms import SmoothMap, Term, as_term, compose, slot


def _check_names(names):
    seen = set()
    for name in names:
        if name in seen:
            raise DuplicateName(f"generator {name!r} listed twice")
        seen.add(name)


@dataclass(frozen=True)
class FinitelyPresentedRing:
    generator_names: tuple
    relations: Ideal
    name: str = field(default="", compare=False)

    def __post_init__(self):
        names = tuple(self.generator_names)
        _check_names(names)
        if self.relations.arity != len(names):
            raise ArityMismatch(
                f"relations of arity {self.relations.arity} for {len(names)} generator(s)"
            )
        object.__setattr__(self, "generator_names", names)

    @property
    def arity(self) -> int:
        return len(self.generator_names)

    @property
    def is_free(self) -> bool:
        return not self.relations.generators

    def element(self, value) -> "RingElement":
        """Element from a SmoothMap, a Term over the generator names, or a number."""
        if isinstance(value, RingElement):
            if value.ring != self:
                raise RingMismatch("element belongs to another ring")
            return value
        if isinstance(value, SmoothMap):
            if value.arity != self.arity:
                raise ArityMismatch(f"map of arity {value.arity} in ring of arity {self.arity}")
            return RingElement(self, value)
        return RingElement(self, SmoothMap.from_term(as_term(value), self.generator_names))

    def generator(self, which) -> "RingElement":
        """Generator by 1-based index or by name."""
        i = self.generator_names.index(which) + 1 if isinstance(which, str) else which
        return RingElement(self, SmoothMap.projection(i, self.arity))

    def generators(self) -> list:
        return [self.generator(i) for i in range(1, self.arity + 1)]

    def zero(self) -> "RingElement":
        return RingElement(self, SmoothMap.zero(self.arity))

    def one(self) -> "RingElement":
        return RingElement(self, SmoothMap.constant(1, self.arity))

    def term(self, element: "RingElement") -> Term:
        return element.representative.to_term(self.generator_names)

    def __repr__(self):
        label = self.name or "ring"
        return f"<{label} gens={list(self.generator_names)} rels={len(self.relations)}>"


_ADD = SmoothMap(2, slot(1) + slot(2))
_MUL = SmoothMap(2, slot(1) * slot(2))
_NEG = SmoothMap(1, -slot(1))


@dataclass(frozen=True)
class RingElement:
    ring: FinitelyPresentedRing
    representative: SmoothMap

    def __post_init__(self):
        if self.representative.arity != self.ring.arity:
            raise ArityMismatch("representative arity differs from the ring's generator count")

    def _other(self, other):
        if isinstance(other, RingElement):
            if other.ring != self.ring:
                raise RingMismatch("operands belong to different rings")
            return other
        return self.ring.element(SmoothMap.constant(other, self.ring.arity))

    # The ring operations are the interpretations of the smooth maps
    # (x, y) -> x + y, (x, y) -> x y and x -> -x.
    def __add__(self, other):
        return apply(_ADD, self, self._other(other))

    __radd__ = __add__

    def __mul__(self, other):
        return apply(_MUL, self, self._other(other))

    __rmul__ = __mul__

    def __neg__(self):
        return apply(_NEG, self)

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) - self

    def __repr__(self):
        from .terms import to_sexpr

        return f"[{to_sexpr(self.ring.term(self))}]"


def apply(f: SmoothMap, *elements: RingElement) -> RingElement:
    """Interpretation of the function symbol f on elements of one ring."""
    if len(elements) != f.arity:
        raise ArityMismatch(f"map of arity {f.arity} applied to {len(elements)} element(s)")
    if not elements:
        raise ArityMismatch("nullary application needs an explicit ring; use ring.element")
    ring = elements[0].ring
    if any(e.ring != ring for e in elements):
        raise RingMismatch("arguments belong to different rings")
    return RingElement(ring, compose(f, [e.representative for e in elements], arity=ring.arity))


def free_ring(names: Sequence[str] = (), name: str = "") -> FinitelyPresentedRing:
    names = tuple(names)
    _check_names(names)
    return FinitelyPresentedRing(names, Ideal.zero(len(names)), name)


def quotient(ring: FinitelyPresentedRing, ideal: Ideal, name: str = ""):
    """The quotient ring and its quotient map q (identity on generators)."""
    if ideal.arity != ring.arity:
        raise ArityMismatch(f"ideal of arity {ideal.arity} for ring of arity {ring.arity}")
    target = FinitelyPresentedRing(ring.generator_names, ideal_join(ring.relations, ideal), name)
    # The source relations are listed among the target's, so each is ProvenIn
    # with a unit certificate; no search is needed.
    q = Homomorphism(ring, target, tuple(target.generators()), VERIFIED)
    return target, q


def elements_equal(a: RingElement, b: RingElement, config: MembershipConfig | None = None):
    if a.ring != b.ring:
        raise RingMismatch("elements of different rings")
    return ideal_membership(a.representative - b.representative, a.ring.relations, config)


# -- homomorphisms -----------------------------------------------------------


@dataclass(frozen=True)
class HomStatus:
    """Verified, refuted at a relation index, or unverified on some relations."""

    kind: str
    refuted_at: int | None = None
    unknown: tuple = ()
    verdicts: tuple = field(default=(), compare=False)

    @property
    def verified(self) -> bool:
        return self.kind == "verified"

    def __str__(self):
        if self.kind == "verified":
            return "Verified"
        if self.kind == "refuted":
            return f"RefutedAt {self.refuted_at}"
        return "Unverified " + " ".join(str(i) for i in self.unknown)


VERIFIED = HomStatus("verified")
UNCHECKED = HomStatus("unverified", unknown=("unchecked",))


@dataclass(frozen=True)
class Homomorphism:
    source: FinitelyPresentedRing
    target: FinitelyPresentedRing
    images: tuple
    status: HomStatus = UNCHECKED
    name: str = field(default="", compare=False)

    def __post_init__(self):
        images = tuple(self.target.element(im) for im in self.images)
        if len(images) != self.source.arity:
            raise ArityMismatch(
                f"{len(images)} image(s) for {self.source.arity} source generator(s)"
            )
        object.__setattr__(self, "images", images)

    def image_maps(self) -> list:
        return [im.representative for im in self.images]

    def __call__(self, a) -> RingElement:
        return hom_apply(self, a)


def make_hom(source, target, images, config: MembershipConfig | None = None, name: str = "") -> Homomorphism:
    """Homomorphism with the given generator images, status computed by hom_check."""
    h = Homomorphism(source, target, tuple(images), UNCHECKED, name)
    return Homomorphism(source, target, h.images, hom_check(h, config), name)


def hom_check(h: Homomorphism, config: MembershipConfig | None = None) -> HomStatus:
    """Status from membership of every relation's image in the target relations."""
    verdicts = []
    for r in h.source.relations.generators:
        image = compose(r, h.image_maps(), arity=h.target.arity)
        verdicts.append(ideal_membership(image, h.target.relations, config))
    for idx, v in enumerate(verdicts):
        if isinstance(v, RefutedNumerically):
            return HomStatus("refuted", refuted_at=idx, verdicts=tuple(verdicts))
    unknown = tuple(idx for idx, v in enumerate(verdicts) if not isinstance(v, ProvenIn))
    if unknown:
        return HomStatus("unverified", unknown=unknown, verdicts=tuple(verdicts))
    return HomStatus("verified", verdicts=tuple(verdicts))


def hom_apply(h: Homomorphism, a) -> RingElement:
    a = h.source.element(a)
    return RingElement(h.target, compose(a.representative, h.image_maps(), arity=h.target.arity))


def identity_hom(ring: FinitelyPresentedRing) -> Homomorphism:
    return Homomorphism(ring, ring, tuple(ring.generators()), VERIFIED)


def hom_compose(g: Homomorphism, f: Homomorphism) -> Homomorphism:
    """g ∘ f; verified when both factors are."""
    if f.target != g.source:
        raise TargetMismatch("f's target is not g's source")
    images = tuple(hom_apply(g, im) for im in f.images)
    if f.status.verified and g.status.verified:
        return Homomorphism(f.source, g.target, images, VERIFIED)
    return Homomorphism(f.source, g.target, images, UNCHECKED)


def homs_agree_on_generators(h: Homomorphism, k: Homomorphism) -> bool:
    """Exact equality of generator images (as normalized representatives)."""
    return h.source == k.source and h.target == k.target and h.image_maps() == k.image_maps()


def universal_extend(alpha: Mapping[str, RingElement], source: FinitelyPresentedRing,
                     target: FinitelyPresentedRing | None = None) -> Homomorphism:
    """The unique hom out of a free ring extending a generator assignment."""
    if not source.is_free:
        raise PreconditionUnverified("universal extension needs a free source ring")
    missing = [n for n in source.generator_names if n not in alpha]
    if missing:
        raise MissingImage(f"no image for generator(s) {missing}")
    images = [alpha[n] for n in source.generator_names]
    if target is None:
        rings = {im.ring for im in images if isinstance(im, RingElement)}
        if len(rings) != 1:
            raise TargetMismatch("images must all lie in one target ring")
        target = rings.pop()
    return Homomorphism(source, target, tuple(images), VERIFIED)


def kernel_contains(h: Homomorphism, a, config: MembershipConfig | None = None):
    image = hom_apply(h, a)
    return elements_equal(image, h.target.zero(), config)


def ftt_factor(phi: Homomorphism, r: Congruence, config: MembershipConfig | None = None,
               name: str = "") -> Homomorphism:
    """Factor phi through the quotient of its source by a congruence R ⊆ ker(phi).

    The inclusion is checked on R's generating differences; the factor has
    the same generator images as phi, so the factor composed with q equals
    phi generator by generator.
    """
    ideal = congruence_to_ideal(r)
    if ideal.arity != phi.source.arity:
        raise ArityMismatch("congruence lives on a ring of different arity")
    for idx, g in enumerate(ideal.generators):
        v = kernel_contains(phi, RingElement(phi.source, g), config)
        if not isinstance(v, ProvenIn):
            raise PreconditionUnverified(f"generating pair {idx} not certified in ker(phi): {type(v).__name__}")
    quotient_ring, q = quotient(phi.source, ideal, name)
    if phi.status.verified:
        status = VERIFIED
    else:
        status = hom_check(Homomorphism(quotient_ring, phi.target, phi.images), config)
    factor = Homomorphism(quotient_ring, phi.target, phi.images, status, name)
    assert hom_compose(factor, q).image_maps() == phi.image_maps()
    return factor


def image_presentation(h: Homomorphism, witnesses: Mapping[str, RingElement],
                       config: MembershipConfig | None = None) -> FinitelyPresentedRing:
    """Presentation of the image of h, given preimage witnesses for each target generator.

    Witnesses are checked, never searched for.  With every target generator
    witnessed, h is onto and the image is the target presentation itself.
    """
    if not h.status.verified:
        raise PreconditionUnverified("image presentation needs a verified homomorphism")
    for name_ in h.target.generator_names:
        if name_ not in witnesses:
            raise WitnessMissing(f"no preimage witness for target generator {name_!r}")
        v = elements_equal(hom_apply(h, witnesses[name_]), h.target.generator(name_), config)
        if not isinstance(v, ProvenIn):
            raise WitnessMissing(f"witness for {name_!r} is not certified: {type(v).__name__}")
    return h.target


def counit(ring: FinitelyPresentedRing) -> Homomorphism:
    """Evaluation from the free ring on the ring's generator names onto the ring."""
    free = free_ring(ring.generator_names)
    return Homomorphism(free, ring, tuple(ring.generators()), VERIFIED)


def free_inclusion(ring: FinitelyPresentedRing, extra_names: Sequence[str]):
    """Free ring on more names and the canonical inclusion hom into it."""
    if not ring.is_free:
        raise PreconditionUnverified("free inclusion starts from a free ring")
    bigger = free_ring(ring.generator_names + tuple(extra_names))
    images = tuple(bigger.generator(i) for i in range(1, ring.arity + 1))
    return bigger, Homomorphism(ring, bigger, images, VERIFIED)


def in_generated_subring(a: RingElement, subset: Sequence[RingElement]) -> bool | None:
    """Syntactic test for a ∈ ⟨X⟩: True when a's representative only involves
    constants and generators that belong to X, or a is itself in X.

    The closure operator has no effective membership procedure in general,
    so None means "not recognized", never "not a member".
    """
    reps = {x.representative for x in subset}
    if a.representative in reps:
        return True
    n = a.ring.arity
    allowed = {i for i in range(1, n + 1) if SmoothMap.projection(i, n) in reps}
    if a.representative.support() <= allowed:
        return True
    return None
