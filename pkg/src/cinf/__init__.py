"""Symbolic kernel for C∞-rings: terms, Hadamard cofactors, ideals, presented
rings, homomorphisms and the standard constructions."""

from .errors import CinfError, DomainError
from .terms import SmoothMap, compose, differentiate, evaluate, normalize
from .sexpr import parse_term
from .hadamard import hadamard_decompose, hadamard_exact, hadamard_quadrature
from .ideals import (
    Congruence,
    Ideal,
    MembershipConfig,
    ProvenIn,
    RefutedNumerically,
    Unknown,
    congruence_from_pairs,
    congruence_to_ideal,
    ideal_join,
    ideal_membership,
    ideal_to_congruence,
)
from .rings import (
    FinitelyPresentedRing,
    Homomorphism,
    RingElement,
    elements_equal,
    free_ring,
    ftt_factor,
    hom_apply,
    hom_check,
    quotient,
    universal_extend,
)
from .constructions import (
    DirectedDiagram,
    coproduct,
    coproduct_mediator,
    polynomial_adjunction,
)

__version__ = "0.1.0"

__all__ = [
    "CinfError",
    "Congruence",
    "DirectedDiagram",
    "DomainError",
    "FinitelyPresentedRing",
    "Homomorphism",
    "Ideal",
    "MembershipConfig",
    "ProvenIn",
    "RefutedNumerically",
    "RingElement",
    "SmoothMap",
    "Unknown",
    "compose",
    "congruence_from_pairs",
    "congruence_to_ideal",
    "coproduct",
    "coproduct_mediator",
    "differentiate",
    "elements_equal",
    "evaluate",
    "free_ring",
    "ftt_factor",
    "hadamard_decompose",
    "hadamard_exact",
    "hadamard_quadrature",
    "hom_apply",
    "hom_check",
    "ideal_join",
    "ideal_membership",
    "ideal_to_congruence",
    "normalize",
    "parse_term",
    "polynomial_adjunction",
    "quotient",
    "universal_extend",
]
