"""Finitely generated ideals of C∞(R^n), membership verdicts, and congruences.

Membership in a generator-presented ideal of C∞(R^n) is undecidable in
general, so :func:`ideal_membership` returns one of three verdicts:

* :class:`ProvenIn` carries cofactors h_j with e = sum h_j g_j, re-checked
  before it is returned;
* :class:`RefutedNumerically` carries a common near-zero of the generators
  at which the element is bounded away from zero;
* :class:`Unknown` lists the strategies that were tried.

Congruences are never stored as sets of pairs.  A congruence is represented
by its ideal of differences, and the two directions of the dictionary are
exact inverses at the level of representations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import polynomial
from .errors import ArityMismatch, DomainError, PreconditionUnverified, ShapeMismatch
from .hadamard import (
    compose_cofactor,
    evaluate_cofactor,
    hadamard_cofactors,
    integrate_parameter,
    is_exact,
)
from .terms import (
    App,
    Const,
    SmoothMap,
    compose,
    differentiate,
    evaluate,
    evaluate_many,
    monomials,
    slot,
)


class Ideal:
    """Ideal of C∞(R^n) given by a normalized, duplicate-free generator list."""

    __slots__ = ("arity", "generators", "_hash")

    def __init__(self, arity: int, generators: Sequence[SmoothMap] = ()):
        seen = []
        for g in generators:
            if g.arity != arity:
                raise ArityMismatch(f"generator of arity {g.arity} in ideal of arity {arity}")
            if g.is_zero or g in seen:
                continue
            seen.append(g)
        self.arity = arity
        self.generators = tuple(seen)
        self._hash = hash(("ideal", arity, self.generators))

    @classmethod
    def zero(cls, n: int) -> "Ideal":
        return cls(n, ())

    @classmethod
    def unit(cls, n: int) -> "Ideal":
        return cls(n, (SmoothMap.constant(1, n),))

    def __eq__(self, other):
        return isinstance(other, Ideal) and other.arity == self.arity and other.generators == self.generators

    def __hash__(self):
        return self._hash

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __repr__(self):
        from .terms import to_sexpr

        return f"Ideal({self.arity}, [" + ", ".join(to_sexpr(g.body) for g in self.generators) + "])"


def ideal_join(i: Ideal, j: Ideal) -> Ideal:
    if i.arity != j.arity:
        raise ArityMismatch(f"ideals of arity {i.arity} and {j.arity}")
    return Ideal(i.arity, i.generators + j.generators)


# -- verdicts ----------------------------------------------------------------


@dataclass(frozen=True)
class ProvenIn:
    certificate: tuple
    strategy: str = ""
    quadrature: bool = False
    partial: bool = False
    residual: float = 0.0

    kind = "proven"

    def __bool__(self):
        return True


@dataclass(frozen=True)
class RefutedNumerically:
    witness: tuple
    generator_residual: float
    element_value: float
    at: int | None = None

    kind = "refuted"

    def __bool__(self):
        return False


@dataclass(frozen=True)
class Unknown:
    strategies_tried: tuple = ()
    at: tuple = ()

    kind = "unknown"

    def __bool__(self):
        return False


@dataclass(frozen=True)
class MembershipConfig:
    degree_cap: int = polynomial.DEFAULT_DEGREE_CAP
    size_cap: int = polynomial.DEFAULT_SIZE_CAP
    seed: int = 0
    starts: int = 32
    search_box: float = 4.0
    newton_steps: int = 60
    zero_tol: float = 1e-9
    separation: float = 1e-3
    verify_samples: int = 100
    verify_box: float = 2.0
    verify_tol: float = 1e-9
    strategies: tuple = ("syntactic", "polynomial", "coordinate-split", "unit", "refutation")


DEFAULT_CONFIG = MembershipConfig()


# -- certificate checking ----------------------------------------------------


def _combination(ideal: Ideal, certificate) -> SmoothMap:
    total = SmoothMap.zero(ideal.arity)
    for h, g in zip(certificate, ideal.generators):
        total = total + h * g
    return total


def certificate_residual(e: SmoothMap, ideal: Ideal, certificate, config: MembershipConfig = DEFAULT_CONFIG) -> float:
    """0.0 when e - sum h_j g_j normalizes to zero, else a sampled max residual.

    Sample points where some partial primitive is undefined are skipped; if
    no point at all can be evaluated the residual is infinite.
    """
    if len(certificate) != len(ideal.generators):
        raise ShapeMismatch("certificate length differs from generator count")
    if all(is_exact(h) for h in certificate):
        if (e - _combination(ideal, certificate)).is_zero:
            return 0.0
    rng = np.random.default_rng(config.seed)
    n = ideal.arity
    worst, accepted, attempts = 0.0, 0, 0
    while accepted < config.verify_samples and attempts < 10 * config.verify_samples:
        attempts += 1
        p = rng.uniform(-config.verify_box, config.verify_box, n)
        try:
            value = evaluate(e, p) - sum(
                evaluate_cofactor(h, p) * evaluate(g, p)
                for h, g in zip(certificate, ideal.generators)
                if not (is_exact(h) and h.is_zero)
            )
        except DomainError:
            continue
        if not np.isfinite(value):
            continue
        worst = max(worst, abs(value))
        accepted += 1
    return worst if accepted else float("inf")


def _finish(e, ideal, certificate, strategy, config):
    certificate = tuple(certificate)
    residual = certificate_residual(e, ideal, certificate, config)
    if residual > config.verify_tol:
        return None
    quadrature = not all(is_exact(h) for h in certificate)
    partial = (
        e.is_partial
        or any(g.is_partial for g in ideal.generators)
        or any(getattr(h, "is_partial", False) for h in certificate)
    )
    return ProvenIn(certificate, strategy, quadrature, partial, residual)


# -- strategies --------------------------------------------------------------


def _zero_certificate(ideal):
    return [SmoothMap.zero(ideal.arity) for _ in ideal.generators]


def _syntactic(e, ideal, config):
    cert = _zero_certificate(ideal)
    if e.is_zero:
        return _finish(e, ideal, cert, "syntactic", config)
    me = monomials(e.body)
    for j, g in enumerate(ideal.generators):
        mg = monomials(g.body)
        if me.keys() != mg.keys():
            continue
        ratios = {me[m] / mg[m] for m in me}
        if len(ratios) == 1:
            cert[j] = SmoothMap.constant(ratios.pop(), ideal.arity)
            return _finish(e, ideal, cert, "syntactic", config)
    return None


def _polynomial(e, ideal, config):
    if not e.is_polynomial:
        return None
    index = [j for j, g in enumerate(ideal.generators) if g.is_polynomial]
    if not index:
        return None
    n = ideal.arity
    gens = [polynomial.poly_from_map(ideal.generators[j]) for j in index]
    try:
        basis = polynomial.groebner_basis(gens, n, config.degree_cap, config.size_cap)
    except polynomial.CapExceeded:
        return None
    target = polynomial.poly_from_map(e)
    if target and max(sum(m) for m in target) > config.degree_cap:
        return None
    cof = basis.membership(target)
    if cof is None:
        return None
    cert = _zero_certificate(ideal)
    for j, c in zip(index, cof):
        cert[j] = polynomial.map_from_poly(c, n)
    return _finish(e, ideal, cert, "polynomial", config)


def coordinate_generators(ideal: Ideal) -> dict:
    """Slots fixed by affine generators: slot -> (value a, generator index, scale)

    A generator alpha*v_i + beta pins v_i to a = -beta/alpha.
    """
    found = {}
    for j, g in enumerate(ideal.generators):
        mons = monomials(g.body)
        linear = [(m, c) for m, c in mons.items() if m]
        if len(linear) != 1:
            continue
        (mono, alpha), = linear
        if len(mono) != 1 or mono[0][1] != 1:
            continue
        atom = mono[0][0]
        if atom not in [slot(i) for i in range(1, ideal.arity + 1)]:
            continue
        i = int(atom.name[1:])
        beta = mons.get((), Fraction(0))
        found.setdefault(i, (-beta / alpha, j, alpha))
    return found


def split_along(e: SmoothMap, pinned: dict):
    """Restriction e0 of e to the pinned slots and cofactors G_i with

        e - e0 = sum over pinned i of (v_i - a_i) G_i.
    """
    n = e.arity
    restrict = [
        SmoothMap.constant(pinned[k], n) if k in pinned else SmoothMap.projection(k, n)
        for k in range(1, n + 1)
    ]
    e0 = compose(e, restrict, arity=n)
    m = n + 1
    t = slot(m)
    path = [
        SmoothMap(m, Const(pinned[k]) + t * (slot(k) - Const(pinned[k]))) if k in pinned
        else SmoothMap.projection(k, m)
        for k in range(1, n + 1)
    ]
    cofactors = {}
    for i in sorted(pinned):
        di = differentiate(e, i)
        if di.is_zero:
            continue
        cofactors[i] = integrate_parameter(compose(di, path, arity=m))
    return e0, cofactors


def _coordinate_split(e, ideal, config):
    coords = coordinate_generators(ideal)
    if not coords:
        return None
    pinned = {i: a for i, (a, _, _) in coords.items()}
    e0, cofactors = split_along(e, pinned)
    if e0.is_zero:
        cert = _zero_certificate(ideal)
    else:
        sub = None
        for strategy in (_syntactic, _polynomial):
            sub = strategy(e0, ideal, config)
            if sub is not None:
                break
        if sub is None:
            return None
        cert = list(sub.certificate)
    for i, gi in cofactors.items():
        _, j, alpha = coords[i]
        cert[j] = cert[j] + gi * (1 / alpha)
    return _finish(e, ideal, cert, "coordinate-split", config)


def _sign(term) -> str | None:
    """Syntactic positivity proof: 'pos', 'nonneg', or None."""
    mons = monomials(term)
    if not mons:
        return None
    any_pos = False
    for mono, c in mons.items():
        if c < 0:
            return None
        strict = True
        for atom, e in mono:
            s = _atom_sign(atom)
            if s == "pos":
                continue
            if e % 2 == 0:
                strict = False
                continue
            return None
        any_pos = any_pos or strict
    return "pos" if any_pos else "nonneg"


def _atom_sign(atom):
    if isinstance(atom, App):
        if atom.op == "exp":
            return "pos"
        if atom.op == "recip" and _sign(atom.args[0]) == "pos":
            return "pos"
    return None


def nowhere_vanishing(g: SmoothMap) -> bool:
    """True when g or -g has a syntactic strict-positivity proof."""
    if g.is_partial:
        return False
    return _sign(g.body) == "pos" or _sign((-g).body) == "pos"


def _unit(e, ideal, config):
    for j, g in enumerate(ideal.generators):
        if nowhere_vanishing(g):
            cert = _zero_certificate(ideal)
            cert[j] = SmoothMap(ideal.arity, e.body * App("recip", (g.body,)))
            return _finish(e, ideal, cert, "unit", config)
    return None


def _gauss_newton(gens, jac, starts, steps, tol):
    """Damped Gauss-Newton on the system gens(x) = 0 from many starts at once."""
    x = starts.copy()

    def residuals(pts):
        return np.stack([evaluate_many(g, pts) for g in gens], axis=1)

    r = residuals(x)
    for _ in range(steps):
        norm = np.where(np.all(np.isfinite(r), axis=1), np.sum(r * r, axis=1), np.inf)
        active = np.isfinite(norm) & (np.max(np.abs(np.nan_to_num(r, nan=np.inf)), axis=1) > tol * 1e-3)
        if not np.any(active):
            break
        J = np.stack([np.stack([evaluate_many(d, x) for d in row], axis=1) for row in jac], axis=1)
        ok = active & np.all(np.isfinite(J.reshape(len(x), -1)), axis=1)
        if not np.any(ok):
            break
        step = np.zeros_like(x)
        step[ok] = -np.einsum("kij,kj->ki", np.linalg.pinv(J[ok]), r[ok])
        alpha = np.ones(len(x))
        pending = ok.copy()
        new_x, new_r = x.copy(), r.copy()
        for _ in range(12):
            if not np.any(pending):
                break
            trial = x[pending] + alpha[pending, None] * step[pending]
            tr = residuals(trial)
            tn = np.where(np.all(np.isfinite(tr), axis=1), np.sum(tr * tr, axis=1), np.inf)
            better = tn < norm[pending]
            idx = np.flatnonzero(pending)
            new_x[idx[better]] = trial[better]
            new_r[idx[better]] = tr[better]
            pending[idx[better]] = False
            alpha[pending] /= 2
        if np.array_equal(new_x, x):
            break
        x, r = new_x, new_r
    return x, r


def _refutation(e, ideal, config):
    n = ideal.arity
    gens = list(ideal.generators)
    rng = np.random.default_rng(config.seed)
    starts = rng.uniform(-config.search_box, config.search_box, (config.starts, n))
    if gens:
        jac = [[differentiate(g, i) for i in range(1, n + 1)] for g in gens]
        points, _ = _gauss_newton(gens, jac, starts, config.newton_steps, config.zero_tol)
    else:
        points = starts
    for p in points:
        try:
            gres = max((abs(evaluate(g, p)) for g in gens), default=0.0)
            if not gres <= config.zero_tol:
                continue
            value = evaluate(e, p)
        except DomainError:
            continue
        if abs(value) >= config.separation:
            return RefutedNumerically(tuple(float(v) for v in p), float(gres), float(value))
    return None


STRATEGIES = {
    "syntactic": _syntactic,
    "polynomial": _polynomial,
    "coordinate-split": _coordinate_split,
    "unit": _unit,
    "refutation": _refutation,
}


def ideal_membership(e: SmoothMap, ideal: Ideal, config: MembershipConfig | None = None):
    """Verdict on e ∈ ideal; see the module docstring for the three outcomes."""
    config = config or DEFAULT_CONFIG
    if e.arity != ideal.arity:
        raise ArityMismatch(f"element of arity {e.arity} tested against ideal of arity {ideal.arity}")
    tried = []
    for name in config.strategies:
        tried.append(name)
        verdict = STRATEGIES[name](e, ideal, config)
        if verdict is not None:
            return verdict
    return Unknown(tuple(tried))


# -- congruences -------------------------------------------------------------


@dataclass(frozen=True)
class Congruence:
    """Congruence on C∞(R^n) represented by its ideal {a - b : (a, b) ∈ R}."""

    underlying: Ideal

    @property
    def arity(self) -> int:
        return self.underlying.arity

    def contains(self, a: SmoothMap, b: SmoothMap, config: MembershipConfig | None = None):
        return ideal_membership(a - b, self.underlying, config)


def ideal_to_congruence(ideal: Ideal) -> Congruence:
    return Congruence(ideal)


def congruence_to_ideal(r: Congruence) -> Ideal:
    return r.underlying


def congruence_from_pairs(pairs, arity: int | None = None) -> Congruence:
    """Congruence generated by pairs, via the ideal of their differences."""
    pairs = list(pairs)
    if arity is None:
        if not pairs:
            raise ArityMismatch("arity is required for an empty pair list")
        arity = pairs[0][0].arity
    return Congruence(Ideal(arity, [a - b for a, b in pairs]))


def compatibility_certificate(r: Congruence, f: SmoothMap, pairs, config: MembershipConfig | None = None) -> ProvenIn:
    """Certify f(a_1..a_k) - f(b_1..b_k) ∈ R from certificates of a_i - b_i.

    Hadamard cofactors G_i of f give f(a) - f(b) = sum (a_i - b_i) G_i(a, b);
    substituting a_i - b_i = sum_j h_ij g_j yields cofactors sum_i G_i h_ij.
    """
    config = config or DEFAULT_CONFIG
    pairs = list(pairs)
    if len(pairs) != f.arity:
        raise ArityMismatch(f"map of arity {f.arity} applied to {len(pairs)} pair(s)")
    ideal = r.underlying
    n = ideal.arity
    certs = []
    for a, b in pairs:
        v = r.contains(a, b, config)
        if not isinstance(v, ProvenIn):
            raise PreconditionUnverified(f"pair difference not certified: {v}")
        certs.append(v.certificate)
    args = [a for a, _ in pairs] + [b for _, b in pairs]
    cofactors = [compose_cofactor(g, args, n) for g in hadamard_cofactors(f)] if pairs else []
    cert = _zero_certificate(ideal)
    for gi, hi in zip(cofactors, certs):
        for j, h in enumerate(hi):
            if is_exact(h) and h.is_zero:
                continue
            cert[j] = cert[j] + gi * h
    lhs = compose(f, [a for a, _ in pairs], arity=n) - compose(f, [b for _, b in pairs], arity=n)
    verdict = _finish(lhs, ideal, cert, "hadamard-compatibility", config)
    if verdict is None:
        raise PreconditionUnverified("compatibility certificate failed re-verification")
    return verdict


# -- ideals of finite products ------------------------------------------------


@dataclass(frozen=True)
class ProductIdeal:
    """Ideal of A_1 × ... × A_k given by generator tuples (one map per factor)."""

    arities: tuple
    generators: tuple = field(default=())

    def __post_init__(self):
        gens = []
        for tup in self.generators:
            tup = tuple(tup)
            if len(tup) != len(self.arities) or any(g.arity != a for g, a in zip(tup, self.arities)):
                raise ShapeMismatch("generator tuple does not match the product's factors")
            if all(g.is_zero for g in tup) or tup in gens:
                continue
            gens.append(tup)
        object.__setattr__(self, "arities", tuple(self.arities))
        object.__setattr__(self, "generators", tuple(gens))


def ideal_product_split(k: ProductIdeal) -> tuple:
    """Component ideals p_i[K]: (a, b) ∈ K forces (a, 0) = (a, b)(1, 0) ∈ K."""
    return tuple(
        Ideal(arity, [tup[i] for tup in k.generators]) for i, arity in enumerate(k.arities)
    )


def pair_to_product(*ideals: Ideal) -> ProductIdeal:
    """The product ideal a × b, generated by (a, 0) and (0, b)."""
    arities = tuple(i.arity for i in ideals)
    gens = []
    for pos, ideal in enumerate(ideals):
        for g in ideal.generators:
            gens.append(tuple(g if q == pos else SmoothMap.zero(a) for q, a in enumerate(arities)))
    return ProductIdeal(arities, tuple(gens))


def product_membership(element: Sequence[SmoothMap], k: ProductIdeal, config: MembershipConfig | None = None):
    """Componentwise conjunction of membership verdicts."""
    if len(element) != len(k.arities):
        raise ShapeMismatch("element does not match the product's factors")
    verdicts = [ideal_membership(e, i, config) for e, i in zip(element, ideal_product_split(k))]
    return conjunction(verdicts)


def conjunction(verdicts):
    """ProvenIn if all are, the first refutation if any, else Unknown."""
    verdicts = list(verdicts)
    for idx, v in enumerate(verdicts):
        if isinstance(v, RefutedNumerically):
            return RefutedNumerically(v.witness, v.generator_residual, v.element_value, idx)
    unknown = [idx for idx, v in enumerate(verdicts) if isinstance(v, Unknown)]
    if unknown:
        tried = tuple(sorted({s for i in unknown for s in verdicts[i].strategies_tried}))
        return Unknown(tried, tuple(unknown))
    return ProvenIn(
        tuple(v.certificate for v in verdicts),
        "conjunction",
        any(v.quadrature for v in verdicts),
        any(v.partial for v in verdicts),
        max((v.residual for v in verdicts), default=0.0),
    )
