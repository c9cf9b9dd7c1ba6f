"""Hadamard decompositions f(x) - f(y) = sum_i (x_i - y_i) g_i(x, y).

The cofactors are always the segment integrals

    g_i(x, y) = integral over t in [0, 1] of (d f / d v_i)(y + t (x - y)),

so exact and numeric results describe the same functions.  When the
integrand is polynomial in t the integral is taken symbolically; otherwise
the cofactor is kept as a :class:`SegmentIntegral` and evaluated by
adaptive quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from . import quadrature
from .errors import ArityMismatch, DomainError, NotPolynomial
from .terms import (
    SmoothMap,
    compose,
    differentiate,
    evaluate,
    evaluate_exact,
    evaluate_many,
    from_monomials,
    monomials,
    slot,
    variables,
)


def lift(g: SmoothMap, arity: int) -> SmoothMap:
    """View ``g`` as a map of larger arity ignoring the extra trailing slots."""
    if arity == g.arity:
        return g
    return SmoothMap(arity, g.body, normalized=True)


class SegmentIntegral:
    """Cofactor ``x -> integral_0^1 integrand(x, t) dt`` with t the last slot."""

    __slots__ = ("integrand", "abs_tol")

    def __init__(self, integrand: SmoothMap, abs_tol: float = quadrature.DEFAULT_ABS_TOL):
        if integrand.arity < 1:
            raise ArityMismatch("segment integrand needs a parameter slot")
        self.integrand = integrand
        self.abs_tol = abs_tol

    @property
    def arity(self) -> int:
        return self.integrand.arity - 1

    @property
    def is_partial(self) -> bool:
        return self.integrand.is_partial

    def evaluate(self, point) -> float:
        x = np.asarray(list(point), dtype=float)
        if x.size != self.arity:
            raise ArityMismatch(f"point has {x.size} coordinates, cofactor arity {self.arity}")

        def fn(t):
            pts = np.empty((t.size, self.arity + 1))
            pts[:, :-1] = x
            pts[:, -1] = t
            return evaluate_many(self.integrand, pts)

        value, _ = quadrature.integrate(fn, 0.0, 1.0, abs_tol=self.abs_tol)
        return value

    def compose(self, gs: Sequence[SmoothMap], arity: int) -> "SegmentIntegral":
        lifted = [lift(g, arity + 1) for g in gs] + [SmoothMap.projection(arity + 1, arity + 1)]
        return SegmentIntegral(compose(self.integrand, lifted, arity=arity + 1), self.abs_tol)

    def _lift_other(self, other):
        if isinstance(other, SmoothMap):
            if other.arity != self.arity:
                raise ArityMismatch(f"arity {self.arity} vs {other.arity}")
            return lift(other, self.arity + 1)
        if isinstance(other, (int, Fraction)):
            return other
        return None

    def __add__(self, other):
        if isinstance(other, SegmentIntegral):
            return SegmentIntegral(self.integrand + other.integrand, self.abs_tol)
        o = self._lift_other(other)
        if o is None:
            return NotImplemented
        return SegmentIntegral(self.integrand + o, self.abs_tol)

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, SegmentIntegral):
            return CofactorProduct((self, other))
        o = self._lift_other(other)
        if o is None:
            return NotImplemented
        return SegmentIntegral(self.integrand * o, self.abs_tol)

    __rmul__ = __mul__

    def __neg__(self):
        return SegmentIntegral(-self.integrand, self.abs_tol)

    def __repr__(self):
        return f"SegmentIntegral({self.integrand!r})"


class CofactorProduct:
    """Product of cofactors that cannot be merged into one segment integral."""

    __slots__ = ("factors",)

    def __init__(self, factors):
        self.factors = tuple(factors)

    @property
    def arity(self) -> int:
        return self.factors[0].arity

    @property
    def is_partial(self) -> bool:
        return any(f.is_partial for f in self.factors)

    def evaluate(self, point) -> float:
        out = 1.0
        for f in self.factors:
            out *= evaluate_cofactor(f, point)
        return out

    def compose(self, gs, arity):
        return CofactorProduct(compose_cofactor(f, gs, arity) for f in self.factors)

    def __add__(self, other):
        return CofactorSum((self, other))

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, CofactorProduct):
            return CofactorProduct(self.factors + other.factors)
        return CofactorProduct(self.factors + (other,))

    __rmul__ = __mul__

    def __neg__(self):
        return CofactorProduct(self.factors + (-1 * _one_like(self.factors[0]),))

    def __repr__(self):
        return "CofactorProduct(" + ", ".join(map(repr, self.factors)) + ")"


class CofactorSum:
    __slots__ = ("terms",)

    def __init__(self, terms):
        flat = []
        for t in terms:
            flat.extend(t.terms if isinstance(t, CofactorSum) else (t,))
        self.terms = tuple(flat)

    @property
    def arity(self) -> int:
        return self.terms[0].arity

    @property
    def is_partial(self) -> bool:
        return any(getattr(t, "is_partial", False) for t in self.terms)

    def evaluate(self, point) -> float:
        return sum(evaluate_cofactor(t, point) for t in self.terms)

    def compose(self, gs, arity):
        return CofactorSum(compose_cofactor(t, gs, arity) for t in self.terms)

    def __add__(self, other):
        return CofactorSum((self, other))

    __radd__ = __add__

    def __mul__(self, other):
        return CofactorSum(t * other for t in self.terms)

    __rmul__ = __mul__

    def __neg__(self):
        return CofactorSum(-t for t in self.terms)

    def __repr__(self):
        return "CofactorSum(" + ", ".join(map(repr, self.terms)) + ")"


def _one_like(c):
    return SmoothMap.constant(1, c.arity)


Cofactor = Union[SmoothMap, SegmentIntegral, CofactorProduct, CofactorSum]


def is_exact(c) -> bool:
    return isinstance(c, SmoothMap)


def evaluate_cofactor(c, point) -> float:
    if isinstance(c, SmoothMap):
        return evaluate(c, list(point))
    return c.evaluate(point)


def compose_cofactor(c, gs: Sequence[SmoothMap], arity: int):
    if isinstance(c, SmoothMap):
        return compose(c, gs, arity=arity)
    return c.compose(gs, arity)


def cofactor_text(c, names=None) -> str:
    from .terms import to_sexpr

    if isinstance(c, SmoothMap):
        body = c.to_term(names) if names is not None else c.body
        return to_sexpr(body)
    if isinstance(c, SegmentIntegral):
        inner = c.integrand.to_term(list(names) + ["t"]) if names is not None else c.integrand.body
        return f"(integral t 0 1 {to_sexpr(inner)})"
    if isinstance(c, CofactorProduct):
        return "(* " + " ".join(cofactor_text(f, names) for f in c.factors) + ")"
    return "(+ " + " ".join(cofactor_text(t, names) for t in c.terms) + ")"


# -- segment integrals -------------------------------------------------------


def integrate_parameter(integrand: SmoothMap):
    """Integrate the last slot over [0, 1]: exact map when polynomial in it."""
    n = integrand.arity - 1
    tname = f"v{n + 1}"
    out = {}
    for mono, coef in monomials(integrand.body).items():
        k = 0
        rest = []
        for atom, e in mono:
            if atom == slot(n + 1):
                k = e
            elif tname in variables(atom):
                return SegmentIntegral(integrand)
            else:
                rest.append((atom, e))
        key = tuple(rest)
        out[key] = out.get(key, 0) + coef / (k + 1)
    return SmoothMap(n, from_monomials(out), normalized=True)


def segment_integrands(f: SmoothMap) -> list:
    """Integrands (d f/d v_i)(y + t(x - y)) as maps of arity 2n + 1 over (x, y, t)."""
    n = f.arity
    m = 2 * n + 1
    t = slot(m)
    path = [
        SmoothMap(m, slot(n + k) + t * (slot(k) - slot(n + k))) for k in range(1, n + 1)
    ]
    return [compose(differentiate(f, i), path, arity=m) for i in range(1, n + 1)]


def hadamard_cofactors(f: SmoothMap) -> list:
    return [integrate_parameter(ig) for ig in segment_integrands(f)]


# -- decompositions ----------------------------------------------------------


@dataclass
class HadamardDecomposition:
    f: SmoothMap
    cofactors: tuple
    mode: str  # "exact" | "quadrature"
    max_verified_residual: float | None = field(default=None)

    @property
    def n(self) -> int:
        return self.f.arity


def _split_xy(f: SmoothMap):
    n = f.arity
    fx = f.reindex(range(1, n + 1), 2 * n)
    fy = f.reindex(range(n + 1, 2 * n + 1), 2 * n)
    return fx, fy


def symbolic_residual(f: SmoothMap, cofactors: Sequence[SmoothMap]) -> SmoothMap:
    """The map f(x) - f(y) - sum (x_i - y_i) g_i(x, y), normalized."""
    n = f.arity
    fx, fy = _split_xy(f)
    total = fx - fy
    for i, g in enumerate(cofactors, start=1):
        total = total - SmoothMap(2 * n, (slot(i) - slot(n + i)) * g.body)
    return total


def hadamard_exact(f: SmoothMap) -> HadamardDecomposition:
    """Closed-form cofactors of a polynomial map; raises NotPolynomial otherwise."""
    if not f.is_polynomial:
        raise NotPolynomial("exact Hadamard cofactors need a polynomial map")
    cofactors = tuple(hadamard_cofactors(f))
    residual = symbolic_residual(f, cofactors)
    assert residual.is_zero, f"Hadamard identity failed symbolically: {residual}"
    return HadamardDecomposition(f, cofactors, "exact")


def hadamard_decompose(f: SmoothMap) -> HadamardDecomposition:
    """Exact decomposition when every cofactor closes symbolically, else quadrature."""
    cofactors = tuple(hadamard_cofactors(f))
    if all(is_exact(c) for c in cofactors) and symbolic_residual(f, cofactors).is_zero:
        return HadamardDecomposition(f, cofactors, "exact")
    return HadamardDecomposition(f, cofactors, "quadrature")


def hadamard_quadrature(f: SmoothMap, x, y, abs_tol: float = quadrature.DEFAULT_ABS_TOL,
                        max_subdivisions: int = quadrature.DEFAULT_BUDGET) -> np.ndarray:
    """Numeric cofactors (g_1(x, y), ..., g_n(x, y)) by adaptive Gauss-Kronrod."""
    x = np.asarray(list(x), dtype=float)
    y = np.asarray(list(y), dtype=float)
    if x.size != f.arity or y.size != f.arity:
        raise ArityMismatch(f"points must have {f.arity} coordinates")
    out = np.zeros(f.arity)
    for i in range(f.arity):
        df = differentiate(f, i + 1)
        if df.is_zero:
            continue

        def fn(t, df=df):
            return evaluate_many(df, y[None, :] + t[:, None] * (x - y)[None, :])

        out[i], _ = quadrature.integrate(fn, 0.0, 1.0, abs_tol, max_subdivisions)
    return out


def _exact_residual(d: HadamardDecomposition, x, y):
    fx = evaluate_exact(d.f, x)
    fy = evaluate_exact(d.f, y)
    if fx is None or fy is None:
        return None
    total = fx - fy
    xy = list(x) + list(y)
    for i, g in enumerate(d.cofactors):
        gv = evaluate_exact(g, xy) if is_exact(g) else None
        if gv is None:
            return None
        total -= (Fraction(x[i]) - Fraction(y[i])) * gv
    return abs(float(total))


def verify_decomposition(d: HadamardDecomposition, samples: int = 100, box: float = 2.0,
                         seed: int = 0, max_rejections: int | None = None) -> float:
    """Largest identity residual over random pairs (x, y) in [-box, box]^2n.

    Pairs whose evaluation leaves a partial primitive's domain are redrawn.
    If the rejection budget runs out before any pair is accepted the result
    is nan; the value is also stored on ``d.max_verified_residual``.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rng = np.random.default_rng(seed)
    n = d.n
    budget = max_rejections if max_rejections is not None else 10 * samples
    worst, accepted, rejected = 0.0, 0, 0
    while accepted < samples and rejected <= budget:
        x = rng.uniform(-box, box, n)
        y = rng.uniform(-box, box, n)
        try:
            r = _exact_residual(d, x, y) if d.mode == "exact" else None
            if r is None:
                lhs = evaluate(d.f, x) - evaluate(d.f, y)
                xy = np.concatenate([x, y])
                rhs = sum((x[i] - y[i]) * evaluate_cofactor(g, xy) for i, g in enumerate(d.cofactors))
                r = abs(lhs - rhs)
        except DomainError:
            rejected += 1
            continue
        if not np.isfinite(r):
            rejected += 1
            continue
        worst = max(worst, r)
        accepted += 1
    result = worst if accepted else float("nan")
    d.max_verified_residual = result
    return result
