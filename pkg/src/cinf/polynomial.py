"""Multivariate polynomials over Q and a cofactor-tracking Buchberger algorithm.

Polynomials are dicts ``{exponent tuple: Fraction}``; monomials are compared
in degree-reverse-lexicographic order.  Every Gröbner basis element carries
its expression in the input generators, so an ideal-membership proof comes
with explicit cofactors.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .terms import SmoothMap, from_monomials, monomials, slot

DEFAULT_DEGREE_CAP = 12
DEFAULT_SIZE_CAP = 256


class CapExceeded(Exception):
    """The Buchberger run left its degree or basis-size budget."""


def degrevlex_key(m):
    return (sum(m), tuple(-e for e in reversed(m)))


def lead(p):
    return max(p, key=degrevlex_key)


def poly_from_map(f: SmoothMap) -> dict:
    """Exponent-dict of a polynomial map; raises ValueError otherwise."""
    n = f.arity
    index = {slot(i + 1): i for i in range(n)}
    out = {}
    for mono, c in monomials(f.body).items():
        exps = [0] * n
        for atom, e in mono:
            if atom not in index:
                raise ValueError(f"{f} is not polynomial")
            exps[index[atom]] += e
        out[tuple(exps)] = c
    return out


def map_from_poly(p: dict, n: int) -> SmoothMap:
    mons = {}
    for exps, c in p.items():
        mono = tuple((slot(i + 1), e) for i, e in enumerate(exps) if e)
        mons[mono] = mons.get(mono, 0) + c
    return SmoothMap(n, from_monomials(mons))


def _add_scaled(p: dict, q: dict, c, shift=None):
    """p += c * x^shift * q, in place."""
    for m, v in q.items():
        if shift is not None:
            m = tuple(a + b for a, b in zip(m, shift))
        s = p.get(m, 0) + c * v
        if s:
            p[m] = s
        else:
            p.pop(m, None)


def poly_mul(p: dict, q: dict) -> dict:
    out = {}
    for m, c in p.items():
        _add_scaled(out, q, c, m)
    return out


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def reduce(p: dict, basis: list):
    """Full division of ``p`` by ``basis`` (list of (poly, lm, lc)).

    Returns (quotients, remainder) with p = sum q_k b_k + remainder.
    """
    p = dict(p)
    rem = {}
    quotients = [{} for _ in basis]
    while p:
        m = lead(p)
        c = p[m]
        for k, (g, lm, lc) in enumerate(basis):
            if _divides(lm, m):
                shift = tuple(a - b for a, b in zip(m, lm))
                coef = c / lc
                s = quotients[k].get(shift, 0) + coef
                if s:
                    quotients[k][shift] = s
                else:
                    quotients[k].pop(shift, None)
                _add_scaled(p, g, -coef, shift)
                break
        else:
            rem[m] = c
            del p[m]
    return quotients, rem


class GroebnerBasis:
    """Gröbner basis (degrevlex) of a list of generators with cofactor matrix."""

    def __init__(self, generators, n, degree_cap=DEFAULT_DEGREE_CAP, size_cap=DEFAULT_SIZE_CAP):
        self.n = n
        self.r = len(generators)
        self.elements = []  # (poly, lm, lc)
        self.cofactors = []  # list of r polys per element
        for j, g in enumerate(generators):
            if not g:
                continue
            if max(sum(m) for m in g) > degree_cap:
                raise CapExceeded(f"generator degree exceeds {degree_cap}")
            self._append(dict(g), [({tuple([0] * n): Fraction(1)} if i == j else {}) for i in range(self.r)])
        pairs = {(i, j) for j in range(len(self.elements)) for i in range(j)}
        while pairs:
            i, j = min(pairs, key=lambda ij: (degrevlex_key(_lcm(self.elements[ij[0]][1], self.elements[ij[1]][1])), ij))
            pairs.discard((i, j))
            if self._skip(i, j, pairs):
                continue
            s, scof = self._spoly(i, j)
            if sum(max(self.elements[i][1][v], self.elements[j][1][v]) for v in range(n)) > degree_cap:
                raise CapExceeded(f"S-polynomial degree exceeds {degree_cap}")
            quotients, rem = reduce(s, self.elements)
            if not rem:
                continue
            cof = [dict(c) for c in scof]
            for k, q in enumerate(quotients):
                if q:
                    for jj in range(self.r):
                        _add_scaled(cof[jj], poly_mul(q, self.cofactors[k][jj]), -1)
            if max(sum(m) for m in rem) > degree_cap:
                raise CapExceeded(f"basis degree exceeds {degree_cap}")
            new = len(self.elements)
            self._append(rem, cof)
            if len(self.elements) > size_cap:
                raise CapExceeded(f"basis size exceeds {size_cap}")
            pairs |= {(k, new) for k in range(new)}

    def _append(self, poly, cof):
        lm = lead(poly)
        lc = poly[lm]
        if lc != 1:
            poly = {m: c / lc for m, c in poly.items()}
            cof = [{m: c / lc for m, c in q.items()} for q in cof]
        self.elements.append((poly, lm, Fraction(1)))
        self.cofactors.append(cof)

    def _skip(self, i, j, pending):
        lmi, lmj = self.elements[i][1], self.elements[j][1]
        if all(a == 0 or b == 0 for a, b in zip(lmi, lmj)):
            return True  # coprime leading monomials
        l = _lcm(lmi, lmj)
        for k, (_, lmk, _) in enumerate(self.elements):
            if k in (i, j) or not _divides(lmk, l):
                continue
            if (min(i, k), max(i, k)) not in pending and (min(j, k), max(j, k)) not in pending:
                return True
        return False

    def _spoly(self, i, j):
        gi, lmi, _ = self.elements[i]
        gj, lmj, _ = self.elements[j]
        l = _lcm(lmi, lmj)
        si = tuple(a - b for a, b in zip(l, lmi))
        sj = tuple(a - b for a, b in zip(l, lmj))
        s = {}
        _add_scaled(s, gi, 1, si)
        _add_scaled(s, gj, -1, sj)
        cof = []
        for jj in range(self.r):
            c = {}
            _add_scaled(c, self.cofactors[i][jj], 1, si)
            _add_scaled(c, self.cofactors[j][jj], -1, sj)
            cof.append(c)
        return s, cof

    def polys(self):
        return [g for g, _, _ in self.elements]

    def membership(self, p: dict):
        """Cofactors h with p = sum h_j * generator_j, or None if p is not in the ideal."""
        quotients, rem = reduce(p, self.elements)
        if rem:
            return None
        out = [{} for _ in range(self.r)]
        for k, q in enumerate(quotients):
            if q:
                for jj in range(self.r):
                    _add_scaled(out[jj], poly_mul(q, self.cofactors[k][jj]), 1)
        return out


def _freeze(p):
    return tuple(sorted(p.items()))


@lru_cache(maxsize=256)
def _cached_basis(frozen_gens, n, degree_cap, size_cap):
    try:
        return GroebnerBasis([dict(g) for g in frozen_gens], n, degree_cap, size_cap)
    except CapExceeded as exc:
        return exc


def groebner_basis(generators, n, degree_cap=DEFAULT_DEGREE_CAP, size_cap=DEFAULT_SIZE_CAP):
    """Cached basis of polynomial generators; raises CapExceeded beyond the caps."""
    out = _cached_basis(tuple(_freeze(g) for g in generators), n, degree_cap, size_cap)
    if isinstance(out, CapExceeded):
        raise out
    return out
