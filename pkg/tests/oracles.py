"""Reference computations kept independent of the kernel's own algorithms.

* polynomial-ring ideal membership through sympy's Gröbner bases;
* a brute-force Macaulay-matrix search for bounded-degree cofactors;
* central finite differences for derivatives;
* scipy's QUADPACK for segment integrals.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import sympy
from scipy import integrate as sp_integrate


def _symbols(n):
    return sympy.symbols(f"z1:{n + 2}")[:n] if n else ()


def to_sympy(poly: dict, n: int):
    xs = _symbols(n)
    expr = sympy.Integer(0)
    for exps, c in poly.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for x, e in zip(xs, exps):
            term *= x ** e
        expr += term
    return expr


def sympy_member(element: dict, generators: list, n: int) -> bool:
    """Membership of ``element`` in the ideal of Q[z1..zn] spanned by ``generators``."""
    gens = [g for g in generators if g]
    e = to_sympy(element, n)
    if not gens:
        return sympy.expand(e) == 0
    if n == 0:
        return True  # a nonzero constant generator spans everything
    xs = _symbols(n)
    basis = sympy.groebner([to_sympy(g, n) for g in gens], *xs, order="grevlex")
    return basis.contains(e)


def _monomials_up_to(n, degree):
    for total in range(degree + 1):
        for exps in itertools.product(range(total + 1), repeat=n):
            if sum(exps) == total:
                yield exps


def macaulay_member(element: dict, generators: list, n: int, degree: int):
    """Search cofactors of degree <= ``degree`` by exact linear algebra.

    Returns the list of cofactor dicts or None when no bounded solution exists.
    """
    unknowns = []  # (generator index, cofactor monomial)
    for j, g in enumerate(generators):
        for m in _monomials_up_to(n, degree):
            unknowns.append((j, m))
    rows = {}
    for col, (j, m) in enumerate(unknowns):
        for gm, c in generators[j].items():
            key = tuple(a + b for a, b in zip(gm, m))
            rows.setdefault(key, {})[col] = c
    for key in element:
        rows.setdefault(key, {})
    keys = sorted(rows)
    matrix = [[rows[k].get(col, Fraction(0)) for col in range(len(unknowns))] + [element.get(k, Fraction(0))]
              for k in keys]
    solution = _solve(matrix, len(unknowns))
    if solution is None:
        return None
    out = [{} for _ in generators]
    for (j, m), v in zip(unknowns, solution):
        if v:
            out[j][m] = v
    return out


def _solve(aug, ncols):
    aug = [row[:] for row in aug]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(aug)) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    for i in range(r, len(aug)):
        if aug[i][-1] != 0:
            return None
    sol = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        sol[c] = aug[i][-1]
    return sol


def central_difference(fn, point, i, h=1e-5):
    """Central difference of ``fn`` along coordinate ``i`` (0-based)."""
    p = np.array(point, dtype=float)
    up, down = p.copy(), p.copy()
    up[i] += h
    down[i] -= h
    return (fn(up) - fn(down)) / (2 * h)


def quadpack_segment(derivative_fn, x, y):
    """integral_0^1 derivative_fn(y + t (x - y)) dt with scipy's adaptive quad."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    value, _ = sp_integrate.quad(lambda t: derivative_fn(y + t * (x - y)), 0.0, 1.0,
                                 epsabs=1e-12, epsrel=1e-12, limit=200)
    return value
