"""Terms over the smooth signature, canonical forms and evaluation.

A term is a tree of variables, exact rational constants and applications of
primitive smooth functions.  ``normalize`` sends a term to a canonical
representative: composite applications are substituted away, projections are
plain variable references, and the polynomial skeleton over the remaining
atoms (variables and transcendental applications) is expanded into sorted
monomials with rational coefficients.  Equal normal forms denote the same
smooth function.  The converse fails (``sin^2 + cos^2 - 1`` stays nonzero),
so callers needing semantic zero tests sample numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import ArityMismatch, DomainError

Number = Union[int, Fraction]


class Term:
    """Base class of term nodes.  Arithmetic operators build unnormalized trees."""

    __slots__ = ()

    def __add__(self, other):
        return App("add", (self, as_term(other)))

    def __radd__(self, other):
        return App("add", (as_term(other), self))

    def __mul__(self, other):
        return App("mul", (self, as_term(other)))

    def __rmul__(self, other):
        return App("mul", (as_term(other), self))

    def __neg__(self):
        return App("neg", (self,))

    def __sub__(self, other):
        return App("add", (self, App("neg", (as_term(other),))))

    def __rsub__(self, other):
        return App("add", (as_term(other), App("neg", (self,))))

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers are terms")
        if k == 0:
            return Const(1)
        if k == 1:
            return self
        return App("mul", (self,) * k)

    def __repr__(self):
        return to_sexpr(self)


class Var(Term):
    __slots__ = ("name", "_hash")

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("var", name))

    def __eq__(self, other):
        return isinstance(other, Var) and other.name == self.name

    def __hash__(self):
        return self._hash


class Const(Term):
    __slots__ = ("value", "_hash")

    def __init__(self, value: Number):
        self.value = Fraction(value)
        self._hash = hash(("const", self.value))

    def __eq__(self, other):
        return isinstance(other, Const) and other.value == self.value

    def __hash__(self):
        return self._hash


class App(Term):
    __slots__ = ("op", "args", "_hash")

    def __init__(self, op: str, args):
        args = tuple(args)
        sym = PRIMITIVES.get(op)
        if sym is None:
            raise ValueError(f"unknown primitive {op!r}")
        if not sym.variadic and len(args) != sym.arity:
            raise ArityMismatch(f"{op} takes {sym.arity} argument(s), got {len(args)}")
        self.op = op
        self.args = args
        self._hash = hash((op, args))

    def __eq__(self, other):
        return (
            self is other
            or isinstance(other, App)
            and other._hash == self._hash
            and other.op == self.op
            and other.args == self.args
        )

    def __hash__(self):
        return self._hash


class DefApp(Term):
    """Application of a defined smooth map to argument terms."""

    __slots__ = ("map", "args", "_hash")

    def __init__(self, fmap: "SmoothMap", args):
        args = tuple(args)
        if len(args) != fmap.arity:
            raise ArityMismatch(f"map of arity {fmap.arity} applied to {len(args)} argument(s)")
        self.map = fmap
        self.args = args
        self._hash = hash(("defapp", fmap, args))

    def __eq__(self, other):
        return (
            isinstance(other, DefApp)
            and other._hash == self._hash
            and other.map == self.map
            and other.args == self.args
        )

    def __hash__(self):
        return self._hash


def as_term(x) -> Term:
    if isinstance(x, Term):
        return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return Const(x)
    if isinstance(x, float):
        return Const(Fraction(x))
    raise TypeError(f"cannot make a term from {x!r}")


def slot(i: int) -> Var:
    """Canonical argument slot ``v_i`` (1-based)."""
    return Var(f"v{i}")


# -- primitive signature -----------------------------------------------------


@dataclass(frozen=True)
class PrimitiveSymbol:
    name: str
    arity: int
    token: str
    derivatives: tuple = ()
    domain: str | None = None
    variadic: bool = False

    @property
    def partial(self) -> bool:
        return self.domain is not None


PRIMITIVES: dict[str, PrimitiveSymbol] = {}


def _register(name, arity, token, domain=None, variadic=False):
    PRIMITIVES[name] = PrimitiveSymbol(name, arity, token, (), domain, variadic)


_register("add", 2, "+", variadic=True)
_register("mul", 2, "*", variadic=True)
_register("neg", 1, "neg")
_register("recip", 1, "recip", domain="argument nonzero")
_register("sin", 1, "sin")
_register("cos", 1, "cos")
_register("exp", 1, "exp")
_register("log", 1, "log", domain="argument positive")
_register("atan", 1, "atan")


def _install_derivative_rules():
    v1, v2 = slot(1), slot(2)
    one = Const(1)
    rules = {
        "add": (one, one),
        "mul": (v2, v1),
        "neg": (Const(-1),),
        "recip": (-(App("recip", (v1,)) * App("recip", (v1,))),),
        "sin": (App("cos", (v1,)),),
        "cos": (-App("sin", (v1,)),),
        "exp": (App("exp", (v1,)),),
        "log": (App("recip", (v1,)),),
        "atan": (App("recip", (one + v1 * v1,)),),
    }
    for name, templates in rules.items():
        sym = PRIMITIVES[name]
        PRIMITIVES[name] = PrimitiveSymbol(
            sym.name, sym.arity, sym.token, templates, sym.domain, sym.variadic
        )


_install_derivative_rules()

TOKEN_TO_OP = {sym.token: sym.name for sym in PRIMITIVES.values()}
POLYNOMIAL_OPS = frozenset({"add", "mul", "neg"})
RATIONAL_OPS = frozenset({"add", "mul", "neg", "recip"})
PARTIAL_OPS = frozenset(name for name, sym in PRIMITIVES.items() if sym.partial)


# -- substitution, ordering, support ------------------------------------------


def substitute(t: Term, mapping: Mapping[str, Term]) -> Term:
    """Simultaneously replace variables by terms."""
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, Const):
        return t
    if isinstance(t, App):
        return App(t.op, tuple(substitute(a, mapping) for a in t.args))
    return DefApp(t.map, tuple(substitute(a, mapping) for a in t.args))


@lru_cache(maxsize=1 << 16)
def term_key(t: Term) -> tuple:
    """Total order on terms: node kind, then symbol, then children."""
    if isinstance(t, Const):
        return (0, t.value)
    if isinstance(t, Var):
        return (1, t.name)
    if isinstance(t, App):
        return (2, t.op, tuple(term_key(a) for a in t.args))
    return (3, t.map.arity, term_key(t.map.body), tuple(term_key(a) for a in t.args))


def variables(t: Term) -> frozenset:
    """Syntactic variable occurrences (no normalization)."""
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Const):
        return frozenset()
    out = frozenset()
    for a in t.args:
        out |= variables(a)
    return out


def free_support(t: Term) -> frozenset:
    """Variables occurring in the normal form of ``t``."""
    return variables(normalize(t))


def ops_used(t: Term) -> frozenset:
    if isinstance(t, (Var, Const)):
        return frozenset()
    out = frozenset((t.op,)) if isinstance(t, App) else ops_used(t.map.body)
    for a in t.args:
        out |= ops_used(a)
    return out


def is_polynomial(t: Term) -> bool:
    return ops_used(t) <= POLYNOMIAL_OPS


def is_partial(t: Term) -> bool:
    return bool(ops_used(t) & PARTIAL_OPS)


# -- normalization -----------------------------------------------------------
#
# Internal polynomial form: dict monomial -> nonzero Fraction, where a monomial
# is a tuple of (atom, exponent) pairs sorted by term_key of the atom.  Atoms
# are variables and applications of non-ring primitives to normalized terms.


def _atom_order(pair):
    return term_key(pair[0])


def _mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    merged = dict(a)
    for atom, e in b:
        merged[atom] = merged.get(atom, 0) + e
    return tuple(sorted(merged.items(), key=_atom_order))


def _padd(p, q):
    out = dict(p)
    for m, c in q.items():
        s = out.get(m, 0) + c
        if s:
            out[m] = s
        else:
            out.pop(m, None)
    return out


def _pmul(p, q):
    out = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = _mono_mul(m1, m2)
            s = out.get(m, 0) + c1 * c2
            if s:
                out[m] = s
            else:
                out.pop(m, None)
    return out


def _fold_unary(op: str, c: Fraction):
    """Exact value of a unary primitive at a rational constant, when rational."""
    if op == "neg":
        return -c
    if op == "recip":
        return 1 / c if c != 0 else None
    if c == 0 and op in ("sin", "atan"):
        return Fraction(0)
    if c == 0 and op in ("cos", "exp"):
        return Fraction(1)
    if c == 1 and op == "log":
        return Fraction(0)
    return None


def _to_poly(t: Term) -> dict:
    if isinstance(t, Var):
        return {((t, 1),): Fraction(1)}
    if isinstance(t, Const):
        return {(): t.value} if t.value else {}
    if isinstance(t, DefApp):
        env = {f"v{i + 1}": a for i, a in enumerate(t.args)}
        return _to_poly(substitute(t.map.body, env))
    if t.op == "add":
        out = {}
        for a in t.args:
            out = _padd(out, _to_poly(a))
        return out
    if t.op == "mul":
        out = {(): Fraction(1)}
        for a in t.args:
            out = _pmul(out, _to_poly(a))
            if not out:
                break
        return out
    if t.op == "neg":
        return {m: -c for m, c in _to_poly(t.args[0]).items()}
    arg = normalize(t.args[0])
    if isinstance(arg, Const):
        folded = _fold_unary(t.op, arg.value)
        if folded is not None:
            return {(): folded} if folded else {}
    return {((App(t.op, (arg,)), 1),): Fraction(1)}


def _mono_key(m):
    return (sum(e for _, e in m), tuple((term_key(a), e) for a, e in m))


def _from_poly(p: dict) -> Term:
    if not p:
        return Const(0)
    summands = []
    for m in sorted(p, key=_mono_key):
        c = p[m]
        factors = [atom for atom, e in m for _ in range(e)]
        if not factors:
            summands.append(Const(c))
        elif c == 1 and len(factors) == 1:
            summands.append(factors[0])
        elif c == 1:
            summands.append(App("mul", factors))
        else:
            summands.append(App("mul", [Const(c)] + factors))
    return summands[0] if len(summands) == 1 else App("add", summands)


@lru_cache(maxsize=1 << 15)
def normalize(t: Term) -> Term:
    """Canonical form of ``t``; idempotent and free of ``DefApp`` nodes."""
    return _from_poly(_to_poly(t))


def monomials(t: Term) -> dict:
    """Normal form of ``t`` as ``{((atom, exponent), ...): coefficient}``."""
    return dict(_to_poly(normalize(t)))


def from_monomials(p: Mapping) -> Term:
    return _from_poly({m: Fraction(c) for m, c in p.items() if c})


# -- differentiation ---------------------------------------------------------


def _d(t: Term, x: str) -> Term:
    if isinstance(t, Var):
        return Const(1 if t.name == x else 0)
    if isinstance(t, Const):
        return Const(0)
    if isinstance(t, DefApp):
        return _d(normalize(t), x)
    if x not in variables(t):
        return Const(0)
    if t.op == "add":
        return App("add", [_d(a, x) for a in t.args])
    if t.op == "mul":
        parts = []
        for k, a in enumerate(t.args):
            da = _d(a, x)
            if da == Const(0):
                continue
            parts.append(App("mul", list(t.args[:k]) + list(t.args[k + 1:]) + [da]))
        return App("add", parts) if parts else Const(0)
    sym = PRIMITIVES[t.op]
    env = {f"v{j + 1}": a for j, a in enumerate(t.args)}
    parts = [
        substitute(template, env) * _d(a, x)
        for template, a in zip(sym.derivatives, t.args)
    ]
    return App("add", parts)


def derivative(t: Term, x: str) -> Term:
    """Normalized partial derivative of a term with respect to variable ``x``."""
    return normalize(_d(normalize(t), x))


# -- evaluation --------------------------------------------------------------


def _recip_float(x):
    if x == 0:
        raise DomainError("recip applied to 0")
    return 1.0 / x


def _log_float(x):
    if x <= 0:
        raise DomainError(f"log applied to {x!r}")
    return math.log(x)


def _exp_float(x):
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _recip_exact(x):
    if x == 0:
        raise DomainError("recip applied to 0")
    return 1 / x


_FLOAT_OPS = {
    "add": sum,
    "mul": math.prod,
    "neg": lambda v: -v[0],
    "recip": lambda v: _recip_float(v[0]),
    "sin": lambda v: math.sin(v[0]),
    "cos": lambda v: math.cos(v[0]),
    "exp": lambda v: _exp_float(v[0]),
    "log": lambda v: _log_float(v[0]),
    "atan": lambda v: math.atan(v[0]),
}

_EXACT_OPS = {
    "add": lambda v: sum(v, Fraction(0)),
    "mul": lambda v: math.prod(v, start=Fraction(1)),
    "neg": lambda v: -v[0],
    "recip": lambda v: _recip_exact(v[0]),
}


def _array_recip(x):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x == 0, np.nan, 1.0 / np.where(x == 0, 1.0, x))


def _array_log(x):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x > 0, np.log(np.where(x > 0, x, 1.0)), np.nan)


def _array_exp(x):
    with np.errstate(over="ignore"):
        return np.exp(x)


def _array_add(v):
    out = v[0]
    for a in v[1:]:
        out = out + a
    return out


def _array_mul(v):
    out = v[0]
    with np.errstate(over="ignore", invalid="ignore"):
        for a in v[1:]:
            out = out * a
    return out


_ARRAY_OPS = {
    "add": _array_add,
    "mul": _array_mul,
    "neg": lambda v: -v[0],
    "recip": lambda v: _array_recip(v[0]),
    "sin": lambda v: np.sin(v[0]),
    "cos": lambda v: np.cos(v[0]),
    "exp": lambda v: _array_exp(v[0]),
    "log": lambda v: _array_log(v[0]),
    "atan": lambda v: np.arctan(v[0]),
}


def _walk(t: Term, env, ops, const):
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise ValueError(f"point does not assign variable {t.name!r}") from None
    if isinstance(t, Const):
        return const(t.value)
    if isinstance(t, App):
        return ops[t.op]([_walk(a, env, ops, const) for a in t.args])
    inner = {f"v{i + 1}": _walk(a, env, ops, const) for i, a in enumerate(t.args)}
    return _walk(t.map.body, inner, ops, const)


def evaluate_term(t: Term, env: Mapping[str, float]) -> float:
    """Real value of ``t`` at the point ``env`` (variable name -> real).

    Rational terms are evaluated in exact arithmetic and rounded once, so
    terms denoting the same rational function agree bit-for-bit.
    """
    if ops_used(t) <= RATIONAL_OPS:
        exact_env = {k: Fraction(v) for k, v in env.items()}
        return float(_walk(t, exact_env, _EXACT_OPS, lambda c: c))
    return float(_walk(t, env, _FLOAT_OPS, float))


def evaluate_term_array(t: Term, env: Mapping[str, np.ndarray]) -> np.ndarray:
    """Vectorized evaluation; entries outside a partial primitive's domain are nan."""
    size = None
    for v in env.values():
        size = np.shape(v)
        break
    out = _walk(t, env, _ARRAY_OPS, float)
    return np.broadcast_to(np.asarray(out, dtype=float), size or ()).copy()


# -- smooth maps -------------------------------------------------------------


class SmoothMap:
    """An element of C∞(R^n): an arity and a normalized body over slots v1..vn."""

    __slots__ = ("arity", "body", "_hash")

    def __init__(self, arity: int, body, *, normalized: bool = False):
        body = as_term(body)
        if not normalized:
            body = normalize(body)
        extra = variables(body) - {f"v{i}" for i in range(1, arity + 1)}
        if extra:
            raise ArityMismatch(
                f"body mentions {sorted(extra)} outside slots v1..v{arity}"
            )
        self.arity = arity
        self.body = body
        self._hash = hash(("map", arity, body))

    # constructors
    @classmethod
    def projection(cls, k: int, n: int) -> "SmoothMap":
        if not 1 <= k <= n:
            raise ArityMismatch(f"projection {k} out of range for arity {n}")
        return cls(n, slot(k), normalized=True)

    @classmethod
    def constant(cls, c: Number, n: int) -> "SmoothMap":
        return cls(n, Const(c))

    @classmethod
    def zero(cls, n: int) -> "SmoothMap":
        return cls(n, Const(0), normalized=True)

    @classmethod
    def from_term(cls, t: Term, names: Sequence[str]) -> "SmoothMap":
        """Read ``t`` as a function of the named variables, in order."""
        names = list(names)
        missing = variables(t) - set(names)
        if missing:
            raise ArityMismatch(f"term mentions unbound variable(s) {sorted(missing)}")
        env = {name: slot(i + 1) for i, name in enumerate(names)}
        return cls(len(names), substitute(t, env))

    def to_term(self, names: Sequence[str]) -> Term:
        if len(names) != self.arity:
            raise ArityMismatch(f"need {self.arity} names, got {len(names)}")
        return substitute(self.body, {f"v{i + 1}": Var(n) for i, n in enumerate(names)})

    # predicates
    @property
    def is_zero(self) -> bool:
        return self.body == Const(0)

    @property
    def is_polynomial(self) -> bool:
        return is_polynomial(self.body)

    @property
    def is_partial(self) -> bool:
        return is_partial(self.body)

    def support(self) -> frozenset:
        """1-based slot indices the map actually depends on (syntactically)."""
        return frozenset(int(name[1:]) for name in variables(self.body))

    # algebra
    def _coerce(self, other):
        if isinstance(other, SmoothMap):
            if other.arity != self.arity:
                raise ArityMismatch(f"arity {self.arity} vs {other.arity}")
            return other.body
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Const(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return SmoothMap(self.arity, App("add", (self.body, o)))

    __radd__ = __add__

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return SmoothMap(self.arity, App("mul", (self.body, o)))

    __rmul__ = __mul__

    def __neg__(self):
        return SmoothMap(self.arity, App("neg", (self.body,)))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return SmoothMap(self.arity, self.body - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return SmoothMap(self.arity, o - self.body)

    def __pow__(self, k: int):
        return SmoothMap(self.arity, self.body ** k)

    def __call__(self, *gs: "SmoothMap", arity: int | None = None) -> "SmoothMap":
        return compose(self, gs, arity=arity)

    def partial_derivative(self, i: int) -> "SmoothMap":
        return differentiate(self, i)

    def reindex(self, positions: Sequence[int], arity: int) -> "SmoothMap":
        """Send slot k to slot positions[k-1] of a map of the given arity."""
        return compose(self, [SmoothMap.projection(p, arity) for p in positions], arity=arity)

    def __eq__(self, other):
        return (
            isinstance(other, SmoothMap)
            and other.arity == self.arity
            and other.body == self.body
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"SmoothMap({self.arity}, {to_sexpr(self.body)})"


def slot_map(i: int, n: int) -> SmoothMap:
    return SmoothMap.projection(i, n)


def compose(f: SmoothMap, gs: Sequence[SmoothMap], arity: int | None = None) -> SmoothMap:
    """Substitute the maps ``gs`` (all of arity m) into the slots of ``f``."""
    gs = tuple(gs)
    if len(gs) != f.arity:
        raise ArityMismatch(f"map of arity {f.arity} composed with {len(gs)} map(s)")
    m = arity if arity is not None else (gs[0].arity if gs else 0)
    for g in gs:
        if g.arity != m:
            raise ArityMismatch(f"inner maps must all have arity {m}, got {g.arity}")
    if not gs:
        return SmoothMap(m, f.body, normalized=True)
    return SmoothMap(m, DefApp(f, tuple(g.body for g in gs)))


def differentiate(f: SmoothMap, i: int) -> SmoothMap:
    """Exact partial derivative of ``f`` with respect to slot ``i`` (1-based)."""
    if not 1 <= i <= f.arity:
        raise ArityMismatch(f"slot {i} out of range for arity {f.arity}")
    return SmoothMap(f.arity, derivative(f.body, f"v{i}"), normalized=True)


def _point_env(f: SmoothMap, point) -> dict:
    if isinstance(point, Mapping):
        return dict(point)
    values = list(point)
    if len(values) != f.arity:
        raise ArityMismatch(f"point has {len(values)} coordinate(s), map has arity {f.arity}")
    return {f"v{i + 1}": v for i, v in enumerate(values)}


def evaluate(f: SmoothMap, point) -> float:
    """Value of ``f`` at a point given as a coordinate sequence or slot mapping.

    Raises DomainError when a partial primitive is hit outside its domain.
    """
    return evaluate_term(f.body, _point_env(f, point))


def evaluate_exact(f: SmoothMap, point) -> Fraction | None:
    """Exact rational value at a point with float or rational coordinates.

    Returns None when ``f`` uses a transcendental primitive.
    """
    if not ops_used(f.body) <= RATIONAL_OPS:
        return None
    env = {k: Fraction(v) for k, v in _point_env(f, point).items()}
    return _walk(f.body, env, _EXACT_OPS, lambda c: c)


def evaluate_many(f: SmoothMap, points) -> np.ndarray:
    """Evaluate at each row of a ``(k, arity)`` array; nan marks undefined points."""
    pts = np.asarray(points, dtype=float).reshape(-1, f.arity) if f.arity else np.zeros((len(points), 0))
    env = {f"v{i + 1}": pts[:, i] for i in range(f.arity)}
    if not env:
        value = evaluate_term_array(f.body, {"_": np.zeros(len(pts))})
        return np.broadcast_to(value, (len(pts),)).copy()
    return evaluate_term_array(f.body, env)


# -- printing ----------------------------------------------------------------


def format_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def to_sexpr(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return format_rational(t.value)
    if isinstance(t, App):
        head = PRIMITIVES[t.op].token
        return "(" + " ".join([head] + [to_sexpr(a) for a in t.args]) + ")"
    env = {f"v{i + 1}": a for i, a in enumerate(t.args)}
    return to_sexpr(substitute(t.map.body, env))
