"""Session documents: named rings, homs, elements, chains, terms and queries.

    document := "(cinf-version 1)"? def*
    def      := "(ring" NAME "(gens" IDENT* ")" "(rels" term* "))"
              | "(hom" NAME SOURCE TARGET "(images" term* "))"
              | "(elem" NAME RING term ")"
              | "(chain" NAME RING (HOM RING)* ")"
              | "(term" NAME? term ")"
              | "(query" OP arg* ")"

Definitions may reference each other in any order.  Printing is canonical:
definitions sorted by kind then name, terms normalized, queries last in
their original order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .constructions import DirectedDiagram
from .errors import CinfError, ParseError, SexprSyntaxError, UnknownSymbol
from .ideals import Ideal
from .rings import FinitelyPresentedRing, Homomorphism, RingElement, make_hom
from .sexpr import IDENT_RE, Atom, SList, node_to_term, node_to_text, read_all
from .terms import SmoothMap, Term, normalize, substitute, to_sexpr, variables

VERSION = 1
KIND_ORDER = ("ring", "hom", "elem", "chain", "term")


@dataclass(frozen=True)
class RingDef:
    name: str
    gens: tuple
    rels: tuple  # normalized relation terms over gens


@dataclass(frozen=True)
class HomDef:
    name: str
    source: str
    target: str
    images: tuple


@dataclass(frozen=True)
class ElemDef:
    name: str
    ring: str
    term: Term


@dataclass(frozen=True)
class ChainDef:
    name: str
    rings: tuple
    homs: tuple


@dataclass(frozen=True)
class TermDef:
    name: str | None
    term: Term


@dataclass
class Session:
    rings: dict = field(default_factory=dict)
    homs: dict = field(default_factory=dict)
    elems: dict = field(default_factory=dict)
    chains: dict = field(default_factory=dict)
    terms: list = field(default_factory=list)
    queries: list = field(default_factory=list)  # SList nodes
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __eq__(self, other):
        if not isinstance(other, Session):
            return NotImplemented
        return (
            self.rings == other.rings
            and self.homs == other.homs
            and self.elems == other.elems
            and self.chains == other.chains
            and self.terms == other.terms
            and [node_to_text(q) for q in self.queries] == [node_to_text(q) for q in other.queries]
        )

    # -- resolved objects --------------------------------------------------

    def ring(self, name: str) -> FinitelyPresentedRing:
        key = ("ring", name)
        if key not in self._cache:
            if name not in self.rings:
                raise UnknownSymbol(f"undefined ring {name!r}")
            d = self.rings[name]
            rels = [SmoothMap.from_term(r, d.gens) for r in d.rels]
            self._cache[key] = FinitelyPresentedRing(d.gens, Ideal(len(d.gens), rels), name)
        return self._cache[key]

    def element_in(self, ring_name: str, term: Term) -> RingElement:
        """Element of a ring; variables naming elems of that ring are expanded."""
        ring = self.ring(ring_name)
        mapping = {
            e.name: e.term
            for e in self.elems.values()
            if e.ring == ring_name and e.name not in ring.generator_names
        }
        if mapping and variables(term) & set(mapping):
            term = substitute(term, mapping)
        return ring.element(term)

    def elem(self, name: str) -> RingElement:
        if name not in self.elems:
            raise UnknownSymbol(f"undefined element {name!r}")
        d = self.elems[name]
        return self.element_in(d.ring, d.term)

    def hom(self, name: str, config=None) -> Homomorphism:
        key = ("hom", name)
        if key not in self._cache:
            if name not in self.homs:
                raise UnknownSymbol(f"undefined hom {name!r}")
            d = self.homs[name]
            source, target = self.ring(d.source), self.ring(d.target)
            images = [target.element(t) for t in d.images]
            self._cache[key] = make_hom(source, target, images, config, name)
        return self._cache[key]

    def chain(self, name: str, config=None) -> DirectedDiagram:
        key = ("chain", name)
        if key not in self._cache:
            if name not in self.chains:
                raise UnknownSymbol(f"undefined chain {name!r}")
            d = self.chains[name]
            self._cache[key] = DirectedDiagram.chain(
                [self.ring(r) for r in d.rings], [self.hom(h, config) for h in d.homs], name
            )
        return self._cache[key]


# -- parsing -----------------------------------------------------------------


def _atom(node, what):
    if not isinstance(node, Atom):
        raise SexprSyntaxError(f"expected {what}", node.line, node.column)
    if not IDENT_RE.match(node.text):
        raise SexprSyntaxError(f"malformed {what} {node.text!r}", node.line, node.column)
    return node.text


def _section(node, head):
    if not (isinstance(node, SList) and node.items and isinstance(node.items[0], Atom)
            and node.items[0].text == head):
        raise SexprSyntaxError(f"expected ({head} ...)", node.line, node.column)
    return node.items[1:]


def _arity(node, n, what):
    if len(node.items) != n:
        raise SexprSyntaxError(f"{what} takes {n - 1} field(s), got {len(node.items) - 1}",
                               node.line, node.column)


def _normal_over(term: Term, names, node) -> Term:
    extra = variables(term) - set(names)
    if extra:
        raise UnknownSymbol(f"unbound variable(s) {sorted(extra)}", node.line, node.column)
    return SmoothMap.from_term(term, names).to_term(names)


def parse_session(text: str) -> Session:
    """Parse a document; errors carry line and column."""
    forms = read_all(text)
    s = Session()
    if forms and isinstance(forms[0], SList) and forms[0].items and \
            isinstance(forms[0].items[0], Atom) and forms[0].items[0].text == "cinf-version":
        header = forms.pop(0)
        _arity(header, 2, "cinf-version")
        v = header.items[1]
        if not (isinstance(v, Atom) and v.text == str(VERSION)):
            raise SexprSyntaxError(f"unsupported version {node_to_text(v)}", v.line, v.column)
    pending = []
    for form in forms:
        if not (isinstance(form, SList) and form.items and isinstance(form.items[0], Atom)):
            raise SexprSyntaxError("expected a definition", form.line, form.column)
        head = form.items[0]
        if head.text not in KIND_ORDER + ("query",):
            raise UnknownSymbol(f"unknown definition head {head.text!r}", head.line, head.column)
        if head.text == "ring":
            _parse_ring(s, form)
        elif head.text == "query":
            if len(form.items) < 2:
                raise SexprSyntaxError("empty query", form.line, form.column)
            s.queries.append(form)
        elif head.text == "term":
            if len(form.items) == 2:
                s.terms.append(TermDef(None, normalize(node_to_term(form.items[1]))))
            else:
                _arity(form, 3, "term")
                name = _atom(form.items[1], "term name")
                if any(t.name == name for t in s.terms):
                    raise SexprSyntaxError(f"term {name!r} defined twice", form.line, form.column)
                s.terms.append(TermDef(name, normalize(node_to_term(form.items[2]))))
        else:
            pending.append(form)
    # Second pass: everything that refers to rings.
    for form in pending:
        head = form.items[0].text
        if head == "hom":
            _parse_hom(s, form)
        elif head == "elem":
            _parse_elem(s, form)
    for form in pending:
        if form.items[0].text == "chain":
            _parse_chain(s, form)
    named = sorted((t for t in s.terms if t.name is not None), key=lambda t: t.name)
    s.terms = named + [t for t in s.terms if t.name is None]
    return s


def _unique(table, name, form, kind):
    if name in table:
        raise SexprSyntaxError(f"{kind} {name!r} defined twice", form.line, form.column)


def _parse_ring(s, form):
    _arity(form, 4, "ring")
    name = _atom(form.items[1], "ring name")
    _unique(s.rings, name, form, "ring")
    gens = tuple(_atom(g, "generator") for g in _section(form.items[2], "gens"))
    if len(set(gens)) != len(gens):
        dup = next(g for g in gens if gens.count(g) > 1)
        raise SexprSyntaxError(f"duplicate generator {dup!r}", form.items[2].line, form.items[2].column)
    rels = []
    for r in _section(form.items[3], "rels"):
        rels.append(SmoothMap.from_term(_normal_over(node_to_term(r), gens, r), gens))
    ideal = Ideal(len(gens), rels)
    s.rings[name] = RingDef(name, gens, tuple(g.to_term(gens) for g in ideal.generators))


def _ring_ref(s, node):
    name = _atom(node, "ring name")
    if name not in s.rings:
        raise UnknownSymbol(f"undefined ring {name!r}", node.line, node.column)
    return name


def _parse_hom(s, form):
    _arity(form, 5, "hom")
    name = _atom(form.items[1], "hom name")
    _unique(s.homs, name, form, "hom")
    source, target = _ring_ref(s, form.items[2]), _ring_ref(s, form.items[3])
    images = _section(form.items[4], "images")
    if len(images) != len(s.rings[source].gens):
        raise SexprSyntaxError(
            f"hom {name!r} needs {len(s.rings[source].gens)} image(s), got {len(images)}",
            form.items[4].line, form.items[4].column,
        )
    names = s.rings[target].gens
    s.homs[name] = HomDef(name, source, target,
                          tuple(_normal_over(node_to_term(i), names, i) for i in images))


def _parse_elem(s, form):
    _arity(form, 4, "elem")
    name = _atom(form.items[1], "element name")
    _unique(s.elems, name, form, "element")
    ring = _ring_ref(s, form.items[2])
    s.elems[name] = ElemDef(name, ring, _normal_over(node_to_term(form.items[3]), s.rings[ring].gens, form.items[3]))


def _parse_chain(s, form):
    if len(form.items) < 3 or len(form.items) % 2 == 0:
        raise SexprSyntaxError("chain is NAME RING (HOM RING)*", form.line, form.column)
    name = _atom(form.items[1], "chain name")
    _unique(s.chains, name, form, "chain")
    rest = form.items[2:]
    rings = tuple(_ring_ref(s, n) for n in rest[0::2])
    homs = []
    for i, node in enumerate(rest[1::2]):
        h = _atom(node, "hom name")
        if h not in s.homs:
            raise UnknownSymbol(f"undefined hom {h!r}", node.line, node.column)
        d = s.homs[h]
        if (d.source, d.target) != (rings[i], rings[i + 1]):
            raise SexprSyntaxError(f"hom {h!r} does not go {rings[i]} -> {rings[i + 1]}",
                                   node.line, node.column)
        homs.append(h)
    s.chains[name] = ChainDef(name, rings, tuple(homs))


# -- printing ----------------------------------------------------------------


def _terms(ts) -> str:
    return " ".join(to_sexpr(t) for t in ts)


def _join(head, *parts) -> str:
    return "(" + " ".join([head] + [p for p in parts if p != ""]) + ")"


def ring_text(name: str, ring: FinitelyPresentedRing) -> str:
    gens = ring.generator_names
    rels = [g.to_term(gens) for g in ring.relations.generators]
    return _join("ring", name, _join("gens", *gens), _join("rels", _terms(rels)))


def print_session(s: Session) -> str:
    lines = [f"(cinf-version {VERSION})"]
    for name in sorted(s.rings):
        d = s.rings[name]
        lines.append(_join("ring", name, _join("gens", *d.gens), _join("rels", _terms(d.rels))))
    for name in sorted(s.homs):
        d = s.homs[name]
        lines.append(_join("hom", name, d.source, d.target, _join("images", _terms(d.images))))
    for name in sorted(s.elems):
        d = s.elems[name]
        lines.append(_join("elem", name, d.ring, to_sexpr(d.term)))
    for name in sorted(s.chains):
        d = s.chains[name]
        parts = [d.rings[0]]
        for h, r in zip(d.homs, d.rings[1:]):
            parts += [h, r]
        lines.append(_join("chain", name, *parts))
    for t in s.terms:
        lines.append(_join("term", t.name or "", to_sexpr(t.term)))
    for q in s.queries:
        lines.append(node_to_text(q))
    return "\n".join(lines) + "\n"


def format_error(exc: CinfError) -> str:
    if isinstance(exc, ParseError):
        return f"error: {exc}"
    return f"error: {type(exc).__name__}: {exc}"

