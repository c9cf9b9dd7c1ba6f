"""Command-line front end.

Every subcommand is translated into a query form, so ``cinf member ...``
and ``(query member ...)`` inside a session file share one code path.
Exit codes: 0 decisive success, 2 Unknown verdict, 1 refutation or error.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from fractions import Fraction

from . import constructions as C
from . import rings as R
from .errors import CinfError, SexprSyntaxError, UnknownSymbol
from .hadamard import cofactor_text, hadamard_decompose, hadamard_exact, hadamard_quadrature
from .ideals import Ideal, MembershipConfig, ProvenIn, RefutedNumerically, congruence_from_pairs, ideal_membership
from .session import Session, format_error, parse_session, print_session, ring_text
from .sexpr import Atom, SList, node_to_term, node_to_text, read_one
from .terms import SmoothMap, derivative, evaluate_term, normalize, to_sexpr, variables

OK, REFUTED, UNKNOWN = 0, 1, 2
_SLOT_RE = re.compile(r"v([1-9][0-9]*)\Z")


def fmt(x) -> str:
    s = f"{float(x):.12g}"
    return "0" if s == "-0" else s


def _worst(codes) -> int:
    codes = list(codes)
    if REFUTED in codes:
        return REFUTED
    if UNKNOWN in codes:
        return UNKNOWN
    return OK


def verdict_lines(v, names) -> tuple:
    """Report lines and exit code for a membership verdict."""
    if isinstance(v, ProvenIn):
        if v.strategy == "conjunction":
            line = f"ProvenIn on {len(v.certificate)} check(s)"
        else:
            line = "ProvenIn cofactors: (" + " ".join(cofactor_text(h, names) for h in v.certificate) + ")"
        flags = [f for f, on in (("quadrature", v.quadrature), ("partial", v.partial)) if on]
        if flags:
            line += " [" + " ".join(flags) + "]"
        return [line], OK
    if isinstance(v, RefutedNumerically):
        at = " ".join(f"{n}={fmt(x)}" for n, x in zip(names, v.witness))
        line = f"RefutedNumerically at {at}".rstrip()
        if v.at is not None:
            line += f" (check {v.at})"
        detail = f"  generator residual {fmt(v.generator_residual)}, element value {fmt(v.element_value)}"
        return [line, detail], REFUTED
    line = "Unknown tried: " + " ".join(v.strategies_tried)
    if v.at:
        line += " (checks " + " ".join(str(i) for i in v.at) + ")"
    return [line], UNKNOWN


# -- query execution ---------------------------------------------------------


def _name(node):
    if not isinstance(node, Atom):
        raise SexprSyntaxError("expected a name", node.line, node.column)
    return node.text


def _items(node, head):
    if not (isinstance(node, SList) and node.items and isinstance(node.items[0], Atom)
            and node.items[0].text == head):
        raise SexprSyntaxError(f"expected ({head} ...)", node.line, node.column)
    return node.items[1:]


def _need(args, n, node, usage):
    if len(args) < n:
        raise SexprSyntaxError(f"usage: {usage}", node.line, node.column)


def _slot_order(term):
    """Variable order for a bare term: v1..vn if slot names, else sorted names."""
    names = sorted(variables(term))
    if names and all(_SLOT_RE.match(n) for n in names):
        n = max(int(_SLOT_RE.match(x).group(1)) for x in names)
        return [f"v{i}" for i in range(1, n + 1)]
    return names


def _point(node, count):
    values = [Fraction(_name(a)) for a in node]
    if len(values) != count:
        raise SexprSyntaxError(f"expected {count} coordinate(s)", 1, 1)
    return values


def q_normalize(s, args, node, config):
    _need(args, 1, node, "normalize TERM")
    return [to_sexpr(normalize(node_to_term(args[0])))], OK


def q_eval(s, args, node, config):
    _need(args, 1, node, "eval TERM (NAME VALUE)*")
    env = {}
    for b in args[1:]:
        if not (isinstance(b, SList) and len(b.items) == 2):
            raise SexprSyntaxError("binding must be (NAME VALUE)", b.line, b.column)
        env[_name(b.items[0])] = float(Fraction(_name(b.items[1])))
    t = normalize(node_to_term(args[0]))
    missing = variables(t) - set(env)
    if missing:
        raise SexprSyntaxError(f"no value for {sorted(missing)}", node.line, node.column)
    return [fmt(evaluate_term(t, env))], OK


def q_diff(s, args, node, config):
    _need(args, 2, node, "diff TERM VAR")
    return [to_sexpr(derivative(node_to_term(args[0]), _name(args[1])))], OK


def q_hadamard(s, args, node, config):
    _need(args, 2, node, "hadamard exact|quad TERM [(x ...) (y ...)]")
    mode = _name(args[0])
    term = node_to_term(args[1])
    order = _slot_order(term)
    f = SmoothMap.from_term(term, order)
    n = f.arity
    names = [f"x{i}" for i in range(1, n + 1)] + [f"y{i}" for i in range(1, n + 1)]
    lines = [] if all(_SLOT_RE.match(v) for v in order) else ["order: " + " ".join(order)]
    if mode == "exact":
        d = hadamard_exact(f)
        lines += [f"g{i} = {cofactor_text(g, names)}" for i, g in enumerate(d.cofactors, start=1)]
        return lines, OK
    if mode == "symbolic":
        d = hadamard_decompose(f)
        lines += [f"g{i} = {cofactor_text(g, names)}" for i, g in enumerate(d.cofactors, start=1)]
        return lines, OK
    if mode == "quad":
        _need(args, 4, node, "hadamard quad TERM (x ...) (y ...)")
        x = _point(_items(args[2], "x"), n)
        y = _point(_items(args[3], "y"), n)
        g = hadamard_quadrature(f, [float(v) for v in x], [float(v) for v in y])
        lines += [f"g{i} = {fmt(v)}" for i, v in enumerate(g, start=1)]
        return lines, OK
    raise SexprSyntaxError(f"unknown hadamard mode {mode!r}", args[0].line, args[0].column)


def q_member(s, args, node, config):
    _need(args, 2, node, "member RING TERM")
    ring = s.ring(_name(args[0]))
    e = s.element_in(ring.name, node_to_term(args[1]))
    return verdict_lines(ideal_membership(e.representative, ring.relations, config), ring.generator_names)


def q_equal(s, args, node, config):
    _need(args, 3, node, "equal RING TERM TERM")
    name = _name(args[0])
    a = s.element_in(name, node_to_term(args[1]))
    b = s.element_in(name, node_to_term(args[2]))
    return verdict_lines(R.elements_equal(a, b, config), a.ring.generator_names)


def _status_code(status):
    return {"verified": OK, "refuted": REFUTED}.get(status.kind, UNKNOWN)


def q_hom_check(s, args, node, config):
    _need(args, 1, node, "hom-check HOM")
    h = s.hom(_name(args[0]), config)
    lines = [str(h.status)]
    for i, v in enumerate(h.status.verdicts):
        vl, _ = verdict_lines(v, h.target.generator_names)
        lines += [f"  relation {i}: {vl[0]}"] + [f"  {x}" for x in vl[1:]]
    return lines, _status_code(h.status)


def q_kernel(s, args, node, config):
    _need(args, 2, node, "kernel HOM TERM")
    h = s.hom(_name(args[0]), config)
    a = s.element_in(h.source.name, node_to_term(args[1]))
    return verdict_lines(R.kernel_contains(h, a, config), h.target.generator_names)


def q_quotient(s, args, node, config):
    _need(args, 2, node, "quotient RING (ideal TERM*) [NAME]")
    ring = s.ring(_name(args[0]))
    gens = [s.element_in(ring.name, node_to_term(t)).representative for t in _items(args[1], "ideal")]
    name = _name(args[2]) if len(args) > 2 else f"{ring.name}_q"
    target, _ = R.quotient(ring, Ideal(ring.arity, gens), name)
    return [ring_text(name, target)], OK


def q_coprod(s, args, node, config):
    _need(args, 2, node, "coprod RING RING [NAME]")
    a, b = s.ring(_name(args[0])), s.ring(_name(args[1]))
    name = _name(args[2]) if len(args) > 2 else f"{a.name}_{b.name}"
    ring, _, _ = C.coproduct(a, b, name)
    return [ring_text(name, ring)], OK


def q_adjoin(s, args, node, config):
    _need(args, 2, node, "adjoin RING (names IDENT*) [NAME]")
    a = s.ring(_name(args[0]))
    names = [_name(x) for x in _items(args[1], "names")]
    name = _name(args[2]) if len(args) > 2 else f"{a.name}_adj"
    ring, xs = C.polynomial_adjunction(a, names, name)
    return [ring_text(name, ring), ("adjoined: " + " ".join(to_sexpr(ring.term(x)) for x in xs)).rstrip()], OK


def q_ftt(s, args, node, config):
    _need(args, 2, node, "ftt HOM (pairs (TERM TERM)*) [NAME]")
    h = s.hom(_name(args[0]), config)
    pairs = []
    for p in _items(args[1], "pairs"):
        if not (isinstance(p, SList) and len(p.items) == 2):
            raise SexprSyntaxError("pair must be (TERM TERM)", p.line, p.column)
        a, b = (s.element_in(h.source.name, node_to_term(t)).representative for t in p.items)
        pairs.append((a, b))
    name = _name(args[2]) if len(args) > 2 else f"{h.source.name}_R"
    factor = R.ftt_factor(h, congruence_from_pairs(pairs, h.source.arity), config, name)
    return [f"factor status: {factor.status}", ring_text(name, factor.source)], _status_code(factor.status)


def q_colimit_eq(s, args, node, config):
    _need(args, 5, node, "colimit-eq CHAIN STAGE TERM STAGE TERM")
    d = s.chain(_name(args[0]), config)

    def element(stage_node, term_node):
        stage = int(_name(stage_node))
        if stage not in d.objects:
            raise SexprSyntaxError(f"no stage {stage}", stage_node.line, stage_node.column)
        return C.ColimitElement(stage, s.element_in(d.objects[stage].name, node_to_term(term_node)))

    u, w = element(args[1], args[2]), element(args[3], args[4])
    gamma = d.bound(u.stage, w.stage)
    lines, code = verdict_lines(C.colimit_equal(d, u, w, config), d.objects[gamma].generator_names)
    return [f"stage {gamma}: {lines[0]}"] + lines[1:], code


def q_limit_check(s, args, node, config):
    _need(args, 3, node, "limit-check (objects RING*) (arrows (HOM I J)*) (candidate TERM*)")
    objects = [s.ring(_name(x)) for x in _items(args[0], "objects")]
    arrows = []
    for a in _items(args[1], "arrows"):
        if not (isinstance(a, SList) and len(a.items) == 3):
            raise SexprSyntaxError("arrow must be (HOM I J)", a.line, a.column)
        arrows.append((int(_name(a.items[1])), int(_name(a.items[2])), s.hom(_name(a.items[0]), config)))
    terms = _items(args[2], "candidate")
    candidate = [s.element_in(r.name, node_to_term(t)) for r, t in zip(objects, terms)]
    if len(terms) != len(objects):
        raise SexprSyntaxError("one candidate term per object", args[2].line, args[2].column)
    v = C.finite_limit_membership(objects, arrows, candidate, config)
    names = ()
    if isinstance(v, RefutedNumerically):
        names = objects[arrows[v.at][1]].generator_names
    return verdict_lines(v, names)


QUERIES = {
    "normalize": q_normalize,
    "eval": q_eval,
    "diff": q_diff,
    "hadamard": q_hadamard,
    "member": q_member,
    "equal": q_equal,
    "hom-check": q_hom_check,
    "kernel": q_kernel,
    "quotient": q_quotient,
    "coprod": q_coprod,
    "adjoin": q_adjoin,
    "ftt": q_ftt,
    "colimit-eq": q_colimit_eq,
    "limit-check": q_limit_check,
}


def execute(s: Session, query: SList, config: MembershipConfig) -> tuple:
    """Run one (query OP ...) form: (report lines, exit code)."""
    op_node = query.items[1]
    op = _name(op_node)
    if op not in QUERIES:
        raise UnknownSymbol(f"unknown query {op!r}", op_node.line, op_node.column)
    return QUERIES[op](s, list(query.items[2:]), query, config)


def run_session(s: Session, config: MembershipConfig) -> tuple:
    lines, codes = [], []
    for q in s.queries:
        lines.append("> " + node_to_text(SList(q.items[1:])))
        try:
            out, code = execute(s, q, config)
        except (CinfError, ValueError, ArithmeticError) as exc:
            out, code = [_error_text(exc)], REFUTED
        lines += out
        codes.append(code)
    return lines, _worst(codes)


def _error_text(exc) -> str:
    if isinstance(exc, CinfError):
        return format_error(exc)
    return f"error: {type(exc).__name__}: {exc}"


# -- argument handling -------------------------------------------------------


def _default_seed() -> int:
    try:
        return int(os.environ.get("CINF_SEED", "0"))
    except ValueError:
        return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cinf", description="Symbolic kernel for finitely presented C-infinity rings.")
    p.add_argument("--seed", type=int, default=None, help="seed for sampling and refutation search (default: CINF_SEED or 0)")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("normalize", help="normal form of a term")
    sp.add_argument("term")

    sp = sub.add_parser("eval", help="evaluate a term at a point")
    sp.add_argument("term")
    sp.add_argument("--at", action="append", default=[], metavar="NAME=VALUE")

    sp = sub.add_parser("diff", help="partial derivative of a term")
    sp.add_argument("term")
    sp.add_argument("--var", required=True)

    sp = sub.add_parser("hadamard", help="Hadamard cofactors (exact or by quadrature)")
    mode = sp.add_mutually_exclusive_group(required=True)
    mode.add_argument("--exact", metavar="TERM")
    mode.add_argument("--quad", metavar="TERM")
    sp.add_argument("--x", help="comma-separated point x")
    sp.add_argument("--y", help="comma-separated point y")

    sp = sub.add_parser("member", help="ideal membership verdict")
    sp.add_argument("file", nargs="?")
    sp.add_argument("ring", nargs="?")
    sp.add_argument("term", nargs="?")
    sp.add_argument("--ideal", help="generator list such as \"(x (* y y))\"")
    sp.add_argument("--elem")
    sp.add_argument("--vars", help="comma-separated variable order")

    sp = sub.add_parser("quotient", help="quotient of a session ring by an ideal")
    sp.add_argument("file")
    sp.add_argument("ring")
    sp.add_argument("--ideal", required=True)
    sp.add_argument("--name")

    sp = sub.add_parser("coprod", help="coproduct of two session rings")
    sp.add_argument("file")
    sp.add_argument("left")
    sp.add_argument("right")
    sp.add_argument("--name")

    sp = sub.add_parser("adjoin", help="adjoin free variables to a session ring")
    sp.add_argument("file")
    sp.add_argument("ring")
    sp.add_argument("--names", required=True, help="comma-separated names")
    sp.add_argument("--name")

    sp = sub.add_parser("hom-check", help="check that a hom preserves the relations")
    sp.add_argument("file")
    sp.add_argument("hom")

    sp = sub.add_parser("ftt", help="factor a hom through a quotient by a congruence")
    sp.add_argument("file")
    sp.add_argument("hom")
    sp.add_argument("--pairs", required=True, help="pair list such as \"((x 0) ((* y y) y))\"")
    sp.add_argument("--name")

    sp = sub.add_parser("colimit-eq", help="equality of two elements of a chain's colimit")
    sp.add_argument("file")
    sp.add_argument("chain")
    sp.add_argument("stage1")
    sp.add_argument("term1")
    sp.add_argument("stage2")
    sp.add_argument("term2")

    sp = sub.add_parser("limit-check", help="compatibility of a tuple with a finite diagram")
    sp.add_argument("file")
    sp.add_argument("--objects", required=True, help="comma-separated ring names")
    sp.add_argument("--arrow", action="append", default=[], metavar="HOM:I:J")
    sp.add_argument("--candidate", action="append", default=[], metavar="TERM")

    sp = sub.add_parser("verify", help="run the randomized property suites")
    sp.add_argument("--scale", type=float, default=1.0, help="multiply suite sizes")

    sp = sub.add_parser("run", help="run the queries of session files")
    sp.add_argument("files", nargs="+")

    sp = sub.add_parser("print", help="print a session file canonically")
    sp.add_argument("file")
    return p


def _load(path) -> Session:
    with open(path, encoding="utf-8") as fh:
        return parse_session(fh.read())


def _query(text: str) -> SList:
    return read_one(text)


def _csv(text):
    return [x.strip() for x in text.split(",") if x.strip()]


def _inline_member(args):
    """Session with a throwaway ring whose relations are the given ideal."""
    gens = read_one(args.ideal)
    if not isinstance(gens, SList):
        gens = SList((gens,))
    elem = read_one(args.elem)
    names = set(variables(node_to_term(elem)))
    for g in gens.items:
        names |= variables(node_to_term(g))
    order = _csv(args.vars) if args.vars else sorted(names)
    doc = "(ring _ (gens {}) (rels {}))".format(" ".join(order), " ".join(node_to_text(g) for g in gens.items))
    return parse_session(doc), f"(query member _ {node_to_text(elem)})"


def _dispatch(args, config):
    c = args.command
    if c == "normalize":
        return Session(), f"(query normalize {args.term})"
    if c == "eval":
        binds = []
        for b in args.at:
            name, _, value = b.partition("=")
            binds.append(f"({name.strip()} {value.strip()})")
        return Session(), f"(query eval {args.term} {' '.join(binds)})"
    if c == "diff":
        return Session(), f"(query diff {args.term} {args.var})"
    if c == "hadamard":
        if args.exact is not None:
            return Session(), f"(query hadamard exact {args.exact})"
        if args.x is None or args.y is None:
            raise SexprSyntaxError("--quad needs --x and --y", 1, 1)
        x = " ".join(_csv(args.x))
        y = " ".join(_csv(args.y))
        return Session(), f"(query hadamard quad {args.quad} (x {x}) (y {y}))"
    if c == "member":
        if args.ideal is not None:
            if args.elem is None:
                raise SexprSyntaxError("--ideal needs --elem", 1, 1)
            return _inline_member(args)
        if None in (args.file, args.ring, args.term):
            raise SexprSyntaxError("member needs FILE RING TERM or --ideal/--elem", 1, 1)
        return _load(args.file), f"(query member {args.ring} {args.term})"
    if c == "quotient":
        name = f" {args.name}" if args.name else ""
        ideal = read_one(args.ideal)
        items = ideal.items if isinstance(ideal, SList) else (ideal,)
        return _load(args.file), f"(query quotient {args.ring} (ideal {' '.join(node_to_text(i) for i in items)}){name})"
    if c == "coprod":
        name = f" {args.name}" if args.name else ""
        return _load(args.file), f"(query coprod {args.left} {args.right}{name})"
    if c == "adjoin":
        name = f" {args.name}" if args.name else ""
        return _load(args.file), f"(query adjoin {args.ring} (names {' '.join(_csv(args.names))}){name})"
    if c == "hom-check":
        return _load(args.file), f"(query hom-check {args.hom})"
    if c == "ftt":
        name = f" {args.name}" if args.name else ""
        pairs = read_one(args.pairs)
        inner = " ".join(node_to_text(p) for p in pairs.items) if isinstance(pairs, SList) else ""
        return _load(args.file), f"(query ftt {args.hom} (pairs {inner}){name})"
    if c == "colimit-eq":
        return _load(args.file), (f"(query colimit-eq {args.chain} {args.stage1} {args.term1} "
                                  f"{args.stage2} {args.term2})")
    if c == "limit-check":
        arrows = []
        for a in args.arrow:
            h, i, j = a.split(":")
            arrows.append(f"({h} {i} {j})")
        return _load(args.file), (f"(query limit-check (objects {' '.join(_csv(args.objects))}) "
                                  f"(arrows {' '.join(arrows)}) (candidate {' '.join(args.candidate)}))")
    raise AssertionError(c)


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    seed = args.seed if args.seed is not None else _default_seed()
    config = MembershipConfig(seed=seed)

    def emit(lines):
        for line in lines:
            print(line, file=out)

    try:
        if args.command == "verify":
            from .verify import run_all

            results = run_all(seed, args.scale)
            emit([r.line() for r in results])
            return OK if all(r.passed for r in results) else REFUTED
        if args.command == "print":
            out.write(print_session(_load(args.file)))
            return OK
        if args.command == "run":
            codes = []
            for path in args.files:
                s = _load(path)
                if len(args.files) > 1:
                    emit([f"== {path}"])
                lines, code = run_session(s, config)
                emit(lines)
                codes.append(code)
            return _worst(codes)
        session, text = _dispatch(args, config)
        lines, code = execute(session, _query(text), config)
        emit(lines)
        return code
    except (CinfError, ValueError, ArithmeticError, OSError) as exc:
        print(_error_text(exc), file=sys.stderr)
        return REFUTED


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
