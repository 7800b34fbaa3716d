"""Session language: declarations, queries, and their canonical printing.

A session declares exactly one ring, then ideals, primes, modules,
complexes, subsets and sequences by name, then queries::

    ring R = QQ[x,y];
    prime p = (x);
    module M = coker [[x]];
    query bass M p 0..3;

Primes form the catalog in declaration order.  Errors carry line and
column and parsing resumes at the next ``;``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any

from .fpmod import FPModule, ModuleMap, direct_sum
from .groebner import Ideal
from .homalg import FPComplex, MalformedComplexError, koszul
from .polyring import GF, QQ, PolyRing, PolySyntaxError, parse_poly
from .spectrum import CatalogError, PrimeCatalog, SpecSubset

__all__ = ["SessionError", "SessionParseError", "Decl", "Query", "Session", "parse_session", "QUERY_ARITY"]


@dataclass(frozen=True)
class SessionError:
    kind: str  # lexical | syntax | resolution | arity | semantic
    message: str
    line: int
    column: int

    def __str__(self):
        return f"{self.line}:{self.column}: {self.kind} error: {self.message}"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "message": self.message, "line": self.line, "column": self.column}


class SessionParseError(ValueError):
    def __init__(self, errors: list):
        self.errors = errors
        super().__init__("\n".join(str(e) for e in errors))


_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*|//[^\n]*)
  | (?P<range>\.\.)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*(?:-[A-Za-z][A-Za-z0-9_]*)*)
  | (?P<sym>[=;\[\](){},&|*^+\-/])
""", re.VERBOSE)


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    pos: int
    end: int


def _tokenize(src: str, errors: list, where) -> list:
    toks, i = [], 0
    while i < len(src):
        m = _TOKEN.match(src, i)
        if not m:
            line, col = where(i)
            errors.append(SessionError("lexical", f"unexpected character {src[i]!r}", line, col))
            i += 1
            continue
        kind = m.lastgroup
        if kind != "ws":
            toks.append(Tok(kind, m.group(), m.start(), m.end()))
        i = m.end()
    return toks


# query command -> (min args, max args)
QUERY_ARITY = {
    "bass": (2, 3), "supp": (1, 1), "ass": (1, 1), "coherence": (2, 2), "filtration": (1, 1),
    "grade": (2, 2), "ext": (3, 3), "tor": (3, 3), "cphi": (3, 3), "suppinv": (2, 2), "gb": (1, 1),
    "dim": (1, 1), "contains": (2, 2), "predicates": (1, 1), "restrict": (2, 2), "indartinian": (1, 1),
    "lc": (3, 3), "cd": (2, 2), "suppcomplex": (1, 1), "consistency": (4, 4), "uniformity": (4, 4),
    "fitting": (1, 1), "cohomology": (2, 2),
    "check-support": (1, 1), "check-gorenstein": (0, 0), "check-closure": (2, 3),
    "check-localization": (2, 2), "check-mv": (2, 2), "check-grothendieck": (2, 2),
    "check-witness": (2, 2), "check-gamma": (2, 2),
}


@dataclass
class Decl:
    kind: str
    name: str
    text: str  # canonical right-hand side
    line: int
    column: int
    value: Any = None


@dataclass
class Query:
    command: str
    args: list
    line: int
    column: int

    @property
    def text(self) -> str:
        return " ".join([self.command] + [str(a) for a in self.args])


@dataclass
class Session:
    declarations: list = field(default_factory=list)
    queries: list = field(default_factory=list)
    ring: PolyRing | None = None
    ring_name: str = ""
    catalog: PrimeCatalog | None = None
    env: dict = field(default_factory=dict)

    def lookup(self, name: str, *kinds):
        d = self.env.get(name)
        if d is None or (kinds and d.kind not in kinds):
            return None
        return d

    def to_source(self) -> str:
        lines = [f"{d.kind} {d.name} = {d.text};" for d in self.declarations]
        lines += [f"query {q.text};" for q in self.queries]
        return "\n".join(lines) + "\n"

    def declaration_source(self) -> str:
        return "\n".join(f"{d.kind} {d.name} = {d.text};" for d in self.declarations) + "\n"


class _Stmt:
    """Cursor over the tokens of one statement."""

    def __init__(self, toks, src, where):
        self.toks = toks
        self.i = 0
        self.src = src
        self.where = where
        self.end_pos = toks[-1].end if toks else 0

    def peek(self, k=0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def take(self):
        t = self.peek()
        if t is None:
            raise _Fail("syntax", "unexpected end of statement", self.end_pos)
        self.i += 1
        return t

    def expect(self, text):
        t = self.peek()
        if t is None or t.text != text:
            got = "end of statement" if t is None else repr(t.text)
            raise _Fail("syntax", f"expected {text!r}, got {got}", t.pos if t else self.end_pos)
        self.i += 1
        return t

    def ident(self, what="name"):
        t = self.peek()
        if t is None or t.kind != "ident":
            got = "end of statement" if t is None else repr(t.text)
            raise _Fail("syntax", f"expected {what}, got {got}", t.pos if t else self.end_pos)
        self.i += 1
        return t

    def at_end(self):
        return self.i >= len(self.toks)

    def done(self):
        if not self.at_end():
            t = self.peek()
            raise _Fail("syntax", f"unexpected {t.text!r}", t.pos)

    def group(self, open_, close):
        """Tokens between matching brackets, split at top-level commas."""
        start = self.expect(open_)
        depth, parts, cur = 0, [], []
        while True:
            t = self.peek()
            if t is None:
                raise _Fail("syntax", f"unclosed {open_!r}", start.pos)
            self.i += 1
            if t.text in "([{":
                depth += 1
            elif t.text in ")]}":
                if depth == 0:
                    if t.text != close:
                        raise _Fail("syntax", f"expected {close!r}, got {t.text!r}", t.pos)
                    if cur or parts:
                        parts.append(cur)
                    return parts, start
                depth -= 1
            if t.text == "," and depth == 0:
                parts.append(cur)
                cur = []
            else:
                cur.append(t)

    def text_of(self, toks):
        return self.src[toks[0].pos: toks[-1].end] if toks else ""


class _Fail(Exception):
    def __init__(self, kind, message, pos):
        self.kind, self.message, self.pos = kind, message, pos


def _poly(st: _Stmt, toks, ring):
    if not toks:
        raise _Fail("syntax", "empty polynomial", st.peek().pos if st.peek() else st.end_pos)
    text = st.text_of(toks)
    try:
        return parse_poly(text, ring)
    except PolySyntaxError as e:
        raise _Fail("syntax", e.message, toks[0].pos + e.position)
    except (ValueError, ZeroDivisionError, OverflowError) as e:
        raise _Fail("syntax", str(e), toks[0].pos)


def _poly_list(st: _Stmt, parts, ring):
    return [_poly(st, p, ring) for p in parts]


def _matrix(st: _Stmt, ring):
    rows_parts, start = st.group("[", "]")
    rows = []
    for part in rows_parts:
        if not part or part[0].text != "[" or part[-1].text != "]":
            raise _Fail("syntax", "matrix rows must be bracketed lists", part[0].pos if part else start.pos)
        inner = _Stmt(part, st.src, st.where)
        cells, _ = inner.group("[", "]")
        inner.done()
        rows.append(_poly_list(st, cells, ring))
    if not rows:
        raise _Fail("syntax", "empty matrix; use 'free n' for a module without relations", start.pos)
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise _Fail("arity", "matrix rows have different lengths", start.pos)
    return rows


def _fmt_matrix(rows) -> str:
    return "[" + ", ".join("[" + ", ".join(str(c) for c in r) + "]" for r in rows) + "]"


def _fmt_polys(ps) -> str:
    return ", ".join(str(p) for p in ps)


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.errors: list = []
        self._lines = [0]
        for i, ch in enumerate(src):
            if ch == "\n":
                self._lines.append(i + 1)
        self.s = Session()
        self.primes: list = []
        self.pending_subsets: list = []

    def where(self, pos):
        import bisect
        ln = bisect.bisect_right(self._lines, pos) - 1
        return ln + 1, pos - self._lines[ln] + 1

    def err(self, kind, message, pos):
        line, col = self.where(pos)
        self.errors.append(SessionError(kind, message, line, col))

    def run(self) -> Session:
        toks = _tokenize(self.src, self.errors, self.where)
        stmts, cur = [], []
        for t in toks:
            if t.text == ";":
                stmts.append(cur)
                cur = []
            else:
                cur.append(t)
        if cur:
            self.err("syntax", "missing ';' at end of input", cur[-1].end)
        for stoks in stmts:
            if not stoks:
                continue
            st = _Stmt(stoks, self.src, self.where)
            try:
                self.statement(st)
            except _Fail as f:
                self.err(f.kind, f.message, f.pos)
        if self.s.ring is None and not any(e.kind == "resolution" and "ring" in e.message for e in self.errors):
            self.err("resolution", "a session needs exactly one ring declaration", 0)
        return self.s

    # -------------------------------------------------------------- statements

    def statement(self, st: _Stmt):
        head = st.ident("keyword")
        kw = head.text
        if kw == "query":
            return self.query(st)
        handlers = {"ring": self.ring, "ideal": self.ideal, "prime": self.ideal, "module": self.module,
                    "complex": self.complex, "subset": self.subset, "seq": self.seq}
        if kw not in handlers:
            raise _Fail("syntax", f"unknown keyword {kw!r}", head.pos)
        name_tok = st.ident()
        st.expect("=")
        if kw != "ring" and self.s.ring is None:
            raise _Fail("resolution", "declare the ring first", head.pos)
        if name_tok.text in self.s.env or (kw != "ring" and name_tok.text == self.s.ring_name):
            raise _Fail("resolution", f"name {name_tok.text!r} is already declared", name_tok.pos)
        if self.s.ring is not None and name_tok.text in self.s.ring.variables:
            raise _Fail("resolution", f"name {name_tok.text!r} clashes with a ring variable", name_tok.pos)
        line, col = self.where(head.pos)
        decl = Decl(kw, name_tok.text, "", line, col)
        handlers[kw](st, decl, head)
        st.done()
        if kw != "ring":
            self.s.declarations.append(decl)
            self.s.env[decl.name] = decl

    def ring(self, st: _Stmt, decl: Decl, head):
        if self.s.ring is not None:
            raise _Fail("resolution", "exactly one ring per session", head.pos)
        ft = st.ident("field")
        if ft.text == "QQ":
            F, ftxt = QQ, "QQ"
        elif ft.text == "GF":
            parts, start = st.group("(", ")")
            if len(parts) != 1 or len(parts[0]) != 1 or parts[0][0].kind != "num":
                raise _Fail("syntax", "GF expects one prime integer", start.pos)
            p = int(parts[0][0].text)
            try:
                F = GF(p)
            except ValueError as e:
                raise _Fail("semantic", str(e), parts[0][0].pos)
            ftxt = f"GF({p})"
        else:
            raise _Fail("syntax", f"unknown field {ft.text!r}; use QQ or GF(p)", ft.pos)
        parts, start = st.group("[", "]")
        names = []
        for p in parts:
            if len(p) != 1 or p[0].kind != "ident" or "-" in p[0].text:
                raise _Fail("syntax", "variables must be plain names", p[0].pos if p else start.pos)
            names.append(p[0].text)
        if not names:
            raise _Fail("syntax", "a ring needs at least one variable", start.pos)
        if len(set(names)) != len(names):
            raise _Fail("semantic", "variable names must be distinct", start.pos)
        order = "grevlex"
        if st.peek() is not None:
            if st.peek().text == "[":
                oparts, ostart = st.group("[", "]")
                if len(oparts) != 1 or len(oparts[0]) != 1:
                    raise _Fail("syntax", "order must be lex or grevlex", ostart.pos)
                order = oparts[0][0].text
            else:
                order = st.ident("monomial order").text
            if order not in ("lex", "grevlex"):
                raise _Fail("syntax", f"unknown monomial order {order!r}", st.toks[st.i - 1].pos)
        self.s.ring = PolyRing(tuple(names), F, order)
        self.s.ring_name = decl.name
        suffix = "" if order == "grevlex" else f" [{order}]"
        decl.text = f"{ftxt}[{', '.join(names)}]{suffix}"
        self.s.declarations.append(decl)

    def ideal(self, st: _Stmt, decl: Decl, head):
        parts, _ = st.group("(", ")")
        polys = _poly_list(st, parts, self.s.ring)
        decl.value = Ideal(self.s.ring, polys)
        decl.text = f"({_fmt_polys(polys)})"
        if decl.kind == "prime":
            if decl.value.is_unit():
                raise _Fail("semantic", f"prime {decl.name} is the unit ideal", head.pos)
            self.primes.append(decl)

    def seq(self, st: _Stmt, decl: Decl, head):
        parts, start = st.group("[", "]")
        polys = _poly_list(st, parts, self.s.ring)
        if not polys:
            raise _Fail("arity", "a sequence needs at least one element", start.pos)
        decl.value = polys
        decl.text = f"[{_fmt_polys(polys)}]"

    def _ref(self, tok, *kinds):
        d = self.s.lookup(tok.text, *kinds)
        if d is None:
            other = self.s.lookup(tok.text)
            if other is not None:
                raise _Fail("resolution", f"{tok.text!r} is a {other.kind}, expected {' or '.join(kinds)}", tok.pos)
            raise _Fail("resolution", f"unknown name {tok.text!r}", tok.pos)
        return d

    def _ideal_arg(self, st: _Stmt, parts):
        """A single declared ideal name, or an inline list of polynomials."""
        if len(parts) == 1 and len(parts[0]) == 1 and parts[0][0].kind == "ident" \
                and self.s.lookup(parts[0][0].text, "ideal", "prime"):
            d = self.s.lookup(parts[0][0].text)
            return d.value, d.name
        polys = _poly_list(st, parts, self.s.ring)
        return Ideal(self.s.ring, polys), None

    def module(self, st: _Stmt, decl: Decl, head):
        kind = st.ident("module form")
        R = self.s.ring
        if kind.text == "coker":
            rows = _matrix(st, R)
            decl.value = FPModule.coker(R, rows)
            decl.text = f"coker {_fmt_matrix(rows)}"
        elif kind.text == "free":
            t = st.take()
            if t.kind != "num":
                raise _Fail("syntax", "free expects a rank", t.pos)
            decl.value = FPModule.free(R, int(t.text))
            decl.text = f"free {int(t.text)}"
        elif kind.text == "quotient":
            parts, _ = st.group("(", ")")
            I, nm = self._ideal_arg(st, parts)
            decl.value = FPModule.cyclic(I)
            decl.text = f"quotient({nm if nm else _fmt_polys(I.generators)})"
        elif kind.text == "sum":
            parts, start = st.group("(", ")")
            if len(parts) < 2:
                raise _Fail("arity", "sum needs at least two modules", start.pos)
            mods = []
            for p in parts:
                if len(p) != 1:
                    raise _Fail("syntax", "sum takes module names", p[0].pos if p else start.pos)
                mods.append(self._ref(p[0], "module"))
            M = mods[0].value
            for d in mods[1:]:
                M = direct_sum(M, d.value)
            decl.value = M
            decl.text = f"sum({', '.join(d.name for d in mods)})"
        else:
            raise _Fail("syntax", f"unknown module form {kind.text!r}", kind.pos)

    def complex(self, st: _Stmt, decl: Decl, head):
        kind = st.ident("complex form")
        R = self.s.ring
        try:
            if kind.text == "koszul":
                if st.peek() is not None and st.peek().text == "[":
                    parts, start = st.group("[", "]")
                    polys = _poly_list(st, parts, R)
                    decl.text = f"koszul[{_fmt_polys(polys)}]"
                else:
                    parts, start = st.group("(", ")")
                    if len(parts) != 1 or len(parts[0]) != 1:
                        raise _Fail("syntax", "koszul(...) takes a sequence name", start.pos)
                    d = self._ref(parts[0][0], "seq")
                    polys = d.value
                    decl.text = f"koszul({d.name})"
                if not polys:
                    raise _Fail("arity", "koszul needs a nonempty sequence", start.pos)
                decl.value = koszul(polys)
            elif kind.text == "stalk":
                parts, start = st.group("(", ")")
                if len(parts) != 2 or len(parts[0]) != 1:
                    raise _Fail("arity", "stalk takes a module and a degree", start.pos)
                d = self._ref(parts[0][0], "module")
                deg = self._int(st, parts[1])
                decl.value = FPComplex.stalk(d.value, deg)
                decl.text = f"stalk({d.name}, {deg})"
            elif kind.text == "free_complex":
                lo = self._int(st, [st.take()]) if st.peek() and st.peek().text != "-" else None
                if lo is None:
                    st.take()
                    lo = -self._int(st, [st.take()])
                mats = []
                while not st.at_end():
                    mats.append(_matrix(st, R))
                if not mats:
                    raise _Fail("arity", "free_complex needs at least one matrix", kind.pos)
                decl.value = FPComplex.free_complex(R, lo, [ModuleMap.from_rows(R, m) for m in mats])
                decl.text = f"free_complex {lo} " + " ".join(_fmt_matrix(m) for m in mats)
            else:
                raise _Fail("syntax", f"unknown complex form {kind.text!r}", kind.pos)
        except MalformedComplexError as e:
            raise _Fail("semantic", str(e), kind.pos)

    def _int(self, st, toks):
        sign = 1
        if toks and toks[0].text == "-":
            sign, toks = -1, toks[1:]
        if len(toks) != 1 or toks[0].kind != "num":
            raise _Fail("syntax", "expected an integer", toks[0].pos if toks else st.end_pos)
        return sign * int(toks[0].text)

    def subset(self, st: _Stmt, decl: Decl, head):
        t = st.peek()
        if t is None:
            raise _Fail("syntax", "missing subset expression", head.pos)
        if t.text == "{":
            parts, _ = st.group("{", "}")
            names = []
            for p in parts:
                if len(p) != 1 or p[0].kind != "ident":
                    raise _Fail("syntax", "subset members are prime names", p[0].pos if p else t.pos)
                self._ref(p[0], "prime")
                names.append(p[0].text)
            decl.value = ("set", names)
            decl.text = "{" + ", ".join(names) + "}"
        elif t.text in ("D", "V"):
            st.take()
            nxt = st.peek()
            if nxt is not None and nxt.text == "[":
                parts, _ = st.group("[", "]")
                polys = _poly_list(st, parts, self.s.ring)
                decl.value = (t.text, polys)
                decl.text = f"{t.text}[{_fmt_polys(polys)}]"
            else:
                parts, start = st.group("(", ")")
                single = len(parts) == 1 and len(parts[0]) == 1 and parts[0][0].kind == "ident"
                kinds = ("seq",) if t.text == "D" else ("ideal", "prime")
                if single and self.s.lookup(parts[0][0].text, *kinds):
                    d = self.s.lookup(parts[0][0].text)
                    polys = list(d.value) if d.kind == "seq" else list(d.value.generators)
                    decl.text = f"{t.text}({d.name})"
                elif single and self.s.lookup(parts[0][0].text):
                    self._ref(parts[0][0], *kinds)
                else:
                    polys = _poly_list(st, parts, self.s.ring)
                    decl.text = f"{t.text}[{_fmt_polys(polys)}]"
                decl.value = (t.text, polys)
        elif t.text == "full":
            st.take()
            decl.value = ("full", None)
            decl.text = "full"
        else:
            raise _Fail("syntax", f"unknown subset form {t.text!r}", t.pos)
        self.pending_subsets.append(decl)

    def query(self, st: _Stmt):
        cmd = st.ident("query command")
        if cmd.text not in QUERY_ARITY:
            raise _Fail("syntax", f"unknown query {cmd.text!r}", cmd.pos)
        args = []
        while not st.at_end():
            t = st.take()
            if t.kind == "num" and st.peek() is not None and st.peek().kind == "range":
                st.take()
                hi = st.take()
                if hi.kind != "num":
                    raise _Fail("syntax", "range needs an upper bound", hi.pos)
                args.append(f"{int(t.text)}..{int(hi.text)}")
            elif t.kind in ("num", "ident"):
                args.append(t.text)
            else:
                raise _Fail("syntax", f"unexpected {t.text!r} in query", t.pos)
        lo, hi = QUERY_ARITY[cmd.text]
        if not lo <= len(args) <= hi:
            want = str(lo) if lo == hi else f"{lo}-{hi}"
            raise _Fail("arity", f"{cmd.text} takes {want} arguments, got {len(args)}", cmd.pos)
        line, col = self.where(cmd.pos)
        self.s.queries.append(Query(cmd.text, args, line, col))

    # -------------------------------------------------------------- finish

    def finish(self):
        s = self.s
        if s.ring is None:
            return
        if self.primes:
            try:
                s.catalog = PrimeCatalog(s.ring, [d.value for d in self.primes], [d.name for d in self.primes])
            except CatalogError as e:
                d = self.primes[0]
                self.errors.append(SessionError("semantic", str(e), d.line, d.column))
                return
        for d in self.pending_subsets:
            if s.catalog is None:
                self.errors.append(SessionError("resolution", "subsets need at least one declared prime",
                                                d.line, d.column))
                continue
            kind, data = d.value
            if kind == "set":
                d.value = SpecSubset.from_names(s.catalog, data)
            elif kind == "D":
                d.value = SpecSubset.D(s.catalog, data)
            elif kind == "V":
                d.value = SpecSubset.V(s.catalog, Ideal(s.ring, data))
            else:
                d.value = s.catalog.full


def parse_session(src: str) -> Session:
    """Parse and resolve a session; raises SessionParseError with every error found."""
    p = _Parser(src)
    p.run()
    p.finish()
    if p.errors:
        p.errors.sort(key=lambda e: (e.line, e.column))
        raise SessionParseError(p.errors)
    return p.s
