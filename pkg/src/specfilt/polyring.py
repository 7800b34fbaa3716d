"""Exact multivariate polynomials over the rationals and prime fields.

Polynomials are immutable.  A :class:`Polynomial` stores its terms as a tuple
of ``(exponents, coefficient)`` pairs sorted strictly descending in the ring's
monomial order, so the printed form is canonical and printing then parsing
returns the same object.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Mapping, Sequence

__all__ = [
    "CoefficientField",
    "QQ",
    "GF",
    "PolyRing",
    "Polynomial",
    "Monomial",
    "PolySyntaxError",
    "UnknownVariableError",
    "RingMismatchError",
    "DEGREE_CAP",
    "parse_poly",
    "arith",
    "normal_form",
]

Monomial = tuple  # exponent vector, one nonnegative int per ring variable

DEGREE_CAP = 2**16


class PolySyntaxError(ValueError):
    """Malformed polynomial text.  ``position`` is a 0-based offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.message = message
        self.position = position


class UnknownVariableError(PolySyntaxError):
    pass


class RingMismatchError(ValueError):
    pass


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class CoefficientField:
    """``QQ`` for characteristic 0, ``GF(p)`` otherwise."""

    characteristic: int = 0

    def __post_init__(self):
        c = self.characteristic
        if c != 0 and not (_is_prime(c) and c < 2**31):
            raise ValueError(f"characteristic must be 0 or a prime below 2^31, got {c}")

    @property
    def kind(self) -> str:
        return "rationals" if self.characteristic == 0 else "prime_field"

    @property
    def zero(self):
        return Fraction(0) if self.characteristic == 0 else 0

    @property
    def one(self):
        return Fraction(1) if self.characteristic == 0 else 1

    def convert(self, value):
        """Map an int or Fraction into the field."""
        p = self.characteristic
        if p == 0:
            return Fraction(value)
        if isinstance(value, Fraction):
            if value.denominator % p == 0:
                raise ZeroDivisionError(f"denominator {value.denominator} vanishes in GF({p})")
            return value.numerator * pow(value.denominator, -1, p) % p
        return int(value) % p

    def reduce(self, value):
        # cheap normalisation after ring arithmetic on representatives
        p = self.characteristic
        return value if p == 0 else value % p

    def inv(self, a):
        p = self.characteristic
        if p == 0:
            return 1 / a
        return pow(a, -1, p)

    def div(self, a, b):
        p = self.characteristic
        if p == 0:
            return a / b
        return a * pow(b, -1, p) % p

    def format(self, a) -> str:
        if self.characteristic == 0:
            a = Fraction(a)
            return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"
        return str(a)

    def __str__(self):
        return "QQ" if self.characteristic == 0 else f"GF({self.characteristic})"


QQ = CoefficientField(0)


def GF(p: int) -> CoefficientField:
    return CoefficientField(p)


def _grevlex_key(e):
    return (sum(e), tuple(-x for x in reversed(e)))


@dataclass(frozen=True)
class PolyRing:
    """A polynomial ring k[variables] with a monomial order.

    ``order`` is ``"lex"`` or ``"grevlex"``.  ``block`` > 0 marks an
    elimination ring: the first ``block`` variables are compared first (by
    grevlex) and the remaining ones by ``order``.  Block rings are built by
    :meth:`extend` and are an internal device for elimination.
    """

    variables: tuple
    field: CoefficientField = QQ
    order: str = "grevlex"
    block: int = 0

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if any(not v for v in self.variables):
            raise ValueError("variable names must be nonempty")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"duplicate variable names in {self.variables}")
        if self.order not in ("lex", "grevlex"):
            raise ValueError(f"unknown monomial order {self.order!r}")
        if not 0 <= self.block <= len(self.variables):
            raise ValueError("bad elimination block size")

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @cached_property
    def key(self) -> Callable[[tuple], tuple]:
        """Sort key for exponent vectors: larger key = larger monomial."""
        inner = (lambda e: e) if self.order == "lex" else _grevlex_key
        b = self.block
        cache: dict = {}
        if b == 0:
            def k(e):
                r = cache.get(e)
                if r is None:
                    r = cache[e] = inner(e)
                return r
        else:
            def k(e):
                r = cache.get(e)
                if r is None:
                    r = cache[e] = (_grevlex_key(e[:b]), inner(e[b:]))
                return r
        return k

    def index(self, name: str) -> int:
        return self.variables.index(name)

    # construction helpers

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.const(1)

    def const(self, c) -> "Polynomial":
        c = self.field.convert(c)
        return Polynomial(self, {(0,) * self.nvars: c} if c else {})

    def monomial(self, exps: Sequence[int], coeff=1) -> "Polynomial":
        c = self.field.convert(coeff)
        return Polynomial(self, {tuple(exps): c} if c else {})

    def var(self, name: str) -> "Polynomial":
        e = [0] * self.nvars
        e[self.index(name)] = 1
        return Polynomial(self, {tuple(e): self.field.one})

    def gens(self) -> list:
        return [self.var(v) for v in self.variables]

    def __call__(self, src) -> "Polynomial":
        if isinstance(src, Polynomial):
            if src.ring != self:
                raise RingMismatchError("polynomial from another ring")
            return src
        if isinstance(src, (int, Fraction)):
            return self.const(src)
        return parse_poly(src, self)

    # elimination rings

    def extend(self, names: Sequence[str]) -> "PolyRing":
        """Ring with fresh variables ``names`` in front, forming an elimination block."""
        clash = set(names) & set(self.variables)
        if clash:
            raise ValueError(f"variable names already in use: {sorted(clash)}")
        if self.block:
            raise ValueError("cannot extend an elimination ring")
        return PolyRing(tuple(names) + self.variables, self.field, self.order, len(names))

    def embed(self, f: "Polynomial", into: "PolyRing") -> "Polynomial":
        pad = (0,) * (into.nvars - self.nvars)
        return Polynomial(into, {pad + e: c for e, c in f.terms}, _trusted=True)

    def contract(self, f: "Polynomial", outer: "PolyRing") -> "Polynomial":
        """Inverse of :meth:`embed`; ``f`` must not involve the extra variables."""
        k = outer.nvars - self.nvars
        out = {}
        for e, c in f.terms:
            if any(e[:k]):
                raise ValueError("polynomial involves eliminated variables")
            out[e[k:]] = c
        return Polynomial(self, out)

    def __str__(self):
        return f"{self.field}[{','.join(self.variables)}]"


def _check_degree(e):
    if sum(e) > DEGREE_CAP:
        raise OverflowError(f"total degree {sum(e)} exceeds cap {DEGREE_CAP}")


class Polynomial:
    __slots__ = ("ring", "terms", "_dict", "_hash")

    def __init__(self, ring: PolyRing, terms: Mapping | Iterable, _trusted: bool = False):
        self.ring = ring
        if not isinstance(terms, Mapping):
            acc: dict = {}
            for e, c in terms:
                acc[e] = acc.get(e, 0) + c
            terms = acc
        if _trusted:
            d = dict(terms)
        else:
            F = ring.field
            n = ring.nvars
            d = {}
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != n or any(x < 0 for x in e):
                    raise ValueError(f"bad exponent vector {e} for {n} variables")
                c = F.convert(c)
                if c:
                    d[e] = c
        self._dict = d
        key = ring.key
        self.terms = tuple(sorted(d.items(), key=lambda t: key(t[0]), reverse=True))
        self._hash = None

    # basic queries

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def to_dict(self) -> dict:
        return dict(self._dict)

    @property
    def lead_monomial(self) -> tuple:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return self.terms[0][0]

    @property
    def lead_coeff(self):
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return self.terms[0][1]

    def total_degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=-1)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(self.terms[0][0]))

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.terms[0][1] if self.terms else self.ring.field.zero

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def variables_used(self) -> set:
        return {i for e, _ in self.terms for i, x in enumerate(e) if x}

    def monic(self) -> "Polynomial":
        if not self.terms:
            return self
        F = self.ring.field
        inv = F.inv(self.lead_coeff)
        return Polynomial(self.ring, {e: F.reduce(c * inv) for e, c in self.terms}, _trusted=True)

    # arithmetic

    def _same(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise RingMismatchError(f"{self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._same(other)
        if other is NotImplemented:
            return other
        return Polynomial(self.ring, _add(self._dict, other._dict, 1, self.ring.field), _trusted=True)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._same(other)
        if other is NotImplemented:
            return other
        return Polynomial(self.ring, _add(self._dict, other._dict, -1, self.ring.field), _trusted=True)

    def __rsub__(self, other):
        other = self._same(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        F = self.ring.field
        return Polynomial(self.ring, {e: F.reduce(-c) for e, c in self.terms}, _trusted=True)

    def __mul__(self, other):
        other = self._same(other)
        if other is NotImplemented:
            return other
        return Polynomial(self.ring, _mul(self._dict, other._dict, self.ring.field), _trusted=True)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c) -> "Polynomial":
        F = self.ring.field
        c = F.convert(c)
        if not c:
            return self.ring.zero()
        return Polynomial(self.ring, {e: F.reduce(a * c) for e, a in self.terms}, _trusted=True)

    def mul_monomial(self, m: tuple, c=1) -> "Polynomial":
        F = self.ring.field
        c = F.convert(c)
        out = {}
        for e, a in self.terms:
            ne = tuple(x + y for x, y in zip(e, m))
            _check_degree(ne)
            out[ne] = F.reduce(a * c)
        return Polynomial(self.ring, out, _trusted=True)

    # comparison / hashing

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == self.ring.const(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, self.terms))
        return self._hash

    # printing

    def __str__(self):
        if not self.terms:
            return "0"
        F = self.ring.field
        names = self.ring.variables
        parts = []
        for e, c in self.terms:
            mono = "*".join(
                names[i] if x == 1 else f"{names[i]}^{x}" for i, x in enumerate(e) if x
            )
            neg = False
            if F.characteristic == 0 and c < 0:
                neg, c = True, -c
            cs = F.format(c)
            if not mono:
                body = cs
            elif cs == "1":
                body = mono
            else:
                body = f"{cs}*{mono}"
            parts.append((neg, body))
        out = ("-" if parts[0][0] else "") + parts[0][1]
        for neg, body in parts[1:]:
            out += (" - " if neg else " + ") + body
        return out

    def __repr__(self):
        return f"Polynomial({str(self)!r}, {self.ring})"


def _add(a: dict, b: dict, sign: int, F: CoefficientField) -> dict:
    out = dict(a)
    for e, c in b.items():
        v = F.reduce(out.get(e, 0) + sign * c)
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def _mul(a: dict, b: dict, F: CoefficientField) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    res = {}
    for e, c in out.items():
        c = F.reduce(c)
        if c:
            _check_degree(e)
            res[e] = c
    return res


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def _tokenize(src: str):
    toks = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            toks.append(("int", m.group(1), start))
        elif m.group(2) is not None:
            toks.append(("name", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*^/()":
                raise PolySyntaxError(f"unexpected character {ch!r}", start)
            toks.append(("op", ch, start))
        pos = m.end()
    toks.append(("end", "", len(src)))
    return toks


class _Parser:
    def __init__(self, src: str, ring: PolyRing):
        self.ring = ring
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value):
        t = self.take()
        if t[1] != value or t[0] == "int":
            raise PolySyntaxError(f"expected {value!r}, found {t[1] or 'end of input'!r}", t[2])
        return t

    def parse(self) -> Polynomial:
        p = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise PolySyntaxError(f"unexpected {t[1]!r}", t[2])
        return p

    def expr(self) -> Polynomial:
        sign = 1
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            sign = -1 if t[1] == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                rhs = self.term()
                acc = acc + rhs if t[1] == "+" else acc - rhs
            else:
                return acc

    def term(self) -> Polynomial:
        acc = self.factor()
        while self.peek()[:2] == ("op", "*"):
            self.take()
            acc = acc * self.factor()
        return acc

    def factor(self) -> Polynomial:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            t = self.take()
            if t[0] != "int":
                raise PolySyntaxError("exponent must be a nonnegative integer", t[2])
            k = int(t[1])
            if k > DEGREE_CAP:
                raise OverflowError(f"exponent {k} exceeds cap {DEGREE_CAP}")
            base = base ** k
        return base

    def atom(self) -> Polynomial:
        t = self.take()
        kind, val, pos = t
        if kind == "int":
            if self.peek()[:2] == ("op", "/"):
                self.take()
                d = self.take()
                if d[0] != "int":
                    raise PolySyntaxError("expected integer denominator", d[2])
                den = int(d[1])
                if den == 0:
                    raise PolySyntaxError("zero denominator", d[2])
                try:
                    return self.ring.const(Fraction(int(val), den))
                except ZeroDivisionError:
                    raise PolySyntaxError(
                        f"denominator {den} is zero in {self.ring.field}", d[2]
                    ) from None
            return self.ring.const(int(val))
        if kind == "name":
            if val not in self.ring.variables:
                raise UnknownVariableError(f"unknown variable {val!r}", pos)
            return self.ring.var(val)
        if (kind, val) == ("op", "("):
            inner = self.expr()
            self.expect(")")
            return inner
        raise PolySyntaxError(f"unexpected {val or 'end of input'!r}", pos)


def parse_poly(src: str, ring: PolyRing) -> Polynomial:
    """Parse ``src`` into canonical form over ``ring``."""
    return _Parser(src, ring).parse()


def arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    if a.ring != b.ring:
        raise RingMismatchError(f"{a.ring} vs {b.ring}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def _divides(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


def normal_form(f: Polynomial, divisors: Sequence[Polynomial]) -> Polynomial:
    """Remainder of multivariate division of ``f`` by ``divisors``.

    No term of the result is divisible by a divisor's leading monomial.  When
    several leading monomials divide the current term the earliest divisor in
    the list wins.
    """
    ring = f.ring
    for d in divisors:
        if d.ring != ring:
            raise RingMismatchError(f"{d.ring} vs {ring}")
        if d.is_zero():
            raise ValueError("zero divisor in normal_form")
    F = ring.field
    key = ring.key
    leads = [(d.lead_monomial, d.lead_coeff, d.terms) for d in divisors]
    work = f.to_dict()
    rem = {}
    while work:
        m = max(work, key=key)
        c = work[m]
        for lm, lc, dterms in leads:
            if _divides(lm, m):
                q = tuple(x - y for x, y in zip(m, lm))
                s = F.div(c, lc)
                for e, a in dterms:
                    ne = tuple(x + y for x, y in zip(e, q))
                    v = F.reduce(work.get(ne, 0) - s * a)
                    if v:
                        work[ne] = v
                    else:
                        work.pop(ne, None)
                break
        else:
            rem[m] = c
            del work[m]
    return Polynomial(ring, rem, _trusted=True)


def divide_exact(a: Polynomial, b: Polynomial) -> Polynomial | None:
    """Quotient ``a / b`` if ``b`` divides ``a`` exactly in the ring, else None."""
    if b.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    ring = a.ring
    F = ring.field
    key = ring.key
    lm, lc = b.lead_monomial, b.lead_coeff
    work = a.to_dict()
    quot = {}
    while work:
        m = max(work, key=key)
        if not _divides(lm, m):
            return None
        q = tuple(x - y for x, y in zip(m, lm))
        s = F.div(work[m], lc)
        quot[q] = s
        for e, c in b.terms:
            ne = tuple(x + y for x, y in zip(e, q))
            v = F.reduce(work.get(ne, 0) - s * c)
            if v:
                work[ne] = v
            else:
                work.pop(ne, None)
    return Polynomial(ring, quot, _trusted=True)
