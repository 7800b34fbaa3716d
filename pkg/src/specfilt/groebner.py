"""Buchberger's algorithm and the ideal operations built on it.

The engine works on *vectors*: dicts mapping ``(position, exponents)`` to a
coefficient, ordered position-over-term with position 0 largest.  An ideal
is the rank-one case, so the same code computes ideal and submodule bases.
Pairs are selected by the normal strategy (smallest lcm degree first) and
pruned with the Gebauer-Moller criteria.  The product criterion is only used
in rank one, where it is valid.
"""

from __future__ import annotations

import itertools
import threading
from typing import Iterable, Sequence

from .polyring import Polynomial, PolyRing, RingMismatchError, divide_exact

__all__ = [
    "Ideal",
    "groebner_basis",
    "ideal_contains",
    "ideal_intersect",
    "ideal_quotient",
    "saturate",
    "radical_membership",
    "krull_dim",
    "independent_sets",
    "spoly",
    "vec_reduce",
    "vec_groebner",
]


# ------------------------------------------------------------ vector engine

def _vkey(ring: PolyRing):
    key = ring.key

    def k(m):
        return (-m[0], key(m[1]))

    return k


def _lead(v: dict, vk):
    return max(v, key=vk)


def _divides(a, b) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _lcm(a, b):
    return tuple(x if x > y else y for x, y in zip(a, b))


class _Basis:
    """Reducer: a list of monic vectors indexed by leading monomial."""

    def __init__(self, ring: PolyRing):
        self.ring = ring
        self.vk = _vkey(ring)
        self.F = ring.field
        self.polys: list = []  # monic vectors
        self.leads: list = []  # (pos, exps)
        self.by_pos: dict = {}  # pos -> [index]

    def add(self, v: dict) -> int:
        self.polys.append(v)
        lm = _lead(v, self.vk)
        self.leads.append(lm)
        self.by_pos.setdefault(lm[0], []).append(len(self.polys) - 1)
        return len(self.polys) - 1

    def divisor(self, m, active=None):
        for idx in self.by_pos.get(m[0], ()):
            if active is not None and idx not in active:
                continue
            if _divides(self.leads[idx][1], m[1]):
                return idx
        return None

    def reduce(self, v: dict, active=None, full: bool = True) -> dict:
        F = self.F
        vk = self.vk
        work = dict(v)
        rem = {}
        while work:
            m = max(work, key=vk)
            c = work[m]
            idx = self.divisor(m, active)
            if idx is None:
                if not full:
                    rem.update(work)
                    return rem
                rem[m] = c
                del work[m]
                continue
            g = self.polys[idx]
            lp, le = self.leads[idx]
            q = tuple(x - y for x, y in zip(m[1], le))
            for (p2, e2), c2 in g.items():
                ne = (p2, tuple(x + y for x, y in zip(e2, q)))
                val = F.reduce(work.get(ne, 0) - c * c2)
                if val:
                    work[ne] = val
                else:
                    work.pop(ne, None)
        return rem


def _monic(v: dict, ring: PolyRing) -> dict:
    F = ring.field
    lm = _lead(v, _vkey(ring))
    inv = F.inv(v[lm])
    return {m: F.reduce(c * inv) for m, c in v.items()}


def spoly(f: dict, g: dict, ring: PolyRing) -> dict:
    """S-vector of two vectors whose leading terms share a position."""
    vk = _vkey(ring)
    F = ring.field
    (pf, ef), (pg, eg) = _lead(f, vk), _lead(g, vk)
    if pf != pg:
        return {}
    lcm = _lcm(ef, eg)
    qf = tuple(x - y for x, y in zip(lcm, ef))
    qg = tuple(x - y for x, y in zip(lcm, eg))
    cf, cg = F.inv(f[(pf, ef)]), F.inv(g[(pg, eg)])
    out: dict = {}
    for (p, e), c in f.items():
        ne = (p, tuple(x + y for x, y in zip(e, qf)))
        out[ne] = F.reduce(out.get(ne, 0) + c * cf)
    for (p, e), c in g.items():
        ne = (p, tuple(x + y for x, y in zip(e, qg)))
        out[ne] = F.reduce(out.get(ne, 0) - c * cg)
    return {m: c for m, c in out.items() if c}


def vec_groebner(vecs: Iterable[dict], ring: PolyRing, rank_one: bool | None = None) -> list:
    """Reduced, monic Groebner basis of the submodule spanned by ``vecs``.

    Output is sorted by leading monomial, descending, so it is canonical.
    """
    vecs = [dict(v) for v in vecs if v]
    if rank_one is None:
        rank_one = all(m[0] == 0 for v in vecs for m in v)
    B = _Basis(ring)
    vk = B.vk
    key = ring.key
    active: set = set()
    pairs: list = []  # (i, j, pos, lcm)

    def update(h: int):
        ph, eh = B.leads[h]
        C = [g for g in sorted(active) if B.leads[g][0] == ph]
        lcms = {g: _lcm(eh, B.leads[g][1]) for g in C}

        def disjoint(g):
            return rank_one and all(not (a and b) for a, b in zip(eh, B.leads[g][1]))

        D = []
        pending = list(C)
        while pending:
            g1 = pending.pop(0)
            l1 = lcms[g1]
            if disjoint(g1) or not any(
                _divides(lcms[g2], l1) for g2 in itertools.chain(pending, D)
            ):
                D.append(g1)
        E = [(g, h, ph, lcms[g]) for g in D if not disjoint(g)]
        keep = []
        for (a, b, p, l) in pairs:
            if p == ph and _divides(eh, l) and _lcm(B.leads[a][1], eh) != l and _lcm(eh, B.leads[b][1]) != l:
                continue
            keep.append((a, b, p, l))
        pairs[:] = keep + E
        for g in list(active):
            if B.leads[g][0] == ph and _divides(eh, B.leads[g][1]):
                active.discard(g)
        active.add(h)

    for v in vecs:
        r = B.reduce(v, active)
        if r:
            update(B.add(_monic(r, ring)))

    while pairs:
        best = min(range(len(pairs)), key=lambda t: (sum(pairs[t][3]), key(pairs[t][3]), pairs[t][2], pairs[t][0], pairs[t][1]))
        a, b, _, _ = pairs.pop(best)
        s = spoly(B.polys[a], B.polys[b], ring)
        if not s:
            continue
        r = B.reduce(s, active)
        if r:
            update(B.add(_monic(r, ring)))

    # minimal then interreduced
    idx = sorted(active, key=lambda i: vk(B.leads[i]), reverse=True)
    minimal = []
    for i in idx:
        if not any(
            j != i and B.leads[j][0] == B.leads[i][0] and _divides(B.leads[j][1], B.leads[i][1])
            and (B.leads[j] != B.leads[i] or j < i)
            for j in idx
        ):
            minimal.append(i)
    R = _Basis(ring)
    for i in minimal:
        R.add(B.polys[i])
    out = []
    for t, i in enumerate(minimal):
        others = set(range(len(minimal))) - {t}
        g = B.polys[i]
        lm = R.leads[t]
        tail = {m: c for m, c in g.items() if m != lm}
        red = R.reduce(tail, others)
        red[lm] = g[lm]
        out.append(red)
    out.sort(key=lambda v: vk(_lead(v, vk)), reverse=True)
    return out


def vec_reduce(v: dict, basis: Sequence[dict], ring: PolyRing) -> dict:
    B = _Basis(ring)
    for g in basis:
        B.add(g)
    return B.reduce(v)


class Reducer:
    """Reusable normal-form engine over a fixed Groebner basis."""

    def __init__(self, basis: Sequence[dict], ring: PolyRing):
        self._b = _Basis(ring)
        for g in basis:
            self._b.add(g)

    def __call__(self, v: dict) -> dict:
        return self._b.reduce(v)

    def is_member(self, v: dict) -> bool:
        return not self._b.reduce(v)


def poly_to_vec(f: Polynomial, pos: int = 0) -> dict:
    return {(pos, e): c for e, c in f.terms}


def vec_to_poly(v: dict, ring: PolyRing, pos: int = 0) -> Polynomial:
    return Polynomial(ring, {e: c for (p, e), c in v.items() if p == pos}, _trusted=True)


# ------------------------------------------------------------------ ideals

class Ideal:
    """An ideal given by generators, with a write-once reduced Groebner basis."""

    def __init__(self, ring: PolyRing, generators: Iterable = ()):
        gens = []
        for g in generators:
            g = ring(g)
            if g.ring != ring:
                raise RingMismatchError(f"{g.ring} vs {ring}")
            if g:
                gens.append(g)
        self.ring = ring
        self.generators = tuple(gens)
        self._gb = None
        self._reducer = None
        self._lock = threading.Lock()

    @property
    def gb(self) -> tuple:
        if self._gb is None:
            with self._lock:
                if self._gb is None:
                    vs = vec_groebner((poly_to_vec(g) for g in self.generators), self.ring, rank_one=True)
                    self._gb = tuple(vec_to_poly(v, self.ring) for v in vs)
        return self._gb

    def reduce(self, f: Polynomial) -> Polynomial:
        if self._reducer is None:
            self._reducer = Reducer([poly_to_vec(g) for g in self.gb], self.ring)
        return vec_to_poly(self._reducer(poly_to_vec(f)), self.ring)

    def contains_poly(self, f) -> bool:
        f = self.ring(f)
        return f.is_zero() or self.reduce(f).is_zero()

    def is_unit(self) -> bool:
        return any(g.is_constant() for g in self.gb)

    def is_zero(self) -> bool:
        return not self.generators

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.ring == other.ring and self.gb == other.gb

    def __hash__(self):
        return hash((self.ring, self.gb))

    def __add__(self, other: "Ideal") -> "Ideal":
        _same_ring(self, other)
        return Ideal(self.ring, self.generators + other.generators)

    def __mul__(self, other: "Ideal") -> "Ideal":
        _same_ring(self, other)
        return Ideal(self.ring, [a * b for a in self.generators for b in other.generators])

    def power(self, k: int) -> "Ideal":
        out = Ideal(self.ring, [self.ring.one()])
        for _ in range(k):
            out = out * self
        return out

    def __str__(self):
        return "(" + ", ".join(str(g) for g in self.generators) + ")"

    def __repr__(self):
        return f"Ideal{self}"


def _same_ring(I: Ideal, J: Ideal):
    if I.ring != J.ring:
        raise RingMismatchError(f"{I.ring} vs {J.ring}")


def groebner_basis(I: Ideal) -> list:
    return list(I.gb)


def ideal_contains(I: Ideal, J: Ideal) -> bool:
    """True iff J is contained in I."""
    _same_ring(I, J)
    return all(I.contains_poly(g) for g in J.generators)


def _eliminate(ring: PolyRing, ext: PolyRing, polys) -> list:
    gb = vec_groebner((poly_to_vec(p) for p in polys), ext, rank_one=True)
    k = ext.nvars - ring.nvars
    out = []
    for v in gb:
        if all(not any(e[:k]) for (_, e) in v):
            out.append(ring.contract(vec_to_poly(v, ext), ext))
    return out


def _fresh(ring: PolyRing, base: str) -> str:
    name = base
    while name in ring.variables:
        name += "_"
    return name


def ideal_intersect(I: Ideal, J: Ideal) -> Ideal:
    """I ∩ J by eliminating a tag variable t from t*I + (1 - t)*J."""
    _same_ring(I, J)
    ring = I.ring
    ext = ring.extend([_fresh(ring, "t")])
    t = ext.var(ext.variables[0])
    polys = [t * ring.embed(f, ext) for f in I.generators]
    polys += [(1 - t) * ring.embed(g, ext) for g in J.generators]
    return Ideal(ring, _eliminate(ring, ext, polys))


def ideal_quotient(I: Ideal, f: Polynomial) -> Ideal:
    """(I : f)."""
    f = I.ring(f)
    if f.is_zero():
        return Ideal(I.ring, [I.ring.one()])
    inter = ideal_intersect(I, Ideal(I.ring, [f]))
    gens = []
    for g in inter.generators:
        q = divide_exact(g, f)
        if q is None:  # pragma: no cover - impossible for g in (f)
            raise ArithmeticError("intersection generator not divisible by f")
        gens.append(q)
    return Ideal(I.ring, gens)


def saturate(I: Ideal, f: Polynomial, method: str = "rabinowitsch") -> Ideal:
    """(I : f^∞) by elimination from I + (y f - 1), or by iterated quotients."""
    ring = I.ring
    f = ring(f)
    if f.is_zero():
        raise ValueError("cannot saturate by the zero polynomial")
    if method == "rabinowitsch":
        ext = ring.extend([_fresh(ring, "y")])
        y = ext.var(ext.variables[0])
        polys = [ring.embed(g, ext) for g in I.generators]
        polys.append(y * ring.embed(f, ext) - 1)
        return Ideal(ring, _eliminate(ring, ext, polys))
    if method == "iterated":
        cur = I
        while True:
            nxt = ideal_quotient(cur, f)
            if nxt == cur:
                return Ideal(ring, nxt.gb)
            cur = nxt
    raise ValueError(f"unknown saturation method {method!r}")


def radical_membership(f: Polynomial, I: Ideal) -> bool:
    ring = I.ring
    f = ring(f)
    ext = ring.extend([_fresh(ring, "y")])
    y = ext.var(ext.variables[0])
    polys = [ring.embed(g, ext) for g in I.generators]
    polys.append(y * ring.embed(f, ext) - 1)
    J = Ideal(ext, polys)
    return J.is_unit()


def independent_sets(I: Ideal) -> list:
    """Variable subsets (as sorted index tuples) independent modulo in(I)."""
    leads = [g.lead_monomial for g in I.gb]
    n = I.ring.nvars
    out = []
    for r in range(n, -1, -1):
        for S in itertools.combinations(range(n), r):
            Sset = set(S)
            if all(any(x and i not in Sset for i, x in enumerate(m)) for m in leads):
                out.append(S)
    return out


def krull_dim(I: Ideal) -> int:
    """dim R/I as the largest variable set independent modulo the initial ideal."""
    if I.is_unit():
        raise ValueError("unit ideal has empty spectrum")
    sets = independent_sets(I)
    return max(len(S) for S in sets)
