"""Finitely presented modules, syzygies and free resolutions.

A module is the cokernel of its presentation matrix.  Internally columns are
handled as vectors ``{(row, exponents): coeff}`` and fed to the module
Groebner engine.  Kernels are computed by eliminating the target block of
``[A ; I]`` in a position-over-term order.
"""

from __future__ import annotations

import itertools
from functools import cached_property
from typing import Sequence

from .groebner import Ideal, Reducer, vec_groebner
from .polyring import Polynomial, PolyRing, RingMismatchError, divide_exact

__all__ = [
    "ModuleMap",
    "FPModule",
    "FreeResolution",
    "ResolutionBoundError",
    "syzygy",
    "preimage",
    "free_resolution",
    "fitting_ideal_0",
    "base_change",
    "direct_sum",
    "determinant",
    "DEFAULT_RESOLUTION_BOUND",
]

DEFAULT_RESOLUTION_BOUND = 8


class ResolutionBoundError(ValueError):
    pass


# ----------------------------------------------------------- vector helpers

def _zero_exp(ring):
    return (0,) * ring.nvars


def _vec_add(a: dict, b: dict, F, scale=1) -> dict:
    out = dict(a)
    for m, c in b.items():
        v = F.reduce(out.get(m, 0) + scale * c)
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def _vec_mul_poly(v: dict, f: Polynomial, F) -> dict:
    out: dict = {}
    for (p, e), c in v.items():
        for e2, c2 in f.terms:
            ne = (p, tuple(x + y for x, y in zip(e, e2)))
            out[ne] = out.get(ne, 0) + c * c2
    res = {}
    for m, c in out.items():
        c = F.reduce(c)
        if c:
            res[m] = c
    return res


def _shift(v: dict, d: int) -> dict:
    return {(p + d, e): c for (p, e), c in v.items()}


# ---------------------------------------------------------------- matrices

class ModuleMap:
    """A ``rows x cols`` polynomial matrix, i.e. a map R^cols -> R^rows."""

    __slots__ = ("ring", "rows", "cols", "entries", "__dict__")

    def __init__(self, ring: PolyRing, rows: int, cols: int, entries=None):
        self.ring = ring
        self.rows = rows
        self.cols = cols
        if entries is None:
            z = ring.zero()
            entries = [[z] * cols for _ in range(rows)]
        ent = tuple(tuple(ring(x) for x in row) for row in entries)
        if len(ent) != rows or any(len(r) != cols for r in ent):
            raise ValueError(f"entries do not form a {rows}x{cols} matrix")
        for row in ent:
            for x in row:
                if x.ring != ring:
                    raise RingMismatchError(f"{x.ring} vs {ring}")
        self.entries = ent

    @classmethod
    def from_rows(cls, ring: PolyRing, rows: Sequence[Sequence], cols: int | None = None) -> "ModuleMap":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(ring, len(rows), cols, rows)

    @classmethod
    def from_columns(cls, ring: PolyRing, rows: int, columns: Sequence[dict]) -> "ModuleMap":
        ent = [[dict() for _ in columns] for _ in range(rows)]
        for j, v in enumerate(columns):
            for (p, e), c in v.items():
                ent[p][j][e] = c
        polys = [[Polynomial(ring, d, _trusted=True) for d in r] for r in ent]
        return cls(ring, rows, len(columns), polys)

    @classmethod
    def identity(cls, ring: PolyRing, n: int) -> "ModuleMap":
        one, zero = ring.one(), ring.zero()
        return cls(ring, n, n, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, ring: PolyRing, rows: int, cols: int) -> "ModuleMap":
        return cls(ring, rows, cols)

    @cached_property
    def columns(self) -> list:
        out = []
        for j in range(self.cols):
            v = {}
            for i in range(self.rows):
                for e, c in self.entries[i][j].terms:
                    v[(i, e)] = c
            out.append(v)
        return out

    def column(self, j: int) -> dict:
        return self.columns[j]

    def is_zero(self) -> bool:
        return all(not x for row in self.entries for x in row)

    def __matmul__(self, other: "ModuleMap") -> "ModuleMap":
        if self.ring != other.ring:
            raise RingMismatchError(f"{self.ring} vs {other.ring}")
        if self.cols != other.rows:
            raise ValueError(f"cannot compose {self.rows}x{self.cols} with {other.rows}x{other.cols}")
        z = self.ring.zero()
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = z
                for k in range(self.cols):
                    a = self.entries[i][k]
                    if a:
                        b = other.entries[k][j]
                        if b:
                            acc = acc + a * b
                row.append(acc)
            out.append(row)
        return ModuleMap(self.ring, self.rows, other.cols, out)

    def apply(self, v: dict) -> dict:
        F = self.ring.field
        out: dict = {}
        for (p, e), c in v.items():
            f = Polynomial(self.ring, {e: c}, _trusted=True)
            out = _vec_add(out, _vec_mul_poly(self.columns[p], f, F), F)
        return out

    def transpose(self) -> "ModuleMap":
        return ModuleMap(self.ring, self.cols, self.rows, [list(r) for r in zip(*self.entries)] if self.rows and self.cols else [[self.ring.zero()] * self.rows for _ in range(self.cols)])

    def hstack(self, other: "ModuleMap") -> "ModuleMap":
        if self.rows != other.rows:
            raise ValueError("row counts differ")
        return ModuleMap(self.ring, self.rows, self.cols + other.cols,
                         [list(a) + list(b) for a, b in zip(self.entries, other.entries)])

    def block_diag(self, other: "ModuleMap") -> "ModuleMap":
        z = self.ring.zero()
        top = [list(r) + [z] * other.cols for r in self.entries]
        bot = [[z] * self.cols + list(r) for r in other.entries]
        return ModuleMap(self.ring, self.rows + other.rows, self.cols + other.cols, top + bot)

    def kron_identity(self, r: int) -> "ModuleMap":
        """``self ⊗ I_r`` with block index (i, t) -> i*r + t."""
        z = self.ring.zero()
        ent = [[z] * (self.cols * r) for _ in range(self.rows * r)]
        for i in range(self.rows):
            for j in range(self.cols):
                a = self.entries[i][j]
                if a:
                    for t in range(r):
                        ent[i * r + t][j * r + t] = a
        return ModuleMap(self.ring, self.rows * r, self.cols * r, ent)

    def select_columns(self, idx: Sequence[int]) -> "ModuleMap":
        return ModuleMap(self.ring, self.rows, len(idx), [[row[j] for j in idx] for row in self.entries])

    def reduce_mod(self, I: Ideal) -> "ModuleMap":
        return ModuleMap(self.ring, self.rows, self.cols, [[I.reduce(x) for x in row] for row in self.entries])

    def to_lists(self) -> list:
        return [[str(x) for x in row] for row in self.entries]

    def __eq__(self, other):
        if not isinstance(other, ModuleMap):
            return NotImplemented
        return (self.ring, self.rows, self.cols, self.entries) == (other.ring, other.rows, other.cols, other.entries)

    def __hash__(self):
        return hash((self.ring, self.rows, self.cols, self.entries))

    def __repr__(self):
        return f"ModuleMap({self.rows}x{self.cols}, {self.to_lists()})"


# ---------------------------------------------------------------- kernels

def preimage(ring: PolyRing, target_rank: int, images: Sequence[dict], relations: Sequence[dict] = ()) -> list:
    """Generators of {c in R^k : sum c_j images_j lies in span(relations)}.

    The answer is the part of a position-over-term Groebner basis of the
    vectors ``(images_j, e_j)`` and ``(relations_l, 0)`` living entirely in
    the last ``k`` positions.
    """
    k = len(images)
    if k == 0:
        return []
    t = target_rank
    one = ring.field.one
    z = _zero_exp(ring)
    vecs = []
    for j, v in enumerate(images):
        w = dict(v)
        w[(t + j, z)] = one
        vecs.append(w)
    vecs.extend(dict(r) for r in relations if r)
    G = vec_groebner(vecs, ring, rank_one=False)
    out = []
    for g in G:
        if min(p for p, _ in g) >= t:
            out.append(_shift(g, -t))
    return out


def syzygy(A: ModuleMap) -> ModuleMap:
    """Columns generating ker(A) in R^cols."""
    return ModuleMap.from_columns(A.ring, A.cols, preimage(A.ring, A.rows, A.columns))


def _prune(rows: int, cols: list, F, zero_exp) -> tuple:
    """Remove unit entries of a presentation.

    Returns ``(kept_rows, columns)`` where ``kept_rows`` lists the surviving
    original row indices and columns are re-indexed onto them.
    """
    cols = [dict(c) for c in cols if c]
    alive = list(range(rows))
    while True:
        pivot = None
        for j, c in enumerate(cols):
            for i in sorted({p for p, _ in c}):
                if (i, zero_exp) in c and all(p != i or e == zero_exp for p, e in c):
                    pivot = (i, j)
                    break
            if pivot:
                break
        if pivot is None:
            break
        i, j = pivot
        pc = cols[j]
        u = pc[(i, zero_exp)]
        new = []
        for k, c in enumerate(cols):
            if k == j:
                continue
            entry = {e: a for (p, e), a in c.items() if p == i}
            if entry:
                for e, a in entry.items():
                    s = F.div(a, u)
                    shifted = {(p, tuple(x + y for x, y in zip(e2, e))): b for (p, e2), b in pc.items()}
                    c = _vec_add(c, shifted, F, -s)
            if c:
                new.append(c)
        cols = new
        alive.remove(i)
    remap = {old: n for n, old in enumerate(alive)}
    out = []
    seen = set()
    for c in cols:
        c2 = {(remap[p], e): a for (p, e), a in c.items()}
        key = tuple(sorted(c2.items()))
        if c2 and key not in seen:
            seen.add(key)
            out.append(c2)
    return alive, out


# ---------------------------------------------------------------- modules

class FPModule:
    """Cokernel of ``presentation``: R^cols -> R^rows."""

    def __init__(self, presentation: ModuleMap):
        self.presentation = presentation
        self.ring = presentation.ring

    @classmethod
    def free(cls, ring: PolyRing, rank: int) -> "FPModule":
        return cls(ModuleMap(ring, rank, 0))

    @classmethod
    def zero(cls, ring: PolyRing) -> "FPModule":
        return cls(ModuleMap(ring, 0, 0))

    @classmethod
    def cyclic(cls, I: Ideal) -> "FPModule":
        """R/I."""
        return cls(ModuleMap(I.ring, 1, len(I.generators), [list(I.generators)]))

    @classmethod
    def coker(cls, ring: PolyRing, rows: Sequence[Sequence]) -> "FPModule":
        return cls(ModuleMap.from_rows(ring, rows))

    @property
    def ngens(self) -> int:
        return self.presentation.rows

    @cached_property
    def relation_basis(self) -> list:
        return vec_groebner(self.presentation.columns, self.ring, rank_one=False)

    @cached_property
    def _reducer(self) -> Reducer:
        return Reducer(self.relation_basis, self.ring)

    def reduce(self, v: dict) -> dict:
        return self._reducer(v)

    def is_relation(self, v: dict) -> bool:
        return not self._reducer(v)

    def is_zero(self) -> bool:
        """M = 0 iff the relations span every coordinate vector."""
        z = _zero_exp(self.ring)
        units = set()
        for g in self.relation_basis:
            lead = max(g, key=lambda m: (-m[0], self.ring.key(m[1])))
            if lead[1] == z:
                units.add(lead[0])
        return len(units) == self.ngens

    @cached_property
    def pruned(self) -> "FPModule":
        P = self.presentation
        F = self.ring.field
        alive, cols = _prune(P.rows, P.columns, F, _zero_exp(self.ring))
        return FPModule(ModuleMap.from_columns(self.ring, len(alive), cols))

    @cached_property
    def key(self) -> tuple:
        P = self.pruned.presentation
        return (P.rows, tuple(tuple(str(x) for x in row) for row in P.entries))

    def __eq__(self, other):
        if not isinstance(other, FPModule):
            return NotImplemented
        return self.ring == other.ring and self.presentation == other.presentation

    def __hash__(self):
        return hash((self.ring, self.presentation))

    def __repr__(self):
        return f"FPModule(coker {self.presentation.to_lists()})"


def _submodule_present(ring: PolyRing, rank: int, gens: Sequence[dict], relations: Sequence[dict]) -> tuple:
    """Presentation of (span gens + span relations) / span relations.

    Returns the module and the list of generator vectors that survive
    (generators already in span(relations) are dropped).
    """
    red = Reducer(vec_groebner(relations, ring, rank_one=False), ring) if relations else None
    kept = []
    for g in gens:
        r = red(g) if red else dict(g)
        if r:
            kept.append(r)
    rels = preimage(ring, rank, kept, relations) if kept else []
    return FPModule(ModuleMap.from_columns(ring, len(kept), rels)), kept


def direct_sum(M: FPModule, N: FPModule) -> FPModule:
    if M.ring != N.ring:
        raise RingMismatchError(f"{M.ring} vs {N.ring}")
    return FPModule(M.presentation.block_diag(N.presentation))


def base_change(M: FPModule, I: Ideal) -> FPModule:
    """M ⊗ R/I."""
    if M.ring != I.ring:
        raise RingMismatchError(f"{M.ring} vs {I.ring}")
    P = M.presentation
    r = M.ngens
    z = M.ring.zero()
    for g in I.generators:
        P = P.hstack(ModuleMap(M.ring, r, r, [[g if i == j else z for j in range(r)] for i in range(r)]))
    return FPModule(P)


# ------------------------------------------------------------- resolutions

class FreeResolution(list):
    """The maps [d_1, d_2, ...] with d_k: F_k -> F_{k-1}; ``ranks[k]`` = rank F_k."""

    def __init__(self, ring: PolyRing, ranks: list, maps: list, complete: bool):
        super().__init__(maps)
        self.ring = ring
        self.ranks = ranks
        self.complete = complete  # True if the next syzygy module is zero

    @property
    def maps(self) -> list:
        return list(self)

    def differential(self, k: int) -> ModuleMap:
        """d_k: F_k -> F_{k-1}; zero maps outside the computed range."""
        if 1 <= k <= len(self):
            return self[k - 1]
        return ModuleMap(self.ring, self.rank(k - 1), self.rank(k))

    def rank(self, k: int) -> int:
        if 0 <= k < len(self.ranks):
            return self.ranks[k]
        return 0

    def __repr__(self):
        return f"FreeResolution(ranks={self.ranks})"


def free_resolution(M: FPModule, length: int, bound: int = DEFAULT_RESOLUTION_BOUND) -> FreeResolution:
    """Free resolution up to F_length; unit entries are pruned at each step."""
    if length > bound:
        raise ResolutionBoundError(f"resolution length {length} exceeds bound {bound}")
    ring = M.ring
    F = ring.field
    z = _zero_exp(ring)
    P = M.presentation
    alive, cols = _prune(P.rows, P.columns, F, z)
    ranks = [len(alive)]
    maps_cols = []  # list of (rows, columns)
    if length >= 1:
        ranks.append(len(cols))
        maps_cols.append(cols)
    complete = not cols
    k = 1
    while k < length and not complete:
        prev = maps_cols[-1]
        S = preimage(ring, ranks[-2], prev)
        alive, S = _prune(ranks[-1], S, F, z)
        if len(alive) != ranks[-1]:
            keep = set(alive)
            maps_cols[-1] = [c for j, c in enumerate(prev) if j in keep]
            ranks[-1] = len(alive)
        ranks.append(len(S))
        maps_cols.append(S)
        complete = not S
        k += 1
    if ranks and ranks[-1] == 0 and len(ranks) > 1:
        ranks.pop()
        maps_cols.pop()
        complete = True
    maps = [ModuleMap.from_columns(ring, ranks[i], c) for i, c in enumerate(maps_cols)]
    return FreeResolution(ring, ranks, maps, complete)


# ---------------------------------------------------------------- fitting

def determinant(rows: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Fraction-free (Bareiss) determinant with exact polynomial division."""
    n = len(rows)
    if n == 0:
        raise ValueError("empty matrix")
    ring = rows[0][0].ring
    a = [list(r) for r in rows]
    sign = 1
    prev = ring.one()
    for k in range(n - 1):
        if not a[k][k]:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return ring.zero()
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[k][k] * a[i][j] - a[i][k] * a[k][j]
                q = divide_exact(num, prev)
                if q is None:  # pragma: no cover - Sylvester identity guarantees exactness
                    raise ArithmeticError("Bareiss division was not exact")
                a[i][j] = q
        prev = a[k][k]
    d = a[n - 1][n - 1]
    return d if sign > 0 else -d


def fitting_ideal_0(M: FPModule) -> Ideal:
    """Ideal of maximal (rows x rows) minors of the presentation."""
    N = M.pruned
    P = N.presentation
    ring = M.ring
    r, s = P.rows, P.cols
    if r == 0:
        return Ideal(ring, [ring.one()])
    if s < r:
        return Ideal(ring, [])
    minors = []
    for cols in itertools.combinations(range(s), r):
        sub = [[P.entries[i][j] for j in cols] for i in range(r)]
        d = determinant(sub)
        if d:
            minors.append(d)
    return Ideal(ring, minors)
