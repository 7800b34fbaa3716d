"""Finite prime catalogs, Bass numbers, associated primes and supports.

Everything here is relative to a user-declared catalog of primes.  Primality
is trusted, not verified; reports carry that caveat.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

from .fpmod import FPModule, ModuleMap, fitting_ideal_0
from .groebner import Ideal, ideal_contains, krull_dim
from .homalg import FPComplex, ext
from .polyring import Polynomial, PolyRing, divide_exact

__all__ = [
    "CATALOG_BANNER",
    "CatalogError",
    "SupportOracleMismatch",
    "PrimeCatalog",
    "SpecSubset",
    "BassTable",
    "SubsetPredicates",
    "rank_over_domain",
    "bass_number",
    "bass_table",
    "ass_primes",
    "small_support",
    "fitting_support",
    "specialization_witness",
    "supp_complex",
    "subset_predicates",
    "restrict_at",
    "ind_artinian_check",
    "default_bass_bound",
]

CATALOG_BANNER = "catalog-relative: statements hold on the declared prime window only"


class CatalogError(ValueError):
    pass


class SupportOracleMismatch(RuntimeError):
    """The two support computations disagree; this is an engine bug."""


def default_bass_bound(ring: PolyRing) -> int:
    return ring.nvars + 2


# ---------------------------------------------------------------- catalog

class PrimeCatalog:
    def __init__(self, ring: PolyRing, primes: Sequence[Ideal], names: Sequence[str] | None = None):
        self.ring = ring
        self.primes = tuple(primes)
        if names is None:
            names = [str(p) for p in self.primes]
        self.names = tuple(names)
        if len(self.names) != len(self.primes):
            raise CatalogError("one name per prime is required")
        if len(set(self.names)) != len(self.names):
            raise CatalogError("prime names must be distinct")
        for nm, p in zip(self.names, self.primes):
            if p.ring != ring:
                raise CatalogError(f"prime {nm} lives over a different ring")
            if p.is_unit():
                raise CatalogError(f"prime {nm} is the unit ideal")
        n = len(self.primes)
        self.poset = tuple(tuple(ideal_contains(self.primes[j], self.primes[i]) for j in range(n)) for i in range(n))
        for i in range(n):
            for j in range(i + 1, n):
                if self.poset[i][j] and self.poset[j][i]:
                    raise CatalogError(f"primes {self.names[i]} and {self.names[j]} are equal")
        dims = [krull_dim(p) for p in self.primes]
        self.dims = tuple(dims)
        self.heights = tuple(ring.nvars - d for d in dims)
        self.max_flags = tuple(d == 0 for d in dims)
        for i in range(n):
            for j in range(n):
                if i != j and self.poset[i][j] and not self.heights[i] < self.heights[j]:
                    raise CatalogError(
                        f"{self.names[i]} ⊊ {self.names[j]} but heights are {self.heights[i]}, {self.heights[j]};"
                        " an entry is probably not prime")

    def __len__(self):
        return len(self.primes)

    def index(self, p) -> int:
        if isinstance(p, int):
            if 0 <= p < len(self):
                return p
            raise CatalogError(f"no catalog prime with index {p}")
        if isinstance(p, str):
            try:
                return self.names.index(p)
            except ValueError:
                raise CatalogError(f"{p} is not a catalog prime") from None
        for i, q in enumerate(self.primes):
            if q == p:
                return i
        raise CatalogError(f"{p} is not a catalog prime")

    def leq(self, i: int, j: int) -> bool:
        """p_i ⊆ p_j."""
        return self.poset[i][j]

    @property
    def full(self) -> "SpecSubset":
        return SpecSubset(self, (1 << len(self)) - 1)

    @property
    def empty(self) -> "SpecSubset":
        return SpecSubset(self, 0)

    @cached_property
    def dim(self) -> int:
        return self.ring.nvars

    def __repr__(self):
        return f"PrimeCatalog({list(self.names)})"


@dataclass(frozen=True)
class SpecSubset:
    """A subset of the catalog as a bitmask; ``form`` records a syntactic origin."""

    catalog: PrimeCatalog
    mask: int
    form: tuple | None = None

    def __post_init__(self):
        if self.mask < 0 or self.mask >> len(self.catalog):
            raise CatalogError("mask does not fit the catalog")

    @classmethod
    def from_indices(cls, cat: PrimeCatalog, idx: Iterable[int], form=None) -> "SpecSubset":
        m = 0
        for i in idx:
            m |= 1 << cat.index(i)
        return cls(cat, m, form)

    @classmethod
    def from_names(cls, cat: PrimeCatalog, names: Iterable[str]) -> "SpecSubset":
        return cls.from_indices(cat, [cat.index(n) for n in names])

    @classmethod
    def where(cls, cat: PrimeCatalog, pred: Callable[[int], bool], form=None) -> "SpecSubset":
        return cls.from_indices(cat, [i for i in range(len(cat)) if pred(i)], form)

    @classmethod
    def V(cls, cat: PrimeCatalog, I: Ideal) -> "SpecSubset":
        return cls.where(cat, lambda i: ideal_contains(cat.primes[i], I), ("V", tuple(I.generators)))

    @classmethod
    def D(cls, cat: PrimeCatalog, seq: Sequence[Polynomial]) -> "SpecSubset":
        """Complement of V(seq); the form marks it for the sequence rules."""
        I = Ideal(cat.ring, seq)
        return cls.where(cat, lambda i: not ideal_contains(cat.primes[i], I), ("D", tuple(seq)))

    @property
    def indices(self) -> list:
        return [i for i in range(len(self.catalog)) if self.mask >> i & 1]

    @property
    def names(self) -> list:
        return [self.catalog.names[i] for i in self.indices]

    def __contains__(self, i) -> bool:
        return bool(self.mask >> self.catalog.index(i) & 1)

    def __len__(self):
        return bin(self.mask).count("1")

    def _same(self, other):
        if other.catalog is not self.catalog:
            raise CatalogError("subsets belong to different catalogs")

    def complement(self) -> "SpecSubset":
        return SpecSubset(self.catalog, self.catalog.full.mask & ~self.mask)

    def __and__(self, other):
        self._same(other)
        return SpecSubset(self.catalog, self.mask & other.mask)

    def __or__(self, other):
        self._same(other)
        return SpecSubset(self.catalog, self.mask | other.mask)

    def __sub__(self, other):
        self._same(other)
        return SpecSubset(self.catalog, self.mask & ~other.mask)

    def issubset(self, other) -> bool:
        self._same(other)
        return self.mask & ~other.mask == 0

    def __eq__(self, other):
        if not isinstance(other, SpecSubset):
            return NotImplemented
        return self.catalog is other.catalog and self.mask == other.mask

    def __hash__(self):
        return hash((id(self.catalog), self.mask))

    def plain(self) -> "SpecSubset":
        return SpecSubset(self.catalog, self.mask)

    def __repr__(self):
        return "{" + ", ".join(self.names) + "}"


# ---------------------------------------------------------------- ranks

def rank_over_domain(A: ModuleMap, p: Ideal) -> int:
    """Rank of A over the fraction field of R/p, by cross-multiplying elimination."""
    rows = [[p.reduce(x) for x in row] for row in A.entries]
    nrows, ncols = A.rows, A.cols
    used = [False] * nrows
    rank = 0
    prev = None
    for j in range(ncols):
        piv = next((i for i in range(nrows) if not used[i] and rows[i][j]), None)
        if piv is None:
            continue
        used[piv] = True
        rank += 1
        a = rows[piv][j]
        for i in range(nrows):
            if used[i] or not rows[i][j]:
                continue
            b = rows[i][j]
            new = [p.reduce(a * rows[i][k] - b * rows[piv][k]) for k in range(ncols)]
            if prev is not None and not prev.is_constant():
                q = [divide_exact(x, prev) if x else x for x in new]
                if all(v is not None for v in q):
                    new = [p.reduce(v) for v in q]
            rows[i] = new
        prev = a
    return rank


# ---------------------------------------------------------------- Bass

def bass_number(i: int, p: Ideal, M: FPModule) -> int:
    """μ_i(p, M) = dim_κ(p) Ext^i(R/p, M)_p."""
    if i < 0:
        return 0
    E = ext(i, FPModule.cyclic(p), M)
    if E.ngens == 0:
        return 0
    return E.ngens - rank_over_domain(E.presentation, p)


class BassTable:
    """μ_i(p, M) for 0 <= i <= bound and every catalog prime."""

    def __init__(self, module: FPModule, catalog: PrimeCatalog, bound: int):
        self.module = module
        self.catalog = catalog
        self.bound = bound
        self.mu = tuple(tuple(bass_number(i, p, module) for p in catalog.primes) for i in range(bound + 1))

    def __call__(self, i: int, p) -> int:
        if i > self.bound:
            raise ValueError(f"degree {i} exceeds the Bass bound {self.bound}")
        return self.mu[i][self.catalog.index(p)]

    def column(self, p) -> list:
        j = self.catalog.index(p)
        return [row[j] for row in self.mu]

    def support_mask(self, upto: int | None = None) -> int:
        upto = self.bound if upto is None else upto
        m = 0
        for row in self.mu[: upto + 1]:
            for j, v in enumerate(row):
                if v:
                    m |= 1 << j
        return m

    def to_dict(self) -> dict:
        return {nm: self.column(j) for j, nm in enumerate(self.catalog.names)}


_bass_lock = threading.Lock()
_bass_cache: dict = {}


def bass_table(M: FPModule, cat: PrimeCatalog, bound: int | None = None) -> BassTable:
    bound = default_bass_bound(cat.ring) if bound is None else bound
    key = (cat, M.ring, M.presentation)
    with _bass_lock:
        t = _bass_cache.get(key)
    if t is not None and t.bound >= bound:
        return t if t.bound == bound else _truncate(t, bound)
    t = BassTable(M, cat, bound)
    with _bass_lock:
        old = _bass_cache.get(key)
        if old is None or old.bound < bound:
            _bass_cache[key] = t
    return t


def _truncate(t: BassTable, bound: int) -> BassTable:
    out = BassTable.__new__(BassTable)
    out.module, out.catalog, out.bound = t.module, t.catalog, bound
    out.mu = t.mu[: bound + 1]
    return out


def ass_primes(M: FPModule, cat: PrimeCatalog) -> SpecSubset:
    return SpecSubset.where(cat, lambda j: bass_number(0, cat.primes[j], M) > 0)


def fitting_support(M: FPModule, cat: PrimeCatalog) -> SpecSubset:
    """Catalog trace of V(F_0(M))."""
    F0 = fitting_ideal_0(M)
    return SpecSubset.where(cat, lambda j: ideal_contains(cat.primes[j], F0))


def small_support(M: FPModule, cat: PrimeCatalog, bound: int | None = None) -> SpecSubset:
    bound = default_bass_bound(cat.ring) if bound is None else bound
    if bound < cat.ring.nvars:
        raise ValueError(f"bound {bound} is below dim R = {cat.ring.nvars}")
    via_bass = SpecSubset(cat, bass_table(M, cat, bound).support_mask())
    via_fitting = fitting_support(M, cat)
    if via_bass != via_fitting:
        raise SupportOracleMismatch(f"Bass support {via_bass} differs from V(F_0) trace {via_fitting} for {M}")
    return via_bass


def _free_complex_support(X: FPComplex, cat: PrimeCatalog) -> SpecSubset:
    """Support of a complex of free modules from κ(p)-ranks of X ⊗ R/p."""
    def nonzero_at(j):
        p = cat.primes[j]
        for i in range(X.lo, X.hi + 1):
            n = X.term(i).ngens
            if not n:
                continue
            r_out = rank_over_domain(X.differential(i), p) if X.term(i + 1).ngens else 0
            r_in = rank_over_domain(X.differential(i - 1), p) if X.term(i - 1).ngens else 0
            if n - r_out - r_in > 0:
                return True
        return False

    return SpecSubset.where(cat, nonzero_at)


def supp_complex(X: FPComplex, cat: PrimeCatalog, bound: int | None = None) -> SpecSubset:
    """Union of the supports of the cohomology modules (bounded, f.g. cohomology)."""
    m = 0
    for i in range(X.lo, X.hi + 1):
        m |= small_support(X.cohomology(i), cat, bound).mask
    out = SpecSubset(cat, m)
    if X.is_free():
        other = _free_complex_support(X, cat)
        if other != out:
            raise SupportOracleMismatch(f"complex support {out} differs from κ(p)-rank support {other}")
    return out


# ---------------------------------------------------------------- predicates

@dataclass(frozen=True)
class SubsetPredicates:
    specialization_closed: bool
    generalization_closed: bool
    clopen_in_catalog: bool


def _spec_closed(mask: int, cat: PrimeCatalog) -> bool:
    n = len(cat)
    return all(not (mask >> i & 1) or (mask >> j & 1) for i in range(n) for j in range(n) if cat.leq(i, j))


def specialization_witness(phi: SpecSubset) -> tuple | None:
    """A pair (p in Φ, q ⊋ p with q not in Φ), or None."""
    cat = phi.catalog
    for i in phi.indices:
        for j in range(len(cat)):
            if i != j and cat.leq(i, j) and not phi.mask >> j & 1:
                return (cat.names[i], cat.names[j])
    return None


def subset_predicates(phi: SpecSubset) -> SubsetPredicates:
    cat = phi.catalog
    comp = phi.complement().mask
    sc = _spec_closed(phi.mask, cat)
    gc = _spec_closed(comp, cat)  # down-closed iff the complement is up-closed
    return SubsetPredicates(sc, gc, sc and gc)


def restrict_at(phi: SpecSubset, p) -> SpecSubset:
    cat = phi.catalog
    j = cat.index(p)
    return SpecSubset.where(cat, lambda i: bool(phi.mask >> i & 1) and cat.leq(i, j))


def ind_artinian_check(M: FPModule, cat: PrimeCatalog) -> bool:
    return all(cat.max_flags[j] for j in ass_primes(M, cat).indices)
