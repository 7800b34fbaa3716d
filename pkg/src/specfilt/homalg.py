"""Complexes of finitely presented modules, Ext, Tor, grade and torsion.

Indexing is cohomological throughout.  A map ``d^i`` goes from the
generators of ``X^i`` to the generators of ``X^{i+1}``.  Tor is computed
as the cohomology of ``F ⊗ N`` with ``F_k`` sitting in degree ``-k``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

from .fpmod import (
    DEFAULT_RESOLUTION_BOUND,
    FPModule,
    FreeResolution,
    ModuleMap,
    ResolutionBoundError,
    _submodule_present,
    base_change,
    free_resolution,
    preimage,
)
from .groebner import Ideal, Reducer, vec_groebner
from .polyring import Polynomial, PolyRing, RingMismatchError

__all__ = [
    "MalformedComplexError",
    "FPComplex",
    "Morphism",
    "ShortExactSequence",
    "cohomology",
    "ext",
    "tor",
    "grade",
    "grade_report",
    "GradeReport",
    "gamma_torsion",
    "koszul",
    "resolution",
    "hom_free_power",
]

GAMMA_POWER_BOUND = 64


class MalformedComplexError(ValueError):
    pass


def _in_span(ring: PolyRing, vecs: Sequence[dict], gens: Sequence[dict]) -> bool:
    if not vecs:
        return True
    red = Reducer(vec_groebner(gens, ring, rank_one=False), ring)
    return all(not red(v) for v in vecs)


def hom_free_power(N: FPModule, r: int) -> ModuleMap:
    """Presentation of N^r with generator (b, t) at index b*s + t."""
    s = N.ngens
    cols = []
    for b in range(r):
        for c in N.presentation.columns:
            cols.append({(p + b * s, e): v for (p, e), v in c.items()})
    return ModuleMap.from_columns(N.ring, r * s, cols)


def _cohomology_at(ring, n_i, P_i, D_prev, D_i, n_next, P_next) -> FPModule:
    """ker(d^i)/im(d^{i-1}) given columns of the presentations and maps."""
    if n_i == 0:
        return FPModule.zero(ring)
    z = (0,) * ring.nvars
    one = ring.field.one
    if D_i is None or n_next == 0:
        Z = [{(j, z): one} for j in range(n_i)]
    else:
        Z = preimage(ring, n_next, D_i, P_next)
    B = list(D_prev or []) + list(P_i)
    H, _ = _submodule_present(ring, n_i, Z, B)
    return H.pruned


# ---------------------------------------------------------------- morphisms

@dataclass(frozen=True)
class Morphism:
    """A map of f.p. modules given on generators."""

    source: FPModule
    target: FPModule
    matrix: ModuleMap

    def __post_init__(self):
        if self.matrix.rows != self.target.ngens or self.matrix.cols != self.source.ngens:
            raise ValueError("matrix shape does not match the generator counts")

    @property
    def ring(self):
        return self.source.ring

    def is_well_defined(self) -> bool:
        imgs = [self.matrix.apply(c) for c in self.source.presentation.columns]
        return all(self.target.is_relation(v) for v in imgs)

    def kernel_gens(self) -> list:
        return preimage(self.ring, self.target.ngens, self.matrix.columns, self.target.presentation.columns)

    def kernel(self) -> FPModule:
        H, _ = _submodule_present(self.ring, self.source.ngens, self.kernel_gens(), self.source.presentation.columns)
        return H

    def image(self) -> FPModule:
        H, _ = _submodule_present(self.ring, self.target.ngens, self.matrix.columns, self.target.presentation.columns)
        return H

    def cokernel(self) -> FPModule:
        return FPModule(self.target.presentation.hstack(self.matrix))

    def is_injective(self) -> bool:
        return _in_span(self.ring, self.kernel_gens(), self.source.presentation.columns)

    def is_surjective(self) -> bool:
        z = (0,) * self.ring.nvars
        one = self.ring.field.one
        units = [{(j, z): one} for j in range(self.target.ngens)]
        return _in_span(self.ring, units, list(self.matrix.columns) + list(self.target.presentation.columns))

    def compose(self, other: "Morphism") -> "Morphism":
        """self ∘ other."""
        return Morphism(other.source, self.target, self.matrix @ other.matrix)

    def is_zero(self) -> bool:
        return all(self.target.is_relation(c) for c in self.matrix.columns)


@dataclass
class ShortExactSequence:
    """0 -> L --f--> M --g--> N -> 0 with a machine-checkable certificate."""

    f: Morphism
    g: Morphism
    origin: str = ""
    _certificate: dict | None = field(default=None, repr=False)

    @property
    def L(self) -> FPModule:
        return self.f.source

    @property
    def M(self) -> FPModule:
        return self.f.target

    @property
    def N(self) -> FPModule:
        return self.g.target

    def certificate(self) -> dict:
        if self._certificate is None:
            f, g = self.f, self.g
            cert = {
                "f_descends": f.is_well_defined(),
                "g_descends": g.is_well_defined(),
                "composite_zero": g.compose(f).is_zero(),
                "f_injective": f.is_injective(),
                "g_surjective": g.is_surjective(),
            }
            cert["exact_middle"] = _in_span(
                f.ring, g.kernel_gens(), list(f.matrix.columns) + list(self.M.presentation.columns))
            self._certificate = cert
        return self._certificate

    def is_exact(self) -> bool:
        return all(self.certificate().values())


# ---------------------------------------------------------------- complexes

class FPComplex:
    """A bounded complex; ``maps[i]`` is the matrix of d^i: X^i -> X^{i+1}."""

    def __init__(self, ring: PolyRing, terms: Mapping[int, FPModule], maps: Mapping[int, ModuleMap] | None = None,
                 validate: bool = True):
        self.ring = ring
        self.terms = {i: M for i, M in terms.items() if M.ngens > 0}
        maps = dict(maps or {})
        for i, M in self.terms.items():
            if M.ring != ring:
                raise RingMismatchError(f"term {i} lives over {M.ring}")
        self.maps = {}
        for i, A in maps.items():
            src, tgt = self.term(i), self.term(i + 1)
            if A.rows != tgt.ngens or A.cols != src.ngens:
                raise MalformedComplexError(
                    f"d^{i} has shape {A.rows}x{A.cols}, expected {tgt.ngens}x{src.ngens}")
            if src.ngens and tgt.ngens:
                self.maps[i] = A
        degs = sorted(self.terms)
        self.lo = degs[0] if degs else 0
        self.hi = degs[-1] if degs else -1
        if validate:
            self.validate()

    def term(self, i: int) -> FPModule:
        return self.terms.get(i) or FPModule.zero(self.ring)

    def differential(self, i: int) -> ModuleMap:
        A = self.maps.get(i)
        if A is None:
            A = ModuleMap(self.ring, self.term(i + 1).ngens, self.term(i).ngens)
        return A

    def validate(self) -> None:
        for i, A in self.maps.items():
            if not Morphism(self.term(i), self.term(i + 1), A).is_well_defined():
                raise MalformedComplexError(f"d^{i} does not descend to the presented modules")
            if i + 1 in self.maps:
                comp = self.maps[i + 1] @ A
                tgt = self.term(i + 2)
                if not all(tgt.is_relation(c) for c in comp.columns):
                    raise MalformedComplexError(f"d^{i + 1} ∘ d^{i} is not zero")

    def cohomology(self, i: int) -> FPModule:
        Xi = self.term(i)
        if Xi.ngens == 0:
            return FPModule.zero(self.ring)
        prev = self.maps.get(i - 1)
        cur = self.maps.get(i)
        nxt = self.term(i + 1)
        return _cohomology_at(self.ring, Xi.ngens, Xi.presentation.columns,
                              prev.columns if prev else None,
                              cur.columns if cur else None,
                              nxt.ngens, nxt.presentation.columns)

    def cycles(self, i: int) -> FPModule:
        """Z^i as a submodule of X^i."""
        Xi = self.term(i)
        cur = self.maps.get(i)
        if cur is None:
            return Xi
        nxt = self.term(i + 1)
        Z = preimage(self.ring, nxt.ngens, cur.columns, nxt.presentation.columns)
        H, _ = _submodule_present(self.ring, Xi.ngens, Z, Xi.presentation.columns)
        return H

    def cocycle_quotient(self, i: int) -> FPModule:
        """X^i / B^i."""
        Xi = self.term(i)
        prev = self.maps.get(i - 1)
        if prev is None:
            return Xi
        return FPModule(Xi.presentation.hstack(prev))

    def is_free(self) -> bool:
        return all(M.presentation.cols == 0 for M in self.terms.values())

    def shift_cohomology_range(self) -> range:
        return range(self.lo, self.hi + 1)

    @classmethod
    def stalk(cls, M: FPModule, degree: int = 0) -> "FPComplex":
        return cls(M.ring, {degree: M}, {})

    @classmethod
    def free_complex(cls, ring: PolyRing, lo: int, matrices: Sequence[ModuleMap]) -> "FPComplex":
        """Free complex R^{n_lo} -> R^{n_lo+1} -> ... from consecutive matrices."""
        if not matrices:
            raise MalformedComplexError("free_complex needs at least one matrix")
        ranks = [matrices[0].cols] + [A.rows for A in matrices]
        for k in range(1, len(matrices)):
            if matrices[k].cols != matrices[k - 1].rows:
                raise MalformedComplexError(f"matrix {k} does not compose with matrix {k - 1}")
        terms = {lo + k: FPModule.free(ring, r) for k, r in enumerate(ranks)}
        maps = {lo + k: A for k, A in enumerate(matrices)}
        return cls(ring, terms, maps)

    def __repr__(self):
        return f"FPComplex(lo={self.lo}, hi={self.hi}, ranks={[self.term(i).ngens for i in range(self.lo, self.hi + 1)]})"


def cohomology(X: FPComplex, i: int) -> FPModule:
    return X.cohomology(i)


# ------------------------------------------------------------- resolutions

_res_lock = threading.Lock()
_res_cache: dict = {}


def resolution(M: FPModule, length: int, bound: int = DEFAULT_RESOLUTION_BOUND) -> FreeResolution:
    """Memoized free resolution of at least the requested length."""
    if length > bound:
        raise ResolutionBoundError(f"resolution length {length} exceeds bound {bound}")
    key = (M.ring, M.presentation)
    with _res_lock:
        res = _res_cache.get(key)
    if res is not None and (res.complete or len(res) >= length):
        return res
    res = free_resolution(M, length, bound)
    with _res_lock:
        old = _res_cache.get(key)
        if old is None or len(old) < len(res) or res.complete:
            _res_cache[key] = res
    return res


def _check_pair(M: FPModule, N: FPModule):
    if M.ring != N.ring:
        raise RingMismatchError(f"{M.ring} vs {N.ring}")


_ext_cache: dict = {}


def ext(i: int, M: FPModule, N: FPModule, bound: int = DEFAULT_RESOLUTION_BOUND) -> FPModule:
    """Ext^i(M, N) as the i-th cohomology of Hom(F, N)."""
    _check_pair(M, N)
    if i < 0:
        return FPModule.zero(M.ring)
    key = (i, M.ring, M.presentation, N.presentation)
    hit = _ext_cache.get(key)
    if hit is not None:
        return hit
    res = resolution(M, i + 1, bound)
    s = N.ngens
    ring = M.ring
    r_i = res.rank(i)
    if r_i == 0 or s == 0:
        out = FPModule.zero(ring)
    else:
        P_i = hom_free_power(N, r_i).columns
        D_prev = res.differential(i).transpose().kron_identity(s).columns if i >= 1 else None
        r_next = res.rank(i + 1)
        D_i = res.differential(i + 1).transpose().kron_identity(s).columns if r_next else None
        P_next = hom_free_power(N, r_next).columns if r_next else []
        out = _cohomology_at(ring, r_i * s, P_i, D_prev, D_i, r_next * s, P_next)
    _ext_cache[key] = out
    return out


def tor(i: int, M: FPModule, N: FPModule, bound: int = DEFAULT_RESOLUTION_BOUND) -> FPModule:
    """Tor_i(M, N) as H_i(F ⊗ N)."""
    _check_pair(M, N)
    ring = M.ring
    if i < 0:
        return FPModule.zero(ring)
    res = resolution(M, i + 1, bound)
    s = N.ngens
    r_i = res.rank(i)
    if r_i == 0 or s == 0:
        return FPModule.zero(ring)
    P_i = hom_free_power(N, r_i).columns
    r_up = res.rank(i + 1)
    D_prev = res.differential(i + 1).kron_identity(s).columns if r_up else None
    r_down = res.rank(i - 1) if i >= 1 else 0
    D_i = res.differential(i).kron_identity(s).columns if r_down else None
    P_next = hom_free_power(N, r_down).columns if r_down else []
    return _cohomology_at(ring, r_i * s, P_i, D_prev, D_i, r_down * s, P_next)


def tor_complex(M: FPModule, N: FPModule, length: int) -> FPComplex:
    """F ⊗ N placed in degrees -length..0 (for inspection and tests)."""
    res = resolution(M, length)
    s = N.ngens
    terms = {-k: FPModule(hom_free_power(N, res.rank(k))) for k in range(length + 1)}
    maps = {-k: res.differential(k).kron_identity(s) for k in range(1, length + 1) if res.rank(k)}
    return FPComplex(M.ring, terms, maps, validate=False)


# ---------------------------------------------------------------- grade

@dataclass(frozen=True)
class GradeReport:
    value: float  # an int, or math.inf
    a_M_equals_M: bool


def grade_report(a: Ideal, M: FPModule) -> GradeReport:
    """Least i with Ext^i(R/a, M) != 0, probing 0 <= i <= dim R."""
    if a.ring != M.ring:
        raise RingMismatchError(f"{a.ring} vs {M.ring}")
    aM_eq_M = base_change(M, a).is_zero()
    if M.is_zero() or aM_eq_M:
        return GradeReport(math.inf, True)
    Ra = FPModule.cyclic(a)
    for i in range(M.ring.nvars + 1):
        if not ext(i, Ra, M).is_zero():
            return GradeReport(i, False)
    raise ArithmeticError("all Ext groups vanish although aM != M")  # pragma: no cover


def grade(a: Ideal, M: FPModule) -> float:
    return grade_report(a, M).value


# ---------------------------------------------------------------- torsion

def _annihilated_by(M: FPModule, gens: Sequence[Polynomial]) -> list:
    """Generators of {v : g v ∈ rel(M) for all g}, as vectors in R^r."""
    ring = M.ring
    r = M.ngens
    k = len(gens)
    z = (0,) * ring.nvars
    one = ring.field.one
    if k == 0:
        return [{(j, z): one} for j in range(r)]
    images = []
    for j in range(r):
        v = {}
        for l, g in enumerate(gens):
            for e, c in g.terms:
                v[(l * r + j, e)] = c
        images.append(v)
    rels = []
    for l in range(k):
        for c in M.presentation.columns:
            rels.append({(p + l * r, e): a for (p, e), a in c.items()})
    return preimage(ring, r * k, images, rels)


def gamma_torsion_gens(a: Ideal, M: FPModule) -> list:
    """Generators (in M's generator coordinates) of the a-power torsion."""
    if a.ring != M.ring:
        raise RingMismatchError(f"{a.ring} vs {M.ring}")
    gens = [g for g in a.generators if g]
    if a.is_unit():
        return []
    rels = M.presentation.columns
    prev = _annihilated_by(M, gens)
    for t in range(2, GAMMA_POWER_BOUND + 1):
        cur = _annihilated_by(M, [g ** t for g in gens])
        if _in_span(M.ring, cur, list(prev) + list(rels)):
            return prev
        prev = cur
    raise RuntimeError(f"torsion did not stabilize within t <= {GAMMA_POWER_BOUND}")


def gamma_torsion(a: Ideal, M: FPModule) -> FPModule:
    """Γ_a(M) = ∪_t (0 :_M a^t), presented on its own generators."""
    T = gamma_torsion_gens(a, M)
    H, _ = _submodule_present(M.ring, M.ngens, T, M.presentation.columns)
    return H


# ---------------------------------------------------------------- koszul

def koszul(xs: Sequence[Polynomial]) -> FPComplex:
    """Koszul cochain complex R -> R^n -> ... -> R in degrees 0..n."""
    if not xs:
        raise ValueError("koszul needs a nonempty sequence")
    ring = xs[0].ring
    for x in xs:
        if x.ring != ring:
            raise RingMismatchError("sequence elements live in different rings")
    n = len(xs)
    bases = [list(combinations(range(n), k)) for k in range(n + 1)]
    index = [{S: i for i, S in enumerate(b)} for b in bases]
    z = ring.zero()
    maps = {}
    for k in range(n):
        ent = [[z] * len(bases[k]) for _ in bases[k + 1]]
        for c, S in enumerate(bases[k]):
            for j in range(n):
                if j in S:
                    continue
                sign = (-1) ** sum(1 for s in S if s < j)
                T = tuple(sorted(S + (j,)))
                ent[index[k + 1][T]][c] = xs[j] if sign > 0 else -xs[j]
        maps[k] = ModuleMap(ring, len(bases[k + 1]), len(bases[k]), ent)
    terms = {k: FPModule.free(ring, len(bases[k])) for k in range(n + 1)}
    return FPComplex(ring, terms, maps)
