"""Local cohomology of squarefree monomial ideals on R and R/J.

The Čech complex of ``M = R/J`` with respect to squarefree monomials is
Z^n-graded and, in each degree, every term is either zero or one copy of
the field.  Which terms survive depends only on the sign pattern of the
degree, with three signs per variable: negative, zero, positive.  So the
cohomology is decided by 3^n small complexes of scalars.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from .fpmod import FPModule
from .groebner import Ideal, krull_dim
from .homalg import gamma_torsion
from .polyring import CoefficientField, PolyRing

__all__ = [
    "OutOfScopeError",
    "SquarefreeMonomialIdeal",
    "cech_cohomology_nonzero",
    "cech_pattern_dims",
    "cohomological_dimension",
    "local_cohomology_degrees",
    "grothendieck_bound_check",
    "MayerVietorisReport",
    "mayer_vietoris_clopen_check",
    "ALL_VANISH",
]

ALL_VANISH = -math.inf


class OutOfScopeError(ValueError):
    """Input outside the squarefree monomial class."""


@dataclass(frozen=True)
class SquarefreeMonomialIdeal:
    """Generators are variable-index sets; the unit ideal is ``[frozenset()]``."""

    ring: PolyRing
    generators: tuple

    def __post_init__(self):
        gens = [frozenset(g) for g in self.generators]
        n = self.ring.nvars
        for g in gens:
            if any(not 0 <= v < n for v in g):
                raise OutOfScopeError(f"variable index out of range in {sorted(g)}")
        if frozenset() in gens:
            gens = [frozenset()]
        mins = []
        for g in sorted(set(gens), key=lambda s: (len(s), sorted(s))):
            if not any(h <= g for h in mins):
                mins.append(g)
        object.__setattr__(self, "generators", tuple(mins))

    @classmethod
    def from_polys(cls, ring: PolyRing, polys: Iterable) -> "SquarefreeMonomialIdeal":
        gens = []
        for f in polys:
            f = ring(f)
            if not f:
                continue
            if len(f.terms) != 1:
                raise OutOfScopeError(f"{f} is not a monomial; general ideals are out of computable scope")
            e, _ = f.terms[0]
            if any(x > 1 for x in e):
                raise OutOfScopeError(f"{f} is not squarefree")
            gens.append(frozenset(i for i, x in enumerate(e) if x))
        return cls(ring, tuple(gens))

    @classmethod
    def from_ideal(cls, I: Ideal) -> "SquarefreeMonomialIdeal":
        return cls.from_polys(I.ring, I.generators)

    @property
    def is_unit(self) -> bool:
        return self.generators == (frozenset(),)

    @property
    def is_zero(self) -> bool:
        return not self.generators

    def monomials(self) -> list:
        n = self.ring.nvars
        return [self.ring.monomial(tuple(1 if i in g else 0 for i in range(n))) for g in self.generators]

    def to_ideal(self) -> Ideal:
        return Ideal(self.ring, self.monomials())

    def contains_set(self, s: frozenset) -> bool:
        """Is the squarefree monomial x^s in the ideal?"""
        return any(g <= s for g in self.generators)

    def __str__(self):
        return "(" + ", ".join(str(m) for m in self.monomials()) + ")"


MonomialModule = Union[None, SquarefreeMonomialIdeal, FPModule]


def _field_rank(rows: list, F: CoefficientField) -> int:
    a = [[F.reduce(x) for x in r] for r in rows]
    rank = 0
    ncols = len(a[0]) if a else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = F.inv(a[rank][c])
        for i in range(len(a)):
            if i != rank and a[i][c]:
                s = F.reduce(a[i][c] * inv)
                a[i] = [F.reduce(x - s * y) for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


def _pattern_complex_dims(gens: Sequence[frozenset], J: SquarefreeMonomialIdeal | None, neg: frozenset,
                          pos: frozenset, F: CoefficientField) -> list:
    """Cohomology dimensions of the Čech complex in one sign pattern."""
    k = len(gens)
    subsets = [list(itertools.combinations(range(k), i)) for i in range(k + 1)]

    def alive(S):
        U = frozenset().union(*(gens[l] for l in S)) if S else frozenset()
        if not neg <= U:
            return False
        return J is None or not J.contains_set(pos | U)

    live = [[S for S in subsets[i] if alive(S)] for i in range(k + 1)]
    index = [{S: j for j, S in enumerate(L)} for L in live]
    ranks = []
    for i in range(k):
        src, tgt = live[i], live[i + 1]
        if not src or not tgt:
            ranks.append(0)
            continue
        mat = [[0] * len(src) for _ in tgt]
        for c, S in enumerate(src):
            for l in range(k):
                if l in S:
                    continue
                T = tuple(sorted(S + (l,)))
                r = index[i + 1].get(T)
                if r is not None:
                    mat[r][c] = -1 if sum(1 for s in S if s < l) % 2 else 1
        ranks.append(_field_rank(mat, F))
    dims = []
    for i in range(k + 1):
        r_out = ranks[i] if i < k else 0
        r_in = ranks[i - 1] if i > 0 else 0
        dims.append(len(live[i]) - r_out - r_in)
    return dims


def cech_pattern_dims(gens: Sequence[frozenset], J: SquarefreeMonomialIdeal | None, n: int,
                      F: CoefficientField) -> dict:
    """Map sign pattern -> cohomology dimensions, for an explicit generator list.

    A pattern is a tuple over {-1, 0, 1}.  The generator list may be redundant
    and may contain the empty set (the monomial 1).
    """
    out = {}
    for sig in itertools.product((-1, 0, 1), repeat=n):
        neg = frozenset(i for i, s in enumerate(sig) if s < 0)
        pos = frozenset(i for i, s in enumerate(sig) if s > 0)
        out[sig] = _pattern_complex_dims(list(gens), J, neg, pos, F)
    return out


def _as_squarefree_quotient(M: FPModule) -> SquarefreeMonomialIdeal | None:
    P = M.presentation
    if P.rows != 1:
        return None
    try:
        return SquarefreeMonomialIdeal.from_polys(M.ring, P.entries[0])
    except OutOfScopeError:
        return None


def _resolve_module(a: SquarefreeMonomialIdeal, M: MonomialModule):
    if M is None:
        return None, None
    if isinstance(M, SquarefreeMonomialIdeal):
        if M.ring != a.ring:
            raise ValueError("ideal and module live over different rings")
        return M, None
    if isinstance(M, FPModule):
        return _as_squarefree_quotient(M), M
    raise TypeError(f"unsupported module description {M!r}")


def local_cohomology_degrees(a: SquarefreeMonomialIdeal, M: MonomialModule = None) -> list:
    """Indices i with H^i_a(M) != 0."""
    J, fp = _resolve_module(a, M)
    if J is None and fp is not None:
        raise OutOfScopeError("local cohomology beyond Γ needs M = R or R/J with J squarefree monomial")
    if J is not None and J.is_unit:
        return []
    n = a.ring.nvars
    k = len(a.generators)
    hit = [False] * (k + 1)
    for dims in cech_pattern_dims(a.generators, J, n, a.ring.field).values():
        for i, d in enumerate(dims):
            if d:
                hit[i] = True
    degs = [i for i in range(k + 1) if hit[i]]
    if fp is not None:
        gamma_nz = not gamma_torsion(a.to_ideal(), fp).is_zero()
        if gamma_nz != (0 in degs):
            raise RuntimeError("Γ via torsion and via the Čech complex disagree")
    return degs


def cech_cohomology_nonzero(a: SquarefreeMonomialIdeal, M: MonomialModule, i: int) -> bool:
    """Is H^i_a(M) nonzero?  M is None for R, a squarefree J for R/J, or an FPModule."""
    if isinstance(M, FPModule) and i == 0:
        J = _as_squarefree_quotient(M)
        gamma_nz = not gamma_torsion(a.to_ideal(), M).is_zero()
        if J is not None and gamma_nz != (0 in local_cohomology_degrees(a, J)):
            raise RuntimeError("Γ via torsion and via the Čech complex disagree")
        return gamma_nz
    if i < 0 or i > len(a.generators):
        return False
    return i in local_cohomology_degrees(a, M)


def cohomological_dimension(a: SquarefreeMonomialIdeal, M: MonomialModule = None) -> float:
    degs = local_cohomology_degrees(a, M)
    return max(degs) if degs else ALL_VANISH


def _module_dim(ring: PolyRing, M: MonomialModule) -> float:
    if M is None:
        return ring.nvars
    if isinstance(M, SquarefreeMonomialIdeal):
        if M.is_unit:
            return -math.inf
        return krull_dim(M.to_ideal()) if not M.is_zero else ring.nvars
    raise OutOfScopeError("dimension needs M = R or R/J")


def grothendieck_bound_check(a: SquarefreeMonomialIdeal, M: MonomialModule = None) -> bool:
    """cd(a, M) <= dim M."""
    J, _ = _resolve_module(a, M)
    if J is None and M is not None:
        raise OutOfScopeError("the bound check needs M = R or R/J")
    return cohomological_dimension(a, J) <= _module_dim(a.ring, J)


@dataclass(frozen=True)
class MayerVietorisReport:
    hypotheses_hold: bool
    passed: bool
    reason: str = ""
    failures: tuple = field(default_factory=tuple)


def mayer_vietoris_clopen_check(a: SquarefreeMonomialIdeal, b: SquarefreeMonomialIdeal,
                                corpus: Sequence[SquarefreeMonomialIdeal | None] = (None,)) -> MayerVietorisReport:
    """Check H^{>0}_a(R/J) = 0 when a + b = (1) and a ∩ b is nilpotent."""
    if a.ring != b.ring:
        raise ValueError("ideals live over different rings")
    A, B = a.to_ideal(), b.to_ideal()
    if not (A + B).is_unit():
        return MayerVietorisReport(False, False, "a + b is not the unit ideal")
    # R is reduced, so a ∩ b nilpotent means a ∩ b = 0; for monomial ideals that is ab = 0
    if not (A * B).is_zero():
        return MayerVietorisReport(False, False, "a ∩ b is not nilpotent")
    bad = []
    for J in corpus:
        degs = local_cohomology_degrees(a, J)
        if any(i > 0 for i in degs):
            bad.append((str(J) if J is not None else "R", degs))
    return MayerVietorisReport(True, not bad, "", tuple(bad))
