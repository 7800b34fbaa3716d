"""Generators of certified short exact sequences of f.p. modules.

Every generated sequence carries a certificate (maps descend, composite is
zero, injective on the left, exact in the middle, surjective on the right).
Sequences that fail certification are counted and dropped.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .fpmod import FPModule, ModuleMap, syzygy
from .groebner import Ideal, ideal_quotient
from .homalg import Morphism, ShortExactSequence
from .polyring import Polynomial, PolyRing

__all__ = [
    "split_sequence",
    "multiplication_sequence",
    "free_cokernel_sequence",
    "ideal_sequence",
    "extension_sequence",
    "SequenceChain",
    "sequence_corpus",
    "chain_corpus",
    "element_pool",
    "base_modules",
]


def _eye(ring, n):
    return ModuleMap.identity(ring, n)


def split_sequence(L: FPModule, N: FPModule) -> ShortExactSequence:
    ring = L.ring
    M = FPModule(L.presentation.block_diag(N.presentation))
    a, b = L.ngens, N.ngens
    z = ring.zero()
    f = ModuleMap(ring, a + b, a, [list(r) for r in _eye(ring, a).entries] + [[z] * a for _ in range(b)])
    g = ModuleMap(ring, b, a + b, [[z] * a + list(r) for r in _eye(ring, b).entries])
    return ShortExactSequence(Morphism(L, M, f), Morphism(M, N, g), "split")


def multiplication_sequence(J: Ideal, f: Polynomial) -> ShortExactSequence:
    """0 -> R/(J:f) --f--> R/J -> R/(J+f) -> 0."""
    ring = J.ring
    L = FPModule.cyclic(ideal_quotient(J, f))
    M = FPModule.cyclic(J)
    N = FPModule.cyclic(J + Ideal(ring, [f]))
    fm = ModuleMap(ring, 1, 1, [[f]])
    gm = ModuleMap(ring, 1, 1, [[ring.one()]])
    return ShortExactSequence(Morphism(L, M, fm), Morphism(M, N, gm), f"mult({f})")


def free_cokernel_sequence(A: ModuleMap) -> ShortExactSequence:
    """0 -> R^a --A--> R^b -> coker A -> 0 (certified only if A is injective)."""
    ring = A.ring
    L = FPModule.free(ring, A.cols)
    M = FPModule.free(ring, A.rows)
    N = FPModule(A)
    return ShortExactSequence(Morphism(L, M, A), Morphism(M, N, _eye(ring, A.rows)), "free-cokernel")


def ideal_sequence(I: Ideal) -> ShortExactSequence:
    """0 -> I -> R -> R/I -> 0 with I presented by its syzygies."""
    ring = I.ring
    gens = [g for g in I.generators if g]
    row = ModuleMap(ring, 1, len(gens), [gens])
    L = FPModule(syzygy(row))
    M = FPModule.free(ring, 1)
    N = FPModule.cyclic(I)
    return ShortExactSequence(Morphism(L, M, row), Morphism(M, N, _eye(ring, 1)), "ideal")


def extension_sequence(L: FPModule, N: FPModule, phi: ModuleMap) -> ShortExactSequence | None:
    """0 -> L -> E -> N -> 0 with E = coker [[P, phi], [0, Q]].

    phi maps the relation space of N to the generators of L; it defines an
    extension when phi kills the syzygies of Q modulo the relations of L.
    """
    ring = L.ring
    Q = N.presentation
    if phi.rows != L.ngens or phi.cols != Q.cols:
        raise ValueError("cocycle has the wrong shape")
    S = syzygy(Q)
    comp = phi @ S
    if not all(L.is_relation(c) for c in comp.columns):
        return None
    P = L.presentation
    a, b = L.ngens, N.ngens
    z = ring.zero()
    top = [list(P.entries[i]) + list(phi.entries[i]) for i in range(a)]
    bot = [[z] * P.cols + list(Q.entries[i]) for i in range(b)]
    E = FPModule(ModuleMap(ring, a + b, P.cols + Q.cols, top + bot))
    f = ModuleMap(ring, a + b, a, [list(r) for r in _eye(ring, a).entries] + [[z] * a for _ in range(b)])
    g = ModuleMap(ring, b, a + b, [[z] * a + list(r) for r in _eye(ring, b).entries])
    return ShortExactSequence(Morphism(L, E, f), Morphism(E, N, g), "extension")


# ---------------------------------------------------------------- corpora

def element_pool(ring: PolyRing) -> list:
    v = ring.gens()[:3]
    pool = list(v)
    for i in range(len(v)):
        pool.append(v[i] ** 2)
        pool.append(v[i] - 1)
        for j in range(i + 1, len(v)):
            pool.append(v[i] * v[j])
            pool.append(v[i] + v[j])
    return pool


def base_modules(ring: PolyRing) -> list:
    v = ring.gens()[:3]
    x = v[0]
    ideals = [[x], [x ** 2], [x - 1]]
    if len(v) > 1:
        y = v[1]
        ideals += [[y], [x, y], [x * y], [x, y ** 2], [x - 1, y], [x ** 2, x * y], [x * (x - 1), y]]
    mods = [FPModule.free(ring, 1)] + [FPModule.cyclic(Ideal(ring, g)) for g in ideals]
    if len(v) > 1:
        y = v[1]
        mods.append(FPModule.coker(ring, [[x, 0], [0, y]]))
        mods.append(FPModule.coker(ring, [[x, y], [0, x]]))
    return mods


@dataclass
class SequenceChain:
    """0 -> L_1 -> M_1 -> M_2 -> ... -> M_m -> N_m -> 0 spliced from short sequences."""

    pieces: list = field(default_factory=list)

    @property
    def kernel(self) -> FPModule:
        return self.pieces[0].L

    @property
    def cokernel(self) -> FPModule:
        return self.pieces[-1].N

    @property
    def middle(self) -> list:
        return [s.M for s in self.pieces]


def sequence_corpus(ring: PolyRing, count: int = 200, seed: int = 0, max_attempts: int | None = None) -> tuple:
    """(certified sequences, number rejected by certification)."""
    rng = random.Random(seed)
    pool = element_pool(ring)
    mods = base_modules(ring)
    cyclic_ideals = [Ideal(ring, M.presentation.entries[0]) for M in mods if M.ngens == 1]
    out, rejected = [], 0
    max_attempts = max_attempts or 20 * count
    attempts = 0
    while len(out) < count and attempts < max_attempts:
        attempts += 1
        kind = rng.choice(("split", "mult", "mult", "ext", "ext", "ideal", "free"))
        s = None
        if kind == "split":
            s = split_sequence(rng.choice(mods), rng.choice(mods))
        elif kind == "mult":
            J = rng.choice(cyclic_ideals)
            f = rng.choice(pool)
            s = multiplication_sequence(J, f)
        elif kind == "ext":
            L, N = rng.choice(mods), rng.choice(mods)
            if N.presentation.cols == 0:
                continue
            choices = [ring.zero(), ring.one()] + pool
            phi = ModuleMap(ring, L.ngens, N.presentation.cols,
                            [[rng.choice(choices) for _ in range(N.presentation.cols)] for _ in range(L.ngens)])
            s = extension_sequence(L, N, phi)
            if s is None:
                continue
        elif kind == "ideal":
            k = rng.randint(1, 2)
            s = ideal_sequence(Ideal(ring, rng.sample(pool, k)))
        else:
            a = rng.choice(pool)
            b = rng.choice(pool)
            s = free_cokernel_sequence(ModuleMap(ring, 2, 1, [[a], [b]]))
        if s.is_exact():
            out.append(s)
        else:
            rejected += 1
    return out, rejected


def chain_corpus(ring: PolyRing, count: int = 20, seed: int = 0, length: int = 2) -> list:
    """Chains whose k-th cokernel is literally the (k+1)-th kernel."""
    rng = random.Random(seed)
    pool = element_pool(ring)
    mods = base_modules(ring)
    starts, _ = sequence_corpus(ring, count, seed)
    choices = [ring.zero(), ring.one()] + pool
    out = []
    for first in starts:
        pieces = [first]
        while len(pieces) < length:
            L = pieces[-1].N
            N = rng.choice(mods)
            s = None
            if N.presentation.cols:
                phi = ModuleMap(ring, L.ngens, N.presentation.cols,
                                [[rng.choice(choices) for _ in range(N.presentation.cols)] for _ in range(L.ngens)])
                s = extension_sequence(L, N, phi)
            if s is None:
                s = split_sequence(L, N)
            if not s.is_exact():
                break
            pieces.append(s)
        if len(pieces) == length:
            out.append(SequenceChain(pieces))
    return out
