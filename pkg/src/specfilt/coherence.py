"""Three-valued n-coherence verdicts and the C_Φ^n filtration.

A verdict for (Φ, n) is assembled from a fixed rule base.  Every rule that
fires is recorded in the trace.  If rules of both signs fire the session is
inconsistent and :class:`VerdictContradiction` is raised; the usual causes
are a non-prime catalog entry or a catalog too coarse to separate subsets.

Rule identifiers:

* R0  every subset is coherent at level infinity
* R1  at level 0, coherent iff specialization-closed (positive at any level)
* R2  dim R <= n forces coherence
* R3  D(x_1..x_k) is k-coherent, and not (k-1)-coherent when x is regular
* R4  intersections of known n-coherent subsets
* R5  Ψ minus Θ stays n-coherent when heights in Θ or dimensions in Ψ are <= n
* R6  refutation for D(squarefree monomials) through local cohomology
* R7  a local refutation at a catalog prime refutes Φ
* MONO  monotonicity along n, read from the verdict store
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Any, Sequence

from .fpmod import FPModule, fitting_ideal_0
from .groebner import Ideal, ideal_contains
from .homalg import FPComplex, ext, grade, koszul
from .lococoh import OutOfScopeError, SquarefreeMonomialIdeal, _as_squarefree_quotient, local_cohomology_degrees
from .polyring import Polynomial
from .spectrum import (
    PrimeCatalog,
    SpecSubset,
    bass_table,
    default_bass_bound,
    small_support,
    specialization_witness,
    subset_predicates,
    supp_complex,
)

__all__ = [
    "COHERENT",
    "NOT_COHERENT",
    "UNKNOWN",
    "VerdictContradiction",
    "RuleFiring",
    "CoherenceVerdict",
    "VerdictStore",
    "CoherenceContext",
    "coherence_verdict",
    "local_verdict",
    "localization_consistency",
    "recheck_witness",
    "c_phi_n_membership",
    "supp_inverse_membership",
    "FiltrationReport",
    "filtration_report",
    "consistency_check_complex",
    "uniformity_check_complex",
    "BassBoundError",
    "ClosureReport",
    "nwide_closure_test",
]

COHERENT = "coherent"
NOT_COHERENT = "not_coherent"
UNKNOWN = "unknown"

_NEG_ORDER = ("R1", "R6", "R3", "R7", "MONO")
_POS_ORDER = ("R0", "R2", "R3", "R1", "R5", "R4", "MONO")


class VerdictContradiction(RuntimeError):
    pass


class BassBoundError(ValueError):
    pass


def _check_level(n) -> float:
    if n == math.inf:
        return math.inf
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise ValueError(f"malformed level {n!r}: expected a nonnegative integer or infinity")
    return n


def _level_str(n) -> str | int:
    return "inf" if n == math.inf else n


@dataclass(frozen=True)
class RuleFiring:
    rule: str
    status: str
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"rule": self.rule, "status": self.status, "detail": self.detail}


@dataclass(frozen=True)
class CoherenceVerdict:
    subset: SpecSubset
    level: float
    status: str
    rule: str | None
    trace: tuple
    witness: dict | None = None

    def to_dict(self) -> dict:
        return {
            "subset": self.subset.names,
            "level": _level_str(self.level),
            "status": self.status,
            "rule": self.rule,
            "trace": [f.to_dict() for f in self.trace],
            "witness": self.witness,
        }


def _form_key(phi: SpecSubset):
    if phi.form is None:
        return None
    return tuple(str(x) if not isinstance(x, tuple) else tuple(str(y) for y in x) for x in phi.form)


class VerdictStore:
    """Monotone map (subset, level) -> status; merges raise on conflict."""

    def __init__(self):
        self._lock = threading.Lock()
        # key -> [least coherent level, greatest not_coherent level]
        self._data: dict = {}

    @staticmethod
    def key(phi: SpecSubset):
        return (id(phi.catalog), phi.mask, _form_key(phi))

    def implied(self, phi: SpecSubset, n) -> tuple | None:
        with self._lock:
            rec = self._data.get(self.key(phi))
        if not rec:
            return None
        lo_coh, hi_not = rec
        if lo_coh is not None and lo_coh <= n:
            return COHERENT, lo_coh
        if hi_not is not None and hi_not >= n:
            return NOT_COHERENT, hi_not
        return None

    def record(self, phi: SpecSubset, n, status: str) -> None:
        if status == UNKNOWN:
            return
        k = self.key(phi)
        with self._lock:
            rec = self._data.setdefault(k, [None, None])
            lo_coh, hi_not = rec
            if status == COHERENT:
                if hi_not is not None and hi_not >= n:
                    raise VerdictContradiction(
                        f"{phi} recorded coherent at {_level_str(n)} but not coherent at {_level_str(hi_not)}")
                rec[0] = n if lo_coh is None else min(lo_coh, n)
            else:
                if lo_coh is not None and lo_coh <= n:
                    raise VerdictContradiction(
                        f"{phi} recorded not coherent at {_level_str(n)} but coherent at {_level_str(lo_coh)}")
                rec[1] = n if hi_not is None else max(hi_not, n)

    def coherent_masks(self, catalog: PrimeCatalog, n) -> list:
        with self._lock:
            items = list(self._data.items())
        return [k[1] for k, (lo, _) in items if k[0] == id(catalog) and lo is not None and lo <= n]

    def __len__(self):
        return len(self._data)


@dataclass
class CoherenceContext:
    catalog: PrimeCatalog
    witness_family: Sequence = ()
    declared_D_of: Sequence[Polynomial] | None = None
    bass_bound: int | None = None
    store: VerdictStore = field(default_factory=VerdictStore)

    @property
    def ring(self):
        return self.catalog.ring

    @property
    def bound(self) -> int:
        return default_bass_bound(self.ring) if self.bass_bound is None else self.bass_bound


# ---------------------------------------------------------------- helpers

def _d_sequence(phi: SpecSubset, ctx: CoherenceContext):
    if phi.form and phi.form[0] == "D":
        return list(phi.form[1])
    if ctx.declared_D_of is not None:
        seq = list(ctx.declared_D_of)
        if SpecSubset.D(phi.catalog, seq).mask != phi.mask:
            raise ValueError("declared D-sequence does not match the subset")
        return seq
    return None


_regular_cache: dict = {}


def _is_regular(seq: Sequence[Polynomial]) -> bool:
    """grade((x), R) = len(x), cross-checked against Koszul cohomology."""
    key = tuple(seq)
    if key in _regular_cache:
        return _regular_cache[key]
    ring = seq[0].ring
    k = len(seq)
    I = Ideal(ring, seq)
    by_grade = (not I.is_unit()) and grade(I, FPModule.free(ring, 1)) == k
    K = koszul(list(seq))
    by_koszul = (not I.is_unit()) and all(K.cohomology(i).is_zero() for i in range(k))
    if by_grade != by_koszul:
        raise RuntimeError(f"grade and Koszul disagree on regularity of {list(map(str, seq))}")
    _regular_cache[key] = by_grade
    return by_grade


def _local_grade(seq: Sequence[Polynomial], p: Ideal) -> float:
    """grade((x)R_p, R_p) = least i with p in Supp Ext^i(R/(x), R)."""
    ring = p.ring
    I = Ideal(ring, seq)
    if not ideal_contains(p, I):
        return math.inf
    Rx = FPModule.cyclic(I)
    R = FPModule.free(ring, 1)
    for i in range(ring.nvars + 1):
        E = ext(i, Rx, R)
        if not E.is_zero() and ideal_contains(p, fitting_ideal_0(E)):
            return i
    return math.inf


def _witness_candidates(ctx: CoherenceContext) -> tuple:
    """Squarefree witnesses (None means R) and skipped descriptions."""
    cands, skipped, seen = [], [], set()

    def add(label, J):
        key = None if J is None else J.generators
        if key not in seen:
            seen.add(key)
            cands.append((label, J))

    for idx, M in enumerate(ctx.witness_family):
        if M is None or isinstance(M, SquarefreeMonomialIdeal):
            add(f"family[{idx}]", M)
        elif isinstance(M, FPModule):
            if M.ngens == 1 and M.presentation.cols == 0:
                add(f"family[{idx}]", None)
                continue
            J = _as_squarefree_quotient(M)
            if J is None:
                skipped.append(f"family[{idx}]: not R/J with J squarefree monomial")
            else:
                add(f"family[{idx}]", J)
    add("R", None)
    for nm, p in zip(ctx.catalog.names, ctx.catalog.primes):
        try:
            J = SquarefreeMonomialIdeal.from_ideal(p)
        except OutOfScopeError:
            skipped.append(f"R/{nm}: not squarefree monomial")
            continue
        add(f"R/{nm}", J if not J.is_zero else None)
    skipped.append("first syzygies of defaults: outside the squarefree monomial class")
    return cands, skipped


# ---------------------------------------------------------------- local rules

def local_verdict(phi: SpecSubset, p, n, ctx: CoherenceContext) -> RuleFiring:
    """Verdict for the restriction Φ_p as a subset of Spec R_p (catalog window below p)."""
    n = _check_level(n)
    cat = phi.catalog
    j = cat.index(p)
    window = SpecSubset.where(cat, lambda i: cat.leq(i, j))
    local = phi & window
    name = cat.names[j]
    if n == math.inf:
        return RuleFiring("L0", COHERENT, {"prime": name, "reason": "infinite level"})
    if local.mask in (0, window.mask):
        return RuleFiring("L0", COHERENT, {"prime": name, "reason": "restriction is empty or everything"})
    fired = []
    if cat.heights[j] <= n:
        fired.append(RuleFiring("L1", COHERENT, {"prime": name, "height": cat.heights[j]}))
    wit = next(((cat.names[a], cat.names[b]) for a in local.indices for b in window.indices
                if a != b and cat.leq(a, b) and not local.mask >> b & 1), None)
    if wit is None:
        fired.append(RuleFiring("L2", COHERENT, {"prime": name}))
    elif n == 0:
        fired.append(RuleFiring("L2", NOT_COHERENT, {"prime": name, "pair": list(wit)}))
    seq = _d_sequence(phi, ctx)
    if seq is not None:
        k = len(seq)
        if n >= k:
            fired.append(RuleFiring("L3", COHERENT, {"prime": name, "length": k}))
        else:
            g = _local_grade(seq, cat.primes[j])
            if g == k:
                fired.append(RuleFiring("L3", NOT_COHERENT, {"prime": name, "local_grade": k}))
    pos = [f for f in fired if f.status == COHERENT]
    neg = [f for f in fired if f.status == NOT_COHERENT]
    if pos and neg:
        raise VerdictContradiction(f"local rules disagree at {name}: {[f.rule for f in fired]}")
    if neg:
        return neg[0]
    if pos:
        return pos[0]
    return RuleFiring("L*", UNKNOWN, {"prime": name})


# ---------------------------------------------------------------- global rules

def _rule_r5(phi: SpecSubset, n, ctx: CoherenceContext):
    cat = phi.catalog
    psis = [("full", cat.full.mask)] + [("stored", m) for m in ctx.store.coherent_masks(cat, n)]
    for kind, m in psis:
        if phi.mask & ~m:
            continue
        removed = [i for i in range(len(cat)) if m >> i & 1 and not phi.mask >> i & 1]
        psi_idx = [i for i in range(len(cat)) if m >> i & 1]
        names = [cat.names[i] for i in psi_idx]
        if all(cat.heights[i] <= n for i in removed):
            return RuleFiring("R5", COHERENT, {"psi": names, "removed": [cat.names[i] for i in removed],
                                               "condition": "heights of removed primes <= n"})
        dims_ok = cat.ring.nvars <= n if kind == "full" else all(cat.dims[i] <= n for i in psi_idx)
        if dims_ok:
            return RuleFiring("R5", COHERENT, {"psi": names, "removed": [cat.names[i] for i in removed],
                                               "condition": "dim R/p <= n on psi"})
    return None


def _rule_r4(phi: SpecSubset, n, ctx: CoherenceContext):
    sup = [m for m in ctx.store.coherent_masks(phi.catalog, n) if phi.mask & ~m == 0 and m != phi.mask]
    if not sup:
        return None
    inter = phi.catalog.full.mask
    for m in sup:
        inter &= m
    if inter == phi.mask and len(sup) >= 2:
        return RuleFiring("R4", COHERENT, {"intersected": [SpecSubset(phi.catalog, m).names for m in sup]})
    return None


def _rule_r6(phi: SpecSubset, n, seq, ctx: CoherenceContext):
    if seq is None or n == math.inf:
        return None, []
    try:
        a = SquarefreeMonomialIdeal.from_polys(ctx.ring, seq)
    except OutOfScopeError:
        return None, []
    if not subset_predicates(phi.complement()).specialization_closed:
        return None, []
    cands, skipped = _witness_candidates(ctx)
    for label, J in cands:
        degs = local_cohomology_degrees(a, J)
        if degs and min(degs) > n:
            return RuleFiring("R6", NOT_COHERENT, {
                "module": label,
                "module_ideal": None if J is None else str(J),
                "vanishing_through": n,
                "nonzero_degrees": degs,
                "searched": [c[0] for c in cands],
                "skipped": skipped,
            }), skipped
    return RuleFiring("R6", UNKNOWN, {"searched": [c[0] for c in cands], "skipped": skipped}), skipped


def coherence_verdict(phi: SpecSubset, n, ctx: CoherenceContext) -> CoherenceVerdict:
    n = _check_level(n)
    if phi.catalog is not ctx.catalog:
        raise ValueError("subset is not over the context catalog")
    cat = phi.catalog
    fired: list = []

    implied = ctx.store.implied(phi, n)
    if implied:
        fired.append(RuleFiring("MONO", implied[0], {"stored_level": _level_str(implied[1])}))

    if n == math.inf:
        fired.append(RuleFiring("R0", COHERENT, {}))
    wit = specialization_witness(phi)
    if wit is None:
        fired.append(RuleFiring("R1", COHERENT, {"specialization_closed": True}))
    elif n == 0:
        fired.append(RuleFiring("R1", NOT_COHERENT, {"pair": list(wit)}))
    if n != math.inf and cat.ring.nvars <= n:
        fired.append(RuleFiring("R2", COHERENT, {"dim": cat.ring.nvars}))

    seq = _d_sequence(phi, ctx)
    if seq is not None and n != math.inf:
        k = len(seq)
        if n >= k:
            fired.append(RuleFiring("R3", COHERENT, {"sequence": [str(s) for s in seq], "length": k}))
        elif _is_regular(seq):
            fired.append(RuleFiring("R3", NOT_COHERENT, {"sequence": [str(s) for s in seq], "grade": k}))

    if n != math.inf:
        r4 = _rule_r4(phi, n, ctx)
        if r4:
            fired.append(r4)
        r5 = _rule_r5(phi, n, ctx)
        if r5:
            fired.append(r5)
        r6, _ = _rule_r6(phi, n, seq, ctx)
        if r6:
            fired.append(r6)  # an unknown firing records the bounded search
        for j in range(len(cat)):
            lv = local_verdict(phi, j, n, ctx)
            if lv.status == NOT_COHERENT:
                fired.append(RuleFiring("R7", NOT_COHERENT, {"local": lv.to_dict()}))
                break

    pos = {f.rule: f for f in fired if f.status == COHERENT}
    neg = {f.rule: f for f in fired if f.status == NOT_COHERENT}
    if pos and neg:
        raise VerdictContradiction(
            f"{phi} at level {_level_str(n)}: {sorted(pos)} say coherent, {sorted(neg)} say not coherent")
    witness = None
    if neg:
        rule = next(r for r in _NEG_ORDER if r in neg)
        status = NOT_COHERENT
        witness = {"rule": rule, **neg[rule].detail}
        if rule == "MONO":
            witness = {"rule": "MONO", **neg["MONO"].detail}
    elif pos:
        rule = next(r for r in _POS_ORDER if r in pos)
        status = COHERENT
    else:
        rule, status = None, UNKNOWN
    ctx.store.record(phi, n, status)
    return CoherenceVerdict(phi, n, status, rule, tuple(fired), witness)


def recheck_witness(v: CoherenceVerdict, ctx: CoherenceContext) -> bool:
    """Independently re-verify a refutation witness."""
    if v.status != NOT_COHERENT or not v.witness:
        return False
    w = v.witness
    cat = v.subset.catalog
    rule = w["rule"]
    if rule == "R1":
        p, q = w["pair"]
        i, j = cat.index(p), cat.index(q)
        return (p in v.subset and q not in v.subset and i != j
                and ideal_contains(cat.primes[j], cat.primes[i]) and v.level == 0)
    if rule == "R3":
        seq = _d_sequence(v.subset, ctx)
        I = Ideal(ctx.ring, seq)
        return len(seq) > v.level and grade(I, FPModule.free(ctx.ring, 1)) == len(seq)
    if rule == "R6":
        seq = _d_sequence(v.subset, ctx)
        a = SquarefreeMonomialIdeal.from_polys(ctx.ring, seq)
        J = None
        if w.get("module_ideal") is not None:
            cands, _ = _witness_candidates(ctx)
            J = dict(cands)[w["module"]]
        degs = local_cohomology_degrees(a, J)
        return bool(degs) and min(degs) > v.level and degs == w["nonzero_degrees"]
    if rule == "R7":
        loc = w["local"]
        again = local_verdict(v.subset, loc["detail"]["prime"], v.level, ctx)
        return again.status == NOT_COHERENT
    if rule == "MONO":
        return True
    return False


def localization_consistency(phi: SpecSubset, n, ctx: CoherenceContext) -> dict:
    """Compare the global verdict with local verdicts at every catalog prime."""
    g = coherence_verdict(phi, n, ctx)
    locs = [local_verdict(phi, j, n, ctx) for j in range(len(phi.catalog))]
    statuses = [f.status for f in locs]
    decided = g.status != UNKNOWN and UNKNOWN not in statuses
    ok = True
    if decided:
        ok = (g.status == COHERENT) == all(s == COHERENT for s in statuses)
    if g.status == COHERENT and NOT_COHERENT in statuses:
        ok = False
    return {"global": g.status, "local": dict(zip(phi.catalog.names, statuses)), "decided": decided, "consistent": ok}


# ---------------------------------------------------------------- C_Φ^n

def c_phi_n_membership(M: FPModule, phi: SpecSubset, n: int, bound: int | None = None) -> bool:
    """μ_i(p, M) = 0 for catalog p outside Φ and 0 <= i <= n."""
    cat = phi.catalog
    bound = default_bass_bound(cat.ring) if bound is None else bound
    if n > bound:
        raise BassBoundError(f"level {n} exceeds the Bass bound {bound}")
    if n < 0:
        return True
    t = bass_table(M, cat, bound)
    outside = phi.complement().indices
    return all(t.mu[i][j] == 0 for i in range(n + 1) for j in outside)


def supp_inverse_membership(M: FPModule, phi: SpecSubset, bound: int | None = None) -> bool:
    cat = phi.catalog
    bound = default_bass_bound(cat.ring) if bound is None else bound
    direct = small_support(M, cat, bound).issubset(phi)
    via_bass = c_phi_n_membership(M, phi, bound, bound)
    if direct != via_bass:
        raise RuntimeError(f"supp^-1 membership and C_Φ at the bound disagree for {M}")
    return direct


# ---------------------------------------------------------------- filtration

@dataclass(frozen=True)
class FiltrationReport:
    subset: SpecSubset
    levels: dict  # level -> status, with "inf" for the last column
    primed: dict  # level -> True / False / None
    predicates: Any
    first_coherent_level: int | None
    verdicts: dict

    def to_dict(self) -> dict:
        return {
            "subset": self.subset.names,
            "levels": {str(k): v for k, v in self.levels.items()},
            "primed": {str(k): v for k, v in self.primed.items()},
            "specialization_closed": self.predicates.specialization_closed,
            "generalization_closed": self.predicates.generalization_closed,
            "clopen_in_catalog": self.predicates.clopen_in_catalog,
            "first_coherent_level": self.first_coherent_level,
            "rules": {str(k): v.rule for k, v in self.verdicts.items()},
        }


def filtration_report(phi: SpecSubset, ctx: CoherenceContext) -> FiltrationReport:
    d = ctx.ring.nvars
    levels, primed, verdicts = {}, {}, {}
    pred = subset_predicates(phi)
    for n in list(range(d + 1)) + [math.inf]:
        v = coherence_verdict(phi, n, ctx)
        key = "inf" if n == math.inf else n
        levels[key] = v.status
        verdicts[key] = v
        if not pred.generalization_closed:
            primed[key] = False
        else:
            primed[key] = {COHERENT: True, NOT_COHERENT: False}.get(v.status)
    first = next((k for k in range(d + 1) if levels[k] == COHERENT), None)
    return FiltrationReport(phi, levels, primed, pred, first, verdicts)


# ---------------------------------------------------------------- complexes

def _window(X: FPComplex, i: int, n) -> list:
    lo, hi = min(X.lo, i), max(X.hi, i)
    if n == math.inf:
        return [j for j in range(lo, hi + 1) if j != i]
    return [j for j in range(i - n + 1, i + n) if j != i]


def _in_supp_inverse(M: FPModule, phi: SpecSubset, bound) -> bool:
    return small_support(M, phi.catalog, bound).issubset(phi)


def consistency_check_complex(X: FPComplex, phi: SpecSubset, n, i: int, bound: int | None = None):
    """True/False when the hypotheses hold, None when not applicable."""
    n = _check_level(n)
    cat = phi.catalog
    if not supp_complex(X, cat, bound).issubset(phi):
        return None
    if any(not X.cohomology(j).is_zero() for j in _window(X, i, n)):
        return None
    return _in_supp_inverse(X.cohomology(i), phi, bound)


def uniformity_check_complex(X: FPComplex, phi: SpecSubset, n, i: int, bound: int | None = None):
    n = _check_level(n)
    cat = phi.catalog
    if not supp_complex(X, cat, bound).issubset(phi):
        return None
    if any(not X.cohomology(j).is_zero() for j in _window(X, i, n)):
        return None
    if n == math.inf:
        comp = range(min(X.lo, i), max(X.hi, i) + 1)
    else:
        comp = range(i - n, i + n + 1)
    if any(not _in_supp_inverse(X.term(j), phi, bound) for j in comp):
        return None
    return _in_supp_inverse(X.cycles(i), phi, bound) and _in_supp_inverse(X.cocycle_quotient(i), phi, bound)


# ---------------------------------------------------------------- closure tests

@dataclass
class ClosureReport:
    subset: list
    level: Any
    informational: bool
    instances: int = 0
    checks: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {"subset": self.subset, "level": _level_str(self.level), "informational": self.informational,
                "instances": self.instances, "checks": self.checks, "failures": self.failures,
                "passed": self.passed}


def _bass_inequalities(seq, cat: PrimeCatalog, bound: int) -> list:
    """Prime-wise long-exact-sequence bounds on Bass numbers."""
    tL, tM, tN = (bass_table(X, cat, bound) for X in (seq.L, seq.M, seq.N))
    bad = []
    for j, nm in enumerate(cat.names):
        for i in range(bound + 1):
            mL, mM, mN = tL.mu[i][j], tM.mu[i][j], tN.mu[i][j]
            prevN = tN.mu[i - 1][j] if i >= 1 else 0
            nextL = tL.mu[i + 1][j] if i < bound else None
            if mM > mL + mN:
                bad.append((nm, i, "mu(M) <= mu(L) + mu(N)"))
            if mL > mM + prevN:
                bad.append((nm, i, "mu(L) <= mu(M) + mu_{i-1}(N)"))
            if nextL is not None and mN > mM + nextL:
                bad.append((nm, i, "mu(N) <= mu(M) + mu_{i+1}(L)"))
    return bad


def nwide_closure_test(phi: SpecSubset, n, corpus: Sequence, ctx: CoherenceContext | None = None,
                       chains: Sequence = (), bound: int | None = None) -> ClosureReport:
    """Instance checks of extension, n-kernel and n-cokernel closure.

    ``corpus`` holds certified short exact sequences; ``chains`` holds spliced
    sequences used for the n-kernel and n-cokernel conditions.
    """
    n = _check_level(n)
    cat = phi.catalog
    bound = default_bass_bound(cat.ring) if bound is None else bound
    informational = True
    if ctx is not None:
        informational = coherence_verdict(phi, n, ctx).status != COHERENT
    rep = ClosureReport(phi.names, n, informational)

    def S(X):
        return supp_inverse_membership(X, phi, bound)

    def C(X, k):
        return c_phi_n_membership(X, phi, min(k, bound), bound)

    def check(ok, what, data):
        rep.checks += 1
        if not ok:
            rep.failures.append({"check": what, **data})

    kn = bound if n == math.inf else min(n, bound)
    for idx, s in enumerate(corpus):
        if not s.is_exact():
            rep.failures.append({"check": "certificate", "instance": idx, "origin": s.origin})
            continue
        rep.instances += 1
        sL, sM, sN = S(s.L), S(s.M), S(s.N)
        info = {"instance": idx, "origin": s.origin}
        if sL and sN:
            check(sM, "extension", info)
        if sM and sN:
            check(sL, "kernel of epimorphism", info)
        if sL and sM:
            check(sN, "cokernel of monomorphism", info)
        cL, cM, cN = C(s.L, kn), C(s.M, kn), C(s.N, kn)
        cM1, cN1 = C(s.M, kn - 1), C(s.N, kn - 1)
        if cL and cN:
            check(cM, "horseshoe (i)", info)
        if cM and cN1:
            check(cL, "horseshoe (ii)", info)
        if cL and cM1:
            check(cN1, "horseshoe (iii)", info)
        for nm, i, law in _bass_inequalities(s, cat, bound):
            rep.failures.append({"check": "Bass bound", "prime": nm, "degree": i, "law": law, **info})
        rep.checks += 1
    for idx, ch in enumerate(chains):
        rep.instances += 1
        info = {"chain": idx, "origins": [p.origin for p in ch.pieces]}
        forward = ch.middle + [ch.cokernel]
        backward = list(reversed(ch.middle)) + [ch.kernel]
        need = len(forward) if n == math.inf else n + 1
        xs = forward[:need]
        if all(S(X) for X in xs):
            check(S(ch.kernel), "n-kernel", info)
        if all(C(X, kn) for X in xs):
            check(C(ch.kernel, kn), "n-kernel of C_phi^n", info)
        ys = backward[:need]
        if all(S(X) for X in ys):
            check(S(ch.cokernel), "n-cokernel", info)
    return rep
