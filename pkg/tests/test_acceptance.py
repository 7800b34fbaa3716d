"""Acceptance criteria 1 to 10; each test records a PASS/FAIL line for the summary."""

import itertools
import json
import math
import random
from fractions import Fraction

import jsonschema

import conftest
from corpus import CAT1, CAT2, FIXED1, FIXED2, MODULES, MONOMIAL_IDEALS, R2, session_text, x, y
from oracles import cech_box_degrees, generic_rank, sympy_reduced_gb
from specfilt.cli import RunFlags, dumps, load_schema, run_source
from specfilt.coherence import (
    COHERENT,
    NOT_COHERENT,
    UNKNOWN,
    CoherenceContext,
    c_phi_n_membership,
    coherence_verdict,
    consistency_check_complex,
    nwide_closure_test,
    recheck_witness,
    supp_inverse_membership,
    uniformity_check_complex,
)
from specfilt.exseq import chain_corpus, sequence_corpus
from specfilt.fpmod import FPModule, ModuleMap, fitting_ideal_0
from specfilt.groebner import Ideal, ideal_contains, krull_dim
from specfilt.homalg import FPComplex, gamma_torsion, grade, koszul, tor
from specfilt.lococoh import SquarefreeMonomialIdeal, local_cohomology_degrees
from specfilt.polyring import PolyRing, normal_form
from specfilt.spectrum import (
    SpecSubset,
    ass_primes,
    bass_table,
    default_bass_bound,
    ind_artinian_check,
    rank_over_domain,
    small_support,
    subset_predicates,
    supp_complex,
)


def record(k, ok, note):
    conftest.ACCEPTANCE[k] = (bool(ok), note)
    assert ok, note


# ---------------------------------------------------------------- 1. Gröbner soundness

def gb_corpus():
    rng = random.Random(7)
    R = PolyRing(("x", "y", "z"))
    out = []
    # monomial
    for _ in range(17):
        out.append([R.monomial(tuple(rng.randint(0, 3) for _ in range(3))) for _ in range(rng.randint(1, 3))])
    # binomial
    for _ in range(17):
        gens = []
        for _ in range(rng.randint(1, 3)):
            a = R.monomial(tuple(rng.randint(0, 2) for _ in range(3)))
            b = R.monomial(tuple(rng.randint(0, 2) for _ in range(3)))
            gens.append(a - rng.choice((1, 2, -3)) * b)
        out.append(gens)
    # dense up to degree 3
    mons = [e for e in itertools.product(range(4), repeat=3) if sum(e) <= 3]
    for _ in range(16):
        gens = []
        for _ in range(rng.randint(2, 3)):
            f = R.zero()
            for e in rng.sample(mons, 4):
                f = f + rng.randint(-3, 3) * R.monomial(e)
            gens.append(f)
        out.append(gens)
    return R, out


def _spoly(f, g):
    R = f.ring
    ef, eg = f.lead_monomial, g.lead_monomial
    lcm = tuple(max(a, b) for a, b in zip(ef, eg))
    mf = R.monomial(tuple(a - b for a, b in zip(lcm, ef)))
    mg = R.monomial(tuple(a - b for a, b in zip(lcm, eg)))
    return mf * f * R(Fraction(1) / Fraction(f.lead_coeff)) - mg * g * R(Fraction(1) / Fraction(g.lead_coeff))


def test_criterion_1_groebner_soundness():
    R, corpus = gb_corpus()
    rng = random.Random(11)
    low = [e for e in itertools.product(range(4), repeat=3) if sum(e) <= 3]
    bad = []
    for k, gens in enumerate(corpus):
        gens = [g for g in gens if g]
        G = Ideal(R, gens).gb
        for f, g in itertools.combinations(G, 2):
            if not normal_form(_spoly(f, g), G).is_zero():
                bad.append((k, "spoly"))
        for _ in range(4):
            comb = R.zero()
            for g in gens:
                c = R.zero()
                for e in rng.sample(low, 2):
                    c = c + rng.randint(-2, 2) * R.monomial(e)
                comb = comb + c * g
            if not normal_form(comb, G).is_zero():
                bad.append((k, "membership"))
        if {str(g) for g in G} != sympy_reduced_gb(gens, R):
            bad.append((k, "oracle"))
    record(1, not bad and len(corpus) == 50, f"{len(corpus)} ideals, {len(bad)} violations")


# ---------------------------------------------------------------- 2. Gorenstein fingerprint

def _koszul_oracle(cat, fixed, nvars, top=4):
    out = []
    for j, p in enumerate(cat.primes):
        col = [0] * (top + 1)
        gens = list(p.generators)
        if not gens:
            col[0] = 1
        else:
            K = koszul(gens)
            for i in range(min(top, len(gens)) + 1):
                H = K.cohomology(i).pruned.presentation
                if H.rows:
                    col[i] = H.rows - (generic_rank(H.entries, nvars, fixed[j]) if H.cols else 0)
        out.append(col)
    return out


def test_criterion_2_gorenstein():
    bad = 0
    for cat, fixed, nv in ((CAT1, FIXED1, 1), (CAT2, FIXED2, 2)):
        t = bass_table(FPModule.free(cat.ring, 1), cat, 4)
        oracle = _koszul_oracle(cat, fixed, nv)
        for j, h in enumerate(cat.heights):
            want = [1 if i == h else 0 for i in range(5)]
            bad += (t.column(j) != want) + (oracle[j] != want)
    record(2, bad == 0, f"QQ[x] and QQ[x,y] catalogs, i <= 4, {bad} mismatches")


# ---------------------------------------------------------------- 3. support master check

def test_criterion_3_support():
    bad = []
    for label, M, _ in MODULES:
        supp = small_support(M, CAT2)
        F0 = fitting_ideal_0(M)
        trace = {nm for nm, p in zip(CAT2.names, CAT2.primes) if ideal_contains(p, F0)}
        if set(supp.names) != trace or not ass_primes(M, CAT2).issubset(supp):
            bad.append(label)
    record(3, not bad, f"{len(MODULES)} modules, mismatches: {bad}")


# ---------------------------------------------------------------- 4. local cohomology

def _antichains(n):
    subsets = [frozenset(s) for k in range(1, n + 1) for s in itertools.combinations(range(n), k)]
    out = []
    for k in range(len(subsets) + 1):
        for combo in itertools.combinations(subsets, k):
            if all(not (a < b or b < a) for a, b in itertools.combinations(combo, 2)):
                out.append(combo)
    return out


def test_criterion_4_local_cohomology():
    notes, ok = [], True
    m = SquarefreeMonomialIdeal.from_polys(R2, [x, y])
    px = SquarefreeMonomialIdeal.from_polys(R2, [x])
    ok &= local_cohomology_degrees(m) == [2] and local_cohomology_degrees(px) == [1]
    cases = 0
    for n in (1, 2, 3):
        R = PolyRing(tuple("xyz"[:n]))
        chains = _antichains(n)
        for a in chains:
            if not a:
                continue
            for J in chains:
                A, JJ = SquarefreeMonomialIdeal(R, a), SquarefreeMonomialIdeal(R, J)
                cases += 1
                if set(local_cohomology_degrees(A, JJ)) != cech_box_degrees(list(A.generators), list(JJ.generators), n):
                    ok = False
                    notes.append((n, a, J))
    # least degree vs grade for every proper pair over two variables
    chains2 = _antichains(2)
    for a in chains2[1:]:
        A = SquarefreeMonomialIdeal(R2, a)
        for J in chains2:
            M = FPModule.cyclic(SquarefreeMonomialIdeal(R2, J).to_ideal()) if J else FPModule.free(R2, 1)
            if (A.to_ideal() + (SquarefreeMonomialIdeal(R2, J).to_ideal() if J else Ideal(R2, []))).is_unit():
                continue  # a M = M
            degs = local_cohomology_degrees(A, M)
            if not degs or min(degs) != grade(A.to_ideal(), M):
                ok = False
                notes.append(("grade", a, J))
    record(4, ok, f"{cases} box cases up to 3 variables, failures: {notes[:3]}")


# ---------------------------------------------------------------- 5. coherence verdicts

def test_criterion_5_coherence():
    parts = []
    ctx1 = CoherenceContext(CAT1)
    subsets = [SpecSubset(CAT1, m) for m in range(8)]
    at1 = [coherence_verdict(s, 1, ctx1).status for s in subsets]
    at0 = [coherence_verdict(s, 0, ctx1).status for s in subsets]
    a = all(s == COHERENT for s in at1) and UNKNOWN not in at0 and all(
        (st == COHERENT) == subset_predicates(s).specialization_closed for st, s in zip(at0, subsets))
    parts.append(("a", a))
    ctx = CoherenceContext(CAT2)
    Dx = SpecSubset.D(CAT2, [x])
    v1, v0 = coherence_verdict(Dx, 1, ctx), coherence_verdict(Dx, 0, ctx)
    b = v1.status == COHERENT and v0.status == NOT_COHERENT and v0.rule == "R1" and recheck_witness(v0, ctx)
    parts.append(("b", b))
    Dxy = SpecSubset.D(CAT2, [x, y])
    w2, w1 = coherence_verdict(Dxy, 2, ctx), coherence_verdict(Dxy, 1, ctx)
    c = (w2.status == COHERENT and w1.status == NOT_COHERENT and w1.rule == "R6"
         and w1.witness["module"] == "R" and w1.witness["nonzero_degrees"] == [2] and recheck_witness(w1, ctx))
    parts.append(("c", c))
    record(5, all(p for _, p in parts), " ".join(f"({k}) {'ok' if p else 'fail'}" for k, p in parts))


# ---------------------------------------------------------------- 6. filtration laws

def test_criterion_6_filtration():
    bound = default_bass_bound(R2)
    ctx = CoherenceContext(CAT2)
    subsets = [SpecSubset(CAT2, m) for m in range(32)] + [SpecSubset.D(CAT2, [x]), SpecSubset.D(CAT2, [x, y]),
                                                           SpecSubset.D(CAT2, [y])]
    levels = {id(s): [coherence_verdict(s, n, ctx).status for n in range(bound + 1)] for s in subsets}
    violations, probes = 0, 0
    for _, M, _ in MODULES:
        for phi in subsets:
            vals = [c_phi_n_membership(M, phi, n) for n in range(bound + 1)]
            probes += 1
            violations += sum(1 for a, b in zip(vals, vals[1:]) if b and not a)
            violations += supp_inverse_membership(M, phi) != vals[-1]
            st = levels[id(phi)]
            for n in range(bound + 1):
                if st[n] == COHERENT:
                    violations += any(vals[i] != vals[n] for i in range(n, bound + 1))
                    break
    record(6, violations == 0, f"{probes} (M, Φ) pairs, {violations} violations")


# ---------------------------------------------------------------- 7. horseshoe and closure

def test_criterion_7_closure():
    seqs, rejected = sequence_corpus(R2, 200, seed=0)
    chains = chain_corpus(R2, 20, seed=0, length=3)
    ctx = CoherenceContext(CAT2)
    probes = [(SpecSubset.V(CAT2, Ideal(R2, [x])), 0), (SpecSubset.V(CAT2, Ideal(R2, [x * y])), 0),
              (SpecSubset.D(CAT2, [x]), 1), (SpecSubset.D(CAT2, [y]), 1), (SpecSubset.D(CAT2, [x, y]), 2),
              (CAT2.full, 0), (CAT2.empty, 0)]
    failures, checks, decided = 0, 0, 0
    for phi, n in probes:
        rep = nwide_closure_test(phi, n, seqs, ctx, chains)
        if rep.informational:
            continue
        decided += 1
        failures += len(rep.failures)
        checks += rep.checks
    ok = len(seqs) >= 200 and failures == 0 and decided == len(probes)
    record(7, ok, f"{len(seqs)} sequences ({rejected} rejected), {len(chains)} chains, "
                  f"{decided} coherent Φ, {checks} checks, {failures} violations")


# ---------------------------------------------------------------- 8. derived side

def _complex_corpus():
    one = ModuleMap(R2, 1, 1, [[R2.one()]])
    return [
        koszul([x, y]), koszul([x]), koszul([x * y]), koszul([x, x * y]),
        FPComplex.free_complex(R2, 0, [ModuleMap(R2, 1, 1, [[x]])]),
        FPComplex.free_complex(R2, 0, [one]),
        FPComplex.stalk(FPModule.cyclic(Ideal(R2, [x])), 0),
        FPComplex.stalk(FPModule.cyclic(Ideal(R2, [x, y])), 1),
    ]


def _fiber_dim(M, p):
    P = M.pruned.presentation
    return P.rows - rank_over_domain(P, p)


def test_criterion_8_derived():
    notes = []
    ok = small_support(FPModule.cyclic(Ideal(R2, [x, y])), CAT2).names == ["xy"]
    ok &= supp_complex(koszul([x, y]), CAT2).names == ["xy"]
    ctx = CoherenceContext(CAT2)
    applicable = 0
    subsets = [SpecSubset(CAT2, m) for m in range(32)]
    for X_ in _complex_corpus():
        for phi in subsets:
            for n in (0, 1, 2, math.inf):
                if coherence_verdict(phi, n, ctx).status != COHERENT:
                    continue
                for i in range(X_.lo - 1, X_.hi + 2):
                    for fn in (consistency_check_complex, uniformity_check_complex):
                        r = fn(X_, phi, n, i)
                        if r is None:
                            continue
                        applicable += 1
                        if r is not True:
                            ok = False
                            notes.append((fn.__name__, phi.names, n, i))
    mods = [M for _, M, _ in MODULES[:8]]
    tor_bad = 0
    for i in (0, 1, 2):
        for a, b in itertools.combinations(range(len(mods)), 2):
            T1, T2 = tor(i, mods[a], mods[b]), tor(i, mods[b], mods[a])
            tor_bad += sum(_fiber_dim(T1, p) != _fiber_dim(T2, p) for p in CAT2.primes)
    ok &= tor_bad == 0
    record(8, ok, f"{applicable} applicable complex checks, Tor balance mismatches {tor_bad}, failures {notes[:3]}")


# ---------------------------------------------------------------- 9. ind-artinian and Γ

def test_criterion_9_artinian_gamma():
    bad = []
    for label, M, _ in MODULES:
        finite_length = M.is_zero() or krull_dim(fitting_ideal_0(M)) == 0
        if ind_artinian_check(M, CAT2) != finite_length:
            bad.append(("artinian", label))
    pairs = 0
    for gens in MONOMIAL_IDEALS:
        a = Ideal(R2, gens)
        Va = SpecSubset.V(CAT2, a)
        for label, M, _ in MODULES:
            pairs += 1
            if ass_primes(gamma_torsion(a, M), CAT2) != (ass_primes(M, CAT2) & Va):
                bad.append(("gamma", label, str(a.generators)))
    record(9, not bad, f"{len(MODULES)} modules, {pairs} monomial pairs, failures {bad[:3]}")


# ---------------------------------------------------------------- 10. CLI

def test_criterion_10_cli():
    schema = load_schema()
    notes = []
    for name in ("minimal", "plane", "line", "contradiction_free_gf"):
        src = session_text(name)
        a, ca = run_source(src, RunFlags())
        b, cb = run_source(src, RunFlags())
        if dumps(a) != dumps(b):
            notes.append(f"{name} nondeterministic")
        jsonschema.validate(a, schema)
        if ca != 0 or cb != 0:
            notes.append(f"{name} exit {ca}")
    bad, code = run_source(session_text("malformed"))
    jsonschema.validate(bad, schema)
    if code != 2 or not bad["errors"] or not all(e["line"] >= 1 and e["column"] >= 1 for e in bad["errors"]):
        notes.append("malformed session not reported")
    _, c1 = run_source("ring R = QQ[x]; prime p = (x); subset S = full; module M = coker [[x]]; query cphi M S 9;")
    if c1 != 1:
        notes.append(f"query failure exit {c1}")
    json.loads(dumps(bad))
    record(10, not notes, "golden sessions deterministic and schema-valid; exit codes 0/1/2" + (f"; {notes}" if notes else ""))
