import pytest
from hypothesis import given, strategies as st

from corpus import CAT1, CAT2, FIXED1, FIXED2, MODULES, Q, R2, Rmod, x, y
from oracles import generic_rank
from specfilt.fpmod import FPModule, ModuleMap, direct_sum, fitting_ideal_0
from specfilt.groebner import Ideal, ideal_contains
from specfilt.homalg import FPComplex, koszul
from specfilt.spectrum import (
    CATALOG_BANNER,
    CatalogError,
    PrimeCatalog,
    SpecSubset,
    ass_primes,
    bass_number,
    bass_table,
    default_bass_bound,
    ind_artinian_check,
    rank_over_domain,
    restrict_at,
    small_support,
    specialization_witness,
    subset_predicates,
    supp_complex,
)


def names(S):
    return set(S.names)


# ---------------------------------------------------------------- catalogs

def test_catalog_structure():
    assert list(CAT2.heights) == [0, 1, 1, 2, 2]
    assert list(CAT2.dims) == [2, 1, 1, 0, 0]
    assert list(CAT2.max_flags) == [False, False, False, True, True]
    assert CAT2.leq(0, 3) and CAT2.leq(1, 3) and not CAT2.leq(3, 1) and not CAT2.leq(1, 4)
    assert CAT2.index("xy") == 3
    assert "catalog-relative" in CATALOG_BANNER
    assert default_bass_bound(R2) == 4


def test_catalog_validation():
    with pytest.raises(CatalogError):
        PrimeCatalog(R2, [Ideal(R2, [R2.one()])])
    with pytest.raises(CatalogError):
        PrimeCatalog(R2, [Ideal(R2, [x]), Ideal(R2, [x, x * y])])
    with pytest.raises(CatalogError):
        # (x) ⊊ (x, y^2) would need a height jump; (x^2) ⊊ (x) has equal heights
        PrimeCatalog(R2, [Ideal(R2, [x ** 2]), Ideal(R2, [x])])


def test_subset_algebra():
    A = SpecSubset.from_names(CAT2, ["x", "xy"])
    B = SpecSubset.from_names(CAT2, ["xy", "x1y"])
    assert names(A & B) == {"xy"} and names(A | B) == {"x", "xy", "x1y"} and names(A - B) == {"x"}
    assert names(A.complement()) == {"0", "y", "x1y"}
    assert names(SpecSubset.V(CAT2, Ideal(R2, [x]))) == {"x", "xy"}
    assert names(SpecSubset.D(CAT2, [x])) == {"0", "y", "x1y"}
    assert SpecSubset.D(CAT2, [x]).form[0] == "D"
    other = PrimeCatalog(R2, [Ideal(R2, [x])])
    with pytest.raises(CatalogError):
        A & SpecSubset.from_names(other, ["p0"] if "p0" in other.names else [other.names[0]])


# ---------------------------------------------------------------- ranks

def test_rank_examples():
    one = lambda rows: ModuleMap.from_rows(R2, rows)
    assert rank_over_domain(one([[x]]), Ideal(R2, [x])) == 0
    assert rank_over_domain(one([[x]]), Ideal(R2, [y])) == 1
    assert rank_over_domain(one([[x, y], [y, x]]), Ideal(R2, [])) == 2
    assert rank_over_domain(one([[x, y], [y, x]]), Ideal(R2, [x - y])) == 1


ATOMS = [R2.zero(), R2.one(), x, y, x * y, x - 1, y + 1, x ** 2, x + y, x * y - 1]


@given(st.lists(st.lists(st.sampled_from(ATOMS), min_size=3, max_size=3), min_size=1, max_size=3), st.integers(0, 4))
def test_rank_against_evaluation_oracle(rows, j):
    A = ModuleMap.from_rows(R2, rows)
    assert rank_over_domain(A, CAT2.primes[j]) == generic_rank(rows, 2, FIXED2[j])


# ---------------------------------------------------------------- Bass numbers

def test_bass_examples():
    assert bass_number(0, Ideal(R2, [x]), Q(x)) == 1
    assert bass_number(1, Ideal(R2, [x]), Q(x)) == 1
    assert bass_number(1, Ideal(R2, [x, y]), Q(x)) == 1
    assert bass_number(0, Ideal(R2, [x, y]), Q(x)) == 0
    t = bass_table(Q(x), CAT2)
    assert t(0, "x") == 1
    # 0 -> R -x-> R -> R/(x) -> 0 gives Ext^1 = Ext^2 = k at the origin
    assert t.column("xy") == [0, 1, 1, 0, 0]
    with pytest.raises(ValueError):
        t(9, "x")


def _koszul_fiber_dims(cat, fixed, nvars, top=4):
    """μ_i(p, R) through the Koszul cochain complex of p's generators and evaluation ranks."""
    out = []
    for j, p in enumerate(cat.primes):
        gens = list(p.generators)
        col = [0] * (top + 1)
        if not gens:
            col[0] = 1  # Hom(κ(0), R_(0)) = Frac R
        else:
            K = koszul(gens)
            for i in range(min(top, len(gens)) + 1):
                H = K.cohomology(i).pruned.presentation
                if H.rows:
                    r = generic_rank(H.entries, nvars, fixed[j]) if H.cols else 0
                    col[i] = H.rows - r
        out.append(col)
    return out


@pytest.mark.parametrize("cat,fixed,nv", [(CAT1, FIXED1, 1), (CAT2, FIXED2, 2)], ids=["QQ[x]", "QQ[x,y]"])
def test_gorenstein_fingerprint(cat, fixed, nv):
    R = FPModule.free(cat.ring, 1)
    t = bass_table(R, cat, 4)
    oracle = _koszul_fiber_dims(cat, fixed, nv)
    for j, h in enumerate(cat.heights):
        want = [1 if i == h else 0 for i in range(5)]
        assert t.column(j) == want
        assert oracle[j] == want


def test_bass_additivity_and_associativity():
    for i in range(0, len(MODULES), 3):
        for k in range(1, len(MODULES), 4):
            A, B = MODULES[i][1], MODULES[k][1]
            tA, tB = bass_table(A, CAT2), bass_table(B, CAT2)
            tS = bass_table(direct_sum(A, B), CAT2)
            assert all(tS.mu[a][b] == tA.mu[a][b] + tB.mu[a][b] for a in range(5) for b in range(5))


# ---------------------------------------------------------------- support and Ass

def test_ass_examples():
    assert names(ass_primes(Q(x), CAT2)) == {"x"}
    assert names(ass_primes(Rmod, CAT2)) == {"0"}
    assert names(ass_primes(direct_sum(Q(x), Q(x, y)), CAT2)) == {"x", "xy"}


def test_support_examples():
    assert names(small_support(Q(x), CAT2)) == {"x", "xy"}
    assert names(small_support(FPModule.zero(R2), CAT2)) == set()
    assert names(small_support(Rmod, CAT2)) == set(CAT2.names)
    with pytest.raises(ValueError):
        small_support(Rmod, CAT2, bound=1)


@pytest.mark.parametrize("label,M,ass", MODULES, ids=[m[0] for m in MODULES])
def test_master_support_check(label, M, ass):
    supp = small_support(M, CAT2)  # raises SupportOracleMismatch on disagreement
    F0 = fitting_ideal_0(M)
    assert names(supp) == {nm for nm, p in zip(CAT2.names, CAT2.primes) if ideal_contains(p, F0)}
    A = ass_primes(M, CAT2)
    assert A.issubset(supp)
    assert names(A) == ass


def test_localization_consistency_of_support():
    for label, M, _ in MODULES:
        supp = small_support(M, CAT2)
        for j, p in enumerate(CAT2.primes):
            below = [i for i in range(len(CAT2)) if CAT2.leq(i, j)]
            sub = PrimeCatalog(R2, [CAT2.primes[i] for i in below], [CAT2.names[i] for i in below])
            assert names(small_support(M, sub)) == names(restrict_at(supp, j)), (label, CAT2.names[j])


# ---------------------------------------------------------------- complexes

def test_supp_complex_examples():
    assert names(supp_complex(koszul([x, y]), CAT2)) == {"xy"}
    assert names(supp_complex(FPComplex.stalk(Q(x), 0), CAT2)) == names(small_support(Q(x), CAT2))
    exact = FPComplex.free_complex(R2, 0, [ModuleMap.from_rows(R2, [[1]])])
    assert names(supp_complex(exact, CAT2)) == set()
    assert names(supp_complex(koszul([x]), CAT2)) == {"x", "xy"}


# ---------------------------------------------------------------- predicates

def test_predicates_examples():
    p = subset_predicates(SpecSubset.from_names(CAT2, ["x", "xy"]))
    assert p.specialization_closed
    g = subset_predicates(SpecSubset.from_names(CAT2, ["0"]))
    assert g.generalization_closed and not g.specialization_closed
    for S in (CAT2.empty, CAT2.full):
        q = subset_predicates(S)
        assert q.specialization_closed and q.generalization_closed and q.clopen_in_catalog
    w = specialization_witness(SpecSubset.D(CAT2, [x]))
    assert w is not None and w[0] in ("0", "y") and w[1] in ("x", "xy")


def test_restrict_examples():
    assert names(restrict_at(CAT2.full, "x")) == {"0", "x"}
    assert names(restrict_at(CAT2.empty, "xy")) == set()
    assert names(restrict_at(SpecSubset.from_names(CAT2, ["xy"]), "x")) == set()
    with pytest.raises((CatalogError, ValueError, KeyError)):
        restrict_at(CAT2.full, "nope")


def test_ind_artinian_examples():
    assert ind_artinian_check(Q(x, y), CAT2)
    assert not ind_artinian_check(Rmod, CAT2)
    assert not ind_artinian_check(direct_sum(Q(x), Q(x, y)), CAT2)
