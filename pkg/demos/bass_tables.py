"""Bass numbers, supports and local cohomology for small modules over QQ[x,y].

Run with ``python3 demos/bass_tables.py``.
"""

from specfilt import (
    FPModule,
    Ideal,
    PolyRing,
    PrimeCatalog,
    SquarefreeMonomialIdeal,
    ass_primes,
    bass_table,
    local_cohomology_degrees,
    small_support,
)

R = PolyRing(("x", "y"))
x, y = R.gens()
cat = PrimeCatalog(R, [Ideal(R, g) for g in ([], [x], [y], [x, y], [x - 1, y])], ["0", "x", "y", "xy", "x1y"])

modules = {
    "R": FPModule.free(R, 1),
    "R/(x)": FPModule.cyclic(Ideal(R, [x])),
    "R/(xy)": FPModule.cyclic(Ideal(R, [x * y])),
    "R/(x^2,xy)": FPModule.cyclic(Ideal(R, [x ** 2, x * y])),
}

for label, M in modules.items():
    t = bass_table(M, cat, 3)
    print(f"{label}: Ass {ass_primes(M, cat).names}  supp {small_support(M, cat).names}")
    for j, name in enumerate(cat.names):
        print(f"    mu_i({name:>3}) = {t.column(j)}")

print()
for gens in ([x], [x, y], [x * y]):
    a = SquarefreeMonomialIdeal.from_polys(R, gens)
    print(f"H^i_{a}(R) nonzero at i in {local_cohomology_degrees(a)}")
