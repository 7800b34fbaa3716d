"""Walk the coherence filtration of a few subsets of Spec QQ[x,y].

Run with ``python3 demos/coherence_tour.py``.
"""

from specfilt import CoherenceContext, Ideal, PolyRing, PrimeCatalog, SpecSubset, coherence_verdict, filtration_report
from specfilt.coherence import recheck_witness

R = PolyRing(("x", "y"))
x, y = R.gens()
cat = PrimeCatalog(R, [Ideal(R, g) for g in ([], [x], [y], [x, y], [x - 1, y])], ["0", "x", "y", "xy", "x1y"])
ctx = CoherenceContext(cat)

subsets = {
    "D(x)": SpecSubset.D(cat, [x]),
    "D(x,y)": SpecSubset.D(cat, [x, y]),
    "V(x)": SpecSubset.V(cat, Ideal(R, [x])),
    "{0, x}": SpecSubset.from_names(cat, ["0", "x"]),
}

for label, phi in subsets.items():
    rep = filtration_report(phi, ctx).to_dict()
    levels = "  ".join(f"{k}:{v}" for k, v in rep["levels"].items())
    print(f"{label:8} {phi.names}")
    print(f"         {levels}")
    print(f"         rules {rep['rules']}  first coherent level {rep['first_coherent_level']}")

# every refutation carries a witness that can be checked again from scratch
v = coherence_verdict(subsets["D(x,y)"], 1, ctx)
print()
print("D(x,y) at level 1:", v.status, "via", v.rule)
print("witness:", v.witness)
print("re-checked:", recheck_witness(v, ctx))
