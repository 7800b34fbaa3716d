"""Exact commutative algebra over QQ and GF(p) and a catalog-relative coherence engine.

Everything is decided on a finite, declared catalog of primes; see
``spectrum.CATALOG_BANNER``.
"""

__version__ = "0.1.0"

from .polyring import GF, QQ, PolyRing, Polynomial, normal_form, parse_poly
from .groebner import Ideal, groebner_basis, ideal_contains, ideal_intersect, ideal_quotient, krull_dim, saturate
from .fpmod import FPModule, ModuleMap, fitting_ideal_0, free_resolution, syzygy
from .homalg import FPComplex, ext, gamma_torsion, grade, koszul, tor
from .spectrum import (
    CATALOG_BANNER,
    PrimeCatalog,
    SpecSubset,
    ass_primes,
    bass_number,
    bass_table,
    small_support,
    supp_complex,
)
from .lococoh import SquarefreeMonomialIdeal, cohomological_dimension, local_cohomology_degrees
from .coherence import CoherenceContext, coherence_verdict, filtration_report

__all__ = [
    "__version__",
    "GF", "QQ", "PolyRing", "Polynomial", "normal_form", "parse_poly",
    "Ideal", "groebner_basis", "ideal_contains", "ideal_intersect", "ideal_quotient", "krull_dim", "saturate",
    "FPModule", "ModuleMap", "fitting_ideal_0", "free_resolution", "syzygy",
    "FPComplex", "ext", "gamma_torsion", "grade", "koszul", "tor",
    "CATALOG_BANNER", "PrimeCatalog", "SpecSubset", "ass_primes", "bass_number", "bass_table",
    "small_support", "supp_complex",
    "SquarefreeMonomialIdeal", "cohomological_dimension", "local_cohomology_degrees",
    "CoherenceContext", "coherence_verdict", "filtration_report",
]
