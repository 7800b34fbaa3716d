"""Run sessions and emit reports: ``specfilt run <session> [--json out.json] ...``."""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass
from importlib import resources
from typing import Any

from . import __version__
from .coherence import (
    BassBoundError,
    CoherenceContext,
    VerdictContradiction,
    c_phi_n_membership,
    coherence_verdict,
    consistency_check_complex,
    filtration_report,
    localization_consistency,
    nwide_closure_test,
    recheck_witness,
    supp_inverse_membership,
    uniformity_check_complex,
)
from .exseq import chain_corpus, sequence_corpus
from .fpmod import FPModule, fitting_ideal_0
from .groebner import Ideal, ideal_contains, krull_dim
from .homalg import ext, gamma_torsion, grade_report, tor
from .lococoh import (
    SquarefreeMonomialIdeal,
    cech_cohomology_nonzero,
    cohomological_dimension,
    grothendieck_bound_check,
    mayer_vietoris_clopen_check,
)
from .session import Query, Session, SessionParseError, parse_session
from .spectrum import (
    CATALOG_BANNER,
    SpecSubset,
    SupportOracleMismatch,
    ass_primes,
    bass_table,
    fitting_support,
    ind_artinian_check,
    restrict_at,
    small_support,
    subset_predicates,
    supp_complex,
)

__all__ = ["SCHEMA_ID", "RunFlags", "run", "run_source", "load_schema", "render_text", "main"]

SCHEMA_ID = "specfilt-report/1"

EXIT_OK, EXIT_CHECK, EXIT_PARSE, EXIT_CONTRADICTION = 0, 1, 2, 3


@dataclass(frozen=True)
class RunFlags:
    bass_bound: int | None = None
    fail_fast: bool = False
    seed: int = 0
    timing: bool = False


class QueryError(ValueError):
    """Bad query arguments discovered at run time."""


def load_schema() -> dict:
    text = resources.files("specfilt").joinpath("schema/specfilt-report-1.json").read_text(encoding="utf-8")
    return json.loads(text)


def _num(x):
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "-inf"
    return x


def _level(tok: str):
    if tok == "inf":
        return math.inf
    try:
        n = int(tok)
    except ValueError:
        raise QueryError(f"expected a level (integer or inf), got {tok!r}")
    if n < 0:
        raise QueryError("levels are nonnegative")
    return n


def _int(tok: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise QueryError(f"expected an integer, got {tok!r}")


def _range(tok: str) -> list:
    if ".." in tok:
        lo, hi = tok.split("..")
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise QueryError(f"empty range {tok}")
        return list(range(lo, hi + 1))
    return [_int(tok)]


def _sorted_names(phi) -> list:
    return sorted(phi.names)


class _Runner:
    def __init__(self, s: Session, flags: RunFlags):
        self.s = s
        self.flags = flags
        self.ctx = None
        if s.catalog is not None:
            family = [d.value for d in s.declarations if d.kind == "module"]
            self.ctx = CoherenceContext(s.catalog, witness_family=family, bass_bound=flags.bass_bound)
        self._corpus = None

    @property
    def bound(self):
        return self.ctx.bound if self.ctx else self.flags.bass_bound

    # ----------------------------------------------------------- lookups

    def _get(self, name: str, *kinds):
        d = self.s.lookup(name, *kinds)
        if d is None:
            other = self.s.lookup(name)
            if other is not None:
                raise QueryError(f"{name!r} is a {other.kind}, expected {' or '.join(kinds)}")
            raise QueryError(f"unknown name {name!r}")
        return d.value

    def module(self, name):
        if name == self.s.ring_name or name == "R":
            if self.s.lookup(name, "module"):
                return self._get(name, "module")
            return FPModule.free(self.s.ring, 1)
        return self._get(name, "module")

    def ideal(self, name) -> Ideal:
        return self._get(name, "ideal", "prime")

    def subset(self, name):
        return self._get(name, "subset")

    def complex_(self, name):
        return self._get(name, "complex")

    def catalog(self):
        if self.s.catalog is None:
            raise QueryError("this query needs at least one declared prime")
        return self.s.catalog

    def prime(self, name) -> int:
        cat = self.catalog()
        if name not in cat.names:
            raise QueryError(f"{name!r} is not a catalog prime")
        return cat.names.index(name)

    def monomial(self, name) -> SquarefreeMonomialIdeal:
        return SquarefreeMonomialIdeal.from_ideal(self.ideal(name))

    def monomial_module(self, name):
        """R, or a module name; lococoh accepts FPModules of the form R/J."""
        if name in ("R", self.s.ring_name) and not self.s.lookup(name, "module"):
            return None
        return self.module(name)

    def corpus(self):
        if self._corpus is None:
            seqs, rejected = sequence_corpus(self.s.ring, 200, self.flags.seed)
            chains = chain_corpus(self.s.ring, 20, self.flags.seed, 3)
            self._corpus = (seqs, chains, rejected)
        return self._corpus

    # ----------------------------------------------------------- queries

    def q_bass(self, M, p, degs="0..3"):
        mod = self.module(M)
        j = self.prime(p)
        ds = _range(degs)
        if ds[-1] > self.bound:
            raise BassBoundError(f"degree {ds[-1]} exceeds the Bass bound {self.bound}")
        t = bass_table(mod, self.catalog(), self.bound)
        return {"module": M, "prime": p, "degrees": ds, "mu": [t.mu[i][j] for i in ds]}

    def q_supp(self, M):
        return {"primes": _sorted_names(small_support(self.module(M), self.catalog(), self.bound))}

    def q_ass(self, M):
        return {"primes": _sorted_names(ass_primes(self.module(M), self.catalog()))}

    def q_fitting(self, M):
        mod = self.module(M)
        F = fitting_ideal_0(mod)
        return {"generators": [str(g) for g in F.gb],
                "support": _sorted_names(fitting_support(mod, self.catalog()))}

    def q_coherence(self, S, n):
        v = coherence_verdict(self.subset(S), _level(n), self.ctx)
        d = v.to_dict()
        d["witness_rechecked"] = recheck_witness(v, self.ctx) if v.status == "not_coherent" else None
        return d

    def q_filtration(self, S):
        return filtration_report(self.subset(S), self.ctx).to_dict()

    def q_grade(self, I, M):
        g = grade_report(self.ideal(I), self.module(M))
        return {"grade": _num(g.value), "aM_equals_M": g.a_M_equals_M}

    def _module_result(self, X: FPModule):
        P = X.pruned.presentation
        return {"generators": P.rows, "is_zero": X.is_zero(), "presentation": P.to_lists()}

    def q_ext(self, i, M, N):
        return self._module_result(ext(_int(i), self.module(M), self.module(N)))

    def q_tor(self, i, M, N):
        return self._module_result(tor(_int(i), self.module(M), self.module(N)))

    def q_cohomology(self, X, i):
        return self._module_result(self.complex_(X).cohomology(_int(i)))

    def q_cphi(self, M, S, n):
        return {"member": c_phi_n_membership(self.module(M), self.subset(S), _int(n), self.bound)}

    def q_suppinv(self, M, S):
        return {"member": supp_inverse_membership(self.module(M), self.subset(S), self.bound)}

    def q_gb(self, I):
        return {"basis": [str(g) for g in self.ideal(I).gb]}

    def q_dim(self, I):
        J = self.ideal(I)
        if J.is_unit():
            return {"dim": "-inf"}
        return {"dim": krull_dim(J)}

    def q_contains(self, I, J):
        return {"contains": ideal_contains(self.ideal(I), self.ideal(J))}

    def q_predicates(self, S):
        p = subset_predicates(self.subset(S))
        return {"specialization_closed": p.specialization_closed,
                "generalization_closed": p.generalization_closed,
                "clopen_in_catalog": p.clopen_in_catalog}

    def q_restrict(self, S, p):
        return {"primes": _sorted_names(restrict_at(self.subset(S), self.prime(p)))}

    def q_indartinian(self, M):
        return {"ind_artinian": ind_artinian_check(self.module(M), self.catalog()), "banner": CATALOG_BANNER}

    def q_lc(self, I, M, i):
        return {"nonzero": cech_cohomology_nonzero(self.monomial(I), self.monomial_module(M), _int(i))}

    def q_cd(self, I, M):
        return {"cd": _num(cohomological_dimension(self.monomial(I), self.monomial_module(M)))}

    def q_suppcomplex(self, X):
        return {"primes": _sorted_names(supp_complex(self.complex_(X), self.catalog(), self.bound))}

    def q_consistency(self, X, S, n, i):
        return {"result": consistency_check_complex(self.complex_(X), self.subset(S), _level(n), _int(i),
                                                    self.bound)}

    def q_uniformity(self, X, S, n, i):
        return {"result": uniformity_check_complex(self.complex_(X), self.subset(S), _level(n), _int(i),
                                                   self.bound)}

    # ----------------------------------------------------------- checks

    def c_support(self, M):
        mod = self.module(M)
        cat = self.catalog()
        supp = small_support(mod, cat, self.bound)  # raises on oracle mismatch
        fit = fitting_support(mod, cat)
        ass = ass_primes(mod, cat)
        return {"passed": supp == fit and ass.issubset(supp), "supp": _sorted_names(supp),
                "fitting": _sorted_names(fit), "ass": _sorted_names(ass)}

    def c_gorenstein(self):
        cat = self.catalog()
        R = FPModule.free(self.s.ring, 1)
        top = min(4, self.bound)
        t = bass_table(R, cat, self.bound)
        bad = [[nm, i] for j, nm in enumerate(cat.names) for i in range(top + 1)
               if t.mu[i][j] != (1 if i == cat.heights[j] else 0)]
        return {"passed": not bad, "degrees": top, "violations": bad}

    def c_closure(self, S, n, count=None):
        seqs, chains, rejected = self.corpus()
        if count is not None:
            seqs = seqs[:_int(count)]
        rep = nwide_closure_test(self.subset(S), _level(n), seqs, self.ctx, chains, self.bound)
        out = rep.to_dict()
        out["rejected"] = rejected
        return out

    def c_localization(self, S, n):
        r = localization_consistency(self.subset(S), _level(n), self.ctx)
        return {"passed": r["consistent"], **r}

    def c_mv(self, A, B):
        mods = [None] + [SquarefreeMonomialIdeal.from_ideal(d.value) for d in self.s.declarations
                         if d.kind in ("ideal", "prime") and _is_sqfree(d.value)]
        r = mayer_vietoris_clopen_check(self.monomial(A), self.monomial(B), mods)
        return {"passed": r.passed or not r.hypotheses_hold, "hypotheses_hold": r.hypotheses_hold,
                "reason": r.reason, "failures": [list(f) for f in r.failures]}

    def c_grothendieck(self, I, M):
        return {"passed": grothendieck_bound_check(self.monomial(I), self.monomial_module(M))}

    def c_witness(self, S, n):
        v = coherence_verdict(self.subset(S), _level(n), self.ctx)
        if v.status != "not_coherent":
            return {"passed": True, "status": v.status, "rechecked": None}
        return {"passed": recheck_witness(v, self.ctx), "status": v.status, "rechecked": True}

    def c_gamma(self, I, M):
        a, mod = self.ideal(I), self.module(M)
        cat = self.catalog()
        lhs = ass_primes(gamma_torsion(a, mod), cat)
        rhs = ass_primes(mod, cat) & SpecSubset.V(cat, a)
        return {"passed": lhs == rhs, "ass_gamma": _sorted_names(lhs), "ass_cap_V": _sorted_names(rhs)}

    def dispatch(self) -> dict:
        return {
            "bass": self.q_bass, "supp": self.q_supp, "ass": self.q_ass, "fitting": self.q_fitting,
            "coherence": self.q_coherence, "filtration": self.q_filtration, "grade": self.q_grade,
            "ext": self.q_ext, "tor": self.q_tor, "cohomology": self.q_cohomology, "cphi": self.q_cphi,
            "suppinv": self.q_suppinv, "gb": self.q_gb, "dim": self.q_dim, "contains": self.q_contains,
            "predicates": self.q_predicates, "restrict": self.q_restrict, "indartinian": self.q_indartinian,
            "lc": self.q_lc, "cd": self.q_cd, "suppcomplex": self.q_suppcomplex,
            "consistency": self.q_consistency, "uniformity": self.q_uniformity,
            "check-support": self.c_support, "check-gorenstein": self.c_gorenstein,
            "check-closure": self.c_closure, "check-localization": self.c_localization,
            "check-mv": self.c_mv, "check-grothendieck": self.c_grothendieck,
            "check-witness": self.c_witness, "check-gamma": self.c_gamma,
        }


def _is_sqfree(I: Ideal) -> bool:
    try:
        SquarefreeMonomialIdeal.from_ideal(I)
        return True
    except ValueError:
        return False


_NEEDS_CATALOG = {"coherence", "filtration", "check-localization", "check-witness", "check-closure"}


def _digest(s: Session, flags: RunFlags) -> str:
    h = hashlib.sha256()
    h.update(s.to_source().encode())
    h.update(f"\0{__version__}\0{flags.bass_bound}\0{flags.seed}".encode())
    return h.hexdigest()


def _catalog_json(s: Session) -> list:
    if s.catalog is None:
        return []
    return [{"name": nm, "ideal": "(" + ", ".join(str(g) for g in p.generators) + ")",
             "height": s.catalog.heights[j]} for j, (nm, p) in enumerate(zip(s.catalog.names, s.catalog.primes))]


def _run_query(runner: _Runner, table: dict, q: Query) -> dict:
    entry: dict[str, Any] = {"query": q.text, "command": q.command, "line": q.line, "ok": True,
                             "result": None, "error": None}
    try:
        if q.command in _NEEDS_CATALOG and runner.ctx is None:
            raise QueryError("this query needs at least one declared prime")
        res = table[q.command](*q.args)
        entry["result"] = res
        if q.command.startswith("check-") and not res.get("passed", False):
            entry["ok"] = False
    except VerdictContradiction as e:
        entry.update(ok=False, error={"kind": "contradiction", "message": str(e)})
    except SupportOracleMismatch as e:
        entry.update(ok=False, error={"kind": "oracle-mismatch", "message": str(e)})
    except (QueryError, BassBoundError) as e:
        entry.update(ok=False, error={"kind": "query", "message": str(e)})
    except Exception as e:  # embedded, so later queries still run
        entry.update(ok=False, error={"kind": "engine", "message": f"{type(e).__name__}: {e}"})
    return entry


def run(s: Session, flags: RunFlags = RunFlags()) -> tuple:
    """Execute all queries in source order; returns (report, exit code)."""
    runner = _Runner(s, flags)
    table = runner.dispatch()
    results, timing = [], [] if flags.timing else None
    code = EXIT_OK
    for k, q in enumerate(s.queries):
        t0 = time.perf_counter()
        entry = _run_query(runner, table, q)
        entry["index"] = k
        if timing is not None:
            timing.append(round(time.perf_counter() - t0, 6))
        results.append(entry)
        if entry["error"] and entry["error"]["kind"] == "contradiction":
            code = EXIT_CONTRADICTION
        elif not entry["ok"] and code == EXIT_OK:
            code = EXIT_CHECK
        if not entry["ok"] and flags.fail_fast:
            break
    report = {
        "schema": SCHEMA_ID,
        "engine_version": __version__,
        "banner": CATALOG_BANNER,
        "session_digest": _digest(s, flags),
        "ring": next(d.text for d in s.declarations if d.kind == "ring"),
        "catalog": _catalog_json(s),
        "flags": {"bass_bound": runner.bound, "seed": flags.seed, "fail_fast": flags.fail_fast},
        "results": results,
        "errors": [],
        "exit_code": code,
        "timing": timing,
    }
    return report, code


def _error_report(errors: list, src: str) -> dict:
    return {
        "schema": SCHEMA_ID,
        "engine_version": __version__,
        "banner": CATALOG_BANNER,
        "session_digest": hashlib.sha256(src.encode()).hexdigest(),
        "ring": None,
        "catalog": [],
        "flags": None,
        "results": [],
        "errors": [e.to_dict() for e in errors],
        "exit_code": EXIT_PARSE,
        "timing": None,
    }


def run_source(src: str, flags: RunFlags = RunFlags()) -> tuple:
    try:
        s = parse_session(src)
    except SessionParseError as e:
        return _error_report(e.errors, src), EXIT_PARSE
    return run(s, flags)


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _summary(res: Any) -> str:
    if res is None:
        return ""
    if isinstance(res, dict):
        keys = [k for k in ("status", "rule", "primes", "mu", "member", "grade", "passed", "generators",
                            "basis", "dim", "contains", "nonzero", "cd", "result", "ind_artinian", "levels")
                if k in res]
        if keys:
            return " ".join(f"{k}={json.dumps(res[k], sort_keys=True, ensure_ascii=False)}" for k in keys)
    return json.dumps(res, sort_keys=True, ensure_ascii=False)


def render_text(report: dict) -> str:
    lines = [f"specfilt {report['engine_version']}  {report['schema']}", report["banner"]]
    for e in report["errors"]:
        lines.append(f"{e['line']}:{e['column']}: {e['kind']} error: {e['message']}")
    if report["results"]:
        w = max(len(r["query"]) for r in report["results"])
        for r in report["results"]:
            flag = "ok  " if r["ok"] else "FAIL"
            body = _summary(r["result"]) if r["error"] is None else f"{r['error']['kind']}: {r['error']['message']}"
            lines.append(f"[{r['index']:>3}] {flag} {r['query']:<{w}}  {body}")
    lines.append(f"exit {report['exit_code']}")
    return "\n".join(lines) + "\n"


def main(argv: list | None = None) -> int:
    ap = argparse.ArgumentParser(prog="specfilt", description="Catalog-relative coherence engine for subsets of Spec R")
    ap.add_argument("--version", action="version", version=f"specfilt {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a session file")
    r.add_argument("session", help="session file, or - for stdin")
    r.add_argument("--json", metavar="OUT", help="write the JSON report here (- for stdout)")
    r.add_argument("--bass-bound", type=int, default=None, metavar="N")
    r.add_argument("--fail-fast", action="store_true")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--timing", action="store_true", help="record per-query wall time in the report")
    args = ap.parse_args(argv)

    if args.bass_bound is not None and args.bass_bound < 0:
        ap.error("--bass-bound must be nonnegative")
    try:
        src = sys.stdin.read() if args.session == "-" else open(args.session, encoding="utf-8").read()
    except OSError as e:
        print(f"specfilt: cannot read {args.session}: {e}", file=sys.stderr)
        return EXIT_PARSE
    flags = RunFlags(args.bass_bound, args.fail_fast, args.seed, args.timing)
    report, code = run_source(src, flags)
    if args.json == "-":
        sys.stdout.write(dumps(report))
    else:
        if args.json:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(dumps(report))
        sys.stdout.write(render_text(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
