import json
import subprocess
import sys

import jsonschema
import pytest

import specfilt.cli as cli
from corpus import SESSIONS, session_text
from specfilt.cli import RunFlags, dumps, load_schema, main, render_text, run_source
from specfilt.coherence import VerdictContradiction

GOLDEN = ["minimal", "plane", "line", "contradiction_free_gf"]


def report_of(name, **kw):
    return run_source(session_text(name), RunFlags(**kw))


@pytest.mark.parametrize("name", GOLDEN + ["malformed"])
def test_schema_valid(name):
    report, code = report_of(name)
    jsonschema.validate(report, load_schema())
    assert report["exit_code"] == code
    assert report["schema"] == "specfilt-report/1"


@pytest.mark.parametrize("name", GOLDEN)
def test_byte_identical(name):
    a, _ = report_of(name)
    b, _ = report_of(name)
    assert dumps(a) == dumps(b)


def test_golden_exit_codes():
    for name in GOLDEN:
        assert report_of(name)[1] == 0, name
    assert report_of("malformed")[1] == 2


def test_malformed_errors():
    report, _ = report_of("malformed")
    errs = report["errors"]
    assert [(e["line"], e["column"]) for e in errs] == [(3, 13), (4, 16), (5, 18), (6, 7), (7, 7)]
    assert report["results"] == []


def test_query_error_embedded_and_exit_1():
    src = session_text("minimal").rstrip() + "\nquery cphi M S 99;\nquery supp M;\n"
    src = src.replace("query bass", "subset S = full;\nquery bass")
    report, code = run_source(src)
    assert code == 1
    errs = [r for r in report["results"] if r["error"]]
    assert len(errs) == 1 and errs[0]["error"]["kind"] == "query"
    assert report["results"][-1]["ok"]


def test_fail_fast_stops():
    src = "ring R = QQ[x,y]; prime p = (x); subset S = full; module M = coker [[x]];\n" \
          "query cphi M S 99; query supp M;"
    full, _ = run_source(src)
    fast, code = run_source(src, RunFlags(fail_fast=True))
    assert len(full["results"]) == 2 and len(fast["results"]) == 1 and code == 1


def test_contradiction_exit_3(monkeypatch):
    def boom(*a, **k):
        raise VerdictContradiction("forced")

    monkeypatch.setattr(cli, "coherence_verdict", boom)
    report, code = run_source(session_text("plane"))
    assert code == 3
    kinds = {r["error"]["kind"] for r in report["results"] if r["error"]}
    assert "contradiction" in kinds
    jsonschema.validate(report, load_schema())


def test_coherence_query_results():
    report, _ = report_of("plane")
    by_query = {r["query"]: r["result"] for r in report["results"]}
    r = by_query["coherence Dx 1"]
    assert (r["status"], r["rule"]) == ("coherent", "R3")
    assert by_query["coherence Dx 0"]["status"] == "not_coherent"
    assert by_query["coherence Dxy 1"]["rule"] == "R6"
    assert by_query["supp M"]["primes"] == ["m", "px"]
    levels = by_query["filtration Dx"]["levels"]
    assert [levels[k] for k in ("0", "1", "2", "inf")] == ["not_coherent", "coherent", "coherent", "coherent"]


def test_digest_excludes_timing():
    a, _ = report_of("minimal", timing=True)
    b, _ = report_of("minimal")
    assert a["session_digest"] == b["session_digest"]
    assert isinstance(a["timing"], list) and b["timing"] is None
    c, _ = report_of("minimal", seed=1)
    assert c["session_digest"] != b["session_digest"]


def test_digest_depends_on_source():
    a, _ = run_source("ring R = QQ[x]; prime p = (x); query dim p;")
    b, _ = run_source("ring R = QQ[x]; prime p = (x - 1); query dim p;")
    assert a["session_digest"] != b["session_digest"]


def test_text_rendering_is_stable():
    report, _ = report_of("plane")
    text = render_text(report)
    assert text == render_text(report_of("plane")[0])
    assert text.splitlines()[-1] == "exit 0"
    assert "catalog-relative" in text


def test_main_json(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["run", str(SESSIONS / "minimal.sf"), "--json", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    assert data["exit_code"] == 0
    assert "bass M p 0..3" in capsys.readouterr().out


def test_main_bass_bound(capsys):
    code = main(["run", str(SESSIONS / "minimal.sf"), "--json", "-", "--bass-bound", "2"])
    data = json.loads(capsys.readouterr().out)
    assert data["flags"]["bass_bound"] == 2
    assert code == 1  # 0..3 exceeds the bound


def test_subprocess_entry_point(tmp_path):
    p = subprocess.run([sys.executable, "-m", "specfilt", "run", str(SESSIONS / "malformed.sf"), "--json", "-"],
                       capture_output=True, text=True)
    assert p.returncode == 2
    assert json.loads(p.stdout)["errors"]
    missing = subprocess.run([sys.executable, "-m", "specfilt", "run", str(tmp_path / "nope.sf")],
                             capture_output=True, text=True)
    assert missing.returncode == 2
