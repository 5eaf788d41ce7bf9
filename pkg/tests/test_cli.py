import json

import pytest

from symnumint.cli import main
from symnumint.corpus import (CorpusEntry, CorpusError, RunReport, entry_seed, goldens_path,
                              load_corpus, run_corpus, run_entry)
from symnumint.integrator import IntegratorConfig


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_integrate_prints_result(capsys):
    code, out, _ = run(capsys, "integrate", "x*sin(x)")
    assert code == 0 and out.strip() == "sin(x) - x*cos(x)"


def test_integrate_no_answer(capsys):
    code, out, err = run(capsys, "integrate", "1/(1+2*cos(x))")
    assert code == 1 and out.strip() == "no answer"
    assert "verification failed" in err


def test_integrate_syntax_error(capsys):
    code, _, err = run(capsys, "integrate", "(((")
    assert code == 2 and "position 3" in err


def test_integrate_json_and_flags(capsys):
    code, out, _ = run(capsys, "integrate", "cot(x)^4", "--json", "--L", "2", "--seed", "3",
                       "--radius", "4", "--eps", "1e-7", "--lambda", "1e-4", "--threshold",
                       "0.02", "--pole-iters", "2", "--verify-tol", "1e-7")
    d = json.loads(out)
    assert code == 0 and d["solved"] and d["generator_index"] == 1


def test_bad_flag_value(capsys):
    code, _, _ = run(capsys, "integrate", "x", "--L", "0")
    assert code == 2
    with pytest.raises(SystemExit) as info:
        main(["integrate"])
    assert info.value.code == 2


def write(tmp_path, lines):
    p = tmp_path / "c.jsonl"
    p.write_text("\n".join(lines) + ("\n" if lines else ""))
    return p


def test_empty_corpus(tmp_path, capsys):
    code, out, _ = run(capsys, "corpus", str(write(tmp_path, [])), "--json")
    d = json.loads(out)
    assert code == 0 and d["entries"] == [] and d["aggregates"] == {}


def test_unparseable_entry_is_error(tmp_path, capsys):
    p = write(tmp_path, ['{"id": "bad", "integrand": "x +"}',
                         '{"id": "ok", "integrand": "cos(x)", "expected": "sin(x)", "tags": ["t"]}'])
    code, out, _ = run(capsys, "corpus", str(p), "--json")
    d = json.loads(out)
    assert code == 0
    assert [e["outcome"] for e in d["entries"]] == ["error", "solved"]
    assert d["entries"][1]["expected_ok"] is True
    assert d["aggregates"]["all"] == {"success": 1, "failure": 0, "error": 1, "total": 2}


def test_missing_or_corrupt_corpus(tmp_path, capsys):
    assert run(capsys, "corpus", str(tmp_path / "nope.jsonl"))[0] == 2
    assert run(capsys, "corpus", str(write(tmp_path, ["{not json"])))[0] == 2
    with pytest.raises(CorpusError):
        load_corpus(write(tmp_path, ['{"integrand": "x"}']))


def test_goldens_load():
    entries = load_corpus(goldens_path())
    assert 35 <= len(entries) <= 50
    assert len({e.id for e in entries}) == len(entries)


def test_report_roundtrip_and_arithmetic():
    entries = [CorpusEntry("a", "x*sin(x)", "sin(x) - x*cos(x)", ("p",)),
               CorpusEntry("b", "1/(1+2*cos(x))", None, ("p", "q")),
               CorpusEntry("c", "sin(", None, ())]
    report = run_corpus(entries)
    back = RunReport.from_json(report.to_json())
    assert back == report
    for agg in report.aggregates.values():
        assert agg["success"] + agg["failure"] + agg["error"] == agg["total"]
    assert report.aggregates["p"]["total"] == 2 and report.aggregates["all"]["total"] == 3
    assert "success" in report.table()


def test_entry_seed_depends_on_id_and_seed():
    assert entry_seed(0, "a") != entry_seed(0, "b")
    assert entry_seed(0, "a") != entry_seed(1, "a")
    assert entry_seed(0, "a") == entry_seed(0, "a")


def test_timeout_counts_as_failure():
    r = run_entry(CorpusEntry("slow", "cot(x)^4"), IntegratorConfig(L=3), timeout=1e-4)
    assert r.outcome in ("unsolved", "solved")
    if r.outcome == "unsolved":
        assert "timeout" in r.message


def test_jobs_match_serial():
    entries = load_corpus(goldens_path())[:6]
    a = run_corpus(entries, jobs=1).to_json(timing=False)
    b = run_corpus(entries, jobs=2).to_json(timing=False)
    assert a == b


def test_corpus_output_file(tmp_path, capsys):
    p = write(tmp_path, ['{"id": "a", "integrand": "exp(x)"}'])
    out = tmp_path / "r.json"
    code, text, _ = run(capsys, "corpus", str(p), "--output", str(out), "--no-timing")
    assert code == 0 and "all" in text
    d = json.loads(out.read_text())
    assert "wall_time" not in d["entries"][0]
