import json
import random

import pytest

from nestedbethe.cli import main
from nestedbethe.sampling import draw_chain, draw_generic, draw_q
from nestedbethe.suites import SUITES, build_cases, run_suite


@pytest.fixture
def m3l2(tmp_path):
    path = tmp_path / "m3L2.json"
    path.write_text(json.dumps({"m": 3, "L": 2, "q": "3", "xi": ["1", "5/2"], "kappa": ["2", "-1/3", "7"]}))
    return path


def test_verify_rtt_with_config(m3l2, tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["verify", "--suite", "rtt", "--config", str(m3l2), "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["status"] == "pass"
    assert {c["status"] for c in report["suites"]["rtt"]} == {"exact-pass"}
    assert "runtime_ms" not in report["suites"]["rtt"][0]


def test_hc_eval_empty(capsys):
    assert main(["hc", "eval", "--s", "[]", "--t", "[]", "--q", "3"]) == 0
    assert json.loads(capsys.readouterr().out)["Z"] == "1"


def test_hc_eval_pair(capsys):
    assert main(["hc", "eval", "--s", '[["1"]]', "--t", '[["2"]]', "--q", "3"]) == 0
    assert json.loads(capsys.readouterr().out)["Z"] == "16/3"


def test_usage_errors(tmp_path, capsys):
    assert main(["verify", "--suite", "nope"]) == 2
    assert main(["solve-bethe", "--config", str(tmp_path / "missing.json"), "--r", "1"]) == 2
    assert main(["hc", "eval", "--s", "[[1]]", "--t", "[]", "--q", "3"]) == 2
    assert main(["hc", "eval", "--s", "not json", "--t", "[]", "--q", "3"]) == 2
    assert main([]) == 2


def test_solve_and_norm_check(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"m": 2, "L": 2, "q": "2", "xi": ["1", "3"], "kappa": ["3", "1"]}))
    assert main(["solve-bethe", "--config", str(cfg), "--r", "1", "--seeds", "40"]) == 0
    sols = json.loads(capsys.readouterr().out)["solutions"]
    assert len(sols) == 2
    roots = tmp_path / "roots.json"
    roots.write_text(json.dumps({"t": sols[0]["roots"]}))
    assert main(["norm-check", "--config", str(cfg), "--roots", str(roots)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["status"] == "pass"
    assert float(rep["solutions"][0]["rel_err"]) < 1e-25


def test_failed_verification_exits_one(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"m": 2, "L": 1, "q": "3", "xi": ["2"]}))
    # a single site has no admissible pair of roots
    assert main(["solve-bethe", "--config", str(cfg), "--r", "2", "--seeds", "5"]) == 1


def test_every_suite_has_cases():
    for name in SUITES:
        cases = build_cases(name, "quick")
        assert cases
        assert len({c.name for c in cases}) == len(cases)


def test_quick_report_deterministic_and_ordered():
    a = run_suite("korepin", seed=3, scale="quick")
    b = run_suite("korepin", seed=3, scale="quick")
    assert a.dumps() == b.dumps()
    names = [c.name for c in a.cases]
    assert names == sorted(names)
    assert a.ok


def test_case_failure_is_reported(monkeypatch):
    from nestedbethe import suites

    def broken(rng):
        raise RuntimeError("boom")

    monkeypatch.setattr(suites, "build_cases", lambda *a, **k: [suites.Case("x", "c", "none", broken)])
    report = suites.run_suite("x")
    assert not report.ok
    assert report.to_json()["suites"]["x"][0]["witness"]["error"] == "RuntimeError: boom"


def test_sampling_genericity():
    rng = random.Random(5)
    q = draw_q(rng)
    vals = draw_generic(rng, q, 30)
    q2 = q.q * q.q
    assert all(x != y and x != q2 * y for x in vals for y in vals if x is not y)
    cfg = draw_chain(rng, 3, 2)
    assert all(-40 <= k.numerator <= 40 and 0 < k.denominator <= 40 for k in cfg.kappa)
