import json

import pytest

from hopfnet.cli import main

from .conftest import DATA


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return path


@pytest.fixture
def c1_args():
    return [
        DATA / "criterion1.net",
        "--rates", DATA / "criterion1_rates.json",
        "--steady-state", DATA / "criterion1_steady_state.json",
    ]


def test_matrices_csv(tmp_path, capsys):
    net = tmp_path / "ab.net"
    net.write_text("r1: A -> B\n")
    code, out, _ = run(capsys, "matrices", net)
    assert code == 0
    assert "A,-1" in out and "B,1" in out


def test_matrices_conserved_basis_nonempty(capsys):
    code, out, _ = run(capsys, "matrices", DATA / "binding.net", "--format", "json")
    data = json.loads(out)
    assert code == 0 and len(data["conservation"]) == 2 and data["rank"] == 1


def test_malformed_line_reports_line_number(tmp_path, capsys):
    bad = tmp_path / "bad.net"
    bad.write_text("A -> B\nA B -> C\n")
    code, _, err = run(capsys, "matrices", bad)
    assert code == 65 and "line 2" in err


def test_rays_csv(capsys):
    code, out, _ = run(capsys, "rays", DATA / "two_rays.net")
    assert code == 0
    assert out.splitlines()[0] == ",E1,E2"


def test_criterion1_certified(tmp_path, capsys, c1_args):
    code, _, err = run(capsys, "criterion1", *c1_args, "--output", tmp_path)
    assert code == 0 and "certified" in err
    report = json.loads((tmp_path / "report.json").read_text())
    w = report["outcome"]["witness"]
    assert w["beta_star"] > 0 and abs(w["mu"][0]) <= 1e-8


def test_criterion1_demo_writes_trajectory(tmp_path, capsys, c1_args):
    code, _, _ = run(capsys, "criterion1", *c1_args, "--demo", "--output", tmp_path)
    assert code == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["demo"]["metrics"]["oscillating"]
    assert (tmp_path / "trajectory.csv").read_text().startswith("t,A,B,C\n")


def test_criterion1_stable_steady_state_exit_2(tmp_path, capsys):
    rates = write_json(tmp_path / "r.json", {"feed": 1, "conv": 1.5, "auto": 1, "drain": 1})
    ss = write_json(tmp_path / "x.json", {"X": 1.0, "Y": 1.5})
    code, _, _ = run(capsys, "criterion1", DATA / "brusselator.net", "--rates", rates, "--steady-state", ss)
    assert code == 2


def test_criterion1_newton_guess(tmp_path, capsys):
    rates = write_json(tmp_path / "r.json", {"feed": 1, "conv": 3, "auto": 1, "drain": 1})
    guess = write_json(tmp_path / "g.json", [0.8, 2.5])
    code, out, _ = run(capsys, "criterion1", DATA / "brusselator.net", "--rates", rates, "--guess", guess)
    report = json.loads(out)
    assert code == 0 and report["steady_state"]["source"] == "newton"
    assert report["outcome"]["witness"]["beta_star"] == pytest.approx(0.5, abs=1e-9)


def test_criterion1_missing_rates_is_usage_error(capsys):
    code, _, _ = run(capsys, "criterion1", DATA / "criterion1.net",
                     "--steady-state", DATA / "criterion1_steady_state.json")
    assert code == 64


def test_criterion1_not_a_steady_state(tmp_path, capsys):
    ss = write_json(tmp_path / "x.json", [1.0, 1.0, 1.0])
    code, _, err = run(capsys, "criterion1", DATA / "criterion1.net",
                       "--rates", DATA / "criterion1_rates.json", "--steady-state", ss)
    assert code == 65 and "steady state" in err


def test_criterion2_zero_samples_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["criterion2", str(DATA / "criterion2.net"), "--samples", "0"])
    assert exc.value.code == 64


def test_criterion2_rank_aware_mode_noted(capsys):
    code, out, _ = run(capsys, "criterion2", DATA / "binding.net", "--samples", "5", "--budget", "50")
    report = json.loads(out)
    assert report["mode"] == "rank-aware mode, r = 1"
    assert code == 3


def test_criterion2_trivial_cone(tmp_path, capsys):
    net = tmp_path / "in.net"
    net.write_text("-> A\n")
    code, _, _ = run(capsys, "criterion2", net, "--samples", "2")
    assert code == 2


def test_criterion2_reports_are_byte_identical(tmp_path, capsys):
    args = ["criterion2", DATA / "criterion2.net", "--samples", "20", "--budget", "500", "--seed", "0"]
    assert run(capsys, *args, "--output", tmp_path / "a")[0] == 0
    assert run(capsys, *args, "--output", tmp_path / "b")[0] == 0
    assert (tmp_path / "a" / "report.json").read_bytes() == (tmp_path / "b" / "report.json").read_bytes()


def criterion2_report(tmp_path, capsys):
    run(capsys, "criterion2", DATA / "criterion2.net", "--samples", "20", "--budget", "500", "--output", tmp_path)
    return tmp_path / "report.json"


def test_verify_untampered(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", criterion2_report(tmp_path, capsys))
    assert code == 0 and "FAIL" not in out


def test_verify_criterion1_tampered_beta(tmp_path, capsys, c1_args):
    run(capsys, "criterion1", *c1_args, "--output", tmp_path)
    path = tmp_path / "report.json"
    assert run(capsys, "verify", path)[0] == 0
    report = json.loads(path.read_text())
    report["outcome"]["witness"]["beta_star"] += 1e-3
    path.write_text(json.dumps(report))
    code, out, _ = run(capsys, "verify", path)
    assert code == 1 and "FAIL  one conjugate pair on the imaginary axis" in out


def test_verify_wrong_network(tmp_path, capsys):
    report = criterion2_report(tmp_path, capsys)
    code, _, err = run(capsys, "verify", report, "--network", DATA / "criterion1.net")
    assert code == 65 and "digest mismatch" in err


def test_simulate_csv(tmp_path, capsys):
    rates = write_json(tmp_path / "r.json", {"feed": 1, "conv": 3, "auto": 1, "drain": 1})
    x0 = write_json(tmp_path / "x0.json", {"X": 1.2, "Y": 1.0})
    code, _, _ = run(capsys, "simulate", DATA / "brusselator.net", "--rates", rates, "--x0", x0,
                     "--t-end", "200", "--points", "4001", "--output", tmp_path / "out")
    assert code == 0
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["metrics"]["oscillating"]
    assert (tmp_path / "out" / "trajectory.csv").read_text().startswith("t,X,Y\n")


def test_timings_only_on_request(tmp_path, capsys):
    args = ["criterion2", DATA / "criterion2.net", "--samples", "20", "--budget", "500"]
    assert "timings_s" not in json.loads(run(capsys, *args)[1])
    assert "timings_s" in json.loads(run(capsys, *args, "--timings")[1])
