import csv
import json
from pathlib import Path

import pytest

from isotau.cli import main

FIX = Path(__file__).parent / "fixtures"


def write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def run(*args):
    return main([str(a) for a in args])


def test_integrate_fixture_row_count(tmp_path):
    out = tmp_path / "o"
    assert run("integrate", "--config", FIX / "p2_integrate.json", "--out", out) == 0
    rows = list(csv.reader((out / "trajectory.csv").open()))
    assert len(rows) == 1 + 25
    assert rows[0][:3] == ["s", "re_t", "im_t"]
    assert rows[0][-4:] == ["re_ln_tau", "im_ln_tau", "re_S", "im_S"]
    assert "re_log_k" in rows[0]
    summary = json.loads((out / "summary.json").read_text())
    assert set(summary) >= {"delta_ln_tau", "delta_action", "g_start", "g_end", "step_stats"}
    last = rows[-1]
    assert float(last[-4]) == summary["delta_ln_tau"][0]


def test_zero_length_path(tmp_path):
    cfg = {"system": "P2", "theta": {"theta_inf": 0.2}, "state": {"q": 0.1, "p": 0.2},
           "path": [0.5, 0.5]}
    out = tmp_path / "o"
    assert run("integrate", "--config", write(tmp_path, cfg), "--out", out) == 0
    s = json.loads((out / "summary.json").read_text())
    assert s["delta_ln_tau"] == [0.0, 0.0] and s["delta_action"] == [0.0, 0.0]
    assert s["g_start"] == s["g_end"]


@pytest.mark.parametrize("cfg", [
    {"system": "P9"},
    {"system": "P2", "checks": ["no_such_check"]},
    {"system": "P2", "theta": {"theta_inf": 0.1}},
    {"system": "P3", "theta": {"theta0": 0.1}, "state": {"q": 1, "p": 1}, "path": [0.0, 1.0]},
    {"system": "P2", "tolerances": {"rel_tol": -1}},
    {"system": "P2", "corruption": {"name": "bogus"}},
    {"system": "schlesinger", "model": {"mat_dim": 1}},
])
def test_config_errors_exit_2_without_output(tmp_path, cfg):
    out = tmp_path / "o"
    assert run("integrate", "--config", write(tmp_path, cfg), "--out", out) == 2
    assert not out.exists()


def test_unreadable_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("verify", "--config", bad, "--out", tmp_path / "o") == 2


def test_integration_abort_exit_3(tmp_path, capsys):
    cfg = {"system": "P2", "theta": {"theta_inf": 0}, "state": {"q": 5, "p": 0}, "path": [0.0, 1.0]}
    out = tmp_path / "o"
    assert run("integrate", "--config", write(tmp_path, cfg), "--out", out) == 3
    assert "last good t" in capsys.readouterr().err
    assert not out.exists()


def test_verify_all_checks_p2_default_seed(tmp_path):
    out = tmp_path / "o"
    assert run("verify", "--config", write(tmp_path, {"system": "P2"}), "--out", out) == 0
    reports = json.loads((out / "reports.json").read_text())
    names = {r["name"] for r in reports}
    assert {"lax_compatibility", "hamilton_equations", "series_recursion", "action_identity",
            "variational_identity", "tau_log_derivative", "scalar_equation", "step_halving",
            "concatenation", "reversal"} <= names
    assert all(r["passed"] for r in reports)
    assert all(r["context"]["seed"] == 0 for r in reports)


def test_verify_corruption_fixture_fails(tmp_path, capsys):
    out = tmp_path / "o"
    assert run("verify", "--config", FIX / "p4_corrupted.json", "--out", out) == 1
    reports = {r["name"]: r for r in json.loads((out / "reports.json").read_text())}
    assert not reports["hamilton_equations"]["passed"]
    assert reports["lax_compatibility"]["passed"]
    assert "FAILED hamilton_equations" in capsys.readouterr().err


def test_verify_empty_checks(tmp_path):
    out = tmp_path / "o"
    assert run("verify", "--config", write(tmp_path, {"system": "P5", "checks": []}), "--out", out) == 0
    assert json.loads((out / "reports.json").read_text()) == []


@pytest.mark.parametrize("kind,counts", [("P2", [3]), ("P1", [5])])
def test_series_coefficient_counts(tmp_path, kind, counts):
    out = tmp_path / "o"
    assert run("series", "--config", write(tmp_path, {"system": kind}), "--out", out) == 0
    doc = json.loads((out / "series.json").read_text())
    assert [len(f["g"]) for f in doc["frames"]] == counts
    assert all(f["residual"] < 1e-9 for f in doc["frames"])


def test_series_p6_frames(tmp_path):
    out = tmp_path / "o"
    assert run("series", "--config", write(tmp_path, {"system": "P6"}), "--out", out) == 0
    doc = json.loads((out / "series.json").read_text())
    t = doc["t"]
    locs = [f["location"] for f in doc["frames"]]
    assert [0.0, 0.0] in locs and [1.0, 0.0] in locs and t in locs
    at_t = next(f for f in doc["frames"] if f["location"] == t)
    assert len(at_t["g"]) == 1


def test_byte_stable_outputs(tmp_path):
    for fmt in ("csv", "json"):
        a, b = tmp_path / f"a{fmt}", tmp_path / f"b{fmt}"
        cfg = write(tmp_path, {"system": "P6"})
        assert run("integrate", "--config", cfg, "--out", a, "--seed", 5, "--format", fmt) == 0
        assert run("integrate", "--config", cfg, "--out", b, "--seed", 5, "--format", fmt) == 0
        for f in a.iterdir():
            assert f.read_bytes() == (b / f.name).read_bytes()


def test_seed_changes_sampled_inputs(tmp_path):
    cfg = write(tmp_path, {"system": "P3"})
    run("integrate", "--config", cfg, "--out", tmp_path / "a", "--seed", 1)
    run("integrate", "--config", cfg, "--out", tmp_path / "b", "--seed", 2)
    assert (tmp_path / "a" / "summary.json").read_text() != (tmp_path / "b" / "summary.json").read_text()


def test_json_trajectory_format(tmp_path):
    out = tmp_path / "o"
    assert run("integrate", "--config", FIX / "p2_integrate.json", "--out", out, "--format", "json") == 0
    recs = json.loads((out / "trajectory.json").read_text())
    assert len(recs) == 25 and "re_q" in recs[0]


def test_schlesinger_verify_fixture(tmp_path):
    out = tmp_path / "o"
    assert run("schlesinger", "--config", FIX / "schlesinger_loop.json", "--out", out) == 0
    reports = json.loads((out / "reports.json").read_text())
    assert {r["name"] for r in reports} == {"isospectrality", "residue_sum_conservation", "loop_closedness",
                                            "commutator_agreement", "schlesinger_action_identity",
                                            "mixed_partials"}


def test_schlesinger_integrate_and_corruption(tmp_path):
    out = tmp_path / "o"
    cfg = {"system": "schlesinger", "model": {"mat_dim": 3, "pole_count": 2}, "samples": 9}
    assert run("schlesinger", "--config", write(tmp_path, cfg), "--out", out) == 0
    rows = list(csv.reader((out / "trajectory.csv").open()))
    assert len(rows) == 10 and rows[0][1:5] == ["re_t1", "im_t1", "re_t2", "im_t2"]
    cfg = {"system": "schlesinger", "checks": ["schlesinger_suite"],
           "corruption": {"name": "schlesinger_p_flip"}}
    assert run("schlesinger", "--config", write(tmp_path, cfg), "--out", tmp_path / "c") == 1


def test_explicit_schlesinger_state(tmp_path):
    cfg = {
        "system": "schlesinger",
        "model": {"mat_dim": 2, "pole_count": 2, "thetas": [[0.3, -0.3], [0.2, -0.2]], "theta_inf": [-0.1, 0.1]},
        "state": {"poles": [0, 1],
                  "q_mats": [[[0.3, 0], [0, -0.3]], [[-0.2, 0], [0, 0.2]]],
                  "p_mats": [[[1, 0], [0, 1]], [[1, 0], [0, 1]]]},
        "path": [[0, 1], {"re": [0, 1.2], "im": [0, 0.1]}],
    }
    assert run("integrate", "--config", write(tmp_path, cfg), "--out", tmp_path / "o") == 0
    cfg["path"] = [[0, 1], [0, {"re": 1.2}]]
    assert run("integrate", "--config", write(tmp_path, cfg), "--out", tmp_path / "p") == 2
    cfg["path"] = [[0, 1], [0, 1.2]]
    cfg["model"]["theta_inf"] = [0.1, -0.1]
    assert run("integrate", "--config", write(tmp_path, cfg), "--out", tmp_path / "q") == 2


def test_series_rejects_schlesinger(tmp_path):
    assert run("series", "--config", write(tmp_path, {"system": "schlesinger"}), "--out", tmp_path / "o") == 2
