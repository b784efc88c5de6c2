import csv
import json

import pytest
from hypothesis import given, strategies as st

from thingap.cli import check, execute, main, run
from thingap.config import DEFAULTS, apply_override, load_config, quadrature_config
from thingap.errors import CheckFailed, ConfigInvalid, IoFailure, NoReports
from thingap.estimates import fit_scaling
from thingap.reports import Report, emit_report, read_json_report, to_csv, to_json


def test_defaults_load():
    tree = load_config()
    assert tree == DEFAULTS and tree is not DEFAULTS
    assert quadrature_config(tree).radial_cells == 3


def test_config_file_merge_and_unknown_key(tmp_path):
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"schema": 1, "sweep": {"n_h": 4}}))
    assert load_config(good)["sweep"]["n_h"] == 4
    assert load_config(good)["sweep"]["h_min"] == DEFAULTS["sweep"]["h_min"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"sweep": {"n_hh": 4}}))
    with pytest.raises(ConfigInvalid):
        load_config(bad)


@pytest.mark.parametrize("override", ["sweep.n_h=2.5", "sweep.alphas=1", "geometry.k=\"x\"",
                                      "nope.k=1", "geometry.zz=1", "sweep", "schema=2",
                                      "geometry=1"])
def test_bad_overrides(override):
    with pytest.raises(ConfigInvalid):
        load_config(None, [override])


def test_overrides_parse_json():
    tree = load_config(None, ["sweep.alphas=[0.5]", "geometry.R=0.25", "sweep.c_w=null",
                              "output.dir=somewhere"])
    assert tree["sweep"]["alphas"] == [0.5]
    assert tree["geometry"]["R"] == 0.25
    assert tree["output"]["dir"] == "somewhere"
    t2 = load_config()
    apply_override(t2, "sweep.seed=7")
    assert t2["sweep"]["seed"] == 7


def test_unreadable_config(tmp_path):
    with pytest.raises(ConfigInvalid):
        load_config(tmp_path / "missing.json")


def test_emit_requires_reports(tmp_path):
    with pytest.raises(NoReports):
        emit_report([], tmp_path)


def test_scaling_fit_json_keys(tmp_path):
    import numpy as np
    hs = np.logspace(-3, -1, 5)
    fit = fit_scaling([(h, h ** 0.5) for h in hs], 0.5)
    rep = Report("fit", "one", fit.as_dict(), passed=fit.passed)
    (path,) = emit_report([rep], tmp_path, ["json"])
    (obj,) = read_json_report(path)
    assert {"slope", "intercept", "rSquared", "pass"} <= set(obj)


def test_one_file_per_kind(tmp_path):
    reps = [Report("a", "x", {"v": 1.0}), Report("b", "y", {"v": 2.0}),
            Report("a", "z", {"v": 3.0})]
    paths = emit_report(reps, tmp_path)
    assert sorted(p.name for p in paths) == ["a.csv", "a.json", "b.csv", "b.json"]
    assert len(read_json_report(tmp_path / "a.json")) == 2


def test_emit_io_failure(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(IoFailure):
        emit_report([Report("a", "x")], blocker / "sub")


@given(vals=st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=20))
def test_float_round_trip_bit_exact(vals):
    rep = Report("k", "n", {"vals": vals}, [{"v": v} for v in vals])
    back = json.loads(to_json([rep]))[0]
    assert back["vals"] == vals
    assert [r["v"] for r in back["rows"]] == vals
    rows = list(csv.DictReader(to_csv([rep]).splitlines()))
    assert [float(r["v"]) for r in rows] == vals


def test_check_raises_on_failure():
    check([Report("a", "ok", passed=True), Report("a", "info")])
    with pytest.raises(CheckFailed):
        check([Report("a", "bad", passed=False)])


def test_execute_keeps_task_order():
    tasks = [(pow, dict(base=b, exp=2)) for b in range(6)]
    assert execute(tasks, 1) == execute(tasks, 3) == [b * b for b in range(6)]


def test_verify_identities_command(tmp_path, capsys):
    code = main(["verify-identities", "--out", str(tmp_path), "--set", "sweep.n_cases=3"])
    assert code == 0
    rows = list(csv.DictReader((tmp_path / "identities.csv").open()))
    assert rows and all(float(r["relError"]) <= float(r["tol"]) for r in rows)
    assert "pass" in capsys.readouterr().out


def test_scaling_command_reports_expected_slope(tmp_path):
    code = main(["scaling", "--alpha", "1", "--component", "u3", "--out", str(tmp_path),
                 "--format", "json", "--set", "sweep.n_h=4", "--set", "sweep.h_min=0.01"])
    assert code in (0, 2)
    (rep,) = read_json_report(tmp_path / "scaling.json")
    assert rep["ratioFit"]["expectedSlope"] == 0.5
    assert rep["gradSquareFit"]["expectedSlope"] == -1.0
    assert not (tmp_path / "scaling.csv").exists()


def test_collide_inadmissible_is_informational(tmp_path):
    code = main(["collide", "--alpha", "1", "--theta", "1", "--grid", "3", "--out",
                 str(tmp_path)])
    assert code == 0
    rep = read_json_report(tmp_path / "collide.json")[0]
    assert rep["admissible"] is False
    assert rep["admissibility"]["admissible"] is False


def test_config_errors_exit_one(tmp_path, capsys):
    assert main(["verify-weak", "--set", "sweep.bogus=1", "--out", str(tmp_path)]) == 1
    assert "config error" in capsys.readouterr().err
    assert main(["verify-weak", "--jobs", "0", "--out", str(tmp_path)]) == 1


def test_failed_check_exits_two(tmp_path):
    # a slope tolerance of zero cannot be met by any fitted slope
    code = main(["scaling", "--alpha", "1", "--component", "om3", "--out", str(tmp_path),
                 "--set", "sweep.n_h=4", "--set", "sweep.h_min=0.01",
                 "--set", "sweep.slope_tol=0.0"])
    assert code == 2


def test_same_seed_same_bytes(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out, jobs in ((a, "1"), (b, "2")):
        assert main(["verify-weak", "--out", str(out), "--jobs", jobs]) == 0
    for name in ("weak.csv", "weak.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_run_returns_reports():
    tree = load_config(None, ["sweep.n_cases=2"])
    reps = run("verify-identities", tree)
    assert reps and all(r.passed for r in reps)
