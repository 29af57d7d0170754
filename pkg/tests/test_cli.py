"""Command-line surface: registry wiring, exit codes, output formats."""

import json

import pytest

import drinfeld
from drinfeld.cli import (REGISTRY, acceptance_entries, bundle_exit_code,
                          load_config, report_bundle, run, run_check)


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_registry_covers_every_module_check_exactly_once():
    import drinfeld.cli as cli
    import drinfeld.counting
    import drinfeld.cremona
    import drinfeld.divlat
    import drinfeld.foliation
    import drinfeld.linsys
    import drinfeld.moore

    declared = []
    for mod in (drinfeld.moore, drinfeld.cremona, drinfeld.foliation,
                drinfeld.divlat, drinfeld.linsys, drinfeld.counting):
        declared.extend(mod.__checks__)
    assert sorted(declared) == sorted(REGISTRY)
    assert len(set(declared)) == len(declared)


def test_run_check_validates_parameters():
    with pytest.raises(Exception):
        run_check("moore-identity", {"q": 2})  # n missing
    with pytest.raises(Exception):
        run_check("no-such-check", {})
    with pytest.raises(Exception):
        run_check("moore-identity", {"q": 2, "n": 2, "bogus": 1})


def test_run_check_reports_runtime_and_status():
    r = run_check("moore-identity", {"q": 2, "n": 2})
    assert r.status == "PASS"
    assert isinstance(r.runtime_ms, int)
    d = r.to_dict()
    assert set(d) == {"check_id", "params", "status", "witness", "runtime_ms"}


def test_budget_overrun_becomes_error_report():
    r = run_check("psi-squared", {"q": 2, "n": 4})
    assert r.status == "ERROR"
    assert "budget" in r.witness["resource"]


def test_bundle_shape_and_tower_recording():
    bundle = report_bundle([("moore-identity", {"q": 2, "n": 2}),
                            ("count-b2", {"q": 2})])
    assert bundle["schema"] == 1
    assert bundle["tool"] == {"name": "drinfeld",
                              "version": drinfeld.__version__}
    assert [r["check_id"] for r in bundle["reports"]] == ["moore-identity",
                                                       "count-b2"]
    assert bundle["towers"]  # at least the base field shows up
    assert bundle_exit_code(bundle) == 0


def test_empty_bundle_is_fine():
    bundle = report_bundle([])
    assert bundle["reports"] == []
    assert bundle_exit_code(bundle) == 0


def test_parallel_bundle_is_deterministic():
    entries = [("moore-identity", {"q": 2, "n": 2}),
               ("count-strata", {"q": 2, "n": 2, "m": 3}),
               ("foliation-bracket", {"q": 2, "n": 2}),
               ("count-flags", {"q": 2, "m": 2})]
    a = report_bundle(entries, jobs=1)
    b = report_bundle(entries, jobs=4)
    for doc in (a, b):
        for r in doc["reports"]:
            r["runtime_ms"] = 0
    assert a == b


def test_acceptance_entries_are_valid_and_plentiful():
    entries = acceptance_entries()
    assert len(entries) >= 90
    ids = {cid for cid, _ in entries}
    assert "moore-identity" in ids and "linsys-serre" in ids
    # every entry must validate against the registry
    for cid, params in entries:
        assert cid in REGISTRY
        check_def = REGISTRY[cid]
        assert set(check_def.required) <= set(params)


def test_verify_single_check_stdout(capsys):
    code, out, err = _run(capsys, "verify", "moore-identity", "--q", "2",
                          "--n", "2")
    assert code == 0
    doc = json.loads(out)
    assert doc["reports"][0]["status"] == "PASS"
    assert doc["reports"][0]["params"] == {"q": 2, "n": 2}


def test_verify_group_and_filters(capsys):
    code, out, _ = _run(capsys, "verify", "moore", "--q", "2", "--n", "2")
    assert code == 0
    doc = json.loads(out)
    assert {r["check_id"] for r in doc["reports"]} == {"moore-identity",
                                                    "moore-partial"}
    code, out, _ = _run(capsys, "verify", "all", "--q", "2", "--n", "2")
    assert code == 0
    doc = json.loads(out)
    assert doc["reports"]
    for r in doc["reports"]:
        assert r["params"].get("q", 2) == 2
        assert r["params"].get("n", 2) == 2
        assert r["status"] in ("PASS", "VACUOUS")


def test_verify_unknown_target_exits_2(capsys):
    code, out, err = _run(capsys, "verify", "definitely-not-a-check")
    assert code == 2
    assert err.startswith("drinfeld:")
    assert "moore-identity" in err  # the message names valid ids


def test_verify_missing_parameter_exits_2(capsys):
    code, _, err = _run(capsys, "verify", "moore-identity", "--q", "2")
    assert code == 2
    assert "n" in err


def test_verify_budget_error_exits_1(capsys):
    code, out, _ = _run(capsys, "verify", "psi-squared", "--q", "2", "--n", "4")
    assert code == 1
    doc = json.loads(out)
    assert doc["reports"][0]["status"] == "ERROR"


def test_map_apply_defined_point(capsys):
    code, out, _ = _run(capsys, "map", "apply", "--n", "2", "--q", "2",
                        "--m", "3", "--point", "[[0,1,0],[0,0,1],[1,0,0]]")
    assert code == 0
    doc = json.loads(out)
    assert doc["map"]["defined"] is True
    assert doc["map"]["n"] == 2 and doc["map"]["extension_degree"] == 3
    assert "image" in doc["map"]


def test_map_apply_undefined_point(capsys):
    code, out, _ = _run(capsys, "map", "apply", "--n", "2", "--q", "2",
                        "--point", "[1,1,0]")
    assert code == 0
    doc = json.loads(out)
    assert doc["map"]["defined"] is False
    assert "image" not in doc["map"]


def test_count_csv_format(capsys):
    code, out, _ = _run(capsys, "count", "strata", "--q", "2", "--n", "2",
                        "--m", "3", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "stratum,count"
    assert lines[1:4] == ["0,24", "1,42", "2,7"]
    code, out, _ = _run(capsys, "count", "b2", "--q", "2", "--format", "csv")
    assert code == 0
    assert "b2,51" in out.splitlines()


def test_count_json_default(capsys):
    code, out, _ = _run(capsys, "count", "flags", "--q", "2", "--m", "2")
    assert code == 0
    doc = json.loads(out)
    assert doc["reports"][0]["witness"]["flags"] == 49


def test_linsys_subcommands(capsys):
    code, out, _ = _run(capsys, "linsys", "dim", "--q", "2", "--n", "2",
                        "--c", "2")
    assert code == 0
    assert json.loads(out)["reports"][0]["witness"]["dimension"] == 3
    code, out, _ = _run(capsys, "linsys", "appendix")
    assert code == 0
    assert json.loads(out)["reports"][0]["witness"]["h0"] == 2


def test_linsys_appendix_points_file(tmp_path, capsys):
    pf = tmp_path / "pts.json"
    pf.write_text(json.dumps([{"point": [1, 0, 0], "multiplicity": 3},
                              {"point": [0, 0, 1], "multiplicity": 3}]))
    code, out, _ = _run(capsys, "linsys", "appendix", "--q", "2",
                        "--points-file", str(pf), "--d", "4", "--s", "2")
    assert code == 0
    w = json.loads(out)["reports"][0]["witness"]
    assert w["h1"] == 1 and w["flagged"] is True


def test_report_config_roundtrip(tmp_path, capsys):
    cfg = {"checks": [{"check_id": "count-b2", "params": {"q": 2}},
                      {"check_id": "foliation-pclosed", "params": {"q": 3}}]}
    jpath = tmp_path / "checks.json"
    jpath.write_text(json.dumps(cfg))
    code, out_json, _ = _run(capsys, "report", "--config", str(jpath))
    assert code == 0

    tpath = tmp_path / "checks.toml"
    tpath.write_text('[[checks]]\ncheck_id = "count-b2"\n'
                     '[checks.params]\nq = 2\n'
                     '[[checks]]\ncheck_id = "foliation-pclosed"\n'
                     '[checks.params]\nq = 3\n')
    code, out_toml, _ = _run(capsys, "report", "--config", str(tpath))
    assert code == 0

    a, b = json.loads(out_json), json.loads(out_toml)
    for doc in (a, b):
        for r in doc["reports"]:
            r["runtime_ms"] = 0
    assert a == b


def test_report_config_rejects_unknown_check(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"checks": [{"check_id": "nope"}]}))
    code, _, err = _run(capsys, "report", "--config", str(path))
    assert code == 2
    assert "nope" in err


def test_load_config_empty_checks(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text(json.dumps({"checks": []}))
    assert load_config(str(path)) == []


def test_load_config_rejects_stray_keys(tmp_path, capsys):
    # a typoed table name must not degrade into an empty green bundle
    tpath = tmp_path / "typo.toml"
    tpath.write_text('[[check]]\ncheck_id = "count-b2"\n[check.params]\nq = 2\n')
    code, _, err = _run(capsys, "report", "--config", str(tpath))
    assert code == 2
    assert "check" in err

    jpath = tmp_path / "hollow.json"
    jpath.write_text("{}")
    code, _, err = _run(capsys, "report", "--config", str(jpath))
    assert code == 2
    assert "checks" in err


def test_no_arguments_prints_help(capsys):
    code, _, err = _run(capsys)
    assert code == 2
    assert "usage" in err.lower()


def test_output_file_option(tmp_path, capsys):
    target = tmp_path / "out.json"
    code, out, _ = _run(capsys, "verify", "count-b2", "--q", "2",
                        "--out", str(target))
    assert code == 0
    doc = json.loads(target.read_text())
    assert doc["reports"][0]["check_id"] == "count-b2"
