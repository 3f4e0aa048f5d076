"""CLI contract: flags, exit codes, JSON envelopes, config files."""

import json
from fractions import Fraction

import pytest

from masep import cli
from masep.verify import CheckReport


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_stationary_example(capsys):
    code, out, _ = run_cli(
        capsys,
        "stationary", "--n", "2", "--l", "1",
        "--left", "1,1,2,2:a=1,c=0", "--right", "1,1,2,2:a=2,c=0",
    )
    assert code == 0
    envelope = json.loads(out)
    assert envelope["command"] == "stationary"
    assert envelope["reports"][0]["distribution"] == ["2/3", "1/3"]


def test_check_reflection_example(capsys):
    code, out, _ = run_cli(
        capsys,
        "check", "reflection", "--n", "3", "--q", "3/4",
        "--spec", "1,1,3,3,decaying", "--a", "1", "--c", "2",
        "--samples", "8", "--seed", "7",
    )
    assert code == 0
    envelope = json.loads(out)
    report = envelope["reports"][0]
    assert report["passed"] and report["witness"] is None
    assert len(report["samples"]) == 8


def test_boundaries_enumerate(capsys):
    code, out, _ = run_cli(capsys, "boundaries", "enumerate", "--n", "3")
    assert code == 0
    envelope = json.loads(out)
    assert envelope["reports"][0]["count"] == 4
    specs = envelope["reports"][0]["specs"]
    assert {tuple(s[k] for k in ("s1", "s2", "f2", "f1")) for s in specs} == {
        (1, 1, 2, 2), (2, 2, 3, 3), (1, 1, 3, 3)
    }


def test_boundaries_show_cross_check(capsys):
    code, out, _ = run_cli(
        capsys,
        "boundaries", "show", "--n", "3", "--q", "2",
        "--spec", "1,1,3,3,decaying", "--a", "1", "--c", "2",
    )
    assert code == 0
    payload = json.loads(out)["reports"][0]
    assert payload["rule_matrix_matches_template"] is True
    assert payload["classes"]["2"] == "intermediate"
    assert "decomposition" in payload


def test_irreducible_command(capsys):
    code, out, _ = run_cli(
        capsys,
        "irreducible", "--n", "3", "--l", "2", "--q", "1/2",
        "--left", "2,2,3,3", "--right", "1,1,2,2",
    )
    assert code == 0
    assert json.loads(out)["reports"][0]["irreducible"] is True


def test_check_transfer_command(capsys):
    code, out, _ = run_cli(
        capsys,
        "check", "transfer", "--n", "2", "--l", "2", "--q", "1/2",
        "--left", "1,1,2,2:a=1,c=2", "--right", "1,1,2,2:a=3,c=1",
        "--samples", "2", "--seed", "3",
    )
    assert code == 0
    assert json.loads(out)["reports"][0]["passed"] is True


def test_boundaries_show_right_side(capsys):
    code, out, _ = run_cli(
        capsys,
        "boundaries", "show", "--n", "3", "--q", "2",
        "--spec", "1,1,2,2", "--side", "right", "--a", "2", "--c", "1",
    )
    assert code == 0
    payload = json.loads(out)["reports"][0]
    assert payload["spec"]["side"] == "right"
    assert "decomposition" not in payload
    assert payload["rule_matrix_matches_template"] is True


def test_simulate_replicas_flag(capsys):
    code, out, _ = run_cli(
        capsys,
        "simulate", "--n", "2", "--l", "1", "--q", "1",
        "--left", "1,1,2,2:a=1,c=0", "--right", "1,1,2,2:a=2,c=0",
        "--events", "5000", "--seed", "4", "--replicas", "2",
    )
    assert code == 0
    report = json.loads(out)["reports"][0]
    assert report["replicas"] == 2 and report["events"] == 10000


def test_exit_two_on_bad_rational(capsys):
    code, _, err = run_cli(
        capsys,
        "check", "ybe", "--n", "2", "--q", "0.5",
    )
    assert code == 2
    assert "masep" in err


def test_exit_two_on_bad_spec(capsys):
    code, _, err = run_cli(
        capsys,
        "check", "reflection", "--n", "3", "--q", "1/2", "--spec", "2,1,3,3",
    )
    assert code == 2


def test_exit_two_on_missing_required(capsys):
    code, _, err = run_cli(capsys, "check", "ybe", "--n", "2")
    assert code == 2
    assert "--q" in err


def test_exit_one_on_failed_check(capsys, monkeypatch):
    failed = CheckReport(
        "ybe", {}, seed=0, passed=False,
        witness={"position": [0, 0], "lhs": "0", "rhs": "1"},
    )
    monkeypatch.setattr(cli, "check_ybe", lambda *a, **k: failed)
    code, out, _ = run_cli(capsys, "check", "ybe", "--n", "2", "--q", "1/2")
    assert code == 1
    assert json.loads(out)["reports"][0]["witness"]["position"] == [0, 0]


def test_envelope_roundtrip_and_determinism(capsys):
    argv = (
        "check", "kunitarity", "--n", "2", "--q", "2",
        "--spec", "1,1,2,2", "--samples", "3", "--seed", "5",
    )
    code1, out1, _ = run_cli(capsys, *argv)
    code2, out2, _ = run_cli(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2  # byte-identical for identical seeds
    json.loads(out1)


def test_out_file_and_compare_pipeline(tmp_path, capsys):
    sim_path = tmp_path / "sim.json"
    code, _, _ = run_cli(
        capsys,
        "simulate", "--n", "2", "--l", "2", "--q", "1/2",
        "--left", "1,1,2,2:a=1,c=1/2", "--right", "1,1,2,2:a=3/4,c=1/4",
        "--events", "200000", "--burn-in", "10000", "--seed", "9",
        "--out", str(sim_path),
    )
    assert code == 0
    saved = json.loads(sim_path.read_text())
    assert saved["reports"][0]["events"] == 190000
    code, out, _ = run_cli(capsys, "compare", "--report", str(sim_path))
    assert code == 0
    record = json.loads(out)["reports"][0]
    assert record["tv_distance"] < 0.05


def test_simulate_csv_export(tmp_path, capsys):
    csv_path = tmp_path / "densities.csv"
    code, _, _ = run_cli(
        capsys,
        "simulate", "--n", "2", "--l", "2", "--q", "1/2",
        "--left", "1,1,2,2", "--right", "1,1,2,2",
        "--events", "20000", "--seed", "2", "--csv", str(csv_path),
    )
    assert code == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "kind,site,species,value"
    assert any(line.startswith("current_left") for line in lines)


def test_config_file_defaults_and_override(tmp_path, capsys):
    config = tmp_path / "run.conf"
    config.write_text("n = 3\nq = 3/4\nsamples = 2\nseed = 11\n# comment\n")
    code, out, _ = run_cli(capsys, "check", "ybe", "--config", str(config))
    assert code == 0
    envelope = json.loads(out)
    assert envelope["config"]["n"] == 3
    assert len(envelope["reports"][0]["samples"]) == 2
    # an explicit flag overrides the file value
    code, out, _ = run_cli(
        capsys, "check", "ybe", "--config", str(config), "--samples", "4"
    )
    assert code == 0
    assert len(json.loads(out)["reports"][0]["samples"]) == 4


def test_bad_config_file(tmp_path, capsys):
    config = tmp_path / "broken.conf"
    config.write_text("not a key value line\n")
    code, _, err = run_cli(capsys, "check", "ybe", "--config", str(config))
    assert code == 2


def test_compare_rejects_foreign_report(tmp_path, capsys):
    path = tmp_path / "not_a_sim.json"
    path.write_text(json.dumps({"reports": [{"unexpected": 1}]}))
    code, _, err = run_cli(capsys, "compare", "--report", str(path))
    assert code == 2
    assert "malformed" in err


def test_spec_rate_suffix_parsing():
    from masep.boundary import Side

    spec = cli._parse_boundary("1,2,3,4,inert:a=2/3,c=1/5", Side.LEFT, 4)
    assert spec.rate_a == Fraction(2, 3) and spec.rate_c == Fraction(1, 5)
    assert spec.labels == (1, 2, 3, 4)
    with pytest.raises(ValueError):
        cli._parse_boundary("1,2,3,4:bogus", Side.LEFT, 4)
    with pytest.raises(ValueError):
        cli._parse_boundary("1,2,3", Side.LEFT, 4)
