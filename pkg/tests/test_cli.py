import dataclasses
import json

import pytest

from usflab import cli
from usflab.experiments import CRITERIA, EXPERIMENTS, config_for, run_experiment

SMALL = ["--samples", "4000"]


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_family_info_passes(capsys):
    code, out, _ = run(capsys, "family-info", "--family", "tree", "--b", "2", "--vertices", "20", "--triples", "50")
    assert code == cli.EXIT_OK
    assert "D=3" in out and "t0=log 2" in out and out.rstrip().endswith("=> PASS")


def test_two_point_small(capsys):
    code, out, _ = run(capsys, "two-point", "--b", "2", "--n", "1", *SMALL, "--seed", "7")
    assert code == cli.EXIT_OK and "0.666667" in out


@pytest.mark.parametrize("argv", [
    ["family-info", "--family", "moebius"],
    ["family-info", "--family", "tree", "--b", "1"],
    ["gamma-limit", "--k-max", "3"],
    ["two-point", "--set", "nonsense=1"],
    ["two-point", "--set", "novalue"],
    ["two-point", "--config", "/nonexistent/config.json"],
])
def test_invalid_specs_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == cli.EXIT_INVALID
    assert "invalid experiment spec" in err


def test_failing_check_exits_1(capsys, monkeypatch):
    original = EXPERIMENTS["two-point"]

    def failing(cfg, seed, threads=None):
        out = original.run(cfg, seed, threads)
        out.check("forced failure", False)
        return out

    monkeypatch.setitem(EXPERIMENTS, "two-point", dataclasses.replace(original, run=failing))
    code, out, _ = run(capsys, "two-point", *SMALL)
    assert code == cli.EXIT_FAIL and "FAIL  forced failure" in out


def test_spec_round_trip():
    spec = cli.ExperimentSpec("tail", {"kind": ["level0"], "samples": 10}, seed=3, threads=2, out="x")
    assert cli.ExperimentSpec.from_json(spec.to_json()) == spec


@pytest.mark.parametrize("text, value", [("2,3", [2, 3]), ("0..3", [0, 1, 2, 3]), ("0.5", 0.5),
                                         ("level0", "level0"), ("[1, 2]", [1, 2])])
def test_parse_value(text, value):
    assert cli.parse_value(text) == value


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"experiment": "two-point", "params": {"b": [3], "n": [2], "samples": 1000},
                               "seed": 5}))
    code, out, _ = run(capsys, "two-point", "--config", str(cfg), "--samples", "3000")
    assert code == cli.EXIT_OK and "b=3" in out
    code, _, err = run(capsys, "gw-moments", "--config", str(cfg))
    assert code == cli.EXIT_INVALID and "two-point" in err


def test_artifacts_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    run(capsys, "two-point", *SMALL, "--out", str(a), "--no-timestamp", "--threads", "1")
    run(capsys, "two-point", *SMALL, "--out", str(b), "--no-timestamp", "--threads", "8")
    for name in ("two-point.csv", "two-point.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    lines = (a / "two-point.csv").read_text().splitlines()
    assert lines[0].startswith("# config: ")
    assert lines[1] == ",".join(cli.CSV_COLUMNS)
    payload = json.loads((a / "two-point.json").read_text())
    assert payload["passed"] and "timestamp" not in payload


def test_timestamp_written_by_default(tmp_path, capsys):
    run(capsys, "two-point", *SMALL, "--out", str(tmp_path))
    assert (tmp_path / "two-point.csv").read_text().splitlines()[1].startswith("# timestamp: ")


def test_quiet(capsys):
    _, out, _ = run(capsys, "two-point", *SMALL, "--quiet")
    assert all(line.lstrip().startswith(("==", "=>", "FAIL")) for line in out.splitlines())


def test_all_rejects_parameters(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"samples": 5}))
    assert run(capsys, "all", "--config", str(cfg))[0] == cli.EXIT_INVALID


def test_config_for_rejects_unknown_keys():
    with pytest.raises(KeyError):
        config_for("two-point", {"bogus": 1})


def test_every_criterion_has_an_experiment():
    assert sorted(CRITERIA) == list(range(1, 13))
    for name, overrides in CRITERIA.values():
        config_for(name, overrides)


@pytest.mark.parametrize("name, overrides", [
    ("two-point", {"samples": 5000, "n": [0, 3]}),
    ("vcomponent", {"samples": 3000, "chain_strata": 5}),
    ("oracle-compare", {"two_point_samples": 300, "component_samples": 200, "bias_samples": 2000,
                        "bias_steps": 200, "region_samples": 50, "chunk": 100}),
])
def test_experiments_independent_of_threads(name, overrides):
    one = run_experiment(name, overrides, seed=3, threads=1)
    many = run_experiment(name, overrides, seed=3, threads=8)
    assert [r.to_dict() for r in one.reports] == [r.to_dict() for r in many.reports]


def test_slab_moments_walk_uses_nonnegative_slabs(capsys):
    code, out, _ = run(capsys, "slab-moments", "--process", "walk", "--samples", "4000", "--set", "walk_n=[10,20]")
    assert code == cli.EXIT_OK
    assert "weighted_time[n=20]" in out and "linear in n" in out
