import json
from pathlib import Path

import pytest

from topogrey.cli import InputError, PipelineConfig, dumps, main, run_pipeline

FIX = Path(__file__).parent / "fixtures"


def fx(name):
    return str(FIX / name)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    report = json.loads(out.out) if out.out.strip() else None
    return code, report, out.err


def test_represent_discrete_on_z2(capsys):
    code, rep, _ = run(["represent-discrete", "--groupoid", fx("z2.json")], capsys)
    assert code == 0 and rep["verdict"] == "pass"
    assert rep["stats"]["iso_counts"] == [["0", "0", 2]]
    assert rep["command"]["groupoid"] == fx("z2.json")


def test_represent_discrete_with_subgroupoid_file(tmp_path, capsys):
    subs = tmp_path / "subs.json"
    subs.write_text(json.dumps({"subgroupoids": [["0"], ["0", "2"]]}))
    code, rep, _ = run(["represent-discrete", "--groupoid", fx("z4.json"), "--subgroupoids", str(subs)], capsys)
    assert code == 0
    assert rep["stats"]["iso_counts"] == [["0", "0", 4]]


def test_bad_subgroupoid_fails_with_witness(tmp_path, capsys):
    subs = tmp_path / "subs.json"
    subs.write_text(json.dumps({"subgroupoids": [["0", "1"]]}))
    code, rep, _ = run(["represent-discrete", "--groupoid", fx("z4.json"), "--subgroupoids", str(subs)], capsys)
    assert code == 1
    failed = [c for c in rep["checks"] if c["verdict"] == "fail"]
    assert failed and all("witness" in c for c in failed)


def test_pair_groupoid_represents(capsys):
    code, rep, _ = run(["represent-discrete", "--input", fx("pair2.json")], capsys)
    assert code == 0
    assert {n for *_, n in rep["stats"]["iso_counts"]} == {1}


def test_represent_metric_on_z4(capsys):
    code, rep, _ = run(["represent-metric", "--groupoid", fx("z4.json"), "--norms", fx("z4_norms.json")], capsys)
    assert code == 0
    assert rep["stats"]["counts"][0][2]["isos"] == 4
    assert rep["stats"]["completion"] == "finite quotient, no points added"


def test_represent_metric_with_synthesis(capsys):
    argv = ["represent-metric", "--groupoid", fx("z4.json"), "--norms", fx("z4_target.json"),
            "--synthesize-filtration", "3"]
    code, rep, _ = run(argv, capsys)
    assert code == 0, rep["checks"]
    names = {c["name"] for c in rep["checks"]}
    assert "synthesis 0: dominated by target" in names and "metric representation" in names
    (cert,) = rep["stats"]["synthesis"]
    assert cert["levels"][0] == ["0", "1", "2", "3"]


def test_urysohn_build(capsys):
    code, rep, _ = run(["urysohn", "build", "--q", "2", "--depth", "1"], capsys)
    assert code == 0
    assert rep["stats"]["level_sizes"] == [1, 3]
    assert [c["verdict"] for c in rep["checks"]] == ["pass"]


def test_urysohn_with_seed_file(capsys):
    code, rep, _ = run(["urysohn", "build", "--seed-file", fx("tri_c.json"), "--q", "2", "--depth", "1"], capsys)
    assert code == 0 and rep["stats"]["level_sizes"][0] == 3


def test_isometry_found_and_missing(capsys):
    code, rep, _ = run(["isometry", "--input", fx("tri_a.json"), "--input", fx("tri_b.json")], capsys)
    assert code == 0 and set(rep["stats"]["isometry"]) == {"a", "b", "c"}
    code, rep, _ = run(["isometry", "--input", fx("tri_a.json"), "--input", fx("tri_c.json")], capsys)
    assert code == 1
    (check,) = rep["checks"]
    assert check["verdict"] == "fail" and check["witness"]["same_distance_multiset"] is False


def test_isometry_needs_two_inputs(capsys):
    code, _, err = run(["isometry", "--input", fx("tri_a.json")], capsys)
    assert code == 2 and "two --input" in err


@pytest.mark.parametrize("mode", ["plain", "io"])
def test_uniformize(mode, capsys):
    code, rep, _ = run(["uniformize", "--input", fx("graphs.json"), "--mode", mode], capsys)
    assert code == 0
    names = [c["name"] for c in rep["checks"]]
    assert ("injective on objects" in names) == (mode == "io")


def test_check_laws_single_suite(capsys):
    code, rep, _ = run(["check-laws", "--suite", "yoneda-discrete", "--count", "5", "--seed", "2"], capsys)
    assert code == 0
    assert len(rep["stats"]["yoneda-discrete"]) == 5
    assert all("homs" in s for s in rep["stats"]["yoneda-discrete"])


def test_planted_mutation_exits_one(capsys):
    argv = ["check-laws", "--suite", "groupoid-convolution", "--count", "10", "--plant-mutation", "conv-skip-units"]
    code, rep, _ = run(argv, capsys)
    assert code == 1
    (check,) = rep["checks"]
    assert check["witness"] and all(len(w["witness"]["groupoid"]["morphisms"]) <= 3 for w in check["witness"])


def test_unknown_suite_exits_two(capsys):
    code, _, err = run(["check-laws", "--suite", "nope"], capsys)
    assert code == 2 and "unknown suite" in err


def test_malformed_json_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "objects": [,\n}')
    code, _, err = run(["represent-discrete", "--groupoid", str(bad)], capsys)
    assert code == 2
    assert f"{bad}:2:" in err and "invalid JSON" in err


def test_missing_file_exits_two(tmp_path, capsys):
    code, _, err = run(["isometry", "--input", str(tmp_path / "a"), "--input", str(tmp_path / "b")], capsys)
    assert code == 2 and "cannot read" in err


def test_usage_errors_exit_two(capsys):
    assert main(["frobnicate"]) == 2
    assert main(["uniformize", "--mode", "sideways"]) == 2
    capsys.readouterr()


def test_invalid_groupoid_is_an_input_error(tmp_path, capsys):
    bad = tmp_path / "g.json"
    bad.write_text(json.dumps({"objects": ["x"], "morphisms": [], "compose": [], "inverse": []}))
    code, _, err = run(["represent-discrete", "--groupoid", str(bad)], capsys)
    assert code == 2 and "invalid groupoid" in err


def test_output_file_and_summary(tmp_path, capsys):
    out = tmp_path / "rep.json"
    code = main(["urysohn", "build", "--q", "1", "--output", str(out)])
    err = capsys.readouterr().err
    assert code == 0
    assert json.loads(out.read_text())["verdict"] == "pass"
    assert "PASS" in err


def test_run_pipeline_rejects_unknown_command():
    with pytest.raises(InputError):
        run_pipeline(PipelineConfig(command="nope"))


@pytest.mark.parametrize(
    "config",
    [
        PipelineConfig(command="represent-discrete", groupoid=fx("z4.json")),
        PipelineConfig(command="represent-metric", groupoid=fx("z4.json"), norms=fx("z4_norms.json")),
        PipelineConfig(command="urysohn", q=2, depth=1),
        PipelineConfig(command="uniformize", inputs=(fx("graphs.json"),), mode="io"),
        PipelineConfig(command="check-laws", suite="sandwich", count=6, seed=5),
    ],
    ids=lambda c: c.command,
)
def test_reports_are_reproducible(config):
    a, b = run_pipeline(config), run_pipeline(config)
    assert dumps(a, timing=False) == dumps(b, timing=False)
    assert "wall_time" in json.loads(dumps(a)) and "wall_time" not in json.loads(dumps(a, timing=False))
