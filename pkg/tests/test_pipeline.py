import json
import os
import shutil
from pathlib import Path

import pytest

from specs import config_for
from partisan_graph.errors import InputError, StageError
from partisan_graph.pipeline import PipelineConfig, fmt, run_all, stage_seed
from partisan_graph.scenario import ScenarioSpec, generate_scenario

HERE = Path(__file__).parent
GOLDEN = HERE / "golden"


@pytest.fixture(scope="module")
def golden_inputs(tmp_path_factory):
    spec = ScenarioSpec.load(HERE / "data" / "golden_spec.json")
    return generate_scenario(spec, tmp_path_factory.mktemp("golden_data"))


def _empty_inputs(tmp_path):
    names = ("corpus.jsonl", "scores.csv", "lib.txt", "con.txt")
    for n in names:
        (tmp_path / n).write_text("")
    return PipelineConfig(
        corpus=[str(tmp_path / "corpus.jsonl")],
        scores=str(tmp_path / "scores.csv"),
        liberal_outlets=str(tmp_path / "lib.txt"),
        conservative_outlets=str(tmp_path / "con.txt"),
    )


def test_empty_corpus_runs_to_completion(tmp_path):
    result = run_all(_empty_inputs(tmp_path), tmp_path / "out")
    assert result.manifest["stages"][-1] == "export"
    assert "failed_stage" not in result.manifest
    eff = (tmp_path / "out" / "17_effectiveness.csv").read_text().splitlines()
    assert eff[1] == "Liberal,RTP,undefined,0,0"
    cv = (tmp_path / "out" / "07_crossvalidation.csv").read_text().splitlines()
    assert cv[1].startswith("skipped")


def test_manifest_lists_every_file(tmp_path, golden_inputs):
    result = run_all(config_for(golden_inputs), tmp_path / "out")
    listed = {f["path"] for f in result.manifest["files"]}
    on_disk = {p.name for p in (tmp_path / "out").iterdir()} - {"manifest.json"}
    assert listed == on_disk
    assert len(listed) == 22
    assert "corpus" not in result.manifest["parameters"]


def test_golden_outputs(tmp_path, golden_inputs):
    out = tmp_path / "out"
    run_all(config_for(golden_inputs), out)
    if os.environ.get("UPDATE_GOLDEN"):
        shutil.rmtree(GOLDEN, ignore_errors=True)
        shutil.copytree(out, GOLDEN)
    expected = sorted(p.name for p in GOLDEN.iterdir())
    assert sorted(p.name for p in out.iterdir()) == expected
    for name in expected:
        assert (out / name).read_bytes() == (GOLDEN / name).read_bytes(), name


def test_two_runs_identical(tmp_path, golden_inputs):
    a = run_all(config_for(golden_inputs), tmp_path / "a").manifest
    b = run_all(config_for(golden_inputs), tmp_path / "b").manifest
    assert a == b


def test_rng_seed_reaches_stages(tmp_path, golden_inputs):
    a = run_all(config_for(golden_inputs, rng_seed=1), tmp_path / "a").manifest
    assert a["parameters"]["rng_seed"] == 1
    assert stage_seed(1, "propagate") != stage_seed(2, "propagate")
    assert stage_seed(42, "propagate") == int.from_bytes(
        __import__("hashlib").sha256(b"42:propagate").digest()[:4], "big"
    )


def test_stage_failure_is_tagged(tmp_path):
    config = _empty_inputs(tmp_path)
    Path(config.liberal_outlets).write_text("same.com\n")
    Path(config.conservative_outlets).write_text("same.com\n")
    with pytest.raises(StageError) as info:
        run_all(config, tmp_path / "out")
    assert info.value.stage == "ideology"
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert manifest["failed_stage"] == "ideology"
    assert manifest["stages"] == ["ingest", "classify", "graph"]


def test_missing_input_is_input_error(tmp_path):
    config = _empty_inputs(tmp_path)
    config.scores = str(tmp_path / "nope.csv")
    with pytest.raises(InputError):
        run_all(config, tmp_path / "out")


def test_config_paths_relative_to_file(tmp_path):
    (tmp_path / "cfg").mkdir()
    (tmp_path / "cfg" / "run.json").write_text(json.dumps(
        {"corpus": "c.jsonl", "scores": "s.csv", "liberal_outlets": "l.txt", "conservative_outlets": "r.txt",
         "top_urls": None}
    ))
    config = PipelineConfig.load(tmp_path / "cfg" / "run.json")
    assert config.corpus == [str(tmp_path / "cfg" / "c.jsonl")]
    assert config.top_urls is None
    with pytest.raises(InputError):
        PipelineConfig.load(tmp_path / "missing.json")
    with pytest.raises(InputError):
        PipelineConfig(corpus=[], scores="", liberal_outlets="", conservative_outlets="", threshold=2)


def test_fmt():
    assert fmt(None) == "undefined" and fmt(float("nan")) == "undefined"
    assert fmt(1 / 3) == "0.3333333333" and fmt(3) == "3"
