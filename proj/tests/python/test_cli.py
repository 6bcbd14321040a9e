import json
import os
import subprocess
from pathlib import Path

import jsonschema
import pytest

BIN = os.environ["CIVICPB_BIN"]
SYNTH = os.environ["CIVICPB_SYNTH"]
SCHEMAS = Path(os.environ["CIVICPB_SCHEMAS"])


def schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


def validate(path, name):
    doc = json.loads(Path(path).read_text())
    jsonschema.validate(doc, schema(name))
    return doc


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    subprocess.run([SYNTH, str(root / "data"), "500", "11"], check=True, capture_output=True)
    (root / "model.json").write_text(json.dumps({"epochs": 8, "hidden_units": 8}))
    return root


def civicpb(ws, *args, out="out", env=None, common=True):
    cmd = [BIN, *args]
    if common:
        cmd += ["--data", str(ws / "data" / "survey.csv"), "--schema", str(ws / "data" / "schema.json"),
                "--out", str(ws / out), "--seed", "3"]
    full_env = {k: v for k, v in os.environ.items() if not k.startswith("CIVICPB_")}
    full_env.update(env or {})
    return subprocess.run(cmd, capture_output=True, text=True, env=full_env)


def test_ingest(workspace):
    r = civicpb(workspace, "ingest", "--format", "csv")
    assert r.returncode == 0, r.stderr
    doc = validate(workspace / "out" / "ingest.json", "ingest")
    assert doc["load_report"]["accepted"] == 500
    assert doc["audit"]["seed"] == 3
    assert (workspace / "out" / "survey_canonical.csv").exists()


@pytest.mark.parametrize("axis", ["sectors", "neighborhoods"])
def test_legitimacy_and_optimal_k(workspace, axis):
    r = civicpb(workspace, "legitimacy", "--axis", axis, "--format", "csv")
    assert r.returncode == 0, r.stderr
    validate(workspace / "out" / f"legitimacy_{axis}.json", "legitimacy")
    csv = (workspace / "out" / f"legitimacy_{axis}.csv").read_text()
    assert csv.startswith("# civicpb ")
    assert csv.splitlines()[2].startswith("axis,scope,k,label,L,share_pct,gain")

    r = civicpb(workspace, "optimal-k", "--axis", axis, "--max-affordable-k", "2")
    assert r.returncode == 0, r.stderr
    doc = validate(workspace / "out" / f"optimal_k_{axis}.json", "optimal_k")
    rates = [s["decay_rate"] for s in doc["scopes"]]
    assert rates == sorted(rates, reverse=True)


def test_single_scope(workspace):
    r = civicpb(workspace, "legitimacy", "--scope", "Altheim", "--k", "2", out="single")
    assert r.returncode == 0, r.stderr
    doc = validate(workspace / "single" / "legitimacy_sectors.json", "legitimacy")
    assert doc["scope"] == "Altheim"


def test_relocation(workspace):
    r = civicpb(workspace, "relocation", "--format", "csv")
    assert r.returncode == 0, r.stderr
    validate(workspace / "out" / "relocation.json", "relocation")
    for name in ("migration.csv", "mean_satisfaction.csv", "rqi_pqi.csv"):
        assert (workspace / "out" / name).read_text().startswith("# civicpb ")

    r = civicpb(workspace, "relocation", "--from", "Altheim", "--to", "Bachfeld", out="pair")
    assert r.returncode == 0, r.stderr
    validate(workspace / "pair" / "relocation_Altheim_Bachfeld.json", "relocation_pair")


def test_train_and_significance(workspace):
    model = str(workspace / "model.json")
    r = civicpb(workspace, "train", "--features", "SP", "--sampling", "smote", "--config", model, "--format", "csv")
    assert r.returncode == 0, r.stderr
    validate(workspace / "out" / "model_SP_smote.json", "model")
    ev = validate(workspace / "out" / "eval_SP_smote.json", "eval")
    assert sum(ev["train_class_counts_sampled"]) >= sum(ev["train_class_counts"])

    r = civicpb(workspace, "significance", "--features", "S")
    assert r.returncode == 0, r.stderr
    validate(workspace / "out" / "significance_S.json", "significance")


def test_report_all_is_reproducible(workspace):
    model = str(workspace / "model.json")
    args = ("report-all", "--config", model, "--format", "csv")
    first = civicpb(workspace, *args, out="all")
    assert first.returncode == 0, first.stderr
    validate(workspace / "all" / "report_all.json", "report_all")
    files = sorted(p for p in (workspace / "all").iterdir())
    before = {p.name: p.read_bytes() for p in files}
    second = civicpb(workspace, *args, out="all")
    assert second.returncode == 0
    assert {p.name: p.read_bytes() for p in sorted((workspace / "all").iterdir())} == before


def test_env_overrides(workspace):
    env = {
        "CIVICPB_DATA": str(workspace / "data" / "survey.csv"),
        "CIVICPB_SCHEMA": str(workspace / "data" / "schema.json"),
        "CIVICPB_OUT": str(workspace / "env"),
        "CIVICPB_SEED": "9",
    }
    r = civicpb(workspace, "ingest", env=env, common=False)
    assert r.returncode == 0, r.stderr
    doc = validate(workspace / "env" / "ingest.json", "ingest")
    assert doc["audit"]["seed"] == 9


def test_missing_dataset_exits_3(workspace):
    r = civicpb(workspace, "ingest", "--data", str(workspace / "nope.csv"), "--schema",
                str(workspace / "data" / "schema.json"), "--out", str(workspace / "err"), common=False)
    assert r.returncode == 3
    doc = validate(workspace / "err" / "error.json", "error")
    assert doc["error"]["kind"] == "data"
    assert "dataset not found" in doc["error"]["message"]


def test_config_errors_exit_2(workspace):
    assert civicpb(workspace, "legitimacy", "--axis", "streets").returncode == 2
    assert civicpb(workspace, "legitimacy", "--scope", "Nowhere", out="bad_scope").returncode == 2
    bad = workspace / "bad_model.json"
    bad.write_text(json.dumps({"epochs": 2, "colour": "blue"}))
    r = civicpb(workspace, "train", "--config", str(bad), out="bad_model")
    assert r.returncode == 2
    validate(workspace / "bad_model" / "error.json", "error")
