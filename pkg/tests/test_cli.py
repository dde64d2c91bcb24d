"""End-to-end command line flows in process: synth -> preprocess -> train ->
transform -> eval/features/vitals, plus error-path exit codes."""

import json
import os

import numpy as np
import pytest

from ppgmorph.cli import main, read_windows_csv

pytestmark = pytest.mark.integration


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """One shared pipeline run: 3 subjects, 20 s each, tiny 1-epoch model."""
    root = tmp_path_factory.mktemp("cli")
    raw = root / "raw"
    win = root / "win"
    win.mkdir()
    assert main(["synth", "--out-dir", str(raw), "--subjects", "3",
                 "--duration", "20", "--seed", "1"]) == 0
    for k in range(3):
        assert main(["preprocess", "--in", str(raw / f"s{k:02d}.csv"),
                     "--out", str(win / f"s{k:02d}"),
                     "--window-s", "3", "--step-s", "1.5"]) == 0
    cfg = root / "train.cfg"
    cfg.write_text("max_epochs = 1\nbatch_size = 8\nlearning_rate = 1e-3\n"
                   "# comment line\n")
    ckpt = root / "model.ckpt"
    assert main(["train", "--data", str(win), "--out", str(ckpt),
                 "--depth", "1", "--seed", "0", "--config", str(cfg),
                 "--val-frac", "0.34", "--test-frac", "0.33"]) == 0
    return {"root": root, "raw": raw, "win": win, "ckpt": ckpt}


def test_synth_outputs(workspace):
    raw = workspace["raw"]
    for k in range(3):
        assert (raw / f"s{k:02d}.csv").exists()
        assert (raw / f"s{k:02d}.truth.json").exists()
    manifest = json.loads((raw / "synth.manifest.json").read_text())
    assert manifest["command"] == "synth"
    assert manifest["seed"] == 1
    header = (raw / "s00.csv").read_text().splitlines()[0]
    assert header == "t,wrist,finger"


def test_synth_rerun_is_byte_identical(workspace, tmp_path):
    again = tmp_path / "again"
    assert main(["synth", "--out-dir", str(again), "--subjects", "3",
                 "--duration", "20", "--seed", "1"]) == 0
    raw = workspace["raw"]
    for name in ("s00.csv", "s01.csv", "s02.csv", "s00.truth.json"):
        assert (again / name).read_bytes() == (raw / name).read_bytes(), name


def test_preprocess_outputs(workspace):
    win = workspace["win"]
    arr, meta = read_windows_csv(str(win / "s00.distorted.csv"))
    ref, _ = read_windows_csv(str(win / "s00.reference.csv"))
    assert arr.shape == ref.shape
    assert arr.shape[1] == 384
    assert meta["sample_rate_hz"] == 128.0
    assert len(meta["subjects"]) == len(arr)
    assert meta["truth"].endswith("s00.truth.json")
    assert np.all(arr >= 0.0) and np.all(arr <= 1.0)


def test_train_outputs(workspace):
    ckpt = workspace["ckpt"]
    assert ckpt.exists()
    hist = ckpt.parent / (ckpt.name + ".history.csv")
    lines = hist.read_text().splitlines()
    assert lines[0] == "epoch,train_LG,train_LD,val_LC,lr"
    assert len(lines) == 2
    manifest = json.loads((ckpt.parent / (ckpt.name + ".manifest.json")
                           ).read_text())
    assert manifest["command"] == "train"
    assert manifest["config"]["model"]["model_depth"] == 1
    assert manifest["config"]["train"]["max_epochs"] == 1
    assert manifest["config"]["train"]["batch_size"] == 8


def test_transform_and_eval(workspace, tmp_path, capsys):
    win = workspace["win"]
    out = tmp_path / "enh.csv"
    assert main(["transform", "--ckpt", str(workspace["ckpt"]),
                 "--in", str(win / "s00.distorted.csv"),
                 "--out", str(out)]) == 0
    enh, meta = read_windows_csv(str(out))
    ref, _ = read_windows_csv(str(win / "s00.distorted.csv"))
    assert enh.shape == ref.shape
    assert np.all((enh > 0.0) & (enh < 1.0))
    assert "truth" in meta

    rep_path = tmp_path / "report.json"
    csv_path = tmp_path / "report.csv"
    assert main(["eval", "--enhanced", str(win / "s00.reference.csv"),
                 "--reference", str(win / "s00.reference.csv"),
                 "--out", str(rep_path), "--csv", str(csv_path)]) == 0
    rep = json.loads(rep_path.read_text())
    assert rep["mae"] == 0.0
    assert np.isclose(rep["pcc"], 1.0)
    assert rep["dtw"] == 0.0
    header, row = csv_path.read_text().splitlines()
    assert header.startswith("n_windows,mae,pcc,dtw")
    assert len(header.split(",")) == len(row.split(","))

    capsys.readouterr()
    assert main(["eval", "--enhanced", str(out),
                 "--reference", str(win / "s00.reference.csv")]) == 0
    stdout = capsys.readouterr().out
    assert json.loads(stdout)["n_windows"] == len(enh)


def test_features_per_cycle_and_bp(workspace, tmp_path):
    win = workspace["win"]
    per_cycle = tmp_path / "cycles.csv"
    assert main(["features", "--in", str(win / "s00.reference.csv"),
                 "--out", str(per_cycle)]) == 0
    lines = per_cycle.read_text().splitlines()
    assert lines[0].startswith("subject,window_index,cycle_index,")
    assert len(lines) > 1

    bp = tmp_path / "bp.csv"
    assert main(["features", "--in", str(win / "s00.reference.csv"),
                 "--out", str(bp), "--bp"]) == 0
    lines = bp.read_text().splitlines()
    assert lines[0].startswith("window_index,subject,sp,pa,")
    assert len(lines[0].split(",")) == 17
    assert len(lines) > 1


def test_vitals_with_truth(workspace, tmp_path):
    win = workspace["win"]
    out = tmp_path / "vitals.json"
    assert main(["vitals", "--in", str(win / "s00.reference.csv"),
                 "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert len(payload["windows"]) >= 1
    agg = payload["aggregate"]
    assert agg["hr_bpm_mae"] is not None
    assert agg["hr_bpm_mae"] < 5.0


def test_missing_input_exits_2(tmp_path, capsys):
    rc = main(["preprocess", "--in", str(tmp_path / "ghost.csv"),
               "--out", str(tmp_path / "x")])
    assert rc == 2
    assert "ghost.csv" in capsys.readouterr().err
    rc = main(["transform", "--ckpt", str(tmp_path / "no.ckpt"),
               "--in", str(tmp_path / "no.csv"), "--out", str(tmp_path / "y")])
    assert rc == 2


def test_usage_errors_exit_1(tmp_path, capsys):
    assert main([]) == 1
    assert main(["frobnicate"]) == 1
    assert main(["train", "--data", str(tmp_path)]) == 1  # missing --out
    capsys.readouterr()


def test_bad_config_lines(workspace, tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("learning_rate 0.1\n")
    rc = main(["train", "--data", str(workspace["win"]),
               "--out", str(tmp_path / "m.ckpt"), "--config", str(bad)])
    assert rc == 2
    assert "not key = value" in capsys.readouterr().err

    unknown = tmp_path / "unknown.cfg"
    unknown.write_text("warp_factor = 9\n")
    rc = main(["train", "--data", str(workspace["win"]),
               "--out", str(tmp_path / "m.ckpt"), "--config", str(unknown)])
    assert rc == 1
    assert "unknown config key" in capsys.readouterr().err


def test_transform_rejects_incompatible_length(workspace, tmp_path):
    # depth-3 checkpoint demands multiples of 4; 383-sample windows cannot fit
    from ppgmorph.model import Discriminator, Generator, ModelConfig
    from ppgmorph.train import save_checkpoint
    from ppgmorph.cli import write_windows_csv

    rng = np.random.default_rng(0)
    cfg = ModelConfig(model_depth=3)
    ckpt = str(tmp_path / "md3.ckpt")
    save_checkpoint(ckpt, Generator(cfg, rng), Discriminator(cfg, rng), 0, 1.0)
    win_path = str(tmp_path / "odd.csv")
    write_windows_csv(win_path, np.random.uniform(0, 1, (2, 383)),
                      ["u", "u"], [0, 0], 128.0)
    rc = main(["transform", "--ckpt", ckpt, "--in", win_path,
               "--out", str(tmp_path / "z.csv")])
    assert rc == 2


def test_windows_csv_sidecar_errors(tmp_path):
    from ppgmorph.core import DataFormatError
    from ppgmorph.cli import write_windows_csv

    path = str(tmp_path / "w.csv")
    write_windows_csv(path, np.zeros((2, 8)), ["a", "b"], [0, 8], 100.0)
    os.remove(path + ".meta.json")
    with pytest.raises(DataFormatError, match="missing sidecar"):
        read_windows_csv(path)
