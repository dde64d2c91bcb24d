"""Batch command line: ppg {synth, preprocess, train, transform, eval, features, vitals}.

Exit codes: 0 success, 1 usage error, 2 data/format error, 3 numerical
divergence. Diagnostics go to standard error; outputs are written atomically
and each command drops a run manifest JSON next to its primary output.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from dataclasses import dataclass, fields

import numpy as np

from . import __version__
from .core import (DataFormatError, Dataset, DivergenceError, Window,
                   WindowPair, require, split_by_subject)
from .downstream import (BP_BASE_FIELDS, BP_DIASTOLIC_FIELDS, bp_features,
                         estimate_hr, extract_ibis, hrv_metrics)
from .fiducials import detect_fiducials, extract_features, segment_cycles
from .metrics import report
from .model import Discriminator, Generator, ModelConfig
from .sigproc import pair_and_clean, preprocess_series, read_signal_csv
from .synth import GroundTruth, distort_recording, sample_subject_params, synth_recording
from .train import TrainConfig, enhance_windows, load_checkpoint, train


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 1
        raise UsageError(message)


# ---- shared file plumbing ------------------------------------------------------


def _write_atomic(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


@dataclass
class RunManifest:
    command: str
    config: dict
    inputs: list[str]
    outputs: list[str]
    seed: int | None
    tool_version: str = __version__
    wall_time_s: float = 0.0

    def write(self, path: str) -> None:
        _write_atomic(path, json.dumps(self.__dict__, indent=2) + "\n")


def _meta_path(csv_path: str) -> str:
    return csv_path + ".meta.json"


def write_windows_csv(path: str, windows: np.ndarray, subjects: list[str],
                      offsets: list[int], sample_rate_hz: float,
                      truth_path: str | None = None) -> None:
    """One row per window: window_index,subject,s0..s{L-1}; sidecar meta JSON
    carries the sample rate, per-row origin offsets, and subjects."""
    n, length = windows.shape
    require(len(subjects) == n and len(offsets) == n,
            "subjects/offsets must align with windows")
    lines = [",".join(["window_index", "subject"]
                      + [f"s{i}" for i in range(length)])]
    for i in range(n):
        vals = ",".join(str(float(v)) for v in windows[i])
        lines.append(f"{i},{subjects[i]},{vals}")
    _write_atomic(path, "\n".join(lines) + "\n")
    meta = {"sample_rate_hz": sample_rate_hz, "length": int(length),
            "origin_offsets": [int(o) for o in offsets],
            "subjects": list(subjects)}
    if truth_path is not None:
        meta["truth"] = truth_path
    _write_atomic(_meta_path(path), json.dumps(meta, indent=2) + "\n")


def read_windows_csv(path: str):
    """Returns ([N, L] float array, meta dict). Both files must exist."""
    if not os.path.exists(path):
        raise DataFormatError(f"missing file: {path}")
    meta_file = _meta_path(path)
    if not os.path.exists(meta_file):
        raise DataFormatError(f"missing sidecar: {meta_file}")
    with open(meta_file) as fh:
        try:
            meta = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"malformed sidecar {meta_file}: {exc}") from exc
    rows = []
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd, None)
        if not header or header[:2] != ["window_index", "subject"]:
            raise DataFormatError(f"bad window CSV header in {path}")
        length = len(header) - 2
        for lineno, row in enumerate(rd, start=2):
            if len(row) != length + 2:
                raise DataFormatError(
                    f"row {lineno} of {path} has {len(row)} fields, "
                    f"expected {length + 2}")
            try:
                rows.append([float(v) for v in row[2:]])
            except ValueError as exc:
                raise DataFormatError(
                    f"malformed numeric field at row {lineno} of {path}") from exc
    arr = np.asarray(rows, dtype=float)
    if arr.size == 0:
        raise DataFormatError(f"no windows in {path}")
    for key in ("sample_rate_hz", "origin_offsets", "subjects"):
        if key not in meta:
            raise DataFormatError(f"sidecar {meta_file} lacks {key}")
    if len(meta["subjects"]) != len(arr) or len(meta["origin_offsets"]) != len(arr):
        raise DataFormatError(f"sidecar {meta_file} does not match {path}")
    return arr, meta


def _windows_from_csv(path: str) -> tuple[list[Window], dict]:
    arr, meta = read_windows_csv(path)
    fs = float(meta["sample_rate_hz"])
    wins = [Window(samples=arr[i], sample_rate_hz=fs,
                   origin_offset=int(meta["origin_offsets"][i]),
                   subject_id=str(meta["subjects"][i]))
            for i in range(len(arr))]
    return wins, meta


def _load_truth(path: str) -> GroundTruth:
    if not os.path.exists(path):
        raise DataFormatError(f"missing file: {path}")
    with open(path) as fh:
        try:
            return GroundTruth.from_json_dict(json.load(fh))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise DataFormatError(f"malformed truth file {path}: {exc}") from exc


# ---- synth ----------------------------------------------------------------------


def cmd_synth(args) -> int:
    t0 = time.monotonic()
    os.makedirs(args.out_dir, exist_ok=True)
    ss = np.random.SeedSequence(args.seed)
    outputs = []
    for k, child in enumerate(ss.spawn(args.subjects)):
        rng = np.random.default_rng(child)
        subject = f"s{k:02d}"
        params = sample_subject_params(rng)
        hr = float(rng.uniform(55.0, 90.0))
        sub_seed = int(rng.integers(2 ** 31))
        series, truth = synth_recording(
            args.duration, hr, hrv_jitter_ms=args.jitter_ms, seed=sub_seed,
            sample_rate_hz=args.fs, cycle_params=params, subject_id=subject)
        distorted, _ = distort_recording(series, truth,
                                         seed=int(rng.integers(2 ** 31)))
        t = np.arange(series.samples.size) / args.fs
        lines = ["t,wrist,finger"]
        for i in range(series.samples.size):
            lines.append(f"{t[i]:.6f},{float(distorted.samples[i])!r},"
                         f"{float(series.samples[i])!r}")
        sig_path = os.path.join(args.out_dir, subject + ".csv")
        _write_atomic(sig_path, "\n".join(lines) + "\n")
        truth_path = os.path.join(args.out_dir, subject + ".truth.json")
        _write_atomic(truth_path, json.dumps(truth.to_json_dict()) + "\n")
        outputs += [sig_path, truth_path]
    manifest = RunManifest(
        command="synth",
        config={"subjects": args.subjects, "duration": args.duration,
                "fs": args.fs, "jitter_ms": args.jitter_ms},
        inputs=[], outputs=outputs, seed=args.seed,
        wall_time_s=time.monotonic() - t0)
    manifest.write(os.path.join(args.out_dir, "synth.manifest.json"))
    print(f"wrote {args.subjects} subjects to {args.out_dir}")
    return 0


# ---- preprocess -----------------------------------------------------------------


def cmd_preprocess(args) -> int:
    t0 = time.monotonic()
    if not os.path.exists(args.infile):
        raise DataFormatError(f"missing file: {args.infile}")
    named = read_signal_csv(args.infile)
    subject = args.subject or os.path.splitext(os.path.basename(args.infile))[0]
    stem = os.path.splitext(args.infile)[0]
    truth_path = stem + ".truth.json" if os.path.exists(stem + ".truth.json") else None
    outputs = []
    if "wrist" in named:
        wrist = preprocess_series(named["wrist"], args.window_s, args.step_s)
        finger = preprocess_series(named["finger"], args.window_s, args.step_s)
        pairs = pair_and_clean(wrist, finger, args.pcc_threshold)
        require(len(pairs) > 0, "no windows survived pairing")
        dist = np.stack([p.distorted.samples for p in pairs])
        ref = np.stack([p.reference.samples for p in pairs])
        offsets = [p.distorted.origin_offset for p in pairs]
        subjects = [subject] * len(pairs)
        fs = named["wrist"].sample_rate_hz
        for suffix, arr in ((".distorted.csv", dist), (".reference.csv", ref)):
            path = args.out + suffix
            write_windows_csv(path, arr, subjects, offsets, fs, truth_path)
            outputs.append(path)
        print(f"kept {len(pairs)} window pairs", file=sys.stderr)
    else:
        wins = preprocess_series(named["value"], args.window_s, args.step_s)
        wins = [w for w in wins if not w.degenerate]
        require(len(wins) > 0, "no usable windows")
        arr = np.stack([w.samples for w in wins])
        path = args.out + ".windows.csv"
        write_windows_csv(path, arr, [subject] * len(wins),
                          [w.origin_offset for w in wins],
                          named["value"].sample_rate_hz, truth_path)
        outputs.append(path)
        print(f"kept {len(wins)} windows", file=sys.stderr)
    manifest = RunManifest(
        command="preprocess",
        config={"window_s": args.window_s, "step_s": args.step_s,
                "pcc_threshold": args.pcc_threshold},
        inputs=[args.infile], outputs=outputs, seed=None,
        wall_time_s=time.monotonic() - t0)
    manifest.write(args.out + ".manifest.json")
    return 0


# ---- train ----------------------------------------------------------------------


def _parse_config_file(path: str) -> dict[str, str]:
    if not os.path.exists(path):
        raise DataFormatError(f"missing file: {path}")
    out: dict[str, str] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DataFormatError(
                    f"line {lineno} of {path} is not key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            out[key] = val
    return out


def _configs_from_kv(kv: dict[str, str], depth: int, seed: int):
    train_fields = {f.name: f.type for f in fields(TrainConfig)}
    model_fields = {f.name: f.type for f in fields(ModelConfig)}
    train_kwargs: dict = {"seed": seed}
    model_kwargs: dict = {"model_depth": depth}
    for key, raw in kv.items():
        if key in train_fields:
            target = train_kwargs
            kind = train_fields[key]
        elif key in model_fields:
            target = model_kwargs
            kind = model_fields[key]
        else:
            raise UsageError(f"unknown config key: {key}")
        if kind == "int":
            target[key] = int(raw)
        elif kind == "float":
            target[key] = float(raw)
        else:
            target[key] = raw
    return TrainConfig(**train_kwargs), ModelConfig(**model_kwargs)


def load_pair_dir(data_dir: str) -> Dataset:
    """Collect <stem>.distorted.csv / <stem>.reference.csv pairs into a Dataset."""
    if not os.path.isdir(data_dir):
        raise DataFormatError(f"missing file: {data_dir}")
    stems = sorted(f[:-len(".distorted.csv")] for f in os.listdir(data_dir)
                   if f.endswith(".distorted.csv"))
    require(len(stems) > 0, f"no .distorted.csv files in {data_dir}")
    pairs: list[WindowPair] = []
    for stem in stems:
        dist_w, _ = _windows_from_csv(os.path.join(data_dir, stem + ".distorted.csv"))
        ref_w, _ = _windows_from_csv(os.path.join(data_dir, stem + ".reference.csv"))
        if len(dist_w) != len(ref_w):
            raise DataFormatError(f"pair misalignment for {stem}")
        pairs.extend(WindowPair(distorted=d, reference=r)
                     for d, r in zip(dist_w, ref_w))
    return Dataset(pairs=pairs)


def cmd_train(args) -> int:
    t0 = time.monotonic()
    kv = _parse_config_file(args.config) if args.config else {}
    train_cfg, model_cfg = _configs_from_kv(kv, args.depth, args.seed)
    dataset = load_pair_dir(args.data)
    fractions = (1.0 - args.val_frac - args.test_frac, args.val_frac,
                 args.test_frac)
    train_set, val_set, test_set = split_by_subject(dataset, fractions,
                                                    train_cfg.seed)
    ss = np.random.SeedSequence(train_cfg.seed)
    g_ss, d_ss = ss.spawn(2)
    generator = Generator(model_cfg, np.random.default_rng(g_ss))
    discriminator = Discriminator(model_cfg, np.random.default_rng(d_ss))
    history_path = args.out + ".history.csv"
    result = train(generator, discriminator, train_set, val_set, train_cfg,
                   checkpoint_path=args.out, history_path=history_path,
                   log=lambda msg: print(msg, file=sys.stderr))
    manifest = RunManifest(
        command="train",
        config={"train": train_cfg.to_json_dict(),
                "model": model_cfg.to_json_dict(),
                "split": list(fractions),
                "n_train": len(train_set.pairs), "n_val": len(val_set.pairs),
                "n_test": len(test_set.pairs)},
        inputs=[args.data], outputs=[args.out, history_path],
        seed=train_cfg.seed, wall_time_s=time.monotonic() - t0)
    manifest.write(args.out + ".manifest.json")
    print(f"best epoch {result.best_epoch} val_LC {result.best_val:.6f} "
          f"({result.stopped_reason})")
    return 0


# ---- transform ------------------------------------------------------------------


def cmd_transform(args) -> int:
    t0 = time.monotonic()
    generator, _, _ = load_checkpoint(args.ckpt)
    arr, meta = read_windows_csv(args.infile)
    if arr.shape[1] % generator.config.length_multiple:
        raise DataFormatError(
            f"window length {arr.shape[1]} incompatible with model depth "
            f"{generator.config.model_depth}")
    enhanced = enhance_windows(generator, arr, batch_size=args.batch)
    write_windows_csv(args.out, enhanced, [str(s) for s in meta["subjects"]],
                      [int(o) for o in meta["origin_offsets"]],
                      float(meta["sample_rate_hz"]), meta.get("truth"))
    manifest = RunManifest(
        command="transform", config={"ckpt": args.ckpt, "batch": args.batch},
        inputs=[args.ckpt, args.infile], outputs=[args.out], seed=None,
        wall_time_s=time.monotonic() - t0)
    manifest.write(args.out + ".manifest.json")
    print(f"enhanced {len(arr)} windows")
    return 0


# ---- eval -----------------------------------------------------------------------


def cmd_eval(args) -> int:
    t0 = time.monotonic()
    enhanced, _ = _windows_from_csv(args.enhanced)
    reference, _ = _windows_from_csv(args.reference)
    if len(enhanced) != len(reference):
        raise DataFormatError("enhanced and reference window counts differ")
    rep = report(enhanced, reference)
    payload = json.dumps(rep.to_json_dict(), indent=2) + "\n"
    outputs = []
    if args.out:
        _write_atomic(args.out, payload)
        outputs.append(args.out)
    else:
        sys.stdout.write(payload)
    if args.csv:
        flat = {"n_windows": rep.n_windows, "mae": rep.mae, "pcc": rep.pcc,
                "dtw": rep.dtw, "skewness_mae": rep.skewness_mae,
                "kurtosis_mae": rep.kurtosis_mae,
                "n_cycles_matched": rep.n_cycles_matched}
        for k, v in rep.feature_mape.items():
            flat[f"mape_{k}"] = "" if v is None else v
        header = ",".join(flat.keys())
        row = ",".join(str(v) for v in flat.values())
        _write_atomic(args.csv, header + "\n" + row + "\n")
        outputs.append(args.csv)
    if outputs:
        manifest = RunManifest(
            command="eval", config={},
            inputs=[args.enhanced, args.reference], outputs=outputs,
            seed=None, wall_time_s=time.monotonic() - t0)
        manifest.write(outputs[0] + ".manifest.json")
    return 0


# ---- features -------------------------------------------------------------------

_FV_FIELDS = ("systolic_amplitude", "systolic_width_s", "diastolic_width_s",
              "notch_amplitude", "notch_time_s", "diastolic_amplitude",
              "diastolic_time_s", "systolic_area", "diastolic_area",
              "skewness", "kurtosis")


def cmd_features(args) -> int:
    t0 = time.monotonic()
    wins, _ = _windows_from_csv(args.infile)
    lines = []
    if args.bp:
        lines.append(",".join(("window_index", "subject")
                              + BP_BASE_FIELDS + BP_DIASTOLIC_FIELDS))
        for i, w in enumerate(wins):
            try:
                vec = bp_features(w.samples, w.sample_rate_hz)
            except ValueError as exc:
                print(f"window {i}: {exc}", file=sys.stderr)
                continue
            vals = [str(getattr(vec, f)) for f in BP_BASE_FIELDS]
            vals += ["" if getattr(vec, f) is None else str(getattr(vec, f))
                     for f in BP_DIASTOLIC_FIELDS]
            lines.append(",".join([str(i), w.subject_id or ""] + vals))
    else:
        lines.append(",".join(("subject", "window_index", "cycle_index")
                              + _FV_FIELDS))
        for i, w in enumerate(wins):
            for ci, cyc in enumerate(segment_cycles(w.samples, w.sample_rate_hz)):
                fv = extract_features(detect_fiducials(cyc), cyc, w.samples)
                vals = []
                for f in _FV_FIELDS:
                    v = getattr(fv, f)
                    vals.append("" if v is None else str(v))
                lines.append(",".join([w.subject_id or "", str(i), str(ci)]
                                      + vals))
    require(len(lines) > 1, "no cycles produced any features")
    _write_atomic(args.out, "\n".join(lines) + "\n")
    manifest = RunManifest(
        command="features", config={"bp": bool(args.bp)},
        inputs=[args.infile], outputs=[args.out], seed=None,
        wall_time_s=time.monotonic() - t0)
    manifest.write(args.out + ".manifest.json")
    print(f"wrote {len(lines) - 1} rows")
    return 0


# ---- vitals ---------------------------------------------------------------------


def _window_vitals(samples: np.ndarray, fs: float) -> dict:
    ibis = extract_ibis(samples, fs)
    out: dict = {"n_intervals": int(ibis.ibis_ms.size),
                 "n_rejected": ibis.n_rejected}
    if ibis.ibis_ms.size >= 1:
        out["hr_bpm"] = estimate_hr(ibis.ibis_ms)
    if ibis.ibis_ms.size >= 2:
        hrv = hrv_metrics(ibis.ibis_ms)
        out.update(rmssd_ms=hrv.rmssd_ms, sdrr_ms=hrv.sdrr_ms,
                   pnn50=hrv.pnn50, mean_rr_ms=hrv.mean_rr_ms)
    return out


def cmd_vitals(args) -> int:
    t0 = time.monotonic()
    wins, meta = _windows_from_csv(args.infile)
    truth_path = args.truth or meta.get("truth")
    truth = _load_truth(truth_path) if truth_path else None
    rows = []
    errs: dict[str, list[float]] = {"hr_bpm": [], "rmssd_ms": [], "sdrr_ms": []}
    for i, w in enumerate(wins):
        row: dict = {"window_index": i, "subject": w.subject_id}
        try:
            row.update(_window_vitals(w.samples, w.sample_rate_hz))
        except ValueError as exc:
            row["error"] = str(exc)
            rows.append(row)
            continue
        if truth is not None:
            t_ibis = truth.ibis_in_window(w.origin_offset, w.samples.size)
            if t_ibis.size >= 1 and "hr_bpm" in row:
                row["truth_hr_bpm"] = estimate_hr(t_ibis)
                errs["hr_bpm"].append(abs(row["hr_bpm"] - row["truth_hr_bpm"]))
            if t_ibis.size >= 2 and "rmssd_ms" in row:
                t_hrv = hrv_metrics(t_ibis)
                row["truth_rmssd_ms"] = t_hrv.rmssd_ms
                row["truth_sdrr_ms"] = t_hrv.sdrr_ms
                errs["rmssd_ms"].append(abs(row["rmssd_ms"] - t_hrv.rmssd_ms))
                errs["sdrr_ms"].append(abs(row["sdrr_ms"] - t_hrv.sdrr_ms))
        rows.append(row)
    payload: dict = {"windows": rows}
    if truth is not None:
        payload["aggregate"] = {
            f"{k}_mae": (float(np.mean(v)) if v else None)
            for k, v in errs.items()}
    _write_atomic(args.out, json.dumps(payload, indent=2) + "\n")
    manifest = RunManifest(
        command="vitals", config={"truth": truth_path},
        inputs=[args.infile] + ([truth_path] if truth_path else []),
        outputs=[args.out], seed=None, wall_time_s=time.monotonic() - t0)
    manifest.write(args.out + ".manifest.json")
    print(f"wrote vitals for {len(rows)} windows")
    return 0


# ---- plot export (part of transform/eval tooling) --------------------------------


def export_plot_json(path: str, sample_rate_hz: float,
                     distorted: np.ndarray, reference: np.ndarray,
                     enhanced: np.ndarray) -> None:
    """Overlay-ready JSON: {t, distorted, reference, enhanced} arrays."""
    n = len(distorted)
    require(len(reference) == n and len(enhanced) == n,
            "arrays must share a length")
    payload = {"t": (np.arange(n) / sample_rate_hz).tolist(),
               "distorted": np.asarray(distorted, dtype=float).tolist(),
               "reference": np.asarray(reference, dtype=float).tolist(),
               "enhanced": np.asarray(enhanced, dtype=float).tolist()}
    _write_atomic(path, json.dumps(payload) + "\n")


# ---- argument wiring --------------------------------------------------------------


def _build_parser() -> _Parser:
    p = _Parser(prog="ppg", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="generate paired synthetic recordings")
    s.add_argument("--out-dir", required=True)
    s.add_argument("--subjects", type=int, default=1)
    s.add_argument("--duration", type=float, default=240.0)
    s.add_argument("--fs", type=float, default=128.0)
    s.add_argument("--jitter-ms", type=float, default=30.0)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("preprocess", help="filter, window, normalize, pair")
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--out", required=True,
                   help="output prefix; suffixes are added per stream")
    s.add_argument("--window-s", type=float, default=8.0)
    s.add_argument("--step-s", type=float, default=1.6)
    s.add_argument("--pcc-threshold", type=float, default=0.8)
    s.add_argument("--subject", default=None)
    s.set_defaults(func=cmd_preprocess)

    s = sub.add_parser("train", help="adversarial training on paired windows")
    s.add_argument("--config", default=None)
    s.add_argument("--data", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--depth", type=int, default=3)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--val-frac", type=float, default=0.15)
    s.add_argument("--test-frac", type=float, default=0.15)
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("transform", help="enhance windows with a checkpoint")
    s.add_argument("--ckpt", required=True)
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--batch", type=int, default=32)
    s.set_defaults(func=cmd_transform)

    s = sub.add_parser("eval", help="agreement metrics between window files")
    s.add_argument("--enhanced", required=True)
    s.add_argument("--reference", required=True)
    s.add_argument("--out", default=None, help="JSON report path (default stdout)")
    s.add_argument("--csv", default=None, help="also write a flat CSV row")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("features", help="per-cycle or per-window feature CSV")
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--bp", action="store_true",
                   help="emit the 15-field pressure feature vector per window")
    s.set_defaults(func=cmd_features)

    s = sub.add_parser("vitals", help="per-window HR/HRV, with truth MAEs")
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--truth", default=None,
                   help="ground-truth JSON (default: sidecar reference)")
    s.set_defaults(func=cmd_vitals)
    return p


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        # DataFormatError/CheckpointError subclass ValueError; bare ValueError
        # is a library precondition on the supplied data, so same exit code
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
