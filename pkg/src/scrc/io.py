"""Recording CSV files with JSON sidecars, and JSON model files."""
from __future__ import annotations

import csv
import hashlib
import json
import time
from pathlib import Path

import numpy as np

from . import crc
from .errors import DimensionError, ParameterError
from .pipeline import ClassScheme, PipelineConfig, TrainedModel
from .recording import EXTERNAL_LABELS, MultichannelRecording

MODEL_FORMAT = "scrc-model/1"


class FormatError(ParameterError):
    pass


def meta_path(csv_path) -> Path:
    p = Path(csv_path)
    return p.with_name(p.stem + ".meta.json")


def _fmt(x: float) -> str:
    return repr(float(x)) if np.isfinite(x) else "nan"


def write_recording(path, rec: MultichannelRecording, truth=None, gesture_id=None,
                    description: str = "") -> Path:
    """Write ``path`` and its ``.meta.json`` sidecar; returns the CSV path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    c = rec.channels
    if truth is not None:
        truth = np.asarray(truth, dtype=int)
        if truth.size != rec.length:
            raise DimensionError(f"truth has {truth.size} samples, recording {rec.length}")
    header = ["t"] + [f"ch{i}" for i in range(c)] + (["label"] if truth is not None else [])
    t = rec.times()
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i in range(rec.length):
            row = [_fmt(t[i])] + [_fmt(v) for v in rec.samples[i]]
            if truth is not None:
                row.append(str(int(truth[i])))
            w.writerow(row)
    meta = {"sample_rate_hz": float(rec.sample_rate), "channels": c}
    if gesture_id is not None:
        meta["gesture_id"] = int(gesture_id)
    if description:
        meta["description"] = description
    meta_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path


def read_recording(path):
    """Load a recording; returns ``(MultichannelRecording, truth or None, meta dict)``."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    mp = meta_path(path)
    meta = json.loads(mp.read_text()) if mp.exists() else {}
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise FormatError(f"{path}: empty file")
    header = rows[0]
    has_label = header[-1] == "label"
    chans = header[1:-1] if has_label else header[1:]
    if header[0] != "t" or chans != [f"ch{i}" for i in range(len(chans))] or not chans:
        raise FormatError(f"{path}: header must be t,ch0..ch<c-1>[,label]")
    if "channels" in meta and int(meta["channels"]) != len(chans):
        raise FormatError(f"{path}: sidecar says {meta['channels']} channels, header has {len(chans)}")
    try:
        body = np.array([[float(v) for v in r[:1 + len(chans)]] for r in rows[1:]], dtype=float)
        labels = np.array([int(r[-1]) for r in rows[1:]], dtype=int) if has_label else None
    except (ValueError, IndexError) as exc:
        raise FormatError(f"{path}: malformed row ({exc})") from None
    if body.shape[0] == 0:
        raise FormatError(f"{path}: no samples")
    if any(len(r) != len(header) for r in rows[1:]):
        raise FormatError(f"{path}: ragged rows")
    if body.shape[0] > 1 and np.any(np.diff(body[:, 0]) <= 0):
        raise FormatError(f"{path}: t must be strictly increasing")
    if labels is not None and not set(np.unique(labels).tolist()) <= set(EXTERNAL_LABELS):
        raise FormatError(f"{path}: labels must lie in 1..6")
    rate = float(meta.get("sample_rate_hz", 200.0))
    return MultichannelRecording(body[:, 1:], rate), labels, meta


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# models ----------------------------------------------------------------

def _pairs(a: np.ndarray):
    a = np.asarray(a)
    if np.iscomplexobj(a):
        return np.stack([a.real, a.imag], axis=-1).tolist()
    return a.tolist()


def _unpairs(obj, complex_: bool):
    a = np.asarray(obj, dtype=float)
    return a[..., 0] + 1j * a[..., 1] if complex_ else a


def model_to_dict(model: TrainedModel, provenance: dict | None = None) -> dict:
    d = model.dictionary
    is_complex = bool(np.iscomplexobj(d.columns))
    prov = {"seed": model.config.seed, "created": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "inputs": {}}
    prov.update(provenance or {})
    return {
        "format": MODEL_FORMAT,
        "config": model.config.to_dict(),
        "scheme": model.scheme.to_dict(),
        "complex": is_complex,
        "shape": list(d.columns.shape),
        "columns": _pairs(d.columns),
        "class_of": d.class_of.tolist(),
        "column_mean": _pairs(d.column_mean),
        "column_norms": d.column_norms.tolist(),
        "sigma": model.operator.sigma,
        "couples": model.couples,
        "provenance": prov,
    }


def model_from_dict(obj: dict) -> TrainedModel:
    if obj.get("format") != MODEL_FORMAT:
        raise FormatError(f"unsupported model format {obj.get('format')!r}")
    cfg = PipelineConfig(**obj["config"])
    cx = bool(obj["complex"])
    A = _unpairs(obj["columns"], cx)
    if list(A.shape) != list(obj["shape"]):
        raise FormatError("column array does not match the stored shape")
    class_of = np.asarray(obj["class_of"], dtype=int)
    dictionary = crc.Dictionary(A, class_of, int(class_of.max()),
                                np.asarray(obj["column_norms"], dtype=float),
                                _unpairs(obj["column_mean"], cx))
    # P is rebuilt from the stored columns; the factorization is deterministic
    op = crc.regression_operator(A, float(obj["sigma"]))
    return TrainedModel(dictionary, op, ClassScheme.from_dict(obj["scheme"]), cfg,
                        obj.get("couples", []))


def save_model(path, model: TrainedModel, provenance: dict | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(model_to_dict(model, provenance), sort_keys=True) + "\n")
    return path


def load_model(path) -> TrainedModel:
    return model_from_dict(json.loads(Path(path).read_text()))


def strip_timestamp(obj: dict) -> dict:
    out = json.loads(json.dumps(obj))
    out.get("provenance", {}).pop("created", None)
    return out


def write_labels(path, timeline) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["window_start", "internal_id", "external_label", "margin"])
        ext = timeline.external if timeline.mapped else timeline.internal
        for s, i, e, m in zip(timeline.window_start.tolist(), timeline.internal.tolist(),
                              ext.tolist(), timeline.margin.tolist()):
            w.writerow([s, i, e, _fmt(m)])
    return path


def read_labels(path):
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {k: np.array([float(r[k]) if k == "margin" else int(r[k]) for r in rows])
            for k in ("window_start", "internal_id", "external_label", "margin")}
