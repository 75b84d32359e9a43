"""Training from gesture-couple recordings and continuous stream labeling.

Training slides a window over each couple recording, splits the windows of
that couple into an active and a return cluster with ordered subspace
clustering, keeps a time-uniform subsample of each cluster and stacks all
of them into one dictionary of ``2 * G`` internal classes.  At inference
every return class is reported as relax.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import crc
from .errors import ChannelMismatchError, DimensionError, ParameterError, TooShortError, TrainingError
from .osc import OSCConfig, cluster_couple
from .recording import EXTERNAL_LABELS, RELAX, MultichannelRecording, gesture_label
from .spectral import SignalWindow, spectral_features, time_features

ACTIVE, RETURN = "active", "return"


@dataclass
class PipelineConfig:
    window_len: int = 100
    step: int = 1
    channels: int = 8
    sample_rate: float = 200.0
    sigma: float | None = None
    lambda1: float = 0.1
    lambda2: float = 0.1
    reps_per_class: int = 25
    centering: bool = True
    label_map: str = "mapped"  # "unmapped" reports internal ids
    features: str = "spectral"  # "time" is the CRC_RLS baseline
    cluster_stride: int = 4
    osc_penalty: str = "l12"
    osc_max_iter: int = 200
    active_rule: str = "energy"  # "inverted" picks the low-energy cluster
    smoothing: int = 0  # odd majority-filter length, 0 disables
    seed: int = 0
    batch_size: int = 2048

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.window_len < 2:
            raise ParameterError("window_len must be >= 2")
        if not 1 <= self.step <= self.window_len:
            raise ParameterError("step must lie in 1..window_len")
        if self.channels < 1 or self.reps_per_class < 1 or self.cluster_stride < 1:
            raise ParameterError("channels, reps_per_class and cluster_stride must be positive")
        if self.sigma is not None and not self.sigma > 0:
            raise ParameterError("sigma must be positive")
        if self.label_map not in ("mapped", "unmapped"):
            raise ParameterError(f"unknown label_map {self.label_map!r}")
        if self.features not in ("spectral", "time"):
            raise ParameterError(f"unknown feature kind {self.features!r}")
        if self.active_rule not in ("energy", "window", "inverted"):
            raise ParameterError(f"unknown active_rule {self.active_rule!r}")
        if self.smoothing and self.smoothing % 2 == 0:
            raise ParameterError("smoothing length must be odd")

    def osc_config(self) -> OSCConfig:
        return OSCConfig(lambda1=self.lambda1, lambda2=self.lambda2, penalty=self.osc_penalty,
                         max_iter=self.osc_max_iter, stride=self.cluster_stride, seed=self.seed)

    def to_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class GestureCoupleRecording:
    recording: MultichannelRecording
    gesture_id: int
    description: str = ""
    truth: np.ndarray | None = None


@dataclass(frozen=True)
class ClassScheme:
    """Internal class ``2g-1`` is gesture ``g`` active, ``2g`` its return phase."""

    gestures: tuple

    @property
    def class_count(self) -> int:
        return 2 * len(self.gestures)

    def internal_id(self, gesture_id: int, phase: str) -> int:
        pos = self.gestures.index(gesture_id)
        return 2 * pos + (1 if phase == ACTIVE else 2)

    def describe(self, internal: int):
        g = self.gestures[(internal - 1) // 2]
        return g, ACTIVE if internal % 2 == 1 else RETURN

    def external(self, internal: int) -> int:
        g, phase = self.describe(internal)
        return gesture_label(g) if phase == ACTIVE else RELAX

    def mapping(self) -> np.ndarray:
        """Lookup array: ``mapping()[internal] -> external`` (index 0 unused)."""
        out = np.zeros(self.class_count + 1, dtype=int)
        for i in range(1, self.class_count + 1):
            out[i] = self.external(i)
        return out

    def to_dict(self):
        return {"gestures": list(self.gestures),
                "internal": {str(i): {"gesture_id": self.describe(i)[0], "phase": self.describe(i)[1],
                                      "external": self.external(i)}
                             for i in range(1, self.class_count + 1)},
                "external": {str(k): v for k, v in EXTERNAL_LABELS.items()}}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(int(g) for g in d["gestures"]))


@dataclass
class TrainedModel:
    dictionary: crc.Dictionary
    operator: crc.RegressionOperator
    scheme: ClassScheme
    config: PipelineConfig
    couples: list = field(default_factory=list)


@dataclass(frozen=True)
class LabelTimeline:
    window_start: np.ndarray
    internal: np.ndarray
    external: np.ndarray
    margin: np.ndarray
    window_len: int
    step: int = 1
    mapped: bool = True

    @property
    def count(self) -> int:
        return int(self.window_start.size)

    def __len__(self):
        return self.count

    @property
    def labels(self) -> np.ndarray:
        """Reported label: external when mapped, internal otherwise."""
        return self.external if self.mapped else self.internal

    def final_samples(self) -> np.ndarray:
        return self.window_start + self.window_len - 1


@dataclass
class EvalReport:
    accuracy: float
    confusion: np.ndarray
    labels: list
    per_class_accuracy: dict
    count: int
    errors: int

    def to_dict(self):
        return {"accuracy": self.accuracy, "labels": self.labels,
                "confusion": self.confusion.tolist(),
                "per_class_accuracy": {str(k): v for k, v in self.per_class_accuracy.items()},
                "label_count": self.count, "errors": self.errors}


# windows ---------------------------------------------------------------

def window_count(length: int, window_len: int, step: int) -> int:
    if length < window_len:
        return 0
    return (length - window_len) // step + 1


def window_starts(length: int, window_len: int, step: int = 1) -> np.ndarray:
    if length < window_len:
        raise TooShortError(f"recording of {length} samples is shorter than the window ({window_len})")
    return np.arange(window_count(length, window_len, step)) * step


def window_block(rec: MultichannelRecording, cfg: PipelineConfig):
    """All window groups as one array view of shape ``(W, channels, n)``."""
    starts = window_starts(rec.length, cfg.window_len, cfg.step)
    view = sliding_window_view(rec.samples, cfg.window_len, axis=0)[::cfg.step]
    return starts, view


def slide_windows(rec: MultichannelRecording, cfg: PipelineConfig):
    """Per-channel :class:`SignalWindow` groups in temporal order."""
    starts, block = window_block(rec, cfg)
    return [[SignalWindow(block[w, ch], int(s), ch) for ch in range(rec.channels)]
            for w, s in enumerate(starts)]


def featurize(block: np.ndarray, cfg: PipelineConfig, kind: str | None = None) -> np.ndarray:
    """Features of a ``(W, channels, n)`` block, one row per window."""
    kind = kind or cfg.features
    if kind == "spectral":
        return spectral_features(block, cfg.centering)
    return time_features(block, cfg.centering)


def window_energy(block: np.ndarray) -> np.ndarray:
    centered = block - block.mean(axis=-1, keepdims=True)
    return np.sum(centered ** 2, axis=(-2, -1))


# training --------------------------------------------------------------

def _check_channels(rec, cfg):
    if rec.channels != cfg.channels:
        raise ChannelMismatchError(f"recording has {rec.channels} channels, model expects {cfg.channels}")


def uniform_subsample(indices: np.ndarray, cap: int) -> np.ndarray:
    if indices.size <= cap:
        return indices
    pick = np.unique(np.round(np.linspace(0, indices.size - 1, cap)).astype(int))
    return indices[pick]


@dataclass
class CoupleSelection:
    gesture_id: int
    starts: np.ndarray
    block: np.ndarray
    cluster_labels: np.ndarray
    active_cluster: int
    chosen: dict  # phase -> window indices
    purity: float | None = None
    converged: bool = True


def select_representatives(couple: GestureCoupleRecording, cfg: PipelineConfig) -> CoupleSelection:
    """Cluster one couple into active/return windows and pick the representatives."""
    rec = couple.recording
    _check_channels(rec, cfg)
    starts, block = window_block(rec, cfg)
    if starts.size < 4:
        raise TrainingError(f"gesture {couple.gesture_id}: too few windows ({starts.size})",
                            couple.gesture_id)
    X = featurize(block, cfg, "spectral").T
    assignment = cluster_couple(X, cfg.osc_config(), k=2)
    labels = assignment.labels
    sizes = assignment.sizes()
    if sizes.min() < 3:
        raise TrainingError(
            f"gesture {couple.gesture_id}: clustering left a cluster with {sizes.min()} windows",
            couple.gesture_id)
    energy = window_energy(block if cfg.active_rule == "window" else block[..., -cfg.window_len // 4:])
    means = [energy[labels == c].mean() for c in (1, 2)]
    active = 1 + int(np.argmax(means))
    if cfg.active_rule == "inverted":
        active = 3 - active
    chosen = {ACTIVE: uniform_subsample(np.flatnonzero(labels == active), cfg.reps_per_class),
              RETURN: uniform_subsample(np.flatnonzero(labels != active), cfg.reps_per_class)}
    purity = None
    if couple.truth is not None:
        truth = np.asarray(couple.truth)[starts + cfg.window_len - 1]
        purity = float(np.mean((labels == active) == (truth != RELAX)))
    return CoupleSelection(couple.gesture_id, starts, block, labels, active, chosen,
                           purity, assignment.converged)


def _check_couples(couples: Sequence[GestureCoupleRecording]):
    if not couples:
        raise TrainingError("no gesture couples given")
    ids = [c.gesture_id for c in couples]
    if len(set(ids)) != len(ids):
        raise TrainingError(f"duplicate gesture ids in {sorted(ids)}")
    for g in ids:
        if not 1 <= g <= 5:
            raise TrainingError(f"gesture id {g} outside 1..5", g)


def assemble(selections: Sequence[CoupleSelection], cfg: PipelineConfig, kind: str | None = None):
    """Stack the chosen windows of every couple into a model."""
    scheme = ClassScheme(tuple(sorted(s.gesture_id for s in selections)))
    cols, class_of = [], []
    for sel in sorted(selections, key=lambda s: s.gesture_id):
        for phase in (ACTIVE, RETURN):
            idx = sel.chosen[phase]
            cols.append(featurize(sel.block[idx], cfg, kind))
            class_of.extend([scheme.internal_id(sel.gesture_id, phase)] * idx.size)
    A = np.concatenate(cols, axis=0).T
    dictionary, op = crc.build_dictionary(A, class_of, cfg.sigma)
    model_cfg = replace(cfg, features=kind or cfg.features)
    info = [{"gesture_id": s.gesture_id, "purity": s.purity, "converged": s.converged,
             "sizes": [int(s.chosen[ACTIVE].size), int(s.chosen[RETURN].size)]}
            for s in selections]
    return TrainedModel(dictionary, op, scheme, model_cfg, info)


def train(couples: Sequence[GestureCoupleRecording], cfg: PipelineConfig | None = None) -> TrainedModel:
    cfg = cfg or PipelineConfig()
    _check_couples(couples)
    selections = [select_representatives(c, cfg) for c in couples]
    return assemble(selections, cfg)


# inference -------------------------------------------------------------

def majority_filter(labels: np.ndarray, length: int) -> np.ndarray:
    if length <= 1:
        return labels
    half = length // 2
    padded = np.pad(labels, half, mode="edge")
    win = sliding_window_view(padded, length)
    out = np.empty_like(labels)
    for i, row in enumerate(win):
        vals, counts = np.unique(row, return_counts=True)
        out[i] = vals[np.argmax(counts)]
    return out


def classify_block(model: TrainedModel, block: np.ndarray, shifts: np.ndarray | None = None):
    """Labels and margins for a ``(W, channels, n)`` block, in chunks."""
    cfg = model.config
    labels = np.empty(block.shape[0], dtype=int)
    margins = np.empty(block.shape[0])
    for lo in range(0, block.shape[0], cfg.batch_size):
        hi = min(lo + cfg.batch_size, block.shape[0])
        chunk = block[lo:hi]
        if shifts is not None:
            chunk = circular_shift_windows(chunk, shifts[lo:hi])
        Y = featurize(chunk, cfg).T
        lab, mar, _ = crc.classify_batch(model.dictionary, model.operator, Y)
        labels[lo:hi] = lab
        margins[lo:hi] = mar
    return labels, margins


def classify_stream(model: TrainedModel, rec: MultichannelRecording, mapped: bool | None = None,
                    shifts: np.ndarray | None = None) -> LabelTimeline:
    cfg = model.config
    _check_channels(rec, cfg)
    starts, block = window_block(rec, cfg)
    internal, margins = classify_block(model, block, shifts)
    if cfg.smoothing:
        internal = majority_filter(internal, cfg.smoothing)
    external = model.scheme.mapping()[internal]
    if mapped is None:
        mapped = cfg.label_map == "mapped"
    return LabelTimeline(starts, internal, external, margins, cfg.window_len, cfg.step, mapped)


class StreamClassifier:
    """Sample-by-sample labeling with a ring buffer of the last ``n`` samples."""

    def __init__(self, model: TrainedModel):
        self.model = model
        n, c = model.config.window_len, model.config.channels
        self._buf = np.zeros((2 * n, c))
        self._filled = 0
        self._pos = 0  # absolute index of the next sample
        self._mapping = model.scheme.mapping()

    def push(self, samples):
        """Feed ``(k, channels)`` samples; returns ``(start, internal, external, margin)`` records."""
        samples = np.atleast_2d(np.asarray(samples, dtype=float))
        cfg = self.model.config
        n = cfg.window_len
        if samples.shape[1] != cfg.channels:
            raise ChannelMismatchError(f"got {samples.shape[1]} channels, expected {cfg.channels}")
        out = []
        for row in samples:
            # keep two copies so the latest window is always contiguous
            i = self._pos % n
            self._buf[i] = row
            self._buf[i + n] = row
            self._pos += 1
            self._filled = min(self._filled + 1, n)
            start = self._pos - n
            if self._filled == n and start % cfg.step == 0:
                j = self._pos % n
                window = self._buf[j:j + n].T[None]
                y = featurize(window, cfg)[0]
                res = crc.classify_one_shot(self.model.dictionary, self.model.operator, y)
                out.append((start, res.label, int(self._mapping[res.label]), res.margin))
        return out


# evaluation ------------------------------------------------------------

def evaluate(timeline: LabelTimeline, truth, tolerance_windows: int = 0, labels=None) -> EvalReport:
    """Score a timeline against per-sample truth, aligned at each window's final sample.

    With ``tolerance_windows > 0`` a window also counts as correct when its
    label matches the truth at the final sample of a window at most that many
    positions away.
    """
    truth = np.asarray(truth, dtype=int).ravel()
    finals = timeline.final_samples()
    if timeline.count and finals[-1] >= truth.size:
        raise DimensionError(f"truth has {truth.size} samples, timeline needs {finals[-1] + 1}")
    pred = timeline.labels
    ref = truth[finals]
    correct = pred == ref
    for d in range(1, tolerance_windows + 1):
        for sign in (-1, 1):
            alt = np.clip(finals + sign * d * timeline.step, 0, truth.size - 1)
            correct |= pred == truth[alt]
    if labels is None:
        labels = sorted(EXTERNAL_LABELS) if timeline.mapped else sorted(
            set(range(1, int(max(pred.max(initial=0), ref.max(initial=0))) + 1)))
    labels = list(labels)
    index = {lab: i for i, lab in enumerate(labels)}
    conf = np.zeros((len(labels), len(labels)), dtype=int)
    for t, p in zip(ref.tolist(), pred.tolist()):
        conf[index[t], index[p]] += 1
    per_class = {}
    for lab in labels:
        mask = ref == lab
        if mask.any():
            per_class[lab] = float(np.mean(correct[mask]))
    count = timeline.count
    acc = float(np.mean(correct)) if count else 0.0
    return EvalReport(acc, conf, labels, per_class, count, int(count - correct.sum()))


# CRC_RLS vs SCRC -------------------------------------------------------

def circular_shift_windows(block: np.ndarray, shifts: np.ndarray) -> np.ndarray:
    """Roll every window of ``(W, channels, n)`` by its own shift along time."""
    n = block.shape[-1]
    idx = (np.arange(n)[None, :] - np.asarray(shifts)[:, None]) % n
    return np.take_along_axis(block, idx[:, None, :], axis=-1)


def random_shifts(count: int, n: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).integers(1, n, size=count)


def compare_crc_scrc(couples, test: MultichannelRecording, truth, cfg: PipelineConfig | None = None,
                     sigmas=None, shift_augment: bool = False, seed: int = 0):
    """Train SCRC and time-domain CRC_RLS on the same windows and score both on ``test``.

    Returns one row per sigma.
    """
    cfg = cfg or PipelineConfig()
    _check_couples(couples)
    selections = [select_representatives(c, cfg) for c in couples]
    n_windows = window_count(test.length, cfg.window_len, cfg.step)
    shifts = random_shifts(n_windows, cfg.window_len, seed) if shift_augment else None
    rows = []
    for sigma in (sigmas if sigmas is not None else [cfg.sigma]):
        row = {"sigma": sigma}
        for kind, name in (("spectral", "scrc"), ("time", "crc")):
            model = assemble(selections, replace(cfg, sigma=sigma), kind)
            t0 = time.perf_counter()
            tl = classify_stream(model, test, mapped=True, shifts=shifts)
            row[f"{name}_seconds"] = time.perf_counter() - t0
            row[f"{name}_accuracy"] = evaluate(tl, truth).accuracy
            row[f"{name}_sigma"] = model.operator.sigma
        row["difference"] = row["scrc_accuracy"] - row["crc_accuracy"]
        rows.append(row)
    return rows
