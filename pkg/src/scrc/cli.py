"""``scrc`` command line: synth, train, classify, evaluate, compare.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .errors import NumericError, ParameterError, ScrcError, TrainingError
from .pipeline import (
    GestureCoupleRecording,
    PipelineConfig,
    classify_stream,
    compare_crc_scrc,
    evaluate,
    train,
)
from .synthgen import ScriptedSequence, SynthConfig, gen_couple, gen_sequence, round_robin_script

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _say(msg):
    print(msg, file=sys.stderr)


def _couple_files(directory):
    d = Path(directory)
    if not d.is_dir():
        raise FileNotFoundError(f"couple directory {d} not found")
    files = sorted(p for p in d.glob("*.csv"))
    if not files:
        raise FileNotFoundError(f"no .csv recordings in {d}")
    return files


def load_couples(directory, gestures=None):
    """Read every couple in ``directory``; the gesture id comes from the sidecar."""
    couples, digests = [], {}
    for f in _couple_files(directory):
        rec, truth, meta = io.read_recording(f)
        if "gesture_id" not in meta:
            raise TrainingError(f"{f.name}: sidecar has no gesture_id")
        couples.append(GestureCoupleRecording(rec, int(meta["gesture_id"]),
                                              meta.get("description", ""), truth))
        digests[f.name] = io.file_digest(f)
    present = {c.gesture_id for c in couples}
    for g in gestures or ():
        if g not in present:
            raise TrainingError(f"no couple recording for gesture id {g}", g)
    return couples, digests


# commands --------------------------------------------------------------

def cmd_synth(args):
    scfg = SynthConfig()
    out = Path(args.out)
    if args.mode == "couple":
        if args.gesture is None:
            raise UsageError("--mode couple needs --gesture")
        gestures = [args.gesture] if args.gesture != 0 else [1, 2, 3, 4, 5]
        for g in gestures:
            rec, truth = gen_couple(g, args.cycles, scfg, seed=args.seed + g)
            path = io.write_recording(out / f"couple_g{g}.csv", rec, truth, gesture_id=g,
                                      description=f"synthetic couple, seed {args.seed + g}")
            print(path)
    else:
        if args.script:
            script = ScriptedSequence.from_json(json.loads(Path(args.script).read_text()))
        else:
            script = round_robin_script(cfg=scfg, seed=args.seed)
        rec, truth = gen_sequence(script, scfg, seed=args.seed)
        path = io.write_recording(out / "sequence.csv", rec, truth,
                                  description=f"synthetic sequence, seed {args.seed}")
        print(path)
    return EXIT_OK


def _config(args, **extra) -> PipelineConfig:
    fields = {"window_len": args.window, "step": args.step, "sigma": args.sigma,
              "lambda1": args.lambda1, "lambda2": args.lambda2, "reps_per_class": args.reps,
              "seed": args.seed}
    fields.update(extra)
    try:
        return PipelineConfig(**{k: v for k, v in fields.items() if v is not None})
    except ParameterError as exc:
        raise UsageError(str(exc)) from None


def cmd_train(args):
    gestures = [int(g) for g in args.gestures.split(",")] if args.gestures else None
    couples, digests = load_couples(args.couples, gestures)
    if gestures:
        couples = [c for c in couples if c.gesture_id in gestures]
    cfg = _config(args, channels=couples[0].recording.channels,
                  sample_rate=couples[0].recording.sample_rate)
    model = train(couples, cfg)
    for info in model.couples:
        pur = info["purity"]
        print(f"gesture {info['gesture_id']}: purity "
              f"{'n/a' if pur is None else f'{pur:.4f}'} sizes {info['sizes']}")
    io.save_model(args.out, model, {"seed": cfg.seed, "inputs": digests})
    print(f"model with {model.dictionary.class_count} internal classes -> {args.out}")
    return EXIT_OK


def cmd_classify(args):
    model = io.load_model(args.model)
    rec, _, _ = io.read_recording(args.input)
    tl = classify_stream(model, rec, mapped=not args.unmapped)
    io.write_labels(args.out, tl)
    print(f"{tl.count} windows -> {args.out}")
    return EXIT_OK


def cmd_evaluate(args):
    model = io.load_model(args.model)
    rec, labels, _ = io.read_recording(args.input)
    if args.truth:
        _, truth, _ = io.read_recording(args.truth)
        if truth is None:
            raise io.FormatError(f"{args.truth}: no label column")
    else:
        truth = labels
    if truth is None:
        raise io.FormatError("no truth labels: pass --truth or an input with a label column")
    tl = classify_stream(model, rec, mapped=True)
    report = evaluate(tl, truth, args.tolerance).to_dict()
    _write_json(args.report, report)
    print(f"accuracy {report['accuracy']:.4f} over {report['label_count']} windows")
    return EXIT_OK


def cmd_compare(args):
    couples, _ = load_couples(args.couples)
    rec, truth, _ = io.read_recording(args.test)
    if truth is None:
        raise io.FormatError(f"{args.test}: no label column")
    cfg = _config(args, channels=rec.channels, sample_rate=rec.sample_rate)
    sigmas = [float(s) for s in args.sigmas.split(",")] if args.sigmas else None
    rows = compare_crc_scrc(couples, rec, truth, cfg, sigmas, args.shift_augment, args.seed)
    report = {"shift_augment": bool(args.shift_augment), "rows": rows,
              "scrc_accuracy": rows[0]["scrc_accuracy"], "crc_accuracy": rows[0]["crc_accuracy"],
              "difference": rows[0]["difference"]}
    _write_json(args.report, report)
    for r in rows:
        print(f"sigma {r['scrc_sigma']:.4g}: scrc {r['scrc_accuracy']:.4f} "
              f"crc {r['crc_accuracy']:.4f} diff {r['difference']:+.4f}")
    return EXIT_OK


def _write_json(path, obj):
    if path is None:
        print(json.dumps(obj, indent=2))
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


# parser ----------------------------------------------------------------

def _pipeline_flags(p):
    p.add_argument("--window", type=int, default=None, help="window length n (default 100)")
    p.add_argument("--step", type=int, default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--lambda1", type=float, default=None)
    p.add_argument("--lambda2", type=float, default=None)
    p.add_argument("--reps", type=int, default=None, help="representatives per internal class")
    p.add_argument("--seed", type=int, default=0)


def build_parser():
    parser = _Parser(prog="scrc", description="Spectral collaborative representation classifier")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("synth", help="write synthetic recordings")
    p.add_argument("--mode", choices=["couple", "sequence"], default="couple")
    p.add_argument("--gesture", type=int, choices=range(0, 6), metavar="{1..5, 0=all}")
    p.add_argument("--cycles", type=int, default=6)
    p.add_argument("--script", help="JSON list of {label, duration, ramp} segments")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train a model from gesture couples")
    p.add_argument("--couples", required=True, help="directory of couple recordings")
    p.add_argument("--gestures", help="comma-separated gesture ids that must be present")
    _pipeline_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", help="label every window of a recording")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--unmapped", action="store_true", help="report internal class ids")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("evaluate", help="score a model against labeled data")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--truth", help="recording whose label column is the truth (default: --input)")
    p.add_argument("--tolerance", type=int, default=0, help="window tolerance for boundaries")
    p.add_argument("--report")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="SCRC against time-domain CRC_RLS")
    p.add_argument("--couples", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--shift-augment", action="store_true")
    p.add_argument("--sigmas", help="comma-separated ridge weights to sweep")
    _pipeline_flags(p)
    p.add_argument("--report")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        _say(str(exc))
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        _say(f"scrc {args.command}: {exc}")
        return EXIT_USAGE
    except (NumericError, FloatingPointError, np.linalg.LinAlgError) as exc:
        _say(f"scrc {args.command}: numeric failure: {exc}")
        return EXIT_NUMERIC
    except (ScrcError, OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        _say(f"scrc {args.command}: {exc}")
        return EXIT_DATA


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
