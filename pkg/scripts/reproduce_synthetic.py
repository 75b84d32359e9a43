"""Train on five synthetic couples and label held-out couples plus one mixed sequence.

    python scripts/reproduce_synthetic.py --width 0.005 --reps 25

With ``--oracle`` the representatives are picked from the true labels instead
of the clustering, which gives a ceiling for the classifier alone.
"""
import argparse
import time
from dataclasses import replace

import numpy as np

from scrc.pipeline import (
    ACTIVE,
    RETURN,
    GestureCoupleRecording,
    PipelineConfig,
    assemble,
    classify_stream,
    evaluate,
    select_representatives,
    uniform_subsample,
)
from scrc.recording import EXTERNAL_LABELS, RELAX, gesture_label
from scrc.synthgen import SynthConfig, default_signatures, gen_couple, gen_sequence, round_robin_script


def oracle_selection(couple, cfg):
    sel = select_representatives(couple, cfg)
    truth = couple.truth[sel.starts + cfg.window_len - 1]
    sel.chosen = {ACTIVE: uniform_subsample(np.flatnonzero(truth != RELAX), cfg.reps_per_class),
                  RETURN: uniform_subsample(np.flatnonzero(truth == RELAX), cfg.reps_per_class)}
    return sel


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--width", type=float, default=0.005, help="gesture band width")
    ap.add_argument("--reps", type=int, default=25)
    ap.add_argument("--lambda2", type=float, default=0.1)
    ap.add_argument("--seed", type=int, default=100)
    ap.add_argument("--tests", type=int, default=4, help="held-out streams per gesture")
    ap.add_argument("--oracle", action="store_true")
    ap.add_argument("--tolerance", type=int, default=0)
    args = ap.parse_args()

    scfg = SynthConfig(signatures=default_signatures(width=args.width))
    cfg = PipelineConfig(reps_per_class=args.reps, lambda2=args.lambda2)
    t0 = time.perf_counter()
    couples = []
    for g in range(1, 6):
        rec, truth = gen_couple(g, 6, scfg, seed=args.seed + g)
        couples.append(GestureCoupleRecording(rec, g, truth=truth))
    pick = oracle_selection if args.oracle else select_representatives
    model = assemble([pick(c, cfg) for c in couples], cfg)
    print(f"trained in {time.perf_counter() - t0:.1f} s")
    for info in model.couples:
        print(f"  gesture {info['gesture_id']}: purity {info['purity']:.3f}")

    print(f"{'stream':<14}{'accuracy':>10}")
    for g in range(1, 6):
        for k in range(args.tests):
            rec, truth = gen_couple(g, 6, scfg, seed=10 * (args.seed + 400 + k) + g)
            rep = evaluate(classify_stream(model, rec), truth, args.tolerance)
            print(f"{EXTERNAL_LABELS[gesture_label(g)] + f'#{k}':<14}{rep.accuracy:>10.4f}")
    rec, truth = gen_sequence(round_robin_script(cfg=scfg, seed=args.seed), scfg, seed=args.seed)
    rep = evaluate(classify_stream(model, rec), truth, args.tolerance)
    print(f"{'sequence':<14}{rep.accuracy:>10.4f}")
    print("confusion (rows truth, columns predicted):")
    print(rep.confusion)
    print(f"total {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
