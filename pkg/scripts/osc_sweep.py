"""Cluster purity of synthetic couples over a grid of OSC weights."""
import argparse
import itertools

import numpy as np

from scrc.pipeline import GestureCoupleRecording, PipelineConfig, select_representatives
from scrc.synthgen import gen_couple


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--lambda1", default="0.05,0.1,0.2")
    ap.add_argument("--lambda2", default="0.05,0.1,0.5")
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--stride", type=int, default=4)
    args = ap.parse_args()
    for l1, l2 in itertools.product(map(float, args.lambda1.split(",")), map(float, args.lambda2.split(","))):
        cfg = PipelineConfig(lambda1=l1, lambda2=l2, cluster_stride=args.stride)
        pur = []
        for s in range(args.seeds):
            g = 1 + s % 5
            rec, truth = gen_couple(g, 6, seed=1000 + s)
            pur.append(select_representatives(GestureCoupleRecording(rec, g, truth=truth), cfg).purity)
        print(f"lambda1 {l1:<6g} lambda2 {l2:<6g} purity min {min(pur):.3f} mean {np.mean(pur):.3f}")


if __name__ == "__main__":
    main()
