"""Sweep the ridge weight for SCRC and time-domain CRC_RLS, with and without
random circular shifts of the test windows."""
import argparse

from scrc.pipeline import GestureCoupleRecording, PipelineConfig, compare_crc_scrc
from scrc.synthgen import gen_couple, gen_sequence, round_robin_script


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sigmas", default="0.001,0.01,0.1,1")
    ap.add_argument("--seed", type=int, default=100)
    args = ap.parse_args()
    sigmas = [float(s) for s in args.sigmas.split(",")]
    couples = [GestureCoupleRecording(*gen_couple(g, 6, seed=args.seed + g)[:1], g,
                                      truth=gen_couple(g, 6, seed=args.seed + g)[1]) for g in range(1, 6)]
    rec, truth = gen_sequence(round_robin_script(seed=args.seed), seed=args.seed)
    print(f"{'shift':<7}{'sigma':>8}{'scrc':>9}{'crc':>9}{'diff':>9}")
    for shift in (False, True):
        for row in compare_crc_scrc(couples, rec, truth, PipelineConfig(), sigmas, shift, args.seed):
            print(f"{str(shift):<7}{row['sigma']:>8g}{row['scrc_accuracy']:>9.4f}"
                  f"{row['crc_accuracy']:>9.4f}{row['difference']:>+9.4f}")


if __name__ == "__main__":
    main()
