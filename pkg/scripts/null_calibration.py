"""False-positive rates of the default grid on pure random walks.

Reports, per holding period K, the share of starred cells at 5% and the
share of starred cells with a positive mean, plus pooled figures.

    python scripts/null_calibration.py --seeds 200 --T 600
"""

import argparse
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from tsmom import Ar1Spec, GridSpec, gen_ar1, run_grid
from tsmom.stats import Significance


def one_seed(args):
    seed, T, sigma = args
    g = run_grid(gen_ar1(Ar1Spec(phi=0.0, sigma=sigma, T=T, seed=seed)), None)
    return [(c.J, c.K, c.significance is not Significance.NONE, c.mean_monthly > 0, c.t_stat) for c in g.valid_cells()]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=200)
    ap.add_argument("--T", type=int, default=600)
    ap.add_argument("--sigma", type=float, default=0.05)
    ap.add_argument("--procs", type=int, default=4)
    args = ap.parse_args()

    jobs = [(s, args.T, args.sigma) for s in range(args.seeds)]
    with ProcessPoolExecutor(args.procs) as ex:
        rows = [r for chunk in ex.map(one_seed, jobs) for r in chunk]

    print(f"{'K':>4} {'starred':>8} {'pos|star':>9} {'mean t':>8}")
    for K in GridSpec().holdings:
        sub = [r for r in rows if r[1] == K]
        star = [r for r in sub if r[2]]
        share = sum(r[3] for r in star) / len(star) if star else float("nan")
        print(f"{K:>4} {len(star) / len(sub):>8.3f} {share:>9.3f} {np.mean([r[4] for r in sub]):>8.3f}")
    star = [r for r in rows if r[2]]
    print(f"pooled: {len(rows)} cells, starred {len(star) / len(rows):.4f}, "
          f"positive mean {sum(r[3] for r in rows) / len(rows):.4f}, "
          f"positive among starred {sum(r[3] for r in star) / len(star):.4f}")


if __name__ == "__main__":
    main()
