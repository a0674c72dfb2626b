"""Power of the (J, K) = (1, 1) MOP cell against AR(1) alternatives.

For each phi, counts the seeds whose t-statistic clears +-1.96 in the
direction of phi.

    python scripts/directional_oracle.py --phis -0.2 -0.1 0.1 0.2 --seeds 20
"""

import argparse

from tsmom import Ar1Spec, RiskFreeSeries, SignalMethod, gen_ar1, run_strategy


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--phis", type=float, nargs="+", default=[-0.2, -0.1, 0.1, 0.2])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--T", type=int, default=600)
    ap.add_argument("--sigma", type=float, default=0.05)
    ap.add_argument("--J", type=int, default=1)
    ap.add_argument("--K", type=int, default=1)
    args = ap.parse_args()

    print(f"{'phi':>6} {'hits':>6} {'mean t':>8}")
    for phi in args.phis:
        ts = []
        for seed in range(args.seeds):
            r = gen_ar1(Ar1Spec(phi=phi, sigma=args.sigma, T=args.T, seed=seed))
            ts.append(run_strategy(r, RiskFreeSeries.zeros(r.span), args.J, args.K, SignalMethod.MOP).t_stat)
        hits = sum(t > 1.96 for t in ts) if phi > 0 else sum(t < -1.96 for t in ts)
        print(f"{phi:>6.2f} {hits:>3}/{args.seeds:<2} {sum(ts) / len(ts):>8.2f}")


if __name__ == "__main__":
    main()
