"""Corridor asymptotics: fair runs, small deviations, exit-time MGF.

Three self-contained numerical facts that drive the marginally
nestling analysis, where the only places a walk can linger cheaply are
runs of exactly-fair sites:

1. the longest run of fair sites in a window of length R grows like
   ln R / |ln alpha| when each site is fair with probability alpha;
2. a fair walk confined to a corridor of half-width x for n steps
   survives with probability exp(-(pi^2/8) n/x^2 (1 + o(1)));
3. the time T to exit (-l, l) has E[e^(lambda T)] finite exactly up to
   lambda_crit(l) = -ln cos(pi/(2l)), with a closed form in between
   and the sub-critical bound E[e^(lambda_eps T)] <= 1 + C1(eps)/l.

Run:  python3 demos/06_corridor_asymptotics.py   (about 10 s)
"""

from __future__ import annotations

import math

import numpy as np

from rwre import (
    SiteDistribution,
    c1_const,
    exit_mgf_closed,
    exit_mgf_dp,
    lambda_crit,
    lambda_eps,
    longest_fair_run,
    sample_environment,
    srw_smalldev_constant,
)

MARGINAL = SiteDistribution((0.5, 0.75), (0.5, 0.5))


def main() -> None:
    # --- longest runs of fair sites ------------------------------------
    r = 1_000_000
    target = 1.0 / abs(math.log(0.5))
    ratios = []
    for seed in range(60):
        window = sample_environment(MARGINAL, seed, 0, r - 1)
        length, start = longest_fair_run(window, r)
        ratios.append(length / math.log(r))
    print(f"longest fair run in windows of length R = 1e6 "
          f"(alpha = 1/2 per site):")
    print(f"  mean L / ln R over 60 windows = {np.mean(ratios):.4f}   "
          f"(limit 1/|ln alpha| = {target:.4f})")
    print(f"  individual ratios range {min(ratios):.3f} .. "
          f"{max(ratios):.3f}\n")

    # --- small-deviation constant for the corridor ----------------------
    print("fair walk confined to |X| <= x for n steps, "
          "(x^2/n) ln P vs the limit -pi^2/8:")
    target = -math.pi**2 / 8.0
    for n, x in ((10**3, 20), (10**4, 40), (10**5, 63), (10**6, 125)):
        _, norm = srw_smalldev_constant(n, x)
        print(f"  n = {n:>7}, x = {x:>3}: {norm:.5f}   "
              f"(target {target:.5f}, rel err "
              f"{abs(norm - target) / abs(target):.2%})")

    # --- exit-time moment generating function ---------------------------
    print("\nexit time T of the fair walk from (-l, l):")
    for ell in (2, 3, 5, 10):
        crit = lambda_crit(ell)
        lam = 0.9 * crit
        closed = exit_mgf_closed(ell, lam)
        series = exit_mgf_dp(ell, lam)
        print(f"  l = {ell:>2}: lambda_crit = {crit:.6f}, at 0.9 crit "
              f"closed form {closed:.12f} vs series {series:.12f} "
              f"(diff {abs(closed - series):.1e})")
    print("\nsub-critical uniform bound  E[e^(lambda_eps T)] <= 1 + C1/l:")
    for eps in (0.05, 0.2):
        c1 = c1_const(eps)
        for ell in (5, 50):
            mgf = exit_mgf_closed(ell, lambda_eps(eps, ell))
            print(f"  eps = {eps:.2f}, l = {ell:>2}: mgf = {mgf:.6f}  "
                  f"<=  1 + C1/l = {1 + c1 / ell:.6f}")
    print("\nthe MGF bound is what caps the cost of each excursion "
          "between fair stretches")


if __name__ == "__main__":
    main()
