#!/usr/bin/env python3
"""High-precision leading eigenpair of the dissipative endpoint chain.

Independent oracle for the C++ spectral path: computes the leading
eigenvalue and eigenvector of P(gamma) T(p) on sites x = 1..L in high-
precision arithmetic. The row relation is

    lambda rho(x) = e^{-gamma x} [ p^2 rho(x-1) + 2p(1-p) rho(x)
                                   + (1-p)^2 rho(x+1) ]

with reflecting corners (stay weight (1-p)^2 at x=1 and p^2 at x=L).

A single backward sweep from x = L is stable for the Perron vector over the
whole chain: going leftward the desired branch decays slowest (right of the
density peak it is the only growing one), so contamination by the other
branch shrinks. A forward sweep would be ill-conditioned left of the peak,
where the contaminant branch grows several e-folds per site. The eigenvalue
is refined by bisection on the residual of the x = 1 row, which flips sign
at each eigenvalue. Prints frozen reference values for the tests.
"""

import argparse

from mpmath import mp, mpf, exp, log


def backward_sweep(p, gamma, L, lam):
    b = 2 * p * (1 - p)
    a = (1 - p) ** 2
    c = p * p
    rho = [mpf(0)] * (L + 2)  # 1-based sites, rho[L+1] unused guard
    rho[L] = mpf(1)
    rho[L - 1] = (lam * exp(gamma * L) - (b + c)) * rho[L] / c
    for x in range(L - 1, 1, -1):
        rho[x - 1] = ((lam * exp(gamma * x) - b) * rho[x] - a * rho[x + 1]) / c
    return rho


def row1_residual(p, gamma, L, lam):
    b = 2 * p * (1 - p)
    a = (1 - p) ** 2
    rho = backward_sweep(p, gamma, L, lam)
    # proportional to the characteristic polynomial: sign flips exactly at
    # eigenvalues (normalizing by rho[1] would add spurious pole crossings)
    return (lam * exp(gamma) - (b + a)) * rho[1] - a * rho[2]


def leading_pair(p, gamma, L, lam_lo, lam_hi):
    r_lo = row1_residual(p, gamma, L, lam_lo)
    r_hi = row1_residual(p, gamma, L, lam_hi)
    assert r_lo * r_hi < 0, "bracket does not straddle an eigenvalue"
    for _ in range(mp.dps * 4):
        mid = (lam_lo + lam_hi) / 2
        r_mid = row1_residual(p, gamma, L, mid)
        if r_mid == 0:
            lam_lo = lam_hi = mid
            break
        if r_mid * r_lo < 0:
            lam_hi, r_hi = mid, r_mid
        else:
            lam_lo, r_lo = mid, r_mid
        if lam_hi - lam_lo < mpf(10) ** (-mp.dps + 8):
            break
    lam = (lam_lo + lam_hi) / 2
    rho = backward_sweep(p, gamma, L, lam)
    total = sum(rho[1:L + 1])
    return lam, [x / total for x in rho]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", type=float, default=0.8)
    ap.add_argument("--L", type=int, default=500)
    ap.add_argument("--gamma", type=float, default=0.006)
    ap.add_argument("--digits", type=int, default=60)
    ap.add_argument("--bracket", type=float, nargs=2, default=(0.60, 0.63))
    args = ap.parse_args()

    mp.dps = args.digits
    p = mpf(repr(args.p))
    gamma = mpf(repr(args.gamma))
    L = args.L

    lam, rho = leading_pair(p, gamma, L, mpf(repr(args.bracket[0])),
                            mpf(repr(args.bracket[1])))
    argmax = max(range(1, L + 1), key=lambda x: rho[x])
    print(f"p={args.p} L={L} gamma={args.gamma}")
    print(f"lambda_1 = {mp.nstr(lam, 20)}")
    print(f"argmax site = {argmax}")
    print(f"peak identity -ln(lambda)/gamma = {mp.nstr(-log(lam) / gamma, 12)}")
    for x in sorted(set([1, 40, argmax - 1, argmax, argmax + 1, argmax + 40,
                         min(L, argmax + 160), L])):
        print(f"rho[{x}] = {mp.nstr(rho[x], 15)}")


if __name__ == "__main__":
    main()
