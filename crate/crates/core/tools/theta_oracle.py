#!/usr/bin/env python3
"""Generate the truncated-Taylor backward-error thresholds theta_m.

theta_m is the largest theta with htilde_{m+1}(theta) / theta <= tol, where
htilde_{m+1} is the series of log(exp(-x) T_m(x)) with every coefficient
replaced by its absolute value.  Coefficients are evaluated with mpmath at
high precision and the root is bracketed by bisection.

Usage: theta_oracle.py [--tol-log2 53] [--rust OUT.rs]
"""
import argparse

import mpmath as mp

M_MAX = 55
EXTRA_TERMS = 150


def log_series(m, n_terms):
    # f(x) = exp(-x) T_m(x), coefficients by direct Cauchy product
    f = []
    for n in range(n_terms):
        acc = mp.mpf(0)
        for k in range(0, min(n, m) + 1):
            acc += (mp.mpf(-1) ** (n - k)) / (mp.factorial(k) * mp.factorial(n - k))
        f.append(acc)
    # g = log f via f g' = f'
    g = [mp.mpf(0)] * n_terms
    for n in range(1, n_terms):
        acc = n * f[n]
        for k in range(1, n):
            acc -= k * g[k] * f[n - k]
        g[n] = acc / n
    return g


def theta_for(m, tol):
    n_terms = m + 1 + EXTRA_TERMS
    g = log_series(m, n_terms)
    coeffs = [abs(c) for c in g]

    def ratio(theta):
        return mp.fsum(coeffs[n] * theta ** (n - 1) for n in range(m + 1, n_terms))

    lo, hi = mp.mpf(0), mp.mpf("1e-20")
    while ratio(hi) <= tol:
        lo, hi = hi, hi * 2
    for _ in range(400):
        mid = (lo + hi) / 2
        if ratio(mid) <= tol:
            lo = mid
        else:
            hi = mid
        if hi - lo <= hi * mp.mpf("1e-40"):
            break
    return lo


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--tol-log2", type=int, default=53)
    ap.add_argument("--rust")
    args = ap.parse_args()
    mp.mp.dps = 120
    tol = mp.mpf(2) ** (-args.tol_log2)
    thetas = [theta_for(m, tol) for m in range(1, M_MAX + 1)]
    lines = [mp.nstr(t, 20, min_fixed=-1, max_fixed=-1) for t in thetas]
    if args.rust:
        with open(args.rust, "w") as out:
            out.write("// @generated by tools/theta_oracle.py --tol-log2 %d; do not edit.\n\n" % args.tol_log2)
            out.write("/// `THETA_DOUBLE[m - 1]` is theta_m at tolerance 2^-%d.\n" % args.tol_log2)
            out.write("pub(crate) const THETA_DOUBLE: [f64; %d] = [\n" % M_MAX)
            for s in lines:
                out.write("    %s,\n" % s)
            out.write("];\n")
    else:
        for m, s in enumerate(lines, 1):
            print(m, s)


if __name__ == "__main__":
    main()
