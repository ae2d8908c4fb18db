"""Regenerate the Lanczos coefficients stored in ``dptell.hypergeom``.

The coefficients p_k of

    Gamma(z + 1) = sqrt(2 pi) t**(z + 1/2) exp(-t) (p_0 + sum_k p_k / (z + k)),
    t = z + g + 1/2,

are fitted by least squares (60-digit mpmath arithmetic) to exact values of
Gamma at the half-integers z = 0, 1/2, ..., n - 1/2.

Usage::

    python scripts/lanczos_coefficients.py
"""
import mpmath as mp

G = 7
N = 9


def fit(g=G, n=N):
    mp.mp.dps = 60
    g = mp.mpf(g)
    half = mp.mpf(1) / 2
    rows, rhs = [], []
    for i in range(2 * n):
        z = mp.mpf(i) / 2
        t = z + g + half
        rhs.append(mp.gamma(z + 1) / (mp.sqrt(2 * mp.pi) * t ** (z + half) * mp.exp(-t)))
        rows.append([1] + [1 / (z + k) for k in range(1, n)])
    coeffs, _ = mp.qr_solve(mp.matrix(rows), mp.matrix(rhs))
    return [float(c) for c in coeffs]


if __name__ == "__main__":
    print(f"LANCZOS_G = {G}")
    print("LANCZOS_COEFFS = (")
    for c in fit():
        print(f"    {c!r},")
    print(")")
