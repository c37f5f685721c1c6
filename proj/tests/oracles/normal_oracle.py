#!/usr/bin/env python3
"""High-precision standard normal oracle by direct numerical quadrature.

Phi(z) is integrated from the density with mpmath.quad at 50 digits; it does
not call erf/erfc so it stays independent of the C++ series.
"""
import mpmath as mp

mp.mp.dps = 50


def density(t):
    return mp.exp(-t * t / 2) / mp.sqrt(2 * mp.pi)


def phi(z):
    z = mp.mpf(z)
    if z <= 0:
        return upper_tail(-z)
    return 1 - upper_tail(z)


def upper_tail(z):
    # Integrate in u = t - z with exp(-z^2/2) factored out. Far in the tail
    # the integrand decays on a 1/z scale, so the breakpoints follow it.
    z = mp.mpf(z)
    scale = 1 / max(z, mp.mpf(1))
    points = [0, scale / 4, scale, 4 * scale, 16 * scale, 64 * scale, mp.inf]
    inner = mp.quad(lambda u: mp.exp(-z * u - u * u / 2), points)
    return mp.exp(-z * z / 2) / mp.sqrt(2 * mp.pi) * inner


def two_prop(n1, x1, n2, x2):
    p1, p2 = mp.mpf(x1) / n1, mp.mpf(x2) / n2
    pooled = mp.mpf(x1 + x2) / (n1 + n2)
    z = (p2 - p1) / mp.sqrt(pooled * (1 - pooled) * (mp.mpf(1) / n1 + mp.mpf(1) / n2))
    return z, 2 * upper_tail(abs(z))


if __name__ == "__main__":
    for i in range(-12, 13):
        z = i / 2
        print(f"{{{z:.1f}, {mp.nstr(phi(z), 20)}}},")
    for args in [(100, 40, 100, 60), (1500, 1079, 1500, 1274)]:
        z, p = two_prop(*args)
        print(args, mp.nstr(z, 20), mp.nstr(p, 20))
    for z in [8.5, 10.0, 20.0]:
        print("tail", z, mp.nstr(2 * upper_tail(z), 20))
