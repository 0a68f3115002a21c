"""Arbitrary-precision reference values for the corner grading substitution.

Prints C++ initializers consumed by tests/oracle_values.hpp.
"""
import mpmath as mp

mp.mp.dps = 50


def v(s, p):
    return (1 / p - mp.mpf(1) / 2) * ((mp.pi - s) / mp.pi) ** 3 + (1 / p) * (s - mp.pi) / mp.pi + mp.mpf(1) / 2


def vt(s, p):
    a = v(s, p) ** p
    b = v(2 * mp.pi - s, p) ** p
    return 2 * mp.pi * a / (a + b)


def w(s, n, p):
    l = mp.floor(s * n / (2 * mp.pi))  # zero-based panel
    return (vt(n * s - 2 * l * mp.pi, p) + 2 * l * mp.pi) / n


for s, n, p in [(mp.pi / 2, 1, 2), (mp.mpf(1), 1, 3), (mp.mpf("0.3"), 4, 2), (mp.mpf("4.0"), 3, 5)]:
    val = w(s, n, mp.mpf(p))
    der = mp.diff(lambda x: w(x, n, mp.mpf(p)), s)
    print("  {%s, %d, %d, %s, %s}," % (mp.nstr(s, 20), n, p, mp.nstr(val, 20), mp.nstr(der, 20)))
