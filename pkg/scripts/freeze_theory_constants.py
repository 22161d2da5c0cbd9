#!/usr/bin/env python3
"""One-off evaluation of the bound formulas with plain scalar arithmetic.

Deliberately does NOT import the package: the printed values are frozen into
tests/test_theory.py as regression constants, so this script must stay an
independent transcription of the formulas.
"""

import math

C_SIMPLE = 32.0 / (0.01 * 0.01)
C_CLUSTER = 32.0 * 16.0 / (0.01 * 0.01)


def alpha0_simple(n, r, f, q, eta, zeta):
    rz = r * zeta
    peak = max(f, q * f, q * q * f)
    return C_SIMPLE * eta * eta * (r * r * 11.0 * math.log(n)) / (rz * rz) * peak * peak


def beta_frac_simple(r, f, q, zeta):
    rz = r * zeta
    first = rz * rz / (4.1 * (q * f) ** 2)
    second = rz / (q * q * f)
    return ((1.0 - rz) / 2.0) ** 2 * min(first, second)


def alpha0_cluster(n, r, f, q, eta, zeta, g_plus, vartheta):
    rz = r * zeta
    peak = max(
        g_plus,
        q * g_plus,
        q * q * f,
        q * rz * f,
        rz * rz * f,
        q * math.sqrt(f * g_plus),
        rz * math.sqrt(f * g_plus),
    )
    logs = 11.0 * math.log(n) + math.log(vartheta)
    return C_CLUSTER * eta * eta * (r * r * logs) / (rz * rz) * peak * peak


def beta_frac_cluster(r, r_k, f, q, zeta, g_plus, chi_plus):
    rz = r * zeta
    rkz = r_k * zeta
    first = rkz * rkz / (4.1 * (q * g_plus) ** 2)
    second = rkz / (q * q * f)
    return ((1.0 - rz - chi_plus) / 2.0) ** 2 * min(first, second)


if __name__ == "__main__":
    print("alpha0_simple(n=500, r=5, f=1000, q=0.01, eta=3, zeta=0.002)")
    print("  =", repr(alpha0_simple(500, 5, 1000.0, 0.01, 3.0, 0.002)))

    print("beta_frac_simple(r=5, f=1000, q=0.001, zeta=0.002)   # q*f = 1")
    print("  =", repr(beta_frac_simple(5, 1000.0, 0.001, 0.002)))

    print("alpha0_cluster(n=500, r=5, f=1000, q=0.01, eta=3, zeta=4e-7, g+=1, vt=2)")
    print("  =", repr(alpha0_cluster(500, 5, 1000.0, 0.01, 3.0, 4e-7, 1.0, 2)))

    print("beta_frac_cluster(r=5, r_k=2, f=1000, q=0.01, zeta=4e-7, g+=1, chi+=0.001)")
    print("  =", repr(beta_frac_cluster(5, 2, 1000.0, 0.01, 4e-7, 1.0, 0.001)))

    print()
    print("worked beta comparison: chi+=0.2, vartheta=2, r_k=r/2, g+=3 vs f=100,")
    print("r=2, zeta=0.005 (r*zeta=0.01), q=0.01 (q*f=1):")
    simple = beta_frac_simple(2, 100.0, 0.01, 0.005)
    cluster = beta_frac_cluster(2, 1, 100.0, 0.01, 0.005, 3.0, 0.2)
    print("  simple  =", repr(simple))
    print("  cluster =", repr(cluster))
    print("  cluster > simple:", cluster > simple)
