"""Regenerates tw1_table.csv: the Tracy-Widom (beta = 1) CDF on [-10, 8].

F1(s) = det(I - K_s) on L2(0, inf) with K_s(x, y) = Ai(s + (x + y) / 2) / 2,
discretized by Gauss-Legendre quadrature on a truncated interval.  Double
precision is used for s >= -6; the far left tail (F1 < 1e-6) is evaluated with
mpmath at 40 digits because the determinant there is a near-cancellation.

usage: python3 gen_tw1_table.py > tw1_table.csv
"""
import sys

import mpmath as mp
import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import airy


def f1_double(s, m=160):
    span = max(2.0 * (14.0 - s), 8.0)
    x, w = leggauss(m)
    x = (x + 1.0) * span / 2.0
    w = w * span / 2.0
    kernel = 0.5 * airy(s + (x[:, None] + x[None, :]) / 2.0)[0]
    sw = np.sqrt(w)
    return float(np.linalg.det(np.eye(m) - sw[:, None] * kernel * sw[None, :]))


def gauss_legendre_mp(m):
    xs, ws = [], []
    for i in range(1, m + 1):
        x = mp.cos(mp.pi * (i - mp.mpf(1) / 4) / (m + mp.mpf(1) / 2))
        for _ in range(100):
            p0, p1 = mp.mpf(1), x
            for k in range(2, m + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = m * (x * p1 - p0) / (x * x - 1)
            dx = p1 / dp
            x -= dx
            if abs(dx) < mp.mpf(10) ** (-(mp.mp.dps - 5)):
                break
        xs.append(x)
        ws.append(2 / ((1 - x * x) * dp * dp))
    return xs, ws


def f1_mp(s, nodes):
    xs, ws = nodes
    s = mp.mpf(s)
    span = max(2 * (14 - s), 8)
    x = [(xi + 1) * span / 2 for xi in xs]
    sw = [mp.sqrt(wi * span / 2) for wi in ws]
    m = len(x)
    a = mp.matrix(m, m)
    for i in range(m):
        for j in range(i, m):
            v = mp.airyai(s + (x[i] + x[j]) / 2) / 2 * sw[i] * sw[j]
            a[i, j] = (1 if i == j else 0) - v
            a[j, i] = a[i, j]
    return float(mp.det(a))


def grid():
    pts = [(-10.0 + 0.02 * k, "mp") for k in range(200)]  # [-10, -6)
    pts += [(-6.0 + 0.01 * k, "f64") for k in range(200)]  # [-6, -4)
    pts += [(-4.0 + 0.005 * k, "f64") for k in range(1201)]  # [-4, 2]
    pts += [(2.0 + 0.01 * k, "f64") for k in range(1, 601)]  # (2, 8]
    return [(round(s, 6), how) for s, how in pts]


def main():
    mp.mp.dps = 40
    nodes = gauss_legendre_mp(100)
    out = sys.stdout
    out.write("s,f1\n")
    for s, how in grid():
        v = f1_mp(s, nodes) if how == "mp" else f1_double(s)
        out.write("%r,%.17g\n" % (s, v))
        out.flush()


if __name__ == "__main__":
    main()
