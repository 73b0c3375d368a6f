"""Root-finding oracle for the per-point bandwidth calibration.

Solves sum_j exp(-max(d_j - rho, 0) / sigma) = log2(k) with Brent's method.
"""
import math
from scipy.optimize import brentq


def sigma(distances, local_connectivity=1):
    rho = distances[local_connectivity - 1]
    target = math.log2(len(distances))
    f = lambda s: sum(math.exp(-max(d - rho, 0.0) / s) for d in distances) - target
    return rho, brentq(f, 1e-9, 1e6, xtol=1e-15, rtol=1e-15)


if __name__ == "__main__":
    print("%.12f %.12f" % sigma([1.0, 2.0, 3.0, 4.0]))
    print("%.12f %.12f" % sigma([0.5, 0.7, 0.9, 1.4, 2.0, 2.2, 3.1, 3.3]))
