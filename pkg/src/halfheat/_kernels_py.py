"""Pure numpy implementation of the truncated-series kernels.

Used when the compiled extension is unavailable; results agree with the
compiled path to rounding.
"""

import numpy as np


def mul(a, b, p, q, r, size):
    return np.bincount(r, weights=a[p] * b[q], minlength=size)


def horner(delta, taylor, p, q, r, size):
    acc = np.zeros(size)
    acc[0] = taylor[-1]
    dq = delta[q]
    for coef in taylor[-2::-1]:
        acc = np.bincount(r, weights=acc[p] * dq, minlength=size)
        acc[0] += coef
    return acc
