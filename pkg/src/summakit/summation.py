"""Compensated (Kahan) accumulation helpers for long sums.

Plain float accumulation loses ~n*eps of accuracy over n terms; the
transforms in this package promise 1e-10-grade agreement over up to 1e6
terms, so every long running sum goes through one of these.
"""

import numpy as np


def kahan_sum(values):
    """Sum of an iterable of floats with Kahan compensation."""
    s = 0.0
    c = 0.0
    for v in values:
        y = v - c
        t = s + y
        c = (t - s) - y
        s = t
    return s


def running_mean(values):
    """Cumulative means of a vector, with a compensated running sum.

    Entry k is the mean of values[0..k].
    """
    values = np.asarray(values, dtype=float)
    out = np.empty(len(values))
    s = 0.0
    c = 0.0
    for k in range(len(values)):
        y = values[k] - c
        t = s + y
        c = (t - s) - y
        s = t
        out[k] = s / (k + 1)
    return out


def suffix_sums(values):
    """Right-to-left cumulative sums: entry k is the compensated sum of values[k:]."""
    values = np.asarray(values, dtype=float)
    out = np.empty(len(values))
    s = 0.0
    c = 0.0
    for k in range(len(values) - 1, -1, -1):
        y = values[k] - c
        t = s + y
        c = (t - s) - y
        s = t
        out[k] = s
    return out
