import math

import numpy as np

from summakit.summation import kahan_sum, running_mean, suffix_sums


def test_kahan_matches_fsum_on_ill_conditioned_input():
    rng = np.random.default_rng(2)
    values = (rng.random(10_000) - 0.3) * 10.0 ** rng.integers(-8, 8, size=10_000)
    assert math.isclose(kahan_sum(values), math.fsum(values), rel_tol=1e-12)


def test_running_mean_tracks_fsum():
    rng = np.random.default_rng(4)
    values = rng.random(5000)
    means = running_mean(values)
    for k in (0, 1, 999, 4999):
        assert math.isclose(means[k], math.fsum(values[: k + 1]) / (k + 1), rel_tol=1e-14)


def test_suffix_sums_right_to_left():
    values = np.array([1.0, 2.0, 3.0])
    np.testing.assert_allclose(suffix_sums(values), [6.0, 5.0, 3.0], rtol=0, atol=0)


def test_suffix_sums_accuracy():
    rng = np.random.default_rng(6)
    values = rng.random(3000) * 1e-6
    got = suffix_sums(values)
    for k in (0, 1500, 2999):
        assert math.isclose(got[k], math.fsum(values[k:]), rel_tol=1e-13)
