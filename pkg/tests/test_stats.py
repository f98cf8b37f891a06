import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from archsmells.errors import EmptySampleError
from archsmells.stats import fences, get_high_threshold, get_low_threshold, quartiles

from oracles import high_fence, low_fence, quantile

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
samples = st.lists(finite, min_size=1, max_size=60)


def test_single_sample():
    assert quartiles([5]) == (5, 5, 5)


def test_hand_evaluated_quartiles():
    assert quartiles([1, 2, 3, 4, 100]) == (2, 3, 4)
    assert quartiles([100, 4, 1, 3, 2]) == (2, 3, 4)


def test_hand_evaluated_fences():
    assert get_high_threshold([1, 2, 3, 4, 100]) == 7
    assert get_low_threshold([1, 2, 3, 4, 100]) == -1
    f = fences([1, 2, 3, 4, 100])
    assert (f.iqr, f.low_fence, f.high_fence) == (2, -1, 7)


def test_constant_data():
    assert quartiles([7, 7, 7, 7]) == (7, 7, 7)
    assert get_high_threshold([3.5] * 9) == get_low_threshold([3.5] * 9) == 3.5


def test_interpolation_between_ranks():
    # n=4: q1 at rank 0.75, q3 at rank 2.25
    assert quartiles([0, 10, 20, 30]) == pytest.approx((7.5, 15, 22.5))


def test_empty_raises():
    for fn in (quartiles, get_high_threshold, get_low_threshold):
        with pytest.raises(EmptySampleError):
            fn([])


def test_generators_accepted():
    assert get_high_threshold(x for x in [1, 2, 3, 4, 100]) == 7


@pytest.mark.parametrize("seed", range(50))
def test_matches_hand_rolled_quantiles(seed):
    rng = random.Random(seed)
    xs = [rng.choice([rng.randint(0, 5), rng.random() * 100]) for _ in range(rng.randint(1, 30))]
    q1, med, q3 = quartiles(xs)
    assert q1 == pytest.approx(quantile(xs, 0.25))
    assert med == pytest.approx(quantile(xs, 0.5))
    assert q3 == pytest.approx(quantile(xs, 0.75))
    assert get_high_threshold(xs) == pytest.approx(high_fence(xs))
    assert get_low_threshold(xs) == pytest.approx(low_fence(xs))


def _close(a, b, scale):
    return math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-6 * max(1.0, scale))


@settings(max_examples=1000, deadline=None)
@given(samples, finite)
def test_translation_equivariance(xs, k):
    scale = max(abs(x) for x in xs) + abs(k)
    shifted = [x + k for x in xs]
    assert _close(get_high_threshold(shifted), get_high_threshold(xs) + k, scale)
    assert _close(get_low_threshold(shifted), get_low_threshold(xs) + k, scale)


@settings(max_examples=1000, deadline=None)
@given(samples, st.floats(min_value=1e-3, max_value=1e3))
def test_scale_equivariance(xs, a):
    scale = (max(abs(x) for x in xs) + 1) * a
    scaled = [x * a for x in xs]
    assert _close(get_high_threshold(scaled), get_high_threshold(xs) * a, scale)
    assert _close(get_low_threshold(scaled), get_low_threshold(xs) * a, scale)


@settings(max_examples=200, deadline=None)
@given(samples, st.randoms(use_true_random=False))
def test_permutation_invariance_and_ordering(xs, rnd):
    ys = list(xs)
    rnd.shuffle(ys)
    assert quartiles(ys) == quartiles(xs)
    q1, med, q3 = quartiles(xs)
    assert min(xs) <= q1 <= med <= q3 <= max(xs)
    assert get_low_threshold(xs) <= q1 and get_high_threshold(xs) >= q3
