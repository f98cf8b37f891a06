"""Interquartile statistics and Tukey inner fences.

Quantiles use linear interpolation at rank ``(n - 1) * p`` over the sorted
sample (numpy's default ``"linear"`` method).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptySampleError

FENCE_FACTOR = 1.5


@dataclass(frozen=True)
class FenceResult:
    q1: float
    median: float
    q3: float
    iqr: float
    low_fence: float
    high_fence: float


def _sample(values):
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        raise EmptySampleError("cannot compute quartiles of an empty sample")
    return arr


def quartiles(values) -> tuple[float, float, float]:
    arr = _sample(values)
    q1, med, q3 = np.percentile(arr, [25, 50, 75], method="linear")
    return float(q1), float(med), float(q3)


def fences(values) -> FenceResult:
    q1, med, q3 = quartiles(values)
    iqr = q3 - q1
    return FenceResult(q1, med, q3, iqr, q1 - FENCE_FACTOR * iqr, q3 + FENCE_FACTOR * iqr)


def get_high_threshold(values) -> float:
    return fences(values).high_fence


def get_low_threshold(values) -> float:
    return fences(values).low_fence
