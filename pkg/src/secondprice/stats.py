"""Streaming statistics for Monte Carlo trials (Welford accumulation with
order-independent merge)."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class TrialStats:
    """Summary of a batch of independent trial values.

    ``variance`` is the sample variance (n-1 denominator, 0 for a single
    trial) and ``std_error = sqrt(variance / trials)``.
    """

    trials: int
    mean: float
    variance: float
    std_error: float
    minimum: float
    maximum: float

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "mean": self.mean,
            "variance": self.variance,
            "std_error": self.std_error,
            "min": self.minimum,
            "max": self.maximum,
        }


class Welford:
    """Single-pass mean/variance accumulator supporting pairwise merge."""

    __slots__ = ("count", "mean", "m2", "minimum", "maximum")

    def __init__(self):
        self.count = 0
        self.mean = 0.0
        self.m2 = 0.0
        self.minimum = math.inf
        self.maximum = -math.inf

    def push(self, value: float) -> None:
        self.count += 1
        delta = value - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (value - self.mean)
        if value < self.minimum:
            self.minimum = value
        if value > self.maximum:
            self.maximum = value

    def merge(self, other: "Welford") -> None:
        if other.count == 0:
            return
        if self.count == 0:
            self.count = other.count
            self.mean = other.mean
            self.m2 = other.m2
            self.minimum = other.minimum
            self.maximum = other.maximum
            return
        total = self.count + other.count
        delta = other.mean - self.mean
        self.mean += delta * other.count / total
        self.m2 += other.m2 + delta * delta * self.count * other.count / total
        self.count = total
        self.minimum = min(self.minimum, other.minimum)
        self.maximum = max(self.maximum, other.maximum)

    def stats(self) -> TrialStats:
        if self.count < 1:
            raise ValueError("no trials accumulated")
        variance = self.m2 / (self.count - 1) if self.count > 1 else 0.0
        return TrialStats(
            trials=self.count,
            mean=self.mean,
            variance=variance,
            std_error=math.sqrt(variance / self.count),
            minimum=self.minimum,
            maximum=self.maximum,
        )
