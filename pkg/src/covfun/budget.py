"""Search budgets shared by the randomized searches."""

import os
import time
from dataclasses import dataclass


@dataclass
class SearchBudget:
    """Wall-clock, iteration and restart limits plus the seed of a search."""

    max_time: float = 60.0
    max_iterations: int = 2000
    seed: int = 0
    starts: int = 16

    def __post_init__(self):
        if self.max_time <= 0 or self.max_iterations <= 0 or self.starts <= 0:
            raise ValueError("budget limits must be positive")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def deadline(self):
        return time.monotonic() + self.max_time


def thread_count():
    """Worker cap from ``COVFUN_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("COVFUN_THREADS", "1")))
    except ValueError:
        return 1
