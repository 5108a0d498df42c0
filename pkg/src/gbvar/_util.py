"""Shared plumbing: thread pool sizing, derived seeds, counters, CSV floats."""

import os
import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def thread_count() -> int:
    """Worker cap: GBVAR_THREADS if set, else min(8, cpu count)."""
    env = os.environ.get("GBVAR_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, min(8, os.cpu_count() or 1))


def parallel_map(fn, items):
    """Map fn over items on a thread pool; result order follows items.

    Results are independent of scheduling because every work item derives
    its own RNG stream; with one worker this degrades to a plain loop.
    """
    workers = thread_count()
    if workers == 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def substream(seed, index: int) -> np.random.Generator:
    """Independent Philox stream for (seed..., index).

    Counter-based, so identical on every platform and under any thread
    schedule; index-keyed spawning keeps replicate streams disjoint.
    seed may be an int or a tuple of ints (a pre-split key).
    """
    key = [int(s) for s in seed] if isinstance(seed, (tuple, list)) else [int(seed)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key + [int(index)])))


def root_stream(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed])))


def fmt_float(x: float) -> str:
    """17 significant digits: exact round-trip for IEEE doubles."""
    return f"{x:.17g}"


class EvalCounter:
    """Thread-safe counter of estimator evaluations (fits + replicates)."""

    def __init__(self):
        self._lock = threading.Lock()
        self._count = 0

    def add(self, k: int = 1) -> None:
        with self._lock:
            self._count += k

    def reset(self) -> None:
        with self._lock:
            self._count = 0

    @property
    def value(self) -> int:
        with self._lock:
            return self._count


ESTIMATOR_EVALS = EvalCounter()
