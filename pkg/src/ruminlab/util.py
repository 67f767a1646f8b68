"""Small shared helpers: deterministic formatting, clustering, worker pools."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def fmt_float(x: float) -> str:
    """Fixed 17-significant-digit formatting for byte-stable reports."""
    return format(float(x), ".17g")


def round_sig(x: float, digits: int = 12) -> float:
    if x == 0:
        return 0.0
    mag = math.floor(math.log10(abs(x)))
    return round(x, digits - 1 - mag)


def cluster_values(values: Sequence[float], tol: float) -> List[tuple]:
    """Group sorted scalars into (representative, count) clusters with gap > tol."""
    out: List[tuple] = []
    for v in sorted(values):
        if out and abs(v - out[-1][0]) <= tol:
            rep, cnt, total = out[-1]
            out[-1] = (rep, cnt + 1, total + v)
        else:
            out.append((v, 1, v))
    return [(total / cnt, cnt) for rep, cnt, total in out]


def worker_count(n_items: int) -> int:
    raw = os.environ.get("RUMIN_THREADS", "1")
    try:
        cap = max(1, int(raw))
    except ValueError:
        cap = 1
    return max(1, min(cap, n_items))


def parallel_map(fn: Callable[[T], R], items: Sequence[T]) -> List[R]:
    """Map preserving order; uses threads only when RUMIN_THREADS > 1."""
    items = list(items)
    workers = worker_count(len(items))
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
