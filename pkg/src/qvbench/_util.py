"""Deterministic worker-pool map: results come back in input order, so
parallel runs produce the same reports as serial ones."""
from __future__ import annotations

import multiprocessing


def pmap(fn, items, jobs: int = 1) -> list:
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with multiprocessing.Pool(processes=jobs) as pool:
        return pool.map(fn, items)
