"""Optional thread fan-out with deterministic, input-ordered merging.

SPECTRALJET_THREADS caps the worker count; the default of 1 runs everything
sequentially.  Results are always collected in input order, so output files
do not depend on scheduling.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_cap() -> int:
    raw = os.environ.get("SPECTRALJET_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def ordered_map(fn, items):
    items = list(items)
    cap = thread_cap()
    if cap <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=cap) as pool:
        return list(pool.map(fn, items))
