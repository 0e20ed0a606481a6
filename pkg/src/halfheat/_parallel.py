"""Thread-pool map used by the drivers; the worker count honours HALFHEAT_THREADS."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count(requested=None):
    env = os.environ.get("HALFHEAT_THREADS")
    cap = int(env) if env and env.isdigit() and int(env) > 0 else (os.cpu_count() or 1)
    if requested is None:
        return cap
    return max(1, min(int(requested), cap))


def pmap(fn, items, threads=None):
    """Ordered map; runs inline when a single worker is requested."""
    items = list(items)
    n = thread_count(threads)
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))
