"""Deterministic parallel map over an immutable shared object.

Workers receive the shared object once (via pool initializer; inherited
cheaply under the fork start method) and results are placed back by task
index, so the output is identical for every worker count. Task functions
must be module-level (picklable by reference) and pure readers of the
shared object.
"""

from __future__ import annotations

import multiprocessing as mp
from concurrent.futures import ProcessPoolExecutor

_SHARED = None


def _init_worker(shared) -> None:
    global _SHARED
    _SHARED = shared


def _run_task(args):
    idx, fn, task = args
    return idx, fn(_SHARED, task)


def map_indexed(fn, tasks: list, shared, jobs: int) -> list:
    """[fn(shared, t) for t in tasks], fanned out over `jobs` processes."""
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(shared, t) for t in tasks]
    if "fork" in mp.get_all_start_methods():
        ctx = mp.get_context("fork")
    else:
        ctx = mp.get_context()
    results = [None] * len(tasks)
    chunksize = max(1, len(tasks) // (jobs * 4))
    with ProcessPoolExecutor(
        max_workers=jobs,
        mp_context=ctx,
        initializer=_init_worker,
        initargs=(shared,),
    ) as pool:
        indexed = [(i, fn, t) for i, t in enumerate(tasks)]
        for idx, value in pool.map(_run_task, indexed, chunksize=chunksize):
            results[idx] = value
    return results
