import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
import pandas as pd

from exchange_kinetics.distribution.pmf import WealthPMF, align
from exchange_kinetics.monte_carlo.monte_carlo import RunConfig, RunResult, run
from exchange_kinetics.util import worker_count

logger = logging.getLogger(__name__)


@dataclass
class EnsembleResult:
    trajectory: pd.DataFrame
    final_pmf: WealthPMF
    snapshots: dict[int, WealthPMF]
    seeds: list[int]
    replicas: list[RunResult]


def average_pmfs(pmfs: Sequence[WealthPMF]) -> WealthPMF:
    offset, arrays = align(*pmfs)
    return WealthPMF.from_weights(offset, np.mean(arrays, axis=0))


def run_ensemble(
    config: RunConfig,
    replicas: int,
    seeds: Sequence[int] | None = None,
    workers: int | None = None,
) -> EnsembleResult:
    """
    Independent replicas of `config`, averaged pointwise.
    replicas: int
        Number of replicas; replica r uses seed config.seed + r.
    seeds: sequence of int or None
        Explicit per-replica seeds overriding the default.
    workers: int or None
        Thread count, capped by EXCHANGE_KINETICS_THREADS. The compiled event loop
        releases the GIL, so replicas run concurrently; each owns its state and generator.
    """
    if replicas < 1:
        raise ValueError("replicas must be at least 1")
    if seeds is None:
        seeds = [(config.seed + r) % 2**64 for r in range(replicas)]
    elif len(seeds) != replicas:
        raise ValueError("one seed per replica is required")
    configs = [replace(config, seed=int(s)) for s in seeds]

    n_workers = min(worker_count(workers), replicas)
    logger.debug("running %d replicas on %d threads", replicas, n_workers)
    if n_workers == 1:
        results = [run(c) for c in configs]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(run, configs))

    # aggregation follows replica order, independent of completion order
    frames = [r.trajectory for r in results]
    trajectory = pd.concat(frames).groupby(level=0).mean()
    trajectory["event"] = frames[0]["event"].to_numpy()

    snapshots = {
        event: average_pmfs([r.snapshots[event] for r in results]) for event in results[0].snapshots
    }
    final_pmf = average_pmfs([WealthPMF.from_samples(r.ensemble.wealth) for r in results])
    return EnsembleResult(
        trajectory=trajectory,
        final_pmf=final_pmf,
        snapshots=snapshots,
        seeds=list(seeds),
        replicas=results,
    )
