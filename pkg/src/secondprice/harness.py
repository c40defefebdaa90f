"""Monte Carlo trial runner.

Trial i of a batch runs with seed ``base_seed + i``, so any single trial
can be replayed in isolation.  With ``workers > 1`` the index range is
split into contiguous chunks executed in a process pool; chunk summaries
are merged in chunk order, keeping results independent of scheduling.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

from .graphs import graph_from_instance
from .model import Instance
from .online import Ranking, greedy_2pm, ranking, ranking_simulate, trivial_first
from .rng import CoinStream, Rng
from .stats import TrialStats, Welford

SIMULATE_ALGORITHMS = ("greedy", "ranking", "ranking-sim", "trivial")


@dataclass
class SimulationTask:
    """Picklable per-trial runner for the simulate subcommand: returns the
    value earned on the stored instance for one trial seed.

    ``ranking`` counts matched keywords (first-price semantics); the other
    algorithms report replayed ledger totals.  ``ranking-sim`` derives its
    coin stream from the trial seed after drawing the permutation.
    """

    inst: Instance
    algorithm: str
    random_tie_break: bool = False

    def __post_init__(self):
        if self.algorithm not in SIMULATE_ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")

    def __call__(self, trial_seed: int) -> float:
        inst = self.inst
        if self.algorithm == "greedy":
            tie = Rng(trial_seed) if self.random_tie_break else None
            return float(greedy_2pm(inst, tie_break=tie)[1].total)
        if self.algorithm == "trivial":
            return float(trivial_first(inst)[1].total)
        rng = Rng(trial_seed)
        sigma = Ranking.random([v for v, _ in inst.bidders], rng)
        if self.algorithm == "ranking":
            return float(ranking(graph_from_instance(inst), None, sigma).size)
        coins = CoinStream(rng.next_u64())
        return float(ranking_simulate(inst, sigma, coins)[1].total)


class TrialError(RuntimeError):
    """Failure inside one trial; carries the trial index for replay."""

    def __init__(self, index: int, cause: Exception):
        super().__init__(f"trial {index} failed: {cause}")
        self.index = index


def _chunk_stats(args: tuple[Callable[[int], float], int, int, int]) -> Welford:
    trial, seed, lo, hi = args
    acc = Welford()
    for i in range(lo, hi):
        try:
            acc.push(trial(seed + i))
        except Exception as exc:
            raise TrialError(i, exc) from exc
    return acc


def run_trials(
    trial: Callable[[int], float],
    trials: int,
    seed: int,
    workers: int = 1,
) -> TrialStats:
    """Aggregate ``trial(seed + i)`` for i in range(trials)."""
    if trials < 1:
        raise ValueError("need at least one trial")
    if workers <= 1:
        return _chunk_stats((trial, seed, 0, trials)).stats()
    chunk = -(-trials // workers)
    bounds = [
        (trial, seed, lo, min(lo + chunk, trials))
        for lo in range(0, trials, chunk)
    ]
    acc = Welford()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_chunk_stats, bounds):
            acc.merge(part)
    return acc.stats()
