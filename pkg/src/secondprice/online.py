"""Online solvers.

The online protocol reveals one keyword at a time together with its bid
vector; the algorithm must answer with an irrevocable decision before the
next keyword appears.  ``run_online`` drives any :class:`OnlineAlgorithm`
over a stored instance and replays the collected decisions through the
arbiter for the authoritative ledger.

Besides the protocol players (greedy matcher, first-keyword-only,
always-skip, coin-flipping rank simulator) this module implements the
rank-greedy online matching process in both of its equivalent forms: the
keyword-arrival form and the dual bidder-arrival form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Protocol, Sequence

from .graphs import BipartiteGraph, graph_from_instance
from .model import (
    FLAVOR_2PM,
    SKIP,
    Decision,
    Instance,
    Ledger,
    run_allocation,
)
from .offline import Matching
from .rng import Rng


@dataclass(frozen=True)
class Ranking:
    """Bidder priority order; ``order[0]`` is the highest-ranked bidder."""

    order: tuple[str, ...]
    rank: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(set(self.order)) != len(self.order):
            raise ValueError("ranking must be a permutation")
        object.__setattr__(
            self, "rank", {v: i for i, v in enumerate(self.order)}
        )

    @staticmethod
    def random(bidders: Sequence[str], rng: Rng) -> "Ranking":
        order = list(bidders)
        rng.shuffle(order)
        return Ranking(tuple(order))

    def induced(self, keep: Iterable[str]) -> "Ranking":
        kept = set(keep)
        return Ranking(tuple(v for v in self.order if v in kept))


class CoinSource(Protocol):
    def flip(self) -> int: ...


class OnlineAlgorithm:
    """Base protocol player.  ``begin`` receives the bidders known up
    front (may be empty against an adaptive opponent; new bidders then
    appear in bid vectors).  ``on_arrival`` must answer immediately."""

    def begin(self, bidders: Sequence[str]) -> None:
        pass

    def on_arrival(self, keyword: str, bids: Mapping[str, int]) -> Decision:
        raise NotImplementedError


def run_online(
    algorithm: OnlineAlgorithm,
    inst: Instance,
    initial_matched: Iterable[str] = (),
) -> tuple[list[Decision], Ledger]:
    """Feed the instance keyword by keyword and replay the decisions."""
    algorithm.begin([v for v, _ in inst.bidders])
    decisions = []
    for u in inst.keywords:
        bids = {v: inst.bids[(u, v)] for v in inst.bidders_for(u)}
        decisions.append(algorithm.on_arrival(u, bids))
    return decisions, run_allocation(inst, decisions, initial_matched)


class GreedyMatcher(OnlineAlgorithm):
    """Assigns a keyword iff at least two adjacent bidders are still
    unconsumed: the first available bidder wins with the next one as
    second-price bidder (price 1 on replay).  A tie-break rng picks the
    winner uniformly among available neighbors instead of lowest-first."""

    def __init__(self, tie_break: Optional[Rng] = None, matched: Iterable[str] = ()):
        self.tie_break = tie_break
        self.matched = set(matched)

    def on_arrival(self, keyword: str, bids: Mapping[str, int]) -> Decision:
        available = [v for v in bids if v not in self.matched]
        if len(available) < 2:
            return SKIP
        if self.tie_break is None:
            first = available[0]
        else:
            first = available[self.tie_break.below(len(available))]
        second = next(v for v in available if v != first)
        self.matched.add(first)
        return Decision(first, second)


class TrivialFirst(OnlineAlgorithm):
    """Allocates the first keyword to its first two listed bidders and
    refuses everything afterwards."""

    def __init__(self):
        self.done = False

    def on_arrival(self, keyword: str, bids: Mapping[str, int]) -> Decision:
        if self.done:
            return SKIP
        self.done = True
        vs = list(bids)
        if len(vs) < 2:
            return SKIP
        return Decision(vs[0], vs[1])


class AlwaysSkip(OnlineAlgorithm):
    def on_arrival(self, keyword: str, bids: Mapping[str, int]) -> Decision:
        return SKIP


@dataclass(frozen=True)
class SimulateState:
    """Final bookkeeping of the rank simulator: consumed (matched) and
    withheld (reserved) bidders never overlap, and each bidder enters at
    most one of the two sets over a run."""

    matched: frozenset[str]
    reserved: frozenset[str]
    sigma: Ranking
    coins_used: int


class RankingSimulator(OnlineAlgorithm):
    """Coin-flipping simulation of rank-greedy matching on a duplicated
    keyword sequence.

    On each keyword with candidates (neighbors outside both sets), the two
    top-ranked candidates are found; a fair coin decides which one is
    matched while the other is reserved (with a single candidate, the coin
    decides match-or-reserve).  Reserved bidders never win a keyword but
    stay unconsumed, so they still qualify as second-price bidders.  One
    coin is consumed per keyword with a nonempty candidate set, in arrival
    order, so a run is an exact function of (instance, sigma, coins).
    """

    def __init__(self, sigma: Ranking, coins: CoinSource):
        self.sigma = sigma
        self.coins = coins
        self.matched: set[str] = set()
        self.reserved: set[str] = set()
        self.coins_used = 0

    def begin(self, bidders: Sequence[str]) -> None:
        missing = [v for v in bidders if v not in self.sigma.rank]
        if missing:
            raise ValueError(f"ranking does not cover bidders: {missing}")

    def _second_for(self, bids: Mapping[str, int], winner: str) -> Optional[str]:
        rank = self.sigma.rank
        candidates = [v for v in bids if v != winner and v not in self.matched]
        if not candidates:
            return None
        return min(candidates, key=rank.__getitem__)

    def on_arrival(self, keyword: str, bids: Mapping[str, int]) -> Decision:
        rank = self.sigma.rank
        fresh = sorted(
            (v for v in bids if v not in self.matched and v not in self.reserved),
            key=rank.__getitem__,
        )
        if not fresh:
            return SKIP
        self.coins_used += 1
        heads = self.coins.flip()
        if len(fresh) == 1:
            v = fresh[0]
            if heads:
                self.matched.add(v)
                return Decision(v, self._second_for(bids, v))
            self.reserved.add(v)
            return SKIP
        v1, v2 = fresh[0], fresh[1]
        if heads:
            winner, bench = v1, v2
        else:
            winner, bench = v2, v1
        self.matched.add(winner)
        self.reserved.add(bench)
        return Decision(winner, self._second_for(bids, winner))

    def state(self) -> SimulateState:
        return SimulateState(
            frozenset(self.matched),
            frozenset(self.reserved),
            self.sigma,
            self.coins_used,
        )


def greedy_2pm(
    inst: Instance,
    tie_break: Optional[Rng] = None,
    initial_matched: Iterable[str] = (),
) -> tuple[list[Decision], Ledger]:
    if inst.flavor != FLAVOR_2PM:
        raise ValueError("greedy_2pm requires a 2pm instance")
    alg = GreedyMatcher(tie_break, initial_matched)
    return run_online(alg, inst, initial_matched)


def trivial_first(inst: Instance) -> tuple[list[Decision], Ledger]:
    if inst.flavor != FLAVOR_2PM:
        raise ValueError("trivial_first requires a 2pm instance")
    return run_online(TrivialFirst(), inst)


def ranking_simulate(
    inst: Instance, sigma: Ranking, coins: CoinSource
) -> tuple[list[Decision], Ledger, SimulateState]:
    if inst.flavor != FLAVOR_2PM:
        raise ValueError("ranking_simulate requires a 2pm instance")
    alg = RankingSimulator(sigma, coins)
    decisions, ledger = run_online(alg, inst)
    return decisions, ledger, alg.state()


def ranking(
    graph: BipartiteGraph,
    pi: Optional[Sequence[str]],
    sigma: Ranking,
) -> Matching:
    """Rank-greedy online matching: each arriving keyword takes its
    best-ranked unmatched neighbor (first-price semantics, no second
    bidder required)."""
    order = list(pi) if pi is not None else graph.keywords
    rank = sigma.rank
    matched: set[str] = set()
    pairs: dict[str, str] = {}
    for u in order:
        best = None
        best_rank = None
        for v in graph.adj[u]:
            if v in matched:
                continue
            r = rank[v]
            if best_rank is None or r < best_rank:
                best, best_rank = v, r
        if best is not None:
            matched.add(best)
            pairs[u] = best
    return Matching(pairs)


def ranking_prime(
    graph: BipartiteGraph,
    pi: Optional[Sequence[str]],
    sigma: Ranking,
) -> Matching:
    """Dual form of the rank-greedy process: bidders arrive in rank order
    and take the earliest-arriving unmatched neighbor keyword.  Produces
    exactly the same edge set as :func:`ranking`."""
    order = list(pi) if pi is not None else graph.keywords
    pos = {u: i for i, u in enumerate(order)}
    rev = graph.reverse_adj()
    taken: set[str] = set()
    pairs: dict[str, str] = {}
    for v in sigma.order:
        best = None
        best_pos = None
        for u in rev.get(v, ()):
            if u in taken or u not in pos:
                continue
            p = pos[u]
            if best_pos is None or p < best_pos:
                best, best_pos = u, p
        if best is not None:
            taken.add(best)
            pairs[best] = v
    return Matching(pairs)


def ranking_on_instance(inst: Instance, sigma: Ranking) -> Matching:
    """Convenience wrapper running rank-greedy matching on a 2pm instance
    in its stored arrival order."""
    return ranking(graph_from_instance(inst), None, sigma)
