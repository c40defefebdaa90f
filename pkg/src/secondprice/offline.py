"""Offline algorithms: maximum matching, the half-of-the-matching
second-price construction (ReverseMatch), the top-c allocation for
instances whose budget/bid ratio is at least c, and exact brute-force
oracles for small instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .graphs import BipartiteGraph, graph_from_instance, maximum_matching_pairs
from .model import (
    FLAVOR_2PAA,
    FLAVOR_2PM,
    SKIP,
    Decision,
    Instance,
    Ledger,
    r_min,
    run_allocation,
    second_highest_bid,
)


@dataclass
class Matching:
    """Partial keyword -> bidder map, injective on bidders."""

    pairs: dict[str, str]

    @property
    def size(self) -> int:
        return len(self.pairs)

    def edges(self) -> frozenset[tuple[str, str]]:
        return frozenset(self.pairs.items())

    def inverse(self) -> dict[str, str]:
        return {v: u for u, v in self.pairs.items()}


class EdgeClass(Enum):
    UP = "up"
    DOWN = "down"


def classify_edge(
    graph: BipartiteGraph, matching: Matching, u: str, v: str
) -> EdgeClass:
    """Classify a non-matching edge (u, v): UP when v is matched to a
    keyword arriving before u, DOWN otherwise."""
    if matching.pairs.get(u) == v:
        raise ValueError("matching edges are not classified")
    arrival = {kw: i for i, kw in enumerate(graph.keywords)}
    partner = matching.inverse().get(v)
    if partner is not None and arrival[partner] < arrival[u]:
        return EdgeClass.UP
    return EdgeClass.DOWN


def maximum_bipartite_matching(inst: Instance) -> Matching:
    """Maximum-cardinality matching of the keyword-bidder graph of a 2pm
    instance (deterministic: lowest-index augmenting order)."""
    if inst.flavor != FLAVOR_2PM:
        raise ValueError("matching requires a 2pm instance")
    return Matching(maximum_matching_pairs(graph_from_instance(inst)))


def reverse_match(inst: Instance) -> tuple[list[Decision], Ledger]:
    """Build a second-price matching worth at least half of a maximum
    matching.

    Start from a maximum matching f and walk the matched keywords in
    reverse arrival order.  A keyword whose neighborhood still contains a
    down-edge (endpoint unmatched, or matched to a later keyword) is
    assigned to f(u) with that endpoint as second-price bidder.  When only
    up-edges remain, one up-edge endpoint v is taken as second-price
    bidder and v's own matching edge is deleted, sacrificing the
    earlier-arriving keyword matched to v (it is skipped when reached).
    Every surviving assignment realizes price 1 on forward replay, and at
    most one matched keyword is lost per assignment made, so the total is
    at least ceil(size(f) / 2).
    """
    if inst.flavor != FLAVOR_2PM:
        raise ValueError("reverse_match requires a 2pm instance")
    graph = graph_from_instance(inst)
    f = maximum_matching_pairs(graph)
    f_inv = {v: u for u, v in f.items()}
    arrival = inst.keyword_index
    decisions: list[Decision] = [SKIP] * len(inst.keywords)
    processed: set[str] = set()

    for u in reversed(inst.keywords):
        processed.add(u)
        mate = f.get(u)
        if mate is None:
            continue
        down = None
        for v in graph.adj[u]:
            if v == mate:
                continue
            partner = f_inv.get(v)
            if partner is None or arrival[partner] > arrival[u]:
                down = v
                break
        if down is not None:
            decisions[arrival[u]] = Decision(mate, down)
        else:
            v = next((w for w in graph.adj[u] if w != mate), None)
            if v is None:
                raise ValueError(f"keyword {u} has degree < 2")
            partner = f_inv[v]
            # reverse order guarantees the sacrificed keyword is unprocessed
            assert partner not in processed
            del f[partner]
            del f_inv[v]
            decisions[arrival[u]] = Decision(mate, v)

    return decisions, run_allocation(inst, decisions)


def top_c_allocate(inst: Instance, c: int) -> tuple[list[Decision], Ledger]:
    """Allocate only the c keywords with the highest second-highest bid,
    each to its top two bidders, skipping everything else.

    Requires R_min >= c, which guarantees no bid is ever clamped during
    the run, so the total is exactly the sum of the selected second-highest
    bids and hence at least (c/m) times the global second-bid sum.
    """
    if inst.flavor != FLAVOR_2PAA:
        raise ValueError("top_c_allocate requires a 2paa instance")
    if c < 1:
        raise ValueError("c must be a positive integer")
    if r_min(inst) < Fraction(c):
        raise ValueError(f"precondition R_min >= c violated (c={c})")
    ranked = sorted(
        inst.keywords,
        key=lambda u: (-second_highest_bid(inst, u), inst.keyword_index[u]),
    )
    selected = set(ranked[:c])
    decisions = []
    for u in inst.keywords:
        if u not in selected:
            decisions.append(SKIP)
            continue
        by_amount = sorted(
            inst.bidders_for(u),
            key=lambda v: (-inst.bids[(u, v)], inst.bidder_index[v]),
        )
        if len(by_amount) >= 2:
            decisions.append(Decision(by_amount[0], by_amount[1]))
        else:
            decisions.append(SKIP)
    return decisions, run_allocation(inst, decisions)


# ---------------------------------------------------------------------------
# Exact oracles
# ---------------------------------------------------------------------------

ORACLE_2PM_MAX_BIDDERS = 25
ORACLE_2PAA_MAX_KEYWORDS = 6
ORACLE_2PAA_MAX_BIDDERS = 5
ORACLE_2PAA_MAX_BUDGET = 100


def brute_force_2pm_opt(inst: Instance) -> tuple[list[Decision], Ledger]:
    """Exact 2pm optimum by dynamic programming over (keyword index,
    bitmask of consumed bidders).

    Masks are projected onto the bidders still adjacent to unprocessed
    keywords, which keeps the state space small without changing the
    value.  Assignments at price 0 still consume the first-price bidder,
    matching the arbiter exactly; they are never needed for optimality, so
    reconstruction prefers Skip.
    """
    if inst.flavor != FLAVOR_2PM:
        raise ValueError("oracle requires a 2pm instance")
    n = len(inst.bidders)
    if n > ORACLE_2PM_MAX_BIDDERS:
        raise ValueError("instance too large for oracle")
    idx = inst.bidder_index
    ids = [v for v, _ in inst.bidders]
    m = len(inst.keywords)
    nbr_lists = []
    nbr_masks = []
    for u in inst.keywords:
        vs = [idx[v] for v in inst.bidders_for(u)]
        mask = 0
        for b in vs:
            mask |= 1 << b
        nbr_lists.append(vs)
        nbr_masks.append(mask)
    live = [0] * (m + 1)
    for i in range(m - 1, -1, -1):
        live[i] = live[i + 1] | nbr_masks[i]

    memo: dict[tuple[int, int], int] = {}

    def best(i: int, mask: int) -> int:
        if i == m:
            return 0
        key = (i, mask & live[i])
        cached = memo.get(key)
        if cached is not None:
            return cached
        val = best(i + 1, mask)
        for b in nbr_lists[i]:
            bit = 1 << b
            if mask & bit:
                continue
            new_mask = mask | bit
            profit = 1 if nbr_masks[i] & ~new_mask else 0
            cand = best(i + 1, new_mask) + profit
            if cand > val:
                val = cand
        memo[key] = val
        return val

    total = best(0, 0)

    decisions: list[Decision] = []
    mask = 0
    for i in range(m):
        target = best(i, mask)
        if best(i + 1, mask) == target:
            decisions.append(SKIP)
            continue
        placed = False
        for b in nbr_lists[i]:
            bit = 1 << b
            if mask & bit:
                continue
            new_mask = mask | bit
            profit = 1 if nbr_masks[i] & ~new_mask else 0
            if best(i + 1, new_mask) + profit == target:
                second = next(
                    (w for w in nbr_lists[i] if w != b and not mask >> w & 1), None
                )
                decisions.append(
                    Decision(ids[b], ids[second] if second is not None else None)
                )
                mask = new_mask
                placed = True
                break
        assert placed
    ledger = run_allocation(inst, decisions)
    assert ledger.total == total
    return decisions, ledger


def _guard_small_2paa(inst: Instance) -> None:
    if (
        len(inst.keywords) > ORACLE_2PAA_MAX_KEYWORDS
        or len(inst.bidders) > ORACLE_2PAA_MAX_BIDDERS
        or any(b > ORACLE_2PAA_MAX_BUDGET for _, b in inst.bidders)
    ):
        raise ValueError("instance too large for oracle")


def brute_force_2paa_opt(inst: Instance) -> tuple[list[Decision], Ledger]:
    """Exact 2paa optimum by exhaustive recursion over all per-keyword
    decisions, memoized on (keyword index, remaining-budget vector)."""
    if inst.flavor != FLAVOR_2PAA:
        raise ValueError("oracle requires a 2paa instance")
    _guard_small_2paa(inst)
    ids = [v for v, _ in inst.bidders]
    idx = inst.bidder_index
    m = len(inst.keywords)
    nbrs = [[idx[v] for v in inst.bidders_for(u)] for u in inst.keywords]
    amounts = [
        {idx[v]: inst.bids[(u, v)] for v in inst.bidders_for(u)}
        for u in inst.keywords
    ]
    start = tuple(b for _, b in inst.bidders)

    memo: dict[tuple[int, tuple[int, ...]], int] = {}

    def moves(i: int, rem: tuple[int, ...]):
        for v1 in nbrs[i]:
            e1 = min(amounts[i][v1], rem[v1])
            for v2 in nbrs[i]:
                if v2 == v1:
                    continue
                e2 = min(amounts[i][v2], rem[v2])
                if e2 > e1:
                    continue
                nxt = list(rem)
                nxt[v1] -= e2
                yield v1, v2, e2, tuple(nxt)

    def best(i: int, rem: tuple[int, ...]) -> int:
        if i == m:
            return 0
        key = (i, rem)
        cached = memo.get(key)
        if cached is not None:
            return cached
        val = best(i + 1, rem)
        for _, _, price, nxt in moves(i, rem):
            cand = price + best(i + 1, nxt)
            if cand > val:
                val = cand
        memo[key] = val
        return val

    total = best(0, start)

    decisions: list[Decision] = []
    rem = start
    for i in range(m):
        target = best(i, rem)
        if best(i + 1, rem) == target:
            decisions.append(SKIP)
            continue
        for v1, v2, price, nxt in moves(i, rem):
            if price + best(i + 1, nxt) == target:
                decisions.append(Decision(ids[v1], ids[v2]))
                rem = nxt
                break
        else:
            raise AssertionError("reconstruction failed")
    ledger = run_allocation(inst, decisions)
    assert ledger.total == total
    return decisions, ledger


def brute_force_1paa_opt(inst: Instance) -> tuple[dict[str, str], int]:
    """Exact first-price optimum: one bidder per keyword pays the minimum
    of its bid and its remaining budget.  Exhaustive search memoized on
    (keyword index, remaining-budget vector); returns the assignment map
    and its value."""
    _guard_small_2paa(inst)
    ids = [v for v, _ in inst.bidders]
    idx = inst.bidder_index
    m = len(inst.keywords)
    nbrs = [[idx[v] for v in inst.bidders_for(u)] for u in inst.keywords]
    amounts = [
        {idx[v]: inst.bids[(u, v)] for v in inst.bidders_for(u)}
        for u in inst.keywords
    ]
    start = tuple(b for _, b in inst.bidders)

    memo: dict[tuple[int, tuple[int, ...]], int] = {}

    def best(i: int, rem: tuple[int, ...]) -> int:
        if i == m:
            return 0
        key = (i, rem)
        cached = memo.get(key)
        if cached is not None:
            return cached
        val = best(i + 1, rem)
        for v in nbrs[i]:
            pay = min(amounts[i][v], rem[v])
            nxt = list(rem)
            nxt[v] -= pay
            cand = pay + best(i + 1, tuple(nxt))
            if cand > val:
                val = cand
        memo[key] = val
        return val

    value = best(0, start)

    assignment: dict[str, str] = {}
    rem = start
    for i in range(m):
        target = best(i, rem)
        if best(i + 1, rem) == target:
            continue
        for v in nbrs[i]:
            pay = min(amounts[i][v], rem[v])
            nxt = list(rem)
            nxt[v] -= pay
            if pay + best(i + 1, tuple(nxt)) == target:
                assignment[inst.keywords[i]] = ids[v]
                rem = tuple(nxt)
                break
        else:
            raise AssertionError("reconstruction failed")
    return assignment, value
