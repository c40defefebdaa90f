"""Conversion between the second-price model and the plain first-price
(budgeted allocation) model.

``second_price_proxy_bids`` rewrites every bid to the largest *other* bid
on the same keyword that does not exceed it, producing a first-price
instance whose optimum dominates the original second-price optimum.  The
randomized construction then turns any prefix-normalized first-price
allocation of the rewritten instance back into a feasible second-price
allocation that keeps, in expectation, at least an eighth of its value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .model import (
    FLAVOR_2PAA,
    SKIP,
    Decision,
    Instance,
    Ledger,
    run_allocation,
)
from .rng import Rng


@dataclass(frozen=True)
class FirstPriceAllocation:
    """Partial keyword -> bidder map evaluated under first-price rules
    (the chosen bidder pays its bid clamped to remaining budget)."""

    assignment: dict[str, str]


def proxy_bid(inst: Instance, u: str, v: str) -> int:
    """Largest bid on u by some other bidder that is <= v's bid (0 when no
    other bidder qualifies)."""
    own = inst.bid(u, v)
    best = 0
    for w in inst.bidders_for(u):
        if w == v:
            continue
        amount = inst.bids[(u, w)]
        if best < amount <= own:
            best = amount
    return best


def proxy_price_setter(inst: Instance, u: str, v: str) -> Optional[str]:
    """Lowest-index bidder realizing ``proxy_bid(inst, u, v)``; None when
    v is the only bidder on u."""
    own = inst.bid(u, v)
    best = None
    best_amount = -1
    for w in inst.bidders_for(u):
        if w == v:
            continue
        amount = inst.bids[(u, w)]
        if best_amount < amount <= own:
            best, best_amount = w, amount
    return best


def second_price_proxy_bids(inst: Instance) -> Instance:
    """First-price counterpart instance: same keywords, bidders, budgets;
    every bid replaced by its proxy value."""
    if inst.flavor != FLAVOR_2PAA:
        raise ValueError("proxy transformation requires a 2paa instance")
    bids = {
        (u, v): proxy_bid(inst, u, v)
        for u in inst.keywords
        for v in inst.bidders_for(u)
    }
    return Instance(FLAVOR_2PAA, list(inst.keywords), list(inst.bidders), bids)


def first_price_value(
    inst: Instance, assignment: Mapping[str, str]
) -> tuple[int, list[int]]:
    """Evaluate a first-price allocation: each assigned keyword pays the
    bid clamped to the bidder's remaining budget.  Returns (total,
    per-keyword payments)."""
    remaining = dict(inst.budget)
    payments = []
    for u in inst.keywords:
        v = assignment.get(u)
        if v is None:
            payments.append(0)
            continue
        pay = min(inst.bid(u, v), remaining[v])
        remaining[v] -= pay
        payments.append(pay)
    return sum(payments), payments


def _per_bidder_sequences(
    inst: Instance, assignment: Mapping[str, str]
) -> dict[str, list[str]]:
    seqs: dict[str, list[str]] = {}
    for u in inst.keywords:
        v = assignment.get(u)
        if v is not None:
            seqs.setdefault(v, []).append(u)
    return seqs


def normalize_prefix_budget(
    inst_prime: Instance, assignment: Mapping[str, str]
) -> FirstPriceAllocation:
    """Truncate each bidder's allocated keyword sequence at the first
    prefix whose bid sum reaches the budget; the dropped keywords could
    only ever pay a clamped remainder, so the value is unchanged.
    Afterwards only the last kept keyword can exhaust a budget."""
    kept = {}
    for v, seq in _per_bidder_sequences(inst_prime, assignment).items():
        budget = inst_prime.budget[v]
        acc = 0
        for u in seq:
            kept[u] = v
            acc += inst_prime.bid(u, v)
            if acc >= budget:
                break
    return FirstPriceAllocation(kept)


def is_prefix_normalized(inst_prime: Instance, assignment: Mapping[str, str]) -> bool:
    """True when, per bidder, every proper prefix of the allocated bid
    sequence sums to strictly less than the budget."""
    for v, seq in _per_bidder_sequences(inst_prime, assignment).items():
        budget = inst_prime.budget[v]
        acc = 0
        for u in seq[:-1]:
            acc += inst_prime.bid(u, v)
            if acc >= budget:
                return False
    return True


class RandomConstructionSampler:
    """Prepared randomized construction over a fixed (instance, first-price
    allocation) pair; sampling is then cheap enough for large Monte Carlo
    sweeps.

    A mark set is drawn bidder by bidder with fair coins.  Every unmarked
    bidder v considers the keywords assigned to it whose proxy price
    setter is marked, in arrival order: if their proxy bids fit v's budget
    all are taken (second-priced by their setters); otherwise the larger
    of the leading prefix and the final singleton is taken.  Marked
    setters are never charged, so each taken keyword realizes exactly its
    proxy bid on replay.
    """

    def __init__(self, inst: Instance, fp: FirstPriceAllocation):
        self.inst = inst
        prime = second_price_proxy_bids(inst)
        if not is_prefix_normalized(prime, fp.assignment):
            raise ValueError("first-price allocation is not prefix-normalized")
        self.bidder_ids = [v for v, _ in inst.bidders]
        self.budget = dict(inst.budget)
        # keywords assigned to v with a nameable price setter, arrival order
        self.entries: dict[str, list[tuple[str, str, int]]] = {}
        for u in inst.keywords:
            v = fp.assignment.get(u)
            if v is None:
                continue
            setter = proxy_price_setter(inst, u, v)
            if setter is None:
                continue
            self.entries.setdefault(v, []).append((u, setter, prime.bid(u, v)))

    def with_marks(self, marked: Iterable[str]) -> list[Decision]:
        marked = set(marked)
        chosen: dict[str, Decision] = {}
        for v, entries in self.entries.items():
            if v in marked:
                continue
            picked = [entry for entry in entries if entry[1] in marked]
            if not picked:
                continue
            total = sum(amount for _, _, amount in picked)
            last_amount = picked[-1][2]
            if total <= self.budget[v]:
                take = picked
            elif total - last_amount >= last_amount:
                take = picked[:-1]
            else:
                take = picked[-1:]
            for u, setter, _ in take:
                chosen[u] = Decision(v, setter)
        return [chosen.get(u, SKIP) for u in self.inst.keywords]

    def sample(self, seed: int) -> tuple[list[Decision], Ledger]:
        rng = Rng(seed)
        marked = {v for v in self.bidder_ids if rng.coin()}
        decisions = self.with_marks(marked)
        return decisions, run_allocation(self.inst, decisions)


def construct_with_marks(
    inst: Instance, fp: FirstPriceAllocation, marked: Iterable[str]
) -> list[Decision]:
    """One-shot deterministic construction for a given mark set."""
    return RandomConstructionSampler(inst, fp).with_marks(marked)


def random_construction(
    inst: Instance, fp: FirstPriceAllocation, seed: int
) -> tuple[list[Decision], Ledger]:
    """Draw marks with one fair coin per bidder (in bidder order) and run
    the construction; always replays feasibly."""
    return RandomConstructionSampler(inst, fp).sample(seed)
