"""Instance data model and the exact execution semantics of one-slot
second-price allocation.

An instance is a list of keywords in arrival order, bidders with integer
budgets, and a sparse integer bid matrix.  A solution names, per keyword,
a first-price bidder and optionally a second-price bidder; the first is
charged the second's effective bid (the original bid clamped to remaining
budget).  All money is exact nonnegative integer arithmetic; no floats
appear anywhere in the arbiter.

Two flavors share the machinery but differ in one deliberate way:

* ``2paa`` -- general budgets/bids.  Assigning a keyword only decrements
  the winner's budget by the realized price; a bidder charged price 0 is
  untouched and can win again.
* ``2pm``  -- unit budgets, 0/1 bids, keyword degree >= 2.  Assigning a
  keyword *consumes* the first-price bidder even at price 0 (its
  effective bid drops to 0 for the rest of the run), which is the
  matching reading of the problem.  Prices are 1 exactly when the named
  second-price bidder is still unconsumed.

The flavor tag on the instance selects the semantics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

FLAVOR_2PAA = "2paa"
FLAVOR_2PM = "2pm"


class AuctionError(Exception):
    """Violation of the allocation semantics (bad decision, unknown bid)."""


class NoSuchBidError(AuctionError):
    pass


class OutbidError(AuctionError):
    """First-price bidder's effective bid fell below the second's."""


@dataclass(frozen=True)
class Decision:
    """Per-keyword action: skip, or assign to ``first`` at the price of
    ``second``'s effective bid (0 when ``second`` is absent)."""

    first: Optional[str] = None
    second: Optional[str] = None

    def __post_init__(self):
        if self.first is None and self.second is not None:
            raise ValueError("second-price bidder without a first-price bidder")
        if self.first is not None and self.first == self.second:
            raise ValueError("first and second bidder must differ")

    @property
    def is_skip(self) -> bool:
        return self.first is None

    @staticmethod
    def skip() -> "Decision":
        return SKIP

    @staticmethod
    def assign(first: str, second: Optional[str] = None) -> "Decision":
        return Decision(first, second)


SKIP = Decision()

Allocation = Sequence[Decision]


@dataclass
class Instance:
    """Ordered keywords, budgeted bidders, sparse bid matrix.

    ``bidders`` is a sequence of (id, budget) pairs; its order defines the
    bidder index used by every lowest-index tie-break in the package.
    ``bids`` maps (keyword id, bidder id) to a nonnegative integer amount.
    Instances are treated as immutable once constructed.
    """

    flavor: str
    keywords: list[str]
    bidders: list[tuple[str, int]]
    bids: dict[tuple[str, str], int]

    budget: dict[str, int] = field(init=False, repr=False)
    bidder_index: dict[str, int] = field(init=False, repr=False)
    keyword_index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.keywords = list(self.keywords)
        self.bidders = [(v, int(b)) for v, b in self.bidders]
        self.bids = dict(self.bids)
        self.budget = {v: b for v, b in self.bidders}
        self.bidder_index = {v: i for i, (v, _) in enumerate(self.bidders)}
        self.keyword_index = {u: i for i, u in enumerate(self.keywords)}
        # dangling bid references are skipped here so that validation can
        # report them instead of construction failing
        nbrs: dict[str, list[str]] = {u: [] for u in self.keywords}
        for (u, v) in self.bids:
            if u in nbrs and v in self.bidder_index:
                nbrs[u].append(v)
        self._neighbors = {
            u: tuple(sorted(vs, key=self.bidder_index.__getitem__))
            for u, vs in nbrs.items()
        }

    def bidders_for(self, keyword: str) -> tuple[str, ...]:
        """Bidders with a bid entry on the keyword, in bidder-index order."""
        return self._neighbors[keyword]

    def bid(self, keyword: str, bidder: str) -> int:
        try:
            return self.bids[(keyword, bidder)]
        except KeyError:
            raise NoSuchBidError(f"no such bid: ({keyword}, {bidder})") from None

    @property
    def num_keywords(self) -> int:
        return len(self.keywords)


@dataclass
class AuctionState:
    """Remaining budgets, consumed-bidder set (2pm only), and the index of
    the next keyword to process."""

    remaining: dict[str, int]
    matched: set[str]
    clock: int = 0

    @staticmethod
    def initial(inst: Instance, matched: Iterable[str] = ()) -> "AuctionState":
        return AuctionState(dict(inst.budget), set(matched), 0)

    def copy(self) -> "AuctionState":
        return AuctionState(dict(self.remaining), set(self.matched), self.clock)


@dataclass(frozen=True)
class Ledger:
    """Realized price per keyword (0 for skips) and their sum."""

    prices: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.prices)


def validate_instance(inst: Instance) -> list[str]:
    """Check structural invariants; returns the list of violations (empty
    means the instance is well formed)."""
    problems = []
    if inst.flavor not in (FLAVOR_2PAA, FLAVOR_2PM):
        problems.append(f"unknown flavor {inst.flavor!r}")
    if len(set(inst.keywords)) != len(inst.keywords):
        problems.append("duplicate keyword ids")
    ids = [v for v, _ in inst.bidders]
    if len(set(ids)) != len(ids):
        problems.append("duplicate bidder ids")
    for v, b in inst.bidders:
        if b < 0:
            problems.append(f"bidder {v}: negative budget")
    for (u, v), amount in inst.bids.items():
        if u not in inst.keyword_index:
            problems.append(f"bid on unknown keyword {u}")
            continue
        if v not in inst.bidder_index:
            problems.append(f"bid by unknown bidder {v}")
            continue
        if amount < 0:
            problems.append(f"bid ({u}, {v}): negative amount")
        elif amount > inst.budget[v]:
            problems.append(f"bid ({u}, {v}): bid exceeds budget")
    if inst.flavor == FLAVOR_2PM:
        for v, b in inst.bidders:
            if b != 1:
                problems.append(f"bidder {v}: 2pm budget must be 1")
        for (u, v), amount in inst.bids.items():
            if amount != 1:
                problems.append(f"bid ({u}, {v}): 2pm bids must be 1")
        for u in inst.keywords:
            if len(inst.bidders_for(u)) < 2:
                problems.append(f"keyword {u}: keyword degree < 2")
    return problems


def effective_bid(inst: Instance, state: AuctionState, u: str, v: str) -> int:
    """Bid clamped to remaining budget; 0 for consumed 2pm bidders."""
    amount = inst.bid(u, v)
    if inst.flavor == FLAVOR_2PM and v in state.matched:
        return 0
    rem = state.remaining[v]
    return amount if amount <= rem else rem


def _apply_in_place(inst: Instance, state: AuctionState, decision: Decision) -> int:
    if state.clock >= len(inst.keywords):
        raise AuctionError("no keywords left to allocate")
    u = inst.keywords[state.clock]
    price = 0
    if not decision.is_skip:
        first = decision.first
        eff_first = effective_bid(inst, state, u, first)
        if decision.second is not None:
            price = effective_bid(inst, state, u, decision.second)
            if eff_first < price:
                raise OutbidError(
                    f"first-price bidder outbid on {u}: "
                    f"{first}={eff_first} < {decision.second}={price}"
                )
        state.remaining[first] -= price
        if inst.flavor == FLAVOR_2PM:
            state.matched.add(first)
    state.clock += 1
    return price


def apply_decision(
    inst: Instance, state: AuctionState, decision: Decision
) -> tuple[AuctionState, int]:
    """Execute one decision; returns the successor state and the realized
    price.  The input state is not modified."""
    new_state = state.copy()
    price = _apply_in_place(inst, new_state, decision)
    return new_state, price


def run_allocation(
    inst: Instance,
    allocation: Allocation,
    initial_matched: Iterable[str] = (),
) -> Ledger:
    """Fold a full decision sequence over the arrival order.

    ``initial_matched`` pre-consumes bidders (used by restricted-instance
    experiments); it must be empty for 2paa instances.
    """
    if len(allocation) != len(inst.keywords):
        raise AuctionError(
            f"allocation length {len(allocation)} != keyword count {len(inst.keywords)}"
        )
    state = AuctionState.initial(inst, initial_matched)
    prices = []
    for i, decision in enumerate(allocation):
        try:
            prices.append(_apply_in_place(inst, state, decision))
        except AuctionError as exc:
            raise AuctionError(f"keyword index {i}: {exc}") from exc
    return Ledger(tuple(prices))


def r_min(inst: Instance) -> Fraction:
    """Exact minimum of budget/bid over all positive bids."""
    best: Optional[Fraction] = None
    for (u, v), amount in inst.bids.items():
        if amount > 0:
            ratio = Fraction(inst.budget[v], amount)
            if best is None or ratio < best:
                best = ratio
    if best is None:
        raise ValueError("R_min undefined: all bids are zero")
    return best


def second_highest_bid(inst: Instance, u: str) -> int:
    """Second-highest original bid on the keyword (0 if fewer than two)."""
    amounts = sorted((inst.bids[(u, v)] for v in inst.bidders_for(u)), reverse=True)
    return amounts[1] if len(amounts) >= 2 else 0


def second_price_upper_bound(inst: Instance) -> int:
    """Sum over keywords of the second-highest original bid; no allocation
    can beat it unless clamping never occurred (it cannot even then)."""
    return sum(second_highest_bid(inst, u) for u in inst.keywords)


# ---------------------------------------------------------------------------
# Canonical JSON file formats
# ---------------------------------------------------------------------------


def instance_to_dict(inst: Instance) -> dict:
    bid_entries = [
        {"keyword": u, "bidder": v, "amount": inst.bids[(u, v)]}
        for u in inst.keywords
        for v in inst.bidders_for(u)
    ]
    return {
        "flavor": inst.flavor,
        "keywords": list(inst.keywords),
        "bidders": [{"id": v, "budget": b} for v, b in inst.bidders],
        "bids": bid_entries,
    }


def instance_from_dict(doc: Mapping) -> Instance:
    return Instance(
        flavor=doc["flavor"],
        keywords=list(doc["keywords"]),
        bidders=[(entry["id"], int(entry["budget"])) for entry in doc["bidders"]],
        bids={
            (entry["keyword"], entry["bidder"]): int(entry["amount"])
            for entry in doc["bids"]
        },
    )


def save_instance(inst: Instance, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(inst), fh, indent=2)
        fh.write("\n")


def load_instance(path: str) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return instance_from_dict(json.load(fh))


def allocation_to_dict(allocation: Allocation) -> dict:
    decisions = []
    for d in allocation:
        if d.is_skip:
            decisions.append({"skip": True})
        elif d.second is None:
            decisions.append({"first": d.first})
        else:
            decisions.append({"first": d.first, "second": d.second})
    return {"decisions": decisions}


def allocation_from_dict(doc: Mapping) -> list[Decision]:
    out = []
    for entry in doc["decisions"]:
        if entry.get("skip"):
            out.append(SKIP)
        else:
            out.append(Decision(entry["first"], entry.get("second")))
    return out


def save_allocation(allocation: Allocation, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(allocation_to_dict(allocation), fh, indent=2)
        fh.write("\n")


def load_allocation(path: str) -> list[Decision]:
    with open(path, "r", encoding="utf-8") as fh:
        return allocation_from_dict(json.load(fh))


def ledger_to_dict(ledger: Ledger) -> dict:
    return {"prices": list(ledger.prices), "total": ledger.total}
