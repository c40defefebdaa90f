"""Arbiter semantics, instance validation, and file formats."""

import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from secondprice import (
    SKIP,
    AuctionError,
    AuctionState,
    Decision,
    Instance,
    NoSuchBidError,
    OutbidError,
    apply_decision,
    effective_bid,
    r_min,
    run_allocation,
    second_price_upper_bound,
    validate_instance,
)
from secondprice.model import (
    allocation_from_dict,
    allocation_to_dict,
    instance_from_dict,
    instance_to_dict,
)
from secondprice.rng import Rng
from secondprice.verify import two_keyword_example


def unit(keywords, bidders, edges):
    return Instance(
        "2pm",
        keywords,
        [(v, 1) for v in bidders],
        {(u, v): 1 for u, v in edges},
    )


class TestValidation:
    def test_valid_2pm(self):
        inst = unit(["u"], ["a", "b"], [("u", "a"), ("u", "b")])
        assert validate_instance(inst) == []

    def test_2pm_degree_one(self):
        inst = unit(["u"], ["a", "b"], [("u", "a")])
        assert any("degree < 2" in p for p in validate_instance(inst))

    def test_bid_exceeds_budget(self):
        inst = Instance("2paa", ["u"], [("v", 5)], {("u", "v"): 7})
        assert any("exceeds budget" in p for p in validate_instance(inst))

    def test_duplicate_ids(self):
        inst = Instance("2paa", ["u", "u"], [("v", 5)], {})
        assert any("duplicate keyword" in p for p in validate_instance(inst))

    def test_2pm_nonunit(self):
        inst = Instance(
            "2pm", ["u"], [("a", 2), ("b", 1)], {("u", "a"): 1, ("u", "b"): 1}
        )
        assert any("budget must be 1" in p for p in validate_instance(inst))

    def test_dangling_bid_references(self):
        inst = Instance("2paa", ["u"], [("v", 5)], {("w", "v"): 1, ("u", "z"): 1})
        problems = validate_instance(inst)
        assert any("unknown keyword" in p for p in problems)
        assert any("unknown bidder" in p for p in problems)


class TestEffectiveBid:
    def test_clamped_to_remaining(self):
        inst = Instance("2paa", ["u"], [("v", 6)], {("u", "v"): 6})
        state = AuctionState({"v": 3}, set())
        assert effective_bid(inst, state, "u", "v") == 3

    def test_zero_bid(self):
        inst = Instance("2paa", ["u"], [("v", 6)], {("u", "v"): 0})
        assert effective_bid(inst, AuctionState.initial(inst), "u", "v") == 0

    def test_budget_not_binding(self):
        inst = Instance("2paa", ["u"], [("v", 6)], {("u", "v"): 4})
        assert effective_bid(inst, AuctionState.initial(inst), "u", "v") == 4

    def test_unknown_pair(self):
        inst = Instance("2paa", ["u"], [("v", 6)], {})
        with pytest.raises(NoSuchBidError):
            effective_bid(inst, AuctionState.initial(inst), "u", "v")

    def test_2pm_consumed_bidder_bids_zero(self):
        inst = unit(["u"], ["a", "b"], [("u", "a"), ("u", "b")])
        state = AuctionState.initial(inst, matched=["a"])
        assert effective_bid(inst, state, "u", "a") == 0
        assert effective_bid(inst, state, "u", "b") == 1


class TestApplyDecision:
    def test_walkthrough_first_keyword(self):
        inst, replay = two_keyword_example()
        state, price = apply_decision(inst, AuctionState.initial(inst), replay[0])
        assert price == 3
        assert state.remaining["v1"] == 3
        assert state.clock == 1

    def test_walkthrough_second_keyword_clamps(self):
        inst, replay = two_keyword_example()
        state, _ = apply_decision(inst, AuctionState.initial(inst), replay[0])
        state, price = apply_decision(inst, state, replay[1])
        assert price == 3

    def test_alternate_completion_same_price(self):
        # third bidder bidding 5 instead of 3 prices keyword 2 identically
        inst = Instance(
            "2paa",
            ["u1", "u2"],
            [("v1", 6), ("v2", 3), ("v3", 5)],
            {("u1", "v1"): 4, ("u1", "v2"): 3, ("u2", "v1"): 6, ("u2", "v3"): 5},
        )
        ledger = run_allocation(inst, [Decision("v1", "v2"), Decision("v3", "v1")])
        assert ledger.prices == (3, 3)

    def test_skip_changes_only_clock(self):
        inst, _ = two_keyword_example()
        before = AuctionState.initial(inst)
        state, price = apply_decision(inst, before, SKIP)
        assert price == 0
        assert state.remaining == before.remaining
        assert state.clock == 1

    def test_outbid_rejected(self):
        inst = Instance(
            "2paa", ["u"], [("v1", 9), ("v2", 9)], {("u", "v1"): 2, ("u", "v2"): 5}
        )
        with pytest.raises(OutbidError):
            apply_decision(inst, AuctionState.initial(inst), Decision("v1", "v2"))

    def test_tie_accepts_both_orders(self):
        inst = Instance(
            "2paa", ["u"], [("v1", 9), ("v2", 9)], {("u", "v1"): 4, ("u", "v2"): 4}
        )
        for first, second in (("v1", "v2"), ("v2", "v1")):
            _, price = apply_decision(
                inst, AuctionState.initial(inst), Decision(first, second)
            )
            assert price == 4

    def test_assign_without_second_charges_zero(self):
        inst = unit(["u"], ["a", "b"], [("u", "a"), ("u", "b")])
        state, price = apply_decision(inst, AuctionState.initial(inst), Decision("a"))
        assert price == 0
        assert "a" in state.matched

    def test_decision_invariants(self):
        with pytest.raises(ValueError):
            Decision("a", "a")
        with pytest.raises(ValueError):
            Decision(None, "b")

    def test_non_bidding_bidder_rejected(self):
        inst = unit(["u"], ["a", "b", "c"], [("u", "a"), ("u", "b")])
        with pytest.raises(NoSuchBidError):
            apply_decision(inst, AuctionState.initial(inst), Decision("c", "a"))
        with pytest.raises(NoSuchBidError):
            apply_decision(inst, AuctionState.initial(inst), Decision("a", "c"))


class TestRunAllocation:
    def test_walkthrough_total(self):
        inst, replay = two_keyword_example()
        assert run_allocation(inst, replay).total == 6

    def test_all_skip(self):
        inst, _ = two_keyword_example()
        assert run_allocation(inst, [SKIP, SKIP]).total == 0

    def test_unit_pair(self):
        inst = unit(["u"], ["a", "b"], [("u", "a"), ("u", "b")])
        assert run_allocation(inst, [Decision("a", "b")]).total == 1

    def test_length_mismatch(self):
        inst, _ = two_keyword_example()
        with pytest.raises(AuctionError, match="length"):
            run_allocation(inst, [SKIP])

    def test_error_reports_keyword_index(self):
        inst = unit(
            ["u1", "u2"], ["a", "b"], [("u1", "a"), ("u1", "b"), ("u2", "a"), ("u2", "b")]
        )
        with pytest.raises(AuctionError, match="keyword index 1"):
            run_allocation(inst, [Decision("a", "b"), Decision("a", "b")])

    def test_2pm_price_one_iff_second_unconsumed(self):
        inst = unit(
            ["u1", "u2"],
            ["a", "b", "c"],
            [("u1", "a"), ("u1", "b"), ("u2", "b"), ("u2", "c")],
        )
        ledger = run_allocation(inst, [Decision("b", "a"), Decision("c", "b")])
        # b was consumed by keyword 1, so it prices keyword 2 at 0
        assert ledger.prices == (1, 0)


class TestAggregates:
    def test_r_min_direct(self):
        inst = Instance(
            "2paa",
            ["u"],
            [("v1", 10), ("v2", 10)],
            {("u", "v1"): 5, ("u", "v2"): 2},
        )
        assert r_min(inst) == Fraction(2)

    def test_r_min_2pm_is_one(self):
        inst = unit(["u"], ["a", "b"], [("u", "a"), ("u", "b")])
        assert r_min(inst) == 1

    def test_r_min_undefined(self):
        inst = Instance("2paa", ["u"], [("v", 5)], {("u", "v"): 0})
        with pytest.raises(ValueError, match="R_min"):
            r_min(inst)

    def test_upper_bound_pairs(self):
        inst = Instance(
            "2paa",
            ["u1", "u2"],
            [("v1", 9), ("v2", 9)],
            {("u1", "v1"): 4, ("u1", "v2"): 3, ("u2", "v1"): 4},
        )
        # {4,3} contributes 3; a single bid contributes 0
        assert second_price_upper_bound(inst) == 3

    def test_upper_bound_walkthrough(self):
        inst, _ = two_keyword_example()
        assert second_price_upper_bound(inst) == 6


def random_2paa_instance(rng):
    num_kw = 1 + rng.below(3)
    num_b = 1 + rng.below(3)
    keywords = [f"u{i}" for i in range(num_kw)]
    bidders = [(f"v{j}", 1 + rng.below(9)) for j in range(num_b)]
    budget = dict(bidders)
    bids = {}
    for u in keywords:
        for v, _ in bidders:
            if rng.coin():
                bids[(u, v)] = rng.below(budget[v] + 1)
    return Instance("2paa", keywords, bidders, bids)


def random_valid_run(inst, rng):
    """Random decision sequence that respects arbiter preconditions,
    tracking whether any effective bid was clamped below its original."""
    state = AuctionState.initial(inst)
    decisions = []
    clamped = False
    for u in inst.keywords:
        nbrs = inst.bidders_for(u)
        options = [SKIP]
        for v1 in nbrs:
            options.append(Decision(v1))
            for v2 in nbrs:
                if v2 != v1 and effective_bid(inst, state, u, v2) <= effective_bid(
                    inst, state, u, v1
                ):
                    options.append(Decision(v1, v2))
        choice = options[rng.below(len(options))]
        if not choice.is_skip:
            for v in (choice.first, choice.second):
                if v is not None and effective_bid(inst, state, u, v) < inst.bids[(u, v)]:
                    clamped = True
        state, _ = apply_decision(inst, state, choice)
        decisions.append(choice)
    return decisions, clamped


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10**9))
def test_arbiter_invariants(seed):
    rng = Rng(seed)
    inst = random_2paa_instance(rng)
    decisions, clamped = random_valid_run(inst, rng)
    ledger = run_allocation(inst, decisions)
    assert all(p >= 0 for p in ledger.prices)
    # replaying is deterministic
    assert run_allocation(inst, decisions).prices == ledger.prices
    # per-bidder charges never exceed the budget
    charged = {}
    for d, p in zip(decisions, ledger.prices):
        if not d.is_skip:
            charged[d.first] = charged.get(d.first, 0) + p
    for v, total in charged.items():
        assert total <= inst.budget[v]
    if not clamped:
        assert ledger.total <= second_price_upper_bound(inst)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10**9))
def test_2pm_prices_zero_one(seed):
    rng = Rng(seed)
    num_b = 2 + rng.below(3)
    bidders = [f"v{j}" for j in range(num_b)]
    keywords = [f"u{i}" for i in range(1 + rng.below(3))]
    edges = []
    for u in keywords:
        picks = rng.sample_indices(num_b, 2 + rng.below(num_b - 1))
        edges.extend((u, bidders[j]) for j in picks)
    inst = unit(keywords, bidders, edges)
    state = AuctionState.initial(inst)
    matched_before = []
    decisions = []
    for u in inst.keywords:
        free = [v for v in inst.bidders_for(u) if v not in state.matched]
        if len(free) >= 2 and rng.coin():
            d = Decision(free[0], free[1])
        else:
            d = SKIP
        matched_before.append(set(state.matched))
        state, _ = apply_decision(inst, state, d)
        decisions.append(d)
    ledger = run_allocation(inst, decisions)
    for d, p, seen in zip(decisions, ledger.prices, matched_before):
        assert p in (0, 1)
        if not d.is_skip and d.second is not None:
            assert (p == 1) == (d.second not in seen)


class TestFileFormats:
    def test_instance_round_trip(self):
        inst, _ = two_keyword_example()
        doc = instance_to_dict(inst)
        again = instance_from_dict(json.loads(json.dumps(doc)))
        assert again.flavor == inst.flavor
        assert again.keywords == inst.keywords
        assert again.bidders == inst.bidders
        assert again.bids == inst.bids

    def test_allocation_round_trip(self):
        allocation = [SKIP, Decision("v1"), Decision("v1", "v2")]
        doc = allocation_to_dict(allocation)
        assert doc["decisions"][0] == {"skip": True}
        assert doc["decisions"][1] == {"first": "v1"}
        assert allocation_from_dict(doc) == allocation
