"""Offline solvers against hand examples and independent oracles."""

from itertools import combinations, product

import pytest

from secondprice import (
    Instance,
    brute_force_1paa_opt,
    brute_force_2paa_opt,
    brute_force_2pm_opt,
    gen_chain_instance,
    gen_vc_2pm,
    maximum_bipartite_matching,
    reverse_match,
    run_allocation,
    second_price_upper_bound,
    top_c_allocate,
)
from secondprice import SimpleGraph
from secondprice.rng import Rng
from secondprice.verify import two_keyword_example

from oracles import exhaustive_2paa_opt, exhaustive_2pm_opt, exhaustive_matching_size


def unit(keywords, bidders, edges):
    return Instance(
        "2pm", keywords, [(v, 1) for v in bidders], {(u, v): 1 for u, v in edges}
    )


def complete_2pm(nu, nv):
    return unit(
        [f"u{i}" for i in range(nu)],
        [f"v{j}" for j in range(nv)],
        [(f"u{i}", f"v{j}") for i in range(nu) for j in range(nv)],
    )


class TestMaximumMatching:
    def test_complete_3x3(self):
        assert maximum_bipartite_matching(complete_2pm(3, 3)).size == 3

    def test_star_bounded_by_bidders(self):
        inst = unit(
            ["u1", "u2", "u3"],
            ["a", "b"],
            [(u, v) for u in ("u1", "u2", "u3") for v in ("a", "b")],
        )
        assert maximum_bipartite_matching(inst).size == 2

    def test_matches_exhaustive_oracle(self):
        rng = Rng(42)
        for _ in range(20):
            keywords = [f"u{i}" for i in range(8)]
            bidders = [f"v{j}" for j in range(8)]
            edges = []
            for u in keywords:
                while True:
                    nbrs = [v for v in bidders if rng.chance(0.4)]
                    if len(nbrs) >= 2:
                        break
                edges.extend((u, v) for v in nbrs)
            inst = unit(keywords, bidders, edges)
            matching = maximum_bipartite_matching(inst)
            adj = {u: inst.bidders_for(u) for u in inst.keywords}
            assert matching.size == exhaustive_matching_size(adj)
            # matching edges are instance edges, injectively
            assert len(set(matching.pairs.values())) == matching.size
            for u, v in matching.pairs.items():
                assert (u, v) in inst.bids


def degree2_neighborhoods(num_bidders):
    return [
        combo
        for size in range(2, num_bidders + 1)
        for combo in combinations(range(num_bidders), size)
    ]


def small_2pm_family(max_keywords=3, max_bidders=4):
    for nv in range(2, max_bidders + 1):
        options = degree2_neighborhoods(nv)
        for nu in range(1, max_keywords + 1):
            if len(options) ** nu > 2500:
                continue
            for sets in product(options, repeat=nu):
                yield unit(
                    [f"u{i}" for i in range(nu)],
                    [f"v{j}" for j in range(nv)],
                    [
                        (f"u{i}", f"v{j}")
                        for i, nbrs in enumerate(sets)
                        for j in nbrs
                    ],
                )


class TestReverseMatch:
    def test_single_keyword(self):
        inst = unit(["u"], ["a", "b"], [("u", "a"), ("u", "b")])
        decisions, ledger = reverse_match(inst)
        assert ledger.total == 1
        assert not decisions[0].is_skip

    def test_two_keywords_shared_pair(self):
        inst = unit(
            ["u1", "u2"],
            ["a", "b"],
            [("u1", "a"), ("u1", "b"), ("u2", "a"), ("u2", "b")],
        )
        _, ledger = reverse_match(inst)
        # matching has size 2 but only one keyword can be profitable
        assert ledger.total == 1
        assert brute_force_2pm_opt(inst)[1].total == 1

    def test_exhaustive_small_family(self):
        for inst in small_2pm_family():
            decisions, ledger = reverse_match(inst)
            msize = maximum_bipartite_matching(inst).size
            opt = brute_force_2pm_opt(inst)[1].total
            assert 2 * ledger.total >= opt
            assert ledger.total >= (msize + 1) // 2
            assert opt <= msize
            # every emitted assignment realizes price exactly 1
            for d, p in zip(decisions, ledger.prices):
                if not d.is_skip:
                    assert p == 1

    def test_flavor_guard(self):
        inst, _ = two_keyword_example()
        with pytest.raises(ValueError):
            reverse_match(inst)


class TestEdgeClassification:
    def test_up_and_down_edges(self):
        from secondprice import EdgeClass, Matching, classify_edge
        from secondprice.graphs import graph_from_instance

        inst = unit(
            ["u1", "u2", "u3"],
            ["a", "b", "c"],
            [
                ("u1", "a"), ("u1", "b"),
                ("u2", "a"), ("u2", "b"),
                ("u3", "a"), ("u3", "c"),
            ],
        )
        graph = graph_from_instance(inst)
        matching = Matching({"u1": "a", "u2": "b"})
        # a is matched to the earlier-arriving u1, so (u2, a) points up
        assert classify_edge(graph, matching, "u2", "a") is EdgeClass.UP
        assert classify_edge(graph, matching, "u3", "a") is EdgeClass.UP
        # c is unmatched, so (u3, c) points down
        assert classify_edge(graph, matching, "u3", "c") is EdgeClass.DOWN
        with pytest.raises(ValueError):
            classify_edge(graph, matching, "u1", "a")

    def test_edge_to_later_matched_keyword_is_down(self):
        from secondprice import EdgeClass, classify_edge, Matching
        from secondprice.graphs import graph_from_instance

        inst = unit(
            ["u1", "u2"],
            ["a", "b", "c"],
            [("u1", "a"), ("u1", "b"), ("u2", "b"), ("u2", "c")],
        )
        graph = graph_from_instance(inst)
        matching = Matching({"u1": "a", "u2": "b"})
        assert classify_edge(graph, matching, "u1", "b") is EdgeClass.DOWN


class TestTopC:
    def three_keyword_instance(self):
        # second-highest bids are 5, 3, 2
        return Instance(
            "2paa",
            ["u1", "u2", "u3"],
            [("v1", 60), ("v2", 60)],
            {
                ("u1", "v1"): 6,
                ("u1", "v2"): 5,
                ("u2", "v1"): 4,
                ("u2", "v2"): 3,
                ("u3", "v1"): 2,
                ("u3", "v2"): 2,
            },
        )

    def test_c1_takes_best(self):
        _, ledger = top_c_allocate(self.three_keyword_instance(), 1)
        assert ledger.total == 5

    def test_c2_fraction_bound(self):
        inst = self.three_keyword_instance()
        _, ledger = top_c_allocate(inst, 2)
        assert ledger.total == 8
        assert 3 * ledger.total >= 2 * second_price_upper_bound(inst)

    def test_partition_instance_top_bid(self):
        from secondprice import gen_partition_2paa

        inst = gen_partition_2paa((1, 1, 1, 1), 1)
        _, ledger = top_c_allocate(inst, 1)
        assert ledger.total == 256  # W * n^3 with W=4, n=4

    def test_precondition(self):
        inst = Instance(
            "2paa", ["u"], [("v1", 10), ("v2", 10)], {("u", "v1"): 5, ("u", "v2"): 5}
        )
        with pytest.raises(ValueError, match="R_min"):
            top_c_allocate(inst, 3)


class TestBruteForce2pm:
    def test_single_pair(self):
        inst = unit(["u"], ["a", "b"], [("u", "a"), ("u", "b")])
        assert brute_force_2pm_opt(inst)[1].total == 1

    def test_triangle_reduction(self):
        inst, _ = gen_vc_2pm(SimpleGraph(3, ((0, 1), (1, 2), (0, 2))))
        assert brute_force_2pm_opt(inst)[1].total == 7

    def test_chain_m3(self):
        chain = gen_chain_instance(3, [0, 1])
        assert brute_force_2pm_opt(chain.instance)[1].total == 3

    def test_against_plain_recursion(self):
        rng = Rng(7)
        for _ in range(60):
            nu, nv = 1 + rng.below(4), 2 + rng.below(3)
            edges = []
            for i in range(nu):
                picks = rng.sample_indices(nv, 2 + rng.below(nv - 1))
                edges.extend((f"u{i}", f"v{j}") for j in picks)
            inst = unit(
                [f"u{i}" for i in range(nu)], [f"v{j}" for j in range(nv)], edges
            )
            decisions, ledger = brute_force_2pm_opt(inst)
            assert ledger.total == exhaustive_2pm_opt(inst)
            assert run_allocation(inst, decisions).total == ledger.total

    def test_size_guard(self):
        inst = complete_2pm(1, 26)
        with pytest.raises(ValueError, match="too large"):
            brute_force_2pm_opt(inst)


class TestBruteForce2paa:
    def test_walkthrough_optimum(self):
        inst, _ = two_keyword_example()
        assert brute_force_2paa_opt(inst)[1].total == 6

    def test_single_keyword(self):
        inst = Instance(
            "2paa", ["u"], [("v1", 9), ("v2", 9)], {("u", "v1"): 4, ("u", "v2"): 3}
        )
        assert brute_force_2paa_opt(inst)[1].total == 3

    def test_all_zero_bids(self):
        inst = Instance(
            "2paa", ["u"], [("v1", 9), ("v2", 9)], {("u", "v1"): 0, ("u", "v2"): 0}
        )
        assert brute_force_2paa_opt(inst)[1].total == 0

    def test_against_plain_recursion(self):
        from secondprice import gen_random_2paa

        for seed in range(40):
            inst = gen_random_2paa(3, 3, seed=seed, max_budget=6)
            decisions, ledger = brute_force_2paa_opt(inst)
            assert ledger.total == exhaustive_2paa_opt(inst)
            assert run_allocation(inst, decisions).total == ledger.total

    def test_size_guard(self):
        inst = Instance("2paa", [f"u{i}" for i in range(7)], [("v", 5)], {})
        with pytest.raises(ValueError, match="too large"):
            brute_force_2paa_opt(inst)


class TestBruteForce1paa:
    def test_takes_max_bid(self):
        inst = Instance(
            "2paa", ["u"], [("v1", 9), ("v2", 9)], {("u", "v1"): 4, ("u", "v2"): 3}
        )
        assert brute_force_1paa_opt(inst)[1] == 4

    def test_budget_caps_value(self):
        inst = Instance(
            "2paa", ["u1", "u2"], [("v", 5)], {("u1", "v"): 4, ("u2", "v"): 4}
        )
        assert brute_force_1paa_opt(inst)[1] == 5

    def test_dominates_second_price_on_proxy(self):
        from secondprice import gen_random_2paa, second_price_proxy_bids

        for seed in range(40):
            inst = gen_random_2paa(3, 3, seed=seed, max_budget=6)
            prime = second_price_proxy_bids(inst)
            assert brute_force_1paa_opt(prime)[1] >= brute_force_2paa_opt(inst)[1].total
