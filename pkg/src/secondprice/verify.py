"""Verification suites.

Each suite re-checks one quantitative guarantee of the package at desk
scale: exact structural identities are checked with zero tolerance, and
statistical estimates are checked against 3-standard-error bands or an
explicit absolute slack stated in the check's claim.  A report is a pure
function of (suite, params, seed): serialize it twice with the same
arguments and the bytes match.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Sequence

from .bridge import (
    RandomConstructionSampler,
    first_price_value,
    normalize_prefix_budget,
    second_price_proxy_bids,
)
from .generators import (
    SatFormula,
    SimpleGraph,
    deterministic_adversary,
    gen_3sat_2pm,
    gen_partition_2paa,
    gen_random_2paa,
    gen_random_2pm,
    gen_vc_2pm,
    is_satisfiable,
    left_k_copy,
    min_vertex_cover_size,
    partition_witness_value,
    replay_partition_witness,
    sample_chain,
)
from .graphs import BipartiteGraph, graph_from_instance
from .model import (
    FLAVOR_2PAA,
    FLAVOR_2PM,
    AuctionError,
    AuctionState,
    Decision,
    Instance,
    apply_decision,
    run_allocation,
    second_price_upper_bound,
)
from .offline import (
    brute_force_1paa_opt,
    brute_force_2paa_opt,
    brute_force_2pm_opt,
    maximum_bipartite_matching,
    reverse_match,
    top_c_allocate,
)
from .online import (
    GreedyMatcher,
    Ranking,
    TrivialFirst,
    greedy_2pm,
    ranking,
    ranking_prime,
    ranking_simulate,
)
from .rng import CoinStream, Rng
from .stats import Welford

DEFAULT_SEED = 1729


@dataclass(frozen=True)
class Check:
    name: str
    claim: str
    measured: str
    passed: bool


@dataclass
class VerifyReport:
    suite: str
    seed: int
    params: dict
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "params": {k: self.params[k] for k in sorted(self.params)},
            "checks": [
                {
                    "name": c.name,
                    "claim": c.claim,
                    "measured": c.measured,
                    "passed": c.passed,
                }
                for c in self.checks
            ],
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        width = max((len(c.name) for c in self.checks), default=4)
        lines = [
            f"suite {self.suite}  seed={self.seed}  "
            + " ".join(f"{k}={self.params[k]}" for k in sorted(self.params))
        ]
        for c in self.checks:
            mark = "PASS" if c.passed else "FAIL"
            lines.append(f"  [{mark}] {c.name:<{width}}  {c.claim}  |  {c.measured}")
        lines.append(f"  result: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Shared fixtures
# ---------------------------------------------------------------------------


def two_keyword_example() -> tuple[Instance, list[Decision]]:
    """Canonical two-keyword walkthrough: the first keyword goes to a
    4-bidder priced by a 3-bid, draining its budget to 3; its 6-bid on the
    second keyword then clamps to 3 and prices the second winner."""
    inst = Instance(
        FLAVOR_2PAA,
        ["u1", "u2"],
        [("v1", 6), ("v2", 3), ("v3", 5)],
        {
            ("u1", "v1"): 4,
            ("u1", "v2"): 3,
            ("u2", "v1"): 6,
            ("u2", "v3"): 3,
        },
    )
    replay = [Decision("v1", "v2"), Decision("v3", "v1")]
    return inst, replay


# 20 balanced-partition yes-instances: (weights, c, witness subset)
PARTITION_FIXTURES: list[tuple[tuple[int, ...], int, tuple[int, ...]]] = [
    ((1, 1), 1, (0,)),
    ((2, 2), 1, (0,)),
    ((3, 3), 1, (0,)),
    ((5, 5), 1, (0,)),
    ((1, 1), 2, (0,)),
    ((3, 3), 2, (0,)),
    ((1, 1, 1, 1), 1, (0, 1)),
    ((2, 1, 1, 2), 1, (0, 1)),
    ((1, 2, 3, 2), 1, (0, 2)),
    ((5, 1, 2, 4), 1, (0, 1)),
    ((3, 3, 3, 3), 1, (0, 1)),
    ((2, 2, 4, 4), 1, (0, 2)),
    ((1, 1, 1, 1), 2, (0, 1)),
    ((2, 1, 1, 2), 2, (0, 1)),
    ((1, 1, 1, 1, 1, 1), 1, (0, 1, 2)),
    ((2, 1, 1, 2, 1, 1), 1, (0, 1, 2)),
    ((1, 2, 3, 3, 2, 1), 1, (0, 1, 2)),
    ((4, 1, 1, 2, 3, 1), 1, (0, 1, 2)),
    ((3, 1, 2, 2, 1, 3), 2, (0, 1, 3)),
    ((2, 2, 2, 2, 2, 2), 2, (0, 1, 2)),
]


def _unit_instance(neighbor_sets: Sequence[Sequence[int]], num_bidders: int) -> Instance:
    keywords = [f"u{i}" for i in range(len(neighbor_sets))]
    bidders = [(f"v{j}", 1) for j in range(num_bidders)]
    bids = {
        (keywords[i], f"v{j}"): 1
        for i, nbrs in enumerate(neighbor_sets)
        for j in nbrs
    }
    return Instance(FLAVOR_2PM, keywords, bidders, bids)


def _exhaustive_2pm_family(max_keywords: int = 2, max_bidders: int = 4):
    """All unit instances with small dimensions and keyword degree >= 2."""
    for num_bidders in range(2, max_bidders + 1):
        options = [
            combo
            for size in range(2, num_bidders + 1)
            for combo in combinations(range(num_bidders), size)
        ]
        for num_keywords in range(1, max_keywords + 1):
            for sets in product(options, repeat=num_keywords):
                yield _unit_instance(sets, num_bidders)


def _sampled_2pm_instance(rng: Rng, max_keywords: int = 6, max_bidders: int = 6) -> Instance:
    num_keywords = 1 + rng.below(max_keywords)
    num_bidders = 2 + rng.below(max_bidders - 1)
    sets = []
    for _ in range(num_keywords):
        degree = 2 + rng.below(num_bidders - 1)
        sets.append(rng.sample_indices(num_bidders, degree))
    return _unit_instance(sets, num_bidders)


def _float(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


def suite_arbiter_replay(seed: int) -> VerifyReport:
    inst, replay = two_keyword_example()
    state = AuctionState.initial(inst)
    state, price1 = apply_decision(inst, state, replay[0])
    rem = state.remaining["v1"]
    state, price2 = apply_decision(inst, state, replay[1])
    total = run_allocation(inst, replay).total
    checks = [
        Check("price-1", "first keyword realizes price 3", str(price1), price1 == 3),
        Check("budget", "winner's remaining budget is 3", str(rem), rem == 3),
        Check("price-2", "clamped bid prices keyword 2 at 3", str(price2), price2 == 3),
        Check("total", "replayed total is 6", str(total), total == 6),
    ]
    return VerifyReport("arbiter-replay", seed, {}, checks)


def suite_reverse_match(seed: int, samples: int = 100_000) -> VerifyReport:
    rng = Rng(seed)
    count = 0
    bad_half_opt = 0
    bad_half_matching = 0
    worst = Fraction(1)

    def examine(inst: Instance) -> None:
        nonlocal count, bad_half_opt, bad_half_matching, worst
        count += 1
        total = reverse_match(inst)[1].total
        msize = maximum_bipartite_matching(inst).size
        opt = brute_force_2pm_opt(inst)[1].total
        if 2 * total < opt:
            bad_half_opt += 1
        if total < (msize + 1) // 2:
            bad_half_matching += 1
        if total:
            worst = max(worst, Fraction(opt, total))

    for inst in _exhaustive_2pm_family():
        if count >= samples:
            break
        examine(inst)
    while count < samples:
        examine(_sampled_2pm_instance(rng))

    checks = [
        Check(
            "half-of-optimum",
            "value * 2 >= exact optimum on every instance",
            f"violations={bad_half_opt}/{count}, max OPT/value={worst}",
            bad_half_opt == 0,
        ),
        Check(
            "half-of-matching",
            "value >= ceil(|matching| / 2) on every instance",
            f"violations={bad_half_matching}/{count}",
            bad_half_matching == 0,
        ),
    ]
    return VerifyReport("reverse-match", seed, {"samples": samples}, checks)


def suite_vc_lemma(seed: int, max_vertices: int = 5) -> VerifyReport:
    graphs = 0
    violations = 0
    for n in range(max_vertices + 1):
        all_edges = list(combinations(range(n), 2))
        for bits in range(1 << len(all_edges)):
            edges = tuple(e for i, e in enumerate(all_edges) if bits >> i & 1)
            graph = SimpleGraph(n, edges)
            inst, _ = gen_vc_2pm(graph)
            opt2p = brute_force_2pm_opt(inst)[1].total
            expected = 2 * n + len(edges) - min_vertex_cover_size(graph)
            graphs += 1
            if opt2p != expected:
                violations += 1
    checks = [
        Check(
            "cover-identity",
            "optimum equals 2|V| + |E| - min vertex cover on every graph",
            f"violations={violations}/{graphs}",
            violations == 0,
        )
    ]
    return VerifyReport("vc-lemma", seed, {"max_vertices": max_vertices}, checks)


def suite_sat_reduction(seed: int, samples: int = 10_000) -> VerifyReport:
    rng = Rng(seed)
    violations = 0
    satisfiable_seen = 0
    for _ in range(samples):
        n = 3 + rng.below(2)
        k = 1 + rng.below(4)
        clauses = []
        for _ in range(k):
            variables = rng.sample_indices(n, 3)
            clauses.append(
                tuple((v + 1) * (1 if rng.coin() else -1) for v in variables)
            )
        formula = SatFormula(n, tuple(clauses))
        sat = is_satisfiable(formula)
        satisfiable_seen += sat
        opt = brute_force_2pm_opt(gen_3sat_2pm(formula))[1].total
        if (opt == n + k) != sat:
            violations += 1
    checks = [
        Check(
            "value-iff-satisfiable",
            "optimum reaches #vars + #clauses exactly on satisfiable formulas",
            f"violations={violations}/{samples} ({satisfiable_seen} satisfiable)",
            violations == 0,
        )
    ]
    return VerifyReport("sat-reduction", seed, {"samples": samples}, checks)


def suite_partition_witness(seed: int) -> VerifyReport:
    exact = 0
    failures = []
    for weights, c, subset in PARTITION_FIXTURES:
        inst = gen_partition_2paa(weights, c)
        witness = replay_partition_witness(weights, c, subset)
        try:
            total = run_allocation(inst, witness).total
        except AuctionError:
            failures.append((weights, c))
            continue
        if total == partition_witness_value(weights, c):
            exact += 1
        else:
            failures.append((weights, c))
    checks = [
        Check(
            "witness-replay",
            "every witness replays without error to c*W*(n^5+n+2)",
            f"exact={exact}/{len(PARTITION_FIXTURES)} failures={failures}",
            not failures,
        )
    ]
    return VerifyReport("partition-witness", seed, {}, checks)


def suite_adversary(seed: int, m: int = 20) -> VerifyReport:
    checks = []
    for label, factory in (("greedy", GreedyMatcher), ("trivial", TrivialFirst)):
        game = deterministic_adversary(m, factory())
        got = game.ledger.total
        wit = game.witness_ledger.total
        checks.append(
            Check(
                f"vs-{label}",
                f"algorithm earns at most 1 while the witness replays to {m}",
                f"algorithm={got}, witness={wit}",
                got <= 1 and wit == m,
            )
        )
    return VerifyReport("adversary", seed, {"m": m}, checks)


def suite_greedy_chain(seed: int, m: int = 10, trials: int = 100_000) -> VerifyReport:
    target = (m + 1) / 2
    checks = []
    for label, randomized in (("expected-value", False), ("tie-break-free", True)):
        acc = Welford()
        for i in range(trials):
            rng = Rng(seed + i)
            chain = sample_chain(m, rng)
            tie = rng if randomized else None
            acc.push(float(greedy_2pm(chain.instance, tie_break=tie)[1].total))
        stats = acc.stats()
        band = 3 * stats.std_error
        deviation = abs(stats.mean - target)
        how = "random-winner" if randomized else "lowest-index"
        checks.append(
            Check(
                label,
                f"greedy ({how}) mean on the chain distribution is {target} within 3 s.e.",
                f"mean={_float(stats.mean)}, |dev|={_float(deviation)}, 3se={_float(band)}",
                deviation <= band,
            )
        )
    return VerifyReport("greedy-chain", seed, {"m": m, "trials": trials}, checks)


def _random_bipartite(rng: Rng, max_side: int = 12) -> BipartiteGraph:
    num_keywords = 1 + rng.below(max_side)
    num_bidders = 1 + rng.below(max_side)
    prob = (10 + rng.below(90)) / 100
    keywords = [f"u{i}" for i in range(num_keywords)]
    bidders = [f"v{j}" for j in range(num_bidders)]
    adj = {
        u: tuple(v for v in bidders if rng.chance(prob)) for u in keywords
    }
    return BipartiteGraph(keywords, bidders, adj)


def suite_duality(seed: int, triples: int = 1000, deletions: int = 1000) -> VerifyReport:
    rng = Rng(seed)
    mismatches = 0
    for _ in range(triples):
        graph = _random_bipartite(rng)
        pi = list(graph.keywords)
        rng.shuffle(pi)
        sigma = Ranking.random(graph.bidders, rng)
        if ranking(graph, pi, sigma).edges() != ranking_prime(graph, pi, sigma).edges():
            mismatches += 1
    increases = 0
    for _ in range(deletions):
        graph = _random_bipartite(rng)
        pi = list(graph.keywords)
        rng.shuffle(pi)
        sigma = Ranking.random(graph.bidders, rng)
        before = ranking(graph, pi, sigma).size
        everyone = list(graph.keywords) + list(graph.bidders)
        victim = everyone[rng.below(len(everyone))]
        smaller = graph.without_vertex(victim)
        pi2 = [u for u in pi if u != victim]
        sigma2 = sigma.induced(smaller.bidders)
        after = ranking(smaller, pi2, sigma2).size
        if after > before:
            increases += 1
    checks = [
        Check(
            "arrival-rank-duality",
            "keyword-arrival and bidder-arrival forms give identical edge sets",
            f"mismatches={mismatches}/{triples}",
            mismatches == 0,
        ),
        Check(
            "deletion-monotonicity",
            "deleting one vertex never increases the matching size",
            f"increases={increases}/{deletions}",
            increases == 0,
        ),
    ]
    return VerifyReport(
        "duality", seed, {"triples": triples, "deletions": deletions}, checks
    )


def suite_kcopy_ranking(
    seed: int,
    n: int = 100,
    trials: int = 2000,
    ks: Sequence[int] = (1, 2, 3),
    edge_prob: float = 0.05,
) -> VerifyReport:
    checks = []
    for k in ks:
        inst = gen_random_2pm(n, n, edge_prob, seed + k, planted=True)
        graph = graph_from_instance(inst)
        opt_first_price = maximum_bipartite_matching(inst).size
        copied, _ = left_k_copy(graph, k)
        acc = Welford()
        for i in range(trials):
            sigma = Ranking.random(graph.bidders, Rng(seed + 1000 * k + i))
            acc.push(float(ranking(copied, None, sigma).size))
        stats = acc.stats()
        bound = k * n * (1 - math.exp(-1.0 / k)) - 0.05 * k * n
        checks.append(
            Check(
                f"k={k}",
                f"mean matching on the {k}-fold copy >= k*n*(1-e^(-1/k)) - 0.05*k*n",
                f"mean={_float(stats.mean)}, bound={_float(bound)}, "
                f"planted optimum={opt_first_price}",
                stats.mean >= bound and opt_first_price == n,
            )
        )
    return VerifyReport(
        "kcopy-ranking",
        seed,
        {"n": n, "trials": trials, "ks": list(ks), "edge_prob": edge_prob},
        checks,
    )


def suite_coupling(seed: int, sigmas: int = 10, trials: int = 100_000) -> VerifyReport:
    inst = gen_random_2pm(6, 6, 0.5, seed)
    graph = graph_from_instance(inst)
    copied, _ = left_k_copy(graph, 2)
    bidders = list(graph.bidders)
    structural_violations = 0
    max_deviation = 0.0
    band = 3 * math.sqrt(0.25 / trials)
    frequency_ok = True
    for j in range(sigmas):
        sigma = Ranking.random(bidders, Rng(seed + 5000 + j))
        reachable = frozenset(ranking(copied, None, sigma).pairs.values())
        counts = {v: 0 for v in bidders}
        for i in range(trials):
            coins = CoinStream(seed + j * trials + i)
            _, _, state = ranking_simulate(inst, sigma, coins)
            if state.matched | state.reserved != reachable:
                structural_violations += 1
            for v in state.matched:
                counts[v] += 1
        for v in bidders:
            target = 0.5 if v in reachable else 0.0
            deviation = abs(counts[v] / trials - target)
            tolerance = band if v in reachable else 0.0
            max_deviation = max(max_deviation, deviation)
            if deviation > tolerance:
                frequency_ok = False
    checks = [
        Check(
            "entry-set-identity",
            "matched-or-reserved set equals the copy-matching's bidder set, every trial",
            f"violations={structural_violations}/{sigmas * trials}",
            structural_violations == 0,
        ),
        Check(
            "half-frequency",
            "per-bidder match frequency is (copy-matched)/2 within 3 s.e.",
            f"max |dev|={_float(max_deviation)}, 3se={_float(band)}",
            frequency_ok,
        ),
    ]
    return VerifyReport(
        "coupling", seed, {"sigmas": sigmas, "trials": trials}, checks
    )


def suite_ranking_sim(
    seed: int, n: int = 100, trials: int = 2000, edge_prob: float = 0.05
) -> VerifyReport:
    inst = gen_random_2pm(n, n, edge_prob, seed, planted=True)
    matching_size = maximum_bipartite_matching(inst).size
    acc = Welford()
    for i in range(trials):
        rng = Rng(seed + i)
        sigma = Ranking.random([v for v, _ in inst.bidders], rng)
        coins = CoinStream(rng.next_u64())
        acc.push(float(ranking_simulate(inst, sigma, coins)[1].total))
    stats = acc.stats()
    threshold = 0.18 * matching_size
    checks = [
        Check(
            "profit-floor",
            "mean realized profit >= 0.18 * maximum matching size",
            f"mean={_float(stats.mean)}, threshold={_float(threshold)}, "
            f"matching={matching_size}",
            stats.mean >= threshold,
        )
    ]
    return VerifyReport(
        "ranking-sim",
        seed,
        {"n": n, "trials": trials, "edge_prob": edge_prob},
        checks,
    )


def suite_random_construction(
    seed: int, instances: int = 50, trials: int = 100_000
) -> VerifyReport:
    rng = Rng(seed)
    value_violations = 0
    feasibility_violations = 0
    dominance_violations = 0
    min_margin = math.inf
    for idx in range(instances):
        inst = gen_random_2paa(
            num_keywords=1 + rng.below(4),
            num_bidders=2 + rng.below(3),
            seed=seed + 10_000 + idx,
            max_budget=10,
        )
        prime = second_price_proxy_bids(inst)
        assignment, first_price_opt = brute_force_1paa_opt(prime)
        fp = normalize_prefix_budget(prime, assignment)
        normalized_value = first_price_value(prime, fp.assignment)[0]
        second_price_opt = brute_force_2paa_opt(inst)[1].total
        if first_price_opt < second_price_opt or normalized_value != first_price_opt:
            dominance_violations += 1
        sampler = RandomConstructionSampler(inst, fp)
        acc = Welford()
        for i in range(trials):
            try:
                acc.push(float(sampler.sample(seed + idx * trials + i)[1].total))
            except AuctionError:
                feasibility_violations += 1
        stats = acc.stats()
        floor = first_price_opt / 8 - 3 * stats.std_error
        margin = stats.mean - floor
        min_margin = min(min_margin, margin)
        if margin < 0:
            value_violations += 1
    checks = [
        Check(
            "eighth-of-value",
            "Monte Carlo mean >= first-price value / 8 within 3 s.e., per instance",
            f"violations={value_violations}/{instances}, "
            f"min margin={_float(min_margin)}",
            value_violations == 0,
        ),
        Check(
            "feasible-replay",
            "every sampled allocation replays without arbiter error",
            f"violations={feasibility_violations}",
            feasibility_violations == 0,
        ),
        Check(
            "first-price-dominance",
            "first-price optimum of the proxy instance >= second-price optimum",
            f"violations={dominance_violations}/{instances}",
            dominance_violations == 0,
        ),
    ]
    return VerifyReport(
        "random-construction",
        seed,
        {"instances": instances, "trials": trials},
        checks,
    )


def suite_top_c(
    seed: int, instances: int = 100, cs: Sequence[int] = (1, 2, 4)
) -> VerifyReport:
    rng = Rng(seed)
    violations = 0
    for idx in range(instances):
        c = cs[idx % len(cs)]
        inst = gen_random_2paa(
            num_keywords=4 + rng.below(5),
            num_bidders=3 + rng.below(4),
            seed=seed + 20_000 + idx,
            max_budget=10,
            rmin_floor=c,
        )
        total = top_c_allocate(inst, c)[1].total
        m = inst.num_keywords
        if m * total < c * second_price_upper_bound(inst):
            violations += 1
    checks = [
        Check(
            "fraction-of-upper-bound",
            "value >= (c/m) * sum of second-highest bids, exactly",
            f"violations={violations}/{instances}",
            violations == 0,
        )
    ]
    return VerifyReport(
        "top-c", seed, {"instances": instances, "cs": list(cs)}, checks
    )


SUITES: dict[str, Callable[..., VerifyReport]] = {
    "arbiter-replay": suite_arbiter_replay,
    "reverse-match": suite_reverse_match,
    "vc-lemma": suite_vc_lemma,
    "sat-reduction": suite_sat_reduction,
    "partition-witness": suite_partition_witness,
    "adversary": suite_adversary,
    "greedy-chain": suite_greedy_chain,
    "duality": suite_duality,
    "kcopy-ranking": suite_kcopy_ranking,
    "coupling": suite_coupling,
    "ranking-sim": suite_ranking_sim,
    "random-construction": suite_random_construction,
    "top-c": suite_top_c,
}


def run_suite(name: str, seed: int = DEFAULT_SEED, **params) -> VerifyReport:
    try:
        suite = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; known: {', '.join(SUITES)}") from None
    return suite(seed, **params)
