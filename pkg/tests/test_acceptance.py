"""Acceptance gate: every quantitative guarantee at its stated scale.

Each test runs one verification suite with the exact parameters and
tolerances pinned below and prints one PASS/FAIL line (run pytest with
``-s`` to see them live).  Exact checks have zero tolerance; statistical
checks use 3-standard-error bands or the explicit absolute slack recorded
in the suite's claim text.  Expect a couple of minutes of runtime for the
full gate.
"""

import pytest

from secondprice.verify import DEFAULT_SEED, run_suite

CRITERIA = [
    # (number, suite, params, summary)
    (1, "arbiter-replay", {}, "two-keyword replay: prices (3,3), total 6, budget 3"),
    (2, "reverse-match", {"samples": 100_000}, "value >= OPT/2 and >= ceil(|M|/2)"),
    (3, "vc-lemma", {"max_vertices": 5}, "OPT equals 2|V|+|E|-minVC on all graphs"),
    (4, "sat-reduction", {"samples": 10_000}, "OPT hits n+k iff satisfiable"),
    (5, "partition-witness", {}, "20 witnesses replay to c*W*(n^5+n+2)"),
    (6, "adversary", {"m": 20}, "online value <= 1 vs recorded optimum 20"),
    (7, "greedy-chain", {"m": 10, "trials": 100_000}, "chain mean = 5.5 within 3 s.e."),
    (8, "duality", {"triples": 1000, "deletions": 1000}, "dual forms identical; deletions monotone"),
    (9, "kcopy-ranking", {"n": 100, "trials": 2000, "ks": (1, 2, 3)},
     "mean >= k*n*(1-e^(-1/k)) - 0.05*k*n"),
    (10, "coupling", {"sigmas": 10, "trials": 100_000},
     "entry sets identical; match frequency = X_v/2 within 3 s.e."),
    (11, "ranking-sim", {"n": 100, "trials": 2000}, "mean profit >= 0.18 * matching size"),
    (12, "random-construction", {"instances": 50, "trials": 100_000},
     "mean >= value/8 within 3 s.e.; feasible; first-price dominates"),
    (13, "top-c", {"instances": 100, "cs": (1, 2, 4)}, "value >= (c/m) * sum of second bids"),
]


@pytest.mark.parametrize(
    "number,suite,params,summary",
    CRITERIA,
    ids=[f"criterion-{n:02d}-{s}" for n, s, _, _ in CRITERIA],
)
def test_acceptance_criterion(number, suite, params, summary):
    report = run_suite(suite, seed=DEFAULT_SEED, **params)
    verdict = "PASS" if report.passed else "FAIL"
    print(f"[{verdict}] criterion {number:2d} ({suite}): {summary}")
    assert report.passed, f"criterion {number} failed:\n{report.to_text()}"
