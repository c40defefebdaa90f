"""Constructive instance generators: reductions from partition, 3-CNF
satisfiability and vertex cover, the adversarial chain family for online
lower bounds, keyword duplication, and random instance families for the
test corpus.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from .graphs import BipartiteGraph
from .model import (
    FLAVOR_2PAA,
    FLAVOR_2PM,
    Decision,
    Instance,
    Ledger,
    run_allocation,
)
from .online import OnlineAlgorithm
from .rng import Rng


# ---------------------------------------------------------------------------
# Formula and graph inputs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SatFormula:
    """3-CNF formula: clauses are triples of signed 1-based variable
    indices (positive = plain literal, negative = negated)."""

    num_vars: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        for clause in self.clauses:
            if len(clause) != 3:
                raise ValueError("clauses must have exactly 3 literals")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} out of range")


def parse_dimacs(text: str) -> SatFormula:
    """Parse DIMACS CNF; every clause must have exactly three literals."""
    num_vars = None
    clauses = []
    current: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            num_vars = int(parts[2])
            continue
        for token in line.split():
            lit = int(token)
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(tuple(current))
    if num_vars is None:
        num_vars = max((abs(l) for cl in clauses for l in cl), default=0)
    return SatFormula(num_vars, tuple(clauses))


def is_satisfiable(formula: SatFormula) -> bool:
    """Brute-force satisfiability over all assignments (small n only)."""
    for bits in range(1 << formula.num_vars):
        ok = True
        for clause in formula.clauses:
            if not any(
                (bits >> (abs(l) - 1)) & 1 == (1 if l > 0 else 0) for l in clause
            ):
                ok = False
                break
        if ok:
            return True
    return False


@dataclass(frozen=True)
class SimpleGraph:
    """Undirected simple graph on vertices 0..n-1."""

    num_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        for a, b in self.edges:
            if a == b:
                raise ValueError("self-loops are not allowed")
            if not (0 <= a < self.num_vertices and 0 <= b < self.num_vertices):
                raise ValueError(f"edge ({a}, {b}) out of range")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise ValueError(f"duplicate edge ({a}, {b})")
            seen.add(key)


def parse_edge_list(text: str) -> SimpleGraph:
    """Edge-list text: one 'a b' pair per line (0-based); lines starting
    with '#' are comments.  An optional first line with a single integer
    fixes the vertex count."""
    edges = []
    num_vertices = None
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) == 1 and num_vertices is None and not edges:
            num_vertices = int(parts[0])
            continue
        a, b = int(parts[0]), int(parts[1])
        edges.append((a, b))
    if num_vertices is None:
        num_vertices = max((max(a, b) for a, b in edges), default=-1) + 1
    return SimpleGraph(num_vertices, tuple(edges))


def min_vertex_cover_size(graph: SimpleGraph) -> int:
    """Exhaustive minimum vertex cover (small graphs only)."""
    n = graph.num_vertices
    for size in range(n + 1):
        for cover in combinations(range(n), size):
            chosen = set(cover)
            if all(a in chosen or b in chosen for a, b in graph.edges):
                return size
    return n


# ---------------------------------------------------------------------------
# Reduction from the balanced partition problem
# ---------------------------------------------------------------------------


def gen_partition_2paa(weights: Sequence[int], c: int) -> Instance:
    """Budgeted-auction instance encoding a balanced-partition question.

    For n even weights with sum W the instance has keywords
    c_1..c_n, e_1, e_2 followed by a block of c*n^2 keywords g_{i,k},
    and bidders a, d_1, d_2, f, h_1..h_{n^2}.  Bidders a, d_1, d_2 bid
    c*(w_i + W) on c_i; d_j bids c*W on e_j while f bids c*W/2 there; on
    each g_{i,k}, f bids W*(n^3+1) against h_i's W*n^3.  Budgets:
    c*W*(1 + n/2) for a/d_1/d_2, c*W*(n^3+1) for f, c*W*n^3 for each h_i.
    A balanced partition is exactly what lets d_1 and d_2 burn down to
    c*W/2 so that f can win both e-keywords and the g-block pays out in
    full.  Requires c*W even so that f's e-bid is integral.
    """
    n = len(weights)
    if n < 2 or n % 2 != 0:
        raise ValueError("need an even number of weights, at least 2")
    if any(w <= 0 for w in weights):
        raise ValueError("weights must be positive")
    if c < 1:
        raise ValueError("c must be a positive integer")
    W = sum(weights)
    if (c * W) % 2 != 0:
        raise ValueError("c * sum(weights) must be even")

    c_keywords = [f"c{i}" for i in range(1, n + 1)]
    e_keywords = ["e1", "e2"]
    g_keywords = [
        f"g{i}_{k}" for i in range(1, n * n + 1) for k in range(1, c + 1)
    ]
    keywords = c_keywords + e_keywords + g_keywords

    bidders = [
        ("a", c * W * (1 + n // 2)),
        ("d1", c * W * (1 + n // 2)),
        ("d2", c * W * (1 + n // 2)),
        ("f", c * W * (n**3 + 1)),
    ]
    bidders += [(f"h{i}", c * W * n**3) for i in range(1, n * n + 1)]

    bids: dict[tuple[str, str], int] = {}
    for i, w in enumerate(weights, start=1):
        for v in ("a", "d1", "d2"):
            bids[(f"c{i}", v)] = c * (w + W)
    bids[("e1", "d1")] = c * W
    bids[("e2", "d2")] = c * W
    bids[("e1", "f")] = c * W // 2
    bids[("e2", "f")] = c * W // 2
    for i in range(1, n * n + 1):
        for k in range(1, c + 1):
            bids[(f"g{i}_{k}", "f")] = W * (n**3 + 1)
            bids[(f"g{i}_{k}", f"h{i}")] = W * n**3

    return Instance(FLAVOR_2PAA, keywords, bidders, bids)


def partition_hardness_premises(n: int, c: int, c_prime: Fraction) -> bool:
    """Advisory check of the two asymptotic inequalities under which the
    generated family certifies inapproximability (they do not constrain
    the construction itself): c' * c(n^5+n+2)/(cn^2+n+2) >= c(n^3+cn^2+n+2)
    and (n/2 + 1)/2 >= c."""
    lhs = Fraction(c_prime) * Fraction(c * (n**5 + n + 2), c * n * n + n + 2)
    rhs = c * (n**3 + c * n * n + n + 2)
    return lhs >= rhs and Fraction(n, 2) + 1 >= 2 * c


def replay_partition_witness(
    weights: Sequence[int], c: int, subset: Sequence[int]
) -> list[Decision]:
    """Decision sequence certifying a yes-instance: c_i goes to d_1 for i
    in the subset (0-based) and to d_2 otherwise, always with a second;
    f wins both e-keywords priced by the drained d-bidders; f then soaks
    up g_{1,1}..g_{1,c-1} priced by h_1, and every remaining g-keyword
    goes to its h-bidder priced by f.  Replays to c*W*(n^5 + n + 2)."""
    n = len(weights)
    W = sum(weights)
    chosen = set(subset)
    if any(i < 0 or i >= n for i in chosen):
        raise ValueError("subset indices out of range")
    if len(chosen) != n // 2 or 2 * sum(weights[i] for i in chosen) != W:
        raise ValueError("subset is not a balanced partition")

    decisions = []
    for i in range(n):
        decisions.append(Decision("d1" if i in chosen else "d2", "a"))
    decisions.append(Decision("f", "d1"))
    decisions.append(Decision("f", "d2"))
    for i in range(1, n * n + 1):
        for k in range(1, c + 1):
            if i == 1 and k < c:
                decisions.append(Decision("f", "h1"))
            else:
                decisions.append(Decision(f"h{i}", "f"))
    return decisions


def partition_witness_value(weights: Sequence[int], c: int) -> int:
    n = len(weights)
    W = sum(weights)
    return c * W * (n**5 + n + 2)


# ---------------------------------------------------------------------------
# Reduction from 3-CNF satisfiability
# ---------------------------------------------------------------------------


def gen_3sat_2pm(formula: SatFormula) -> Instance:
    """Matching instance whose optimum hits (#clauses + #vars) exactly on
    satisfiable formulas.

    Each variable keyword sees a true- and a false-assignment bidder; each
    clause keyword sees its own clause bidder plus, per literal, the
    assignment bidder of the *opposite* polarity (so a satisfied literal
    leaves that bidder unconsumed to price the clause keyword).  Variable
    keywords arrive first, then clause keywords.
    """
    n = formula.num_vars
    var_keywords = [f"var{i}" for i in range(1, n + 1)]
    clause_keywords = [f"cl{j}" for j in range(1, len(formula.clauses) + 1)]

    bidders = []
    for i in range(1, n + 1):
        bidders.append((f"x{i}_t", 1))
        bidders.append((f"x{i}_f", 1))
    bidders += [(f"b{j}", 1) for j in range(1, len(formula.clauses) + 1)]

    bids: dict[tuple[str, str], int] = {}
    for i in range(1, n + 1):
        bids[(f"var{i}", f"x{i}_t")] = 1
        bids[(f"var{i}", f"x{i}_f")] = 1
    for j, clause in enumerate(formula.clauses, start=1):
        bids[(f"cl{j}", f"b{j}")] = 1
        for lit in clause:
            polarity = "f" if lit > 0 else "t"
            bids[(f"cl{j}", f"x{abs(lit)}_{polarity}")] = 1

    return Instance(FLAVOR_2PM, var_keywords + clause_keywords, bidders, bids)


# ---------------------------------------------------------------------------
# Reduction from vertex cover
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VcLabels:
    """Name map for the vertex-cover construction."""

    vertex_bidder: dict[int, str]
    gadget_keywords: dict[int, tuple[str, str]]
    gadget_bidders: dict[int, tuple[str, str]]
    edge_keyword: dict[tuple[int, int], str]
    edge_bidder: dict[tuple[int, int], str]


def gen_vc_2pm(graph: SimpleGraph) -> tuple[Instance, VcLabels]:
    """Matching instance whose optimum equals 2|V| + |E| minus the size of
    a minimum vertex cover.

    Per vertex v a two-keyword gadget (h_v then l_v) over bidders v, y_v,
    z_v; per edge e a keyword bid on by both endpoint bidders and a
    private bidder x_e.  Gadgets arrive in vertex order before all edge
    keywords (input edge order).
    """
    keywords = []
    bidders = []
    bids: dict[tuple[str, str], int] = {}
    vertex_bidder = {}
    gadget_keywords = {}
    gadget_bidders = {}
    for v in range(graph.num_vertices):
        vb, yb, zb = f"v{v}", f"y{v}", f"z{v}"
        hk, lk = f"h{v}", f"l{v}"
        vertex_bidder[v] = vb
        gadget_keywords[v] = (hk, lk)
        gadget_bidders[v] = (yb, zb)
        bidders += [(vb, 1), (yb, 1), (zb, 1)]
        keywords += [hk, lk]
        bids[(hk, vb)] = 1
        bids[(hk, yb)] = 1
        bids[(lk, yb)] = 1
        bids[(lk, zb)] = 1

    edge_keyword = {}
    edge_bidder = {}
    for a, b in graph.edges:
        key = (min(a, b), max(a, b))
        ek = f"e{key[0]}_{key[1]}"
        xb = f"x{key[0]}_{key[1]}"
        edge_keyword[key] = ek
        edge_bidder[key] = xb
        bidders.append((xb, 1))
        keywords.append(ek)
        bids[(ek, vertex_bidder[a])] = 1
        bids[(ek, vertex_bidder[b])] = 1
        bids[(ek, xb)] = 1

    inst = Instance(FLAVOR_2PM, keywords, bidders, bids)
    labels = VcLabels(
        vertex_bidder, gadget_keywords, gadget_bidders, edge_keyword, edge_bidder
    )
    return inst, labels


# ---------------------------------------------------------------------------
# Chain family for online lower bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChainInstance:
    """Chain-structured 2pm instance: keyword 1 sees two fresh bidders and
    each later keyword sees one bidder carried over from its predecessor
    (selected by a choice bit) plus one fresh bidder.  ``marked`` is the
    pre-consumed first-keyword bidder of the restricted variant."""

    instance: Instance
    pairs: tuple[tuple[str, str], ...]
    marked: Optional[str]


def gen_chain_instance(
    m: int, bits: Sequence[int], restricted: bool = False
) -> ChainInstance:
    if m < 1:
        raise ValueError("need at least one keyword")
    if len(bits) != m - 1:
        raise ValueError(f"need exactly {m - 1} choice bits")
    keywords = [f"u{t}" for t in range(1, m + 1)]
    bidder_ids = [f"v{j}" for j in range(1, m + 2)]
    pairs = [(bidder_ids[0], bidder_ids[1])]
    for t in range(1, m):
        carried = pairs[t - 1][1] if bits[t - 1] else pairs[t - 1][0]
        pairs.append((carried, bidder_ids[t + 1]))
    bids = {}
    for u, (x, y) in zip(keywords, pairs):
        bids[(u, x)] = 1
        bids[(u, y)] = 1
    inst = Instance(
        FLAVOR_2PM, keywords, [(v, 1) for v in bidder_ids], bids
    )
    return ChainInstance(inst, tuple(pairs), bidder_ids[0] if restricted else None)


def sample_chain(m: int, rng: Rng, restricted: bool = False) -> ChainInstance:
    bits = [rng.coin() for _ in range(m - 1)]
    return gen_chain_instance(m, bits, restricted)


# ---------------------------------------------------------------------------
# Adaptive adversary for deterministic online algorithms
# ---------------------------------------------------------------------------


@dataclass
class AdversaryGame:
    """Transcript of one adversary game: the realized static instance, the
    algorithm's decisions and ledger, and a witness allocation whose
    replayed value is the keyword count."""

    instance: Instance
    decisions: list[Decision]
    ledger: Ledger
    witness: list[Decision]
    witness_ledger: Ledger
    matched_at: Optional[int]


def deterministic_adversary(m: int, algorithm: OnlineAlgorithm) -> AdversaryGame:
    """Referee for the adaptive lower-bound game.

    Fresh bidder pairs are shown until the opponent first assigns some
    keyword; from then on every keyword is adjacent to the bidder the
    opponent consumed plus one fresh bidder, so no later keyword can earn
    it anything.  The recorded instance always admits an allocation of
    value m (returned as the witness): pre-match keywords pair up their
    fresh bidders, the pivotal keyword goes to the bidder the opponent did
    not take, and later keywords go to their fresh bidders priced by the
    opponent's bidder, which the witness never consumes.
    """
    if m < 1:
        raise ValueError("need at least one keyword")
    algorithm.begin([])
    keywords = []
    bidder_ids: list[str] = []
    neighborhoods: list[tuple[str, ...]] = []
    decisions: list[Decision] = []
    routed: Optional[str] = None
    matched_at: Optional[int] = None

    for t in range(1, m + 1):
        u = f"u{t}"
        if routed is None:
            nbrs = (f"a{t}", f"b{t}")
            bidder_ids += list(nbrs)
        else:
            fresh = f"c{t}"
            nbrs = (routed, fresh)
            bidder_ids.append(fresh)
        keywords.append(u)
        neighborhoods.append(nbrs)
        decision = algorithm.on_arrival(u, {v: 1 for v in nbrs})
        for named in (decision.first, decision.second):
            if named is not None and named not in nbrs:
                raise ValueError(f"algorithm named non-adjacent bidder {named}")
        decisions.append(decision)
        if routed is None and not decision.is_skip:
            routed = decision.first
            matched_at = t

    inst = Instance(
        FLAVOR_2PM,
        keywords,
        [(v, 1) for v in bidder_ids],
        {(u, v): 1 for u, nbrs in zip(keywords, neighborhoods) for v in nbrs},
    )
    ledger = run_allocation(inst, decisions)

    witness = []
    for t, nbrs in enumerate(neighborhoods, start=1):
        if matched_at is None or t < matched_at:
            witness.append(Decision(nbrs[0], nbrs[1]))
        elif t == matched_at:
            other = nbrs[0] if nbrs[1] == routed else nbrs[1]
            witness.append(Decision(other, routed))
        else:
            fresh = nbrs[0] if nbrs[1] == routed else nbrs[1]
            witness.append(Decision(fresh, routed))
    witness_ledger = run_allocation(inst, witness)

    return AdversaryGame(inst, decisions, ledger, witness, witness_ledger, matched_at)


# ---------------------------------------------------------------------------
# Keyword duplication
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LeftCopyMap:
    """Copy keyword -> source keyword map of a keyword-side duplication."""

    zeta: dict[str, str]
    k: int


def left_k_copy(graph: BipartiteGraph, k: int) -> tuple[BipartiteGraph, LeftCopyMap]:
    """Duplicate every keyword k times, preserving neighborhoods; the k
    copies of a keyword arrive consecutively, in source arrival order."""
    if k < 1:
        raise ValueError("k must be at least 1")
    keywords = []
    adj = {}
    zeta = {}
    for u in graph.keywords:
        for j in range(1, k + 1):
            cu = f"{u}~{j}"
            keywords.append(cu)
            adj[cu] = graph.adj[u]
            zeta[cu] = u
    return BipartiteGraph(keywords, list(graph.bidders), adj), LeftCopyMap(zeta, k)


# ---------------------------------------------------------------------------
# Random families
# ---------------------------------------------------------------------------


def gen_random_2pm(
    num_keywords: int,
    num_bidders: int,
    edge_prob: float,
    seed: int,
    planted: bool = False,
) -> Instance:
    """Random unit instance; keyword neighborhoods are resampled until
    they have degree >= 2.  With ``planted`` (requires equal sides), a
    random perfect matching is added before the random edges."""
    if num_bidders < 2:
        raise ValueError("need at least two bidders for degree 2")
    if not 0 < edge_prob <= 1:
        raise ValueError("edge probability must be in (0, 1]")
    if planted and num_keywords != num_bidders:
        raise ValueError("a planted perfect matching needs equal sides")
    rng = Rng(seed)
    keywords = [f"u{i}" for i in range(num_keywords)]
    bidder_ids = [f"v{j}" for j in range(num_bidders)]
    planted_mate = {}
    if planted:
        perm = list(range(num_bidders))
        rng.shuffle(perm)
        planted_mate = {keywords[i]: bidder_ids[perm[i]] for i in range(num_keywords)}
    bids = {}
    for u in keywords:
        while True:
            nbrs = {j for j in range(num_bidders) if rng.chance(edge_prob)}
            if u in planted_mate:
                nbrs.add(bidder_ids.index(planted_mate[u]))
            if len(nbrs) >= 2:
                break
        for j in nbrs:
            bids[(u, bidder_ids[j])] = 1
    return Instance(FLAVOR_2PM, keywords, [(v, 1) for v in bidder_ids], bids)


def gen_random_2paa(
    num_keywords: int,
    num_bidders: int,
    seed: int,
    max_budget: int = 10,
    rmin_floor: int = 1,
    bid_prob: float = 0.7,
) -> Instance:
    """Random budgeted instance with every bid at most budget/rmin_floor,
    so the budget/bid ratio is at least rmin_floor everywhere."""
    if rmin_floor < 1:
        raise ValueError("rmin_floor must be at least 1")
    if max_budget < 1:
        raise ValueError("max_budget must be at least 1")
    rng = Rng(seed)
    keywords = [f"u{i}" for i in range(num_keywords)]
    bidders = [
        (f"v{j}", rmin_floor * (1 + rng.below(max_budget)))
        for j in range(num_bidders)
    ]
    bids = {}
    for u in keywords:
        for v, budget in bidders:
            if rng.chance(bid_prob):
                bids[(u, v)] = rng.below(budget // rmin_floor + 1)
    if not any(bids.values()):
        # keep R_min well defined
        u = keywords[0]
        v, budget = bidders[0]
        bids[(u, v)] = max(budget // rmin_floor, 1)
    return Instance(FLAVOR_2PAA, keywords, bidders, bids)
