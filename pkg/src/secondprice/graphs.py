"""Bipartite graph helpers shared by the matching and online modules."""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import FLAVOR_2PM, Instance


@dataclass
class BipartiteGraph:
    """Keywords on the left (list order = arrival order), bidders on the
    right; adjacency stored per keyword in bidder-index order."""

    keywords: list[str]
    bidders: list[str]
    adj: dict[str, tuple[str, ...]]

    bidder_index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.keywords = list(self.keywords)
        self.bidders = list(self.bidders)
        self.bidder_index = {v: i for i, v in enumerate(self.bidders)}
        self.adj = {
            u: tuple(sorted(self.adj.get(u, ()), key=self.bidder_index.__getitem__))
            for u in self.keywords
        }

    def neighbors(self, u: str) -> tuple[str, ...]:
        return self.adj[u]

    def reverse_adj(self) -> dict[str, list[str]]:
        """Bidder -> keywords (in arrival order)."""
        rev: dict[str, list[str]] = {v: [] for v in self.bidders}
        for u in self.keywords:
            for v in self.adj[u]:
                rev[v].append(u)
        return rev

    def without_vertex(self, x: str) -> "BipartiteGraph":
        """Induced subgraph after deleting one keyword or one bidder;
        remaining orders are preserved."""
        if x in self.adj:
            keywords = [u for u in self.keywords if u != x]
            return BipartiteGraph(
                keywords, list(self.bidders), {u: self.adj[u] for u in keywords}
            )
        if x in self.bidder_index:
            bidders = [v for v in self.bidders if v != x]
            adj = {
                u: tuple(v for v in self.adj[u] if v != x) for u in self.keywords
            }
            return BipartiteGraph(list(self.keywords), bidders, adj)
        raise KeyError(f"no vertex {x!r} in graph")


def graph_from_instance(inst: Instance) -> BipartiteGraph:
    if inst.flavor != FLAVOR_2PM:
        raise ValueError("graph view requires a 2pm instance")
    return BipartiteGraph(
        list(inst.keywords),
        [v for v, _ in inst.bidders],
        {u: inst.bidders_for(u) for u in inst.keywords},
    )


def instance_from_graph(graph: BipartiteGraph) -> Instance:
    """Unit-budget/unit-bid instance over the graph (degree >= 2 is the
    caller's responsibility)."""
    return Instance(
        flavor=FLAVOR_2PM,
        keywords=list(graph.keywords),
        bidders=[(v, 1) for v in graph.bidders],
        bids={(u, v): 1 for u in graph.keywords for v in graph.adj[u]},
    )


def maximum_matching_pairs(graph: BipartiteGraph) -> dict[str, str]:
    """Maximum-cardinality matching via augmenting paths (Kuhn's method).

    Keywords are scanned in arrival order and neighbors in bidder-index
    order, so the result is deterministic.
    """
    match_of_bidder: dict[str, str] = {}
    match_of_keyword: dict[str, str] = {}

    def try_augment(u: str, seen: set[str]) -> bool:
        for v in graph.adj[u]:
            if v in seen:
                continue
            seen.add(v)
            holder = match_of_bidder.get(v)
            if holder is None or try_augment(holder, seen):
                match_of_bidder[v] = u
                match_of_keyword[u] = v
                return True
        return False

    for u in graph.keywords:
        try_augment(u, set())
    return match_of_keyword
