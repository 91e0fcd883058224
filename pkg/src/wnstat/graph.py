"""Structural algorithms on a single wordnet layer.

Everything here works on integer node indices (``graph.ids`` order, which
is sorted by synset id) so that numbering of components and SCCs by
"smallest contained id" falls out of plain index order.
"""
from __future__ import annotations

import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .model import RelationType, SupremacyConfig, UnknownSynset, WordnetGraph

RelationFilter = Iterable[RelationType] | None


def _filtered(graph: WordnetGraph, relation_filter: RelationFilter) -> tuple[np.ndarray, np.ndarray]:
    if relation_filter is not None:
        relation_filter = set(relation_filter)
        if not relation_filter:
            raise ValueError("relation filter must be non-empty")
    return graph.edge_arrays(relation_filter)


def _relabel_by_smallest_member(labels: np.ndarray) -> tuple[np.ndarray, int]:
    """Renumber labels so that label order follows the smallest member index."""
    n = int(labels.max()) + 1 if labels.size else 0
    first = np.full(n, labels.size, dtype=np.int64)
    np.minimum.at(first, labels, np.arange(labels.size))
    order = np.argsort(first, kind="stable")
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n)
    return rank[labels], n


def _csgraph(n: int, src: np.ndarray, dst: np.ndarray):
    data = np.ones(src.size, dtype=np.int8)
    return coo_matrix((data, (src, dst)), shape=(n, n)).tocsr()


# --------------------------------------------------------------------------
# weak components and loops


@dataclass(frozen=True)
class ComponentReport:
    ids: tuple[str, ...]
    component_of: np.ndarray  # component id per node, aligned with ids
    sizes_by_component: np.ndarray  # indexed by component id

    @property
    def count(self) -> int:
        return int(self.sizes_by_component.size)

    @property
    def sizes(self) -> list[int]:
        """Component sizes, largest first."""
        return sorted((int(s) for s in self.sizes_by_component), reverse=True)

    @property
    def largest(self) -> int:
        return int(self.sizes_by_component.max()) if self.count else 0

    @property
    def largest_share(self) -> float:
        return self.largest / len(self.ids) if self.ids else 0.0

    def component(self, synset_id: str) -> int:
        try:
            i = self.ids.index(synset_id)
        except ValueError:
            raise UnknownSynset(synset_id) from None
        return int(self.component_of[i])


def weak_components(graph: WordnetGraph, relation_filter: RelationFilter = None) -> ComponentReport:
    """Connected components of the undirected view of the filtered edges.

    Nodes without filtered edges are size-1 components.  Component ids are
    ordered by the smallest synset id they contain.
    """
    src, dst = _filtered(graph, relation_filter)
    n = graph.node_count
    if n == 0:
        return ComponentReport((), np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64))
    _, labels = connected_components(_csgraph(n, src, dst), directed=True, connection="weak")
    labels, k = _relabel_by_smallest_member(labels)
    return ComponentReport(graph.ids, labels, np.bincount(labels, minlength=k))


def undirected_cycle_rank(graph: WordnetGraph, relation_filter: RelationFilter = None) -> int:
    """E - V + C of the undirected simple graph (directions collapsed, duplicates removed)."""
    src, dst = _filtered(graph, relation_filter)
    pairs = {(min(a, b), max(a, b)) for a, b in zip(src.tolist(), dst.tolist()) if a != b}
    comps = weak_components(graph, relation_filter)
    return len(pairs) - graph.node_count + comps.count


@dataclass(frozen=True)
class AcyclicityResult:
    acyclic: bool
    witness: tuple[str, ...] | None = None

    def __bool__(self) -> bool:
        return self.acyclic


def _adjacency_lists(n: int, src: np.ndarray, dst: np.ndarray) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in zip(src.tolist(), dst.tolist()):
        adj[a].append(b)
    for lst in adj:
        lst.sort()
    return adj


def check_acyclicity(graph: WordnetGraph, relation_filter: RelationFilter = None) -> AcyclicityResult:
    """Detect a directed cycle among the filtered edges.

    The witness lists a cycle's nodes in edge order; the last node has an
    edge back to the first.
    """
    src, dst = _filtered(graph, relation_filter)
    n = graph.node_count
    adj = _adjacency_lists(n, src, dst)
    WHITE, GREY, BLACK = 0, 1, 2
    color = [WHITE] * n
    parent = [-1] * n
    for root in range(n):
        if color[root] != WHITE:
            continue
        color[root] = GREY
        stack: list[tuple[int, Iterator[int]]] = [(root, iter(adj[root]))]
        while stack:
            node, it = stack[-1]
            for nxt in it:
                if color[nxt] == WHITE:
                    color[nxt] = GREY
                    parent[nxt] = node
                    stack.append((nxt, iter(adj[nxt])))
                    break
                if color[nxt] == GREY:
                    cycle = [node]
                    while cycle[-1] != nxt:
                        cycle.append(parent[cycle[-1]])
                    cycle.reverse()
                    return AcyclicityResult(False, tuple(graph.ids[i] for i in cycle))
            else:
                color[node] = BLACK
                stack.pop()
    return AcyclicityResult(True)


# --------------------------------------------------------------------------
# condensation


@dataclass(frozen=True)
class CondensedGraph:
    ids: tuple[str, ...]
    scc_of: np.ndarray  # SCC id per node
    member_counts: np.ndarray  # indexed by SCC id
    edge_source: np.ndarray  # condensed edges, deduplicated and sorted
    edge_target: np.ndarray

    @property
    def size(self) -> int:
        return int(self.member_counts.size)

    def members(self, scc: int) -> list[str]:
        return [self.ids[i] for i in np.flatnonzero(self.scc_of == scc)]

    def topological_levels(self) -> np.ndarray:
        """Longest-path depth of every condensed node from the sources."""
        return _levels(self.size, self.edge_source, self.edge_target)


def _condense(n: int, src: np.ndarray, dst: np.ndarray):
    if n == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, 0, empty, empty
    _, labels = connected_components(_csgraph(n, src, dst), directed=True, connection="strong")
    labels, k = _relabel_by_smallest_member(labels)
    cs, cd = labels[src], labels[dst]
    keep = cs != cd
    if keep.any():
        pairs = np.unique(np.stack([cs[keep], cd[keep]], axis=1), axis=0)
        cs, cd = pairs[:, 0], pairs[:, 1]
    else:
        cs = cd = np.zeros(0, dtype=np.int64)
    return labels, k, cs, cd


def condense_sccs(graph: WordnetGraph, relation_filter: RelationFilter = None) -> CondensedGraph:
    """Strongly connected component condensation, SCCs numbered by smallest member id."""
    src, dst = _filtered(graph, relation_filter)
    labels, k, cs, cd = _condense(graph.node_count, src, dst)
    return CondensedGraph(graph.ids, labels, np.bincount(labels, minlength=k), cs, cd)


def _levels(k: int, cs: np.ndarray, cd: np.ndarray) -> np.ndarray:
    indeg = np.bincount(cd, minlength=k)
    order = np.argsort(cs, kind="stable")
    starts = np.searchsorted(cs[order], np.arange(k + 1))
    out_targets = cd[order].tolist()
    starts = starts.tolist()
    indeg = indeg.tolist()
    level = [0] * k
    queue = deque(i for i in range(k) if indeg[i] == 0)
    seen = 0
    while queue:
        u = queue.popleft()
        seen += 1
        lu = level[u] + 1
        for v in out_targets[starts[u]:starts[u + 1]]:
            if lu > level[v]:
                level[v] = lu
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(v)
    if seen != k:
        raise ValueError("condensed graph is not acyclic")
    return np.asarray(level, dtype=np.int64)


# --------------------------------------------------------------------------
# supremacy


@dataclass(frozen=True, eq=False)
class SupremacyTable:
    ids: tuple[str, ...]
    values: np.ndarray  # aligned with ids
    config: SupremacyConfig

    def __getitem__(self, synset_id: str) -> int:
        try:
            return int(self.values[self._index[synset_id]])
        except KeyError:
            raise UnknownSynset(synset_id) from None

    def __iter__(self):
        return iter(self.ids)

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, synset_id: str) -> bool:
        return synset_id in self._index

    def items(self):
        return zip(self.ids, self.values.tolist())

    def as_dict(self) -> dict[str, int]:
        return dict(self.items())

    @property
    def _index(self) -> dict[str, int]:
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {sid: i for i, sid in enumerate(self.ids)}
            object.__setattr__(self, "_idx", idx)
        return idx


if hasattr(np, "bitwise_count"):
    def _popcount_rows(block: np.ndarray) -> np.ndarray:
        return np.bitwise_count(block).sum(axis=1, dtype=np.int64)
else:  # numpy < 2.0
    _POP8 = np.array([bin(i).count("1") for i in range(256)], dtype=np.uint8)

    def _popcount_rows(block: np.ndarray) -> np.ndarray:
        return _POP8[block.view(np.uint8)].sum(axis=1, dtype=np.int64)


class _Propagator:
    """Bit-parallel ancestor counting over a condensed DAG.

    Every original node owns one bit; bits are processed in blocks of
    ``64 * words`` nodes.  For one block, each condensed node's row holds
    the set of block nodes that reach it, built level by level from the
    sources.  The popcount of a row is that node's contribution from the
    block, so the per-node totals over all blocks are the in-component
    sizes, self included.
    """

    def __init__(self, scc_of: np.ndarray, k: int, cs: np.ndarray, cd: np.ndarray, words: int):
        self.k = k
        self.words = words
        n = scc_of.size
        # bit position of each original node: grouped by SCC
        self.node_scc = scc_of[np.argsort(scc_of, kind="stable")]
        self.n = n
        level = _levels(k, cs, cd)
        order = np.lexsort((cd, level[cd]))
        cs, cd, lv = cs[order], cd[order], level[cd][order]
        self.groups = []
        if cd.size:
            cuts = np.flatnonzero(np.diff(lv)) + 1
            for a, b in zip(np.r_[0, cuts], np.r_[cuts, cd.size]):
                gs, gd = cs[a:b], cd[a:b]
                starts = np.r_[0, np.flatnonzero(np.diff(gd)) + 1]
                self.groups.append((gs, gd[starts], starts))

    def block(self, first_bit: int) -> np.ndarray:
        words = self.words
        anc = np.zeros((self.k, words), dtype=np.uint64)
        stop = min(first_bit + 64 * words, self.n)
        offs = np.arange(stop - first_bit)
        rows = self.node_scc[first_bit:stop]
        np.bitwise_or.at(anc, (rows, offs // 64), np.left_shift(np.uint64(1), (offs % 64).astype(np.uint64)))
        for gs, targets, starts in self.groups:
            anc[targets] |= np.bitwise_or.reduceat(anc[gs], starts, axis=0)
        return _popcount_rows(anc)


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("WN_THREADS", "1")))
    except ValueError:
        return 1


def supremacy_from_arrays(
    n: int,
    src: np.ndarray,
    dst: np.ndarray,
    include_self: bool = True,
    threads: int | None = None,
    block_bytes: int = 64 << 20,
) -> np.ndarray:
    """In-component sizes for nodes ``0..n-1`` of the digraph ``src -> dst``.

    *block_bytes* bounds the working matrix of one pass; the number of
    passes is about ``n * n / (8 * block_bytes)``.
    """
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    threads = threads or _default_threads()
    labels, k, cs, cd = _condense(n, np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64))
    words = max(1, min(block_bytes // (8 * k * threads), -(-n // 64)))
    prop = _Propagator(labels, k, cs, cd, words)
    firsts = range(0, n, 64 * words)
    total = np.zeros(k, dtype=np.int64)
    if threads == 1:
        for f in firsts:
            total += prop.block(f)
    else:
        with ThreadPoolExecutor(threads) as pool:
            for counts in pool.map(prop.block, firsts):
                total += counts
    s = total[labels]
    return s if include_self else s - 1


def supremacy_all(graph: WordnetGraph, config: SupremacyConfig | None = None, threads: int | None = None) -> SupremacyTable:
    """Supremacy of every synset: the number of synsets that reach it.

    Edges are the configured relation types, oriented specific->general,
    so a hypernym's supremacy counts all of its (transitive) hyponyms.
    The synset itself is counted when ``config.include_self`` is set.
    Cycles are handled through SCC condensation; members of one SCC share
    a value.  The result does not depend on *threads*.
    """
    config = config or SupremacyConfig()
    src, dst = graph.edge_arrays(config.relation_types)
    values = supremacy_from_arrays(graph.node_count, src, dst, config.include_self, threads)
    return SupremacyTable(graph.ids, values, config)


def in_component(graph: WordnetGraph, synset_id: str, config: SupremacyConfig | None = None) -> WordnetGraph:
    """Subgraph of the synsets that reach *synset_id*, with the filtered edges among them."""
    config = config or SupremacyConfig()
    if synset_id not in graph:
        raise UnknownSynset(synset_id)
    rev: dict[str, list[str]] = {}
    for e in graph.edges:
        if e.relation_type in config.relation_types:
            e = e.normalized()
            rev.setdefault(e.target, []).append(e.source)
    seen = {synset_id}
    queue = deque([synset_id])
    while queue:
        for u in rev.get(queue.popleft(), ()):
            if u not in seen:
                seen.add(u)
                queue.append(u)
    if not config.include_self:
        seen.discard(synset_id)
    nodes = [graph[sid] for sid in graph.ids if sid in seen]
    edges = [
        e for e in graph.edges
        if e.relation_type in config.relation_types and e.source in seen and e.target in seen
    ]
    return WordnetGraph(graph.language_tag, nodes, edges)

