"""Shared test utilities: graph builders and independent slow oracles.

The oracles here deliberately avoid the library's vectorized code paths;
they recompute everything with plain Python loops so the two sides of
each check stay independent.
"""

from __future__ import annotations

import io
import math

import numpy as np

from bisect_order import BipartiteGraph, load_edge_list, load_postings, to_bipartite_per_vertex


def bg_from_lists(lists, num_data) -> BipartiteGraph:
    """Bipartite graph from one sorted neighbor list per query."""
    indptr = np.zeros(len(lists) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(l) for l in lists])
    if lists and indptr[-1] > 0:
        indices = np.concatenate([np.asarray(sorted(l), dtype=np.int64) for l in lists])
    else:
        indices = np.zeros(0, dtype=np.int64)
    return BipartiteGraph(indptr, indices, num_data)


def naive_loggap_total(lists, rank) -> int:
    """Pure-Python bit-width sum of within-list rank gaps."""
    total = 0
    for lst in lists:
        rs = sorted(int(rank[v]) for v in lst)
        for a, b in zip(rs, rs[1:]):
            total += (b - a).bit_length()
    return total


def lists_of(graph: BipartiteGraph):
    return [graph.fwd(q).tolist() for q in range(graph.num_queries)]


def naive_partition_cost(state) -> float:
    """Slow re-derivation of the split cost from raw state."""
    nq = len(state.queries)
    d1 = [0] * nq
    d2 = [0] * nq
    for q, p in zip(state.edge_q, state.edge_v):
        if state.side[p] == 0:
            d1[q] += 1
        else:
            d2[q] += 1
    total = 0.0
    for a, b in zip(d1, d2):
        total += a * math.log2(state.n1 / (a + 1)) + b * math.log2(state.n2 / (b + 1))
    return total


def naive_gain(state, p) -> float:
    """Cost before minus cost after flipping position p (sizes fixed)."""
    before = naive_partition_cost(state)
    state.side[p] ^= 1
    after = naive_partition_cost(state)
    state.side[p] ^= 1
    return before - after


def random_bipartite(rng, num_queries, num_data, mean_degree) -> BipartiteGraph:
    lists = []
    for _ in range(num_queries):
        deg = min(num_data, 1 + rng.poisson(mean_degree))
        lists.append(np.sort(rng.choice(num_data, size=deg, replace=False)))
    return bg_from_lists(lists, num_data)


# --- synthetic corpus ---------------------------------------------------------


def planted_partition_text(seed=5, clusters=16, size=32, p_in=0.25, p_out=0.004):
    """Edge list of a clustered graph with scrambled labels and edge order."""
    rng = np.random.default_rng(seed)
    n = clusters * size
    relabel = rng.permutation(n)
    iu, jv = np.triu_indices(size, k=1)
    blocks = []
    for c in range(clusters):
        keep = rng.random(len(iu)) < p_in
        blocks.append(np.stack([iu[keep] + c * size, jv[keep] + c * size], axis=1))
    # cross-cluster edges: sampled count, then rejection-sampled endpoints
    # (duplicates are deduplicated by the loader)
    inter_pairs = n * (n - 1) // 2 - clusters * len(iu)
    need = int(rng.binomial(inter_pairs, p_out))
    while need > 0:
        cand = rng.integers(0, n, size=(2 * need + 16, 2))
        cand = cand[(cand[:, 0] // size) != (cand[:, 1] // size)][:need]
        blocks.append(cand)
        need -= len(cand)
    edges = relabel[np.concatenate(blocks)]
    edges = edges[rng.permutation(len(edges))]
    text = "\n".join(f"{u} {v}" for u, v in edges)
    return io.BytesIO(text.encode())


def grid_text(w=32, h=32):
    """Row-major grid edge list (natural order is already local)."""
    lines = []
    for y in range(h):
        for x in range(w):
            v = y * w + x
            if x + 1 < w:
                lines.append(f"{v} {v + 1}")
            if y + 1 < h:
                lines.append(f"{v} {v + w}")
    return io.BytesIO("\n".join(lines).encode())


def postings_text(seed=9, docs=2000, topics=20, terms=150):
    """Clustered synthetic postings with shuffled doc labels."""
    rng = np.random.default_rng(seed)
    relabel = rng.permutation(docs)
    per_topic = docs // topics
    lines = []
    for t in range(terms):
        k_topics = int(rng.integers(1, 4))
        chosen = rng.choice(topics, size=k_topics, replace=False)
        members = []
        for topic in chosen:
            pool = np.arange(topic * per_topic, (topic + 1) * per_topic)
            take = int(len(pool) * rng.uniform(0.05, 0.4))
            if take:
                members.append(rng.choice(pool, size=take, replace=False))
        if not members:
            continue
        ids = np.unique(relabel[np.concatenate(members)])
        lines.append(str(t) + " " + " ".join(map(str, ids)))
    return io.BytesIO("\n".join(lines).encode())


def build_corpus():
    """Named (BipartiteGraph, PlainGraph | None) pairs used across tests."""
    corpus = {}
    plain = load_edge_list(planted_partition_text())
    corpus["planted"] = (to_bipartite_per_vertex(plain), plain)
    plain = load_edge_list(grid_text())
    corpus["grid"] = (to_bipartite_per_vertex(plain), plain)
    corpus["postings"] = (load_postings(postings_text()), None)
    rng = np.random.default_rng(3)
    corpus["erdos"] = (random_bipartite(rng, 500, 800, 5), None)
    return corpus
