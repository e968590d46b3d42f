import io

import numpy as np
import pytest

from bisect_order import (
    BipartiteGraph,
    EmptyInputError,
    GraphFormatError,
    ReductionError,
    load_edge_list,
    load_postings,
    read_snapshot,
    to_bipartite_per_edge,
    to_bipartite_per_vertex,
    write_snapshot,
)
from bisect_order.bgraph import read_labels, write_labels

from helpers import bg_from_lists, planted_partition_text


def B(text: str) -> io.BytesIO:
    return io.BytesIO(text.encode())


class TestLoadEdgeList:
    def test_dedup_and_symmetry(self):
        g = load_edge_list(B("0 1\n1 2\n1 2\n"))
        assert g.num_vertices == 3
        assert g.num_edges == 2
        one = int(np.flatnonzero(g.labels == 1)[0])
        assert sorted(g.labels[g.adj(one)].tolist()) == [0, 2]

    def test_self_loop_dropped(self):
        g = load_edge_list(B("0 0\n0 1\n"))
        assert g.num_edges == 1
        assert g.num_vertices == 2

    def test_comments_and_blank_lines(self):
        g = load_edge_list(B("# header\n\n0 1\n# mid\n1 2\n"))
        assert g.num_edges == 2

    def test_first_appearance_compaction(self):
        g = load_edge_list(B("7 3\n3 9\n"))
        assert g.labels.tolist() == [7, 3, 9]

    def test_malformed_line_reports_number(self):
        with pytest.raises(GraphFormatError, match="line 2"):
            load_edge_list(B("0 1\n0 x\n1 2\n"))

    def test_wrong_arity_reports_number(self):
        with pytest.raises(GraphFormatError, match="line 3"):
            load_edge_list(B("0 1\n1 2\n1 2 3\n"))

    def test_empty_input(self):
        with pytest.raises(EmptyInputError):
            load_edge_list(B("# nothing here\n"))

    def test_directed_keeps_arcs(self):
        g = load_edge_list(B("0 1\n1 0\n0 2\n"), directed=True)
        assert g.directed
        assert g.num_edges == 3
        assert g.adj(0).tolist() == [1, 2]
        assert g.adj(1).tolist() == [0]

    def test_idempotent_reload(self):
        src = planted_partition_text()
        g = load_edge_list(src)
        # serialize the loaded graph back to text in label space, reload
        lines = []
        for u in range(g.num_vertices):
            for v in g.adj(u):
                if v > u:
                    lines.append(f"{g.labels[u]} {g.labels[v]}")
        g2 = load_edge_list(B("\n".join(lines)))
        assert g2.num_vertices == g.num_vertices
        assert g2.num_edges == g.num_edges
        # same adjacency in label space
        for u in range(g.num_vertices):
            u2 = int(np.flatnonzero(g2.labels == g.labels[u])[0])
            assert sorted(g2.labels[g2.adj(u2)].tolist()) == sorted(
                g.labels[g.adj(u)].tolist()
            )


class TestReductions:
    def test_per_edge_triangle(self):
        g = load_edge_list(B("0 1\n1 2\n0 2\n"))
        bg = to_bipartite_per_edge(g)
        assert bg.num_queries == 3
        assert bg.num_data == 3
        assert all(len(bg.fwd(q)) == 2 for q in range(3))

    def test_per_edge_path(self):
        g = load_edge_list(B("0 1\n1 2\n"))
        bg = to_bipartite_per_edge(g)
        lists = sorted(tuple(bg.fwd(q)) for q in range(bg.num_queries))
        assert lists == [(0, 1), (1, 2)]
        assert len(bg.rev(1)) == 2

    def test_per_edge_rejects_directed(self):
        g = load_edge_list(B("0 1\n"), directed=True)
        with pytest.raises(ReductionError):
            to_bipartite_per_edge(g)

    def test_per_edge_query_count_matches_edges(self):
        g = load_edge_list(planted_partition_text(seed=1, clusters=4, size=8))
        bg = to_bipartite_per_edge(g)
        assert bg.num_queries == g.num_edges
        assert np.all(bg.query_degrees() == 2)

    def test_per_vertex_star(self):
        g = load_edge_list(B("0 1\n0 2\n0 3\n"))
        bg = to_bipartite_per_vertex(g)
        assert bg.num_queries == bg.num_data == 4
        assert len(bg.fwd(0)) == 3
        assert all(len(bg.fwd(q)) == 1 for q in (1, 2, 3))

    def test_per_vertex_directed_outgoing_only(self):
        g = load_edge_list(B("0 1\n"), directed=True)
        bg = to_bipartite_per_vertex(g)
        assert bg.fwd(0).tolist() == [1]
        assert bg.fwd(1).tolist() == []

    def test_per_vertex_degree_sum(self):
        g = load_edge_list(planted_partition_text(seed=2, clusters=4, size=8))
        bg = to_bipartite_per_vertex(g)
        assert int(bg.query_degrees().sum()) == 2 * g.num_edges


class TestPostings:
    def test_threshold_filter(self):
        bg = load_postings(B("10 1 2 3\n11 1 2 3 4 5\n"), min_list_len=4)
        assert bg.num_queries == 1
        assert bg.num_data == 5

    def test_zero_threshold_keeps_all(self):
        bg = load_postings(B("10 1 2 3\n11 1 2 3 4 5\n"), min_list_len=0)
        assert bg.num_queries == 2

    def test_non_monotone_names_term(self):
        with pytest.raises(GraphFormatError, match="term 42"):
            load_postings(B("42 5 4\n"))

    def test_doc_compaction_preserves_numeric_order(self):
        bg = load_postings(B("0 7 100 900\n1 2 900\n"))
        assert bg.data_labels.tolist() == [2, 7, 100, 900]

    def test_kept_count_matches_independent_scan(self):
        # independent oracle: raw line lengths
        raw = b"0 1 2 3 4\n1 5 6\n2 1 5 7 9 11\n3 2\n4 8 9 10 11\n"
        threshold = 4
        expected = sum(
            1 for line in raw.splitlines() if len(line.split()) - 1 >= threshold
        )
        bg = load_postings(io.BytesIO(raw), min_list_len=threshold)
        assert bg.num_queries == expected == 3


class TestBipartiteInvariants:
    def test_rev_matches_fwd(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            nq, nd = rng.integers(1, 30, 2)
            lists = [
                np.sort(rng.choice(nd, size=rng.integers(0, nd + 1), replace=False))
                for _ in range(nq)
            ]
            bg = bg_from_lists(lists, int(nd))
            # rebuild rev by brute force
            rev = [[] for _ in range(nd)]
            for q, lst in enumerate(lists):
                for d in lst:
                    rev[int(d)].append(q)
            for d in range(int(nd)):
                assert bg.rev(d).tolist() == rev[d]
            assert int(bg.query_degrees().sum()) == bg.num_edges
            assert int(bg.data_degrees().sum()) == bg.num_edges

    def test_rejects_unsorted_lists(self):
        with pytest.raises(ValueError):
            BipartiteGraph(np.array([0, 2]), np.array([1, 0]), 2)

    def test_rejects_duplicate_neighbors(self):
        with pytest.raises(ValueError):
            BipartiteGraph(np.array([0, 2]), np.array([1, 1]), 2)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            BipartiteGraph(np.array([0, 1]), np.array([5]), 2)


class TestSnapshot:
    def test_roundtrip_bit_exact(self, tmp_path):
        bg = load_postings(B("0 5 9 12\n1 5 7\n2 1 2 3 4 5\n"))
        path = tmp_path / "g.bg"
        write_snapshot(bg, path)
        again = read_snapshot(path)
        assert np.array_equal(again.q_indptr, bg.q_indptr)
        assert np.array_equal(again.q_indices, bg.q_indices)
        assert again.num_data == bg.num_data
        # writing the reloaded graph reproduces the same bytes
        path2 = tmp_path / "g2.bg"
        write_snapshot(again, path2)
        assert path.read_bytes() == path2.read_bytes()

    def test_bad_magic(self, tmp_path):
        p = tmp_path / "junk"
        p.write_bytes(b"NOTAGRPH" + b"\x00" * 64)
        with pytest.raises(GraphFormatError, match="magic"):
            read_snapshot(p)

    def test_truncated(self, tmp_path):
        bg = bg_from_lists([[0, 1]], 2)
        p = tmp_path / "g.bg"
        write_snapshot(bg, p)
        p.write_bytes(p.read_bytes()[:-2])
        with pytest.raises(GraphFormatError, match="truncated"):
            read_snapshot(p)

    def test_labels_roundtrip(self, tmp_path):
        labels = np.array([9, 4, 77, 3])
        p = tmp_path / "g.labels"
        write_labels(labels, p)
        assert read_labels(p).tolist() == labels.tolist()
