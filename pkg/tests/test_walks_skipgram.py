from __future__ import annotations

import numpy as np
import pytest

from conftest import path_graph, random_graph
from structembed.graph import KARATE_MIRROR, build_graph, generate_mirrored_karate
from structembed.simgraph import SimilarityGraph, TransformSpec, transition_row
from structembed.skipgram import (EmbeddingMatrix, build_huffman,
                                  context_pair_count, hs_pair_gradients,
                                  hs_pair_loss, load_embeddings, ns_pair_gradients,
                                  ns_pair_loss, save_embeddings, skipgram_train)
from structembed.walks import WalkCorpus, biased_walks, dump_corpus, uniform_walks


def weighted_graph(n, edges):
    """Build a SimilarityGraph from explicit (u, v, w) triples."""
    adj = [[] for _ in range(n)]
    for u, v, w in edges:
        adj[u].append((v, w))
        adj[v].append((u, w))
    indptr = [0]
    indices = []
    weights = []
    for u in range(n):
        adj[u].sort()
        for v, w in adj[u]:
            indices.append(v)
            weights.append(w)
        indptr.append(len(indices))
    return SimilarityGraph(n, np.array(indptr), np.array(indices, dtype=np.int64),
                           np.array(weights, dtype=np.float64), "dense",
                           len(edges), TransformSpec())


class TestBiasedWalks:
    def test_two_node_alternation(self):
        sg = weighted_graph(2, [(0, 1, 1.0)])
        corpus = biased_walks(sg, walks_per_node=3, walk_len=10, seed=0)
        for row in corpus.walks:
            assert all(row[i] != row[i + 1] for i in range(9))

    def test_step_frequencies_match_transition_rows(self):
        sg = weighted_graph(3, [(0, 1, 2.0), (0, 2, 6.0), (1, 2, 2.0)])
        corpus = biased_walks(sg, walks_per_node=140, walk_len=250, seed=1)
        counts = {v: np.zeros(3) for v in range(3)}
        total_steps = 0
        for row in corpus.walks:
            for a, b in zip(row[:-1], row[1:]):
                counts[int(a)][int(b)] += 1
                total_steps += 1
        assert total_steps >= 100_000
        for v in range(3):
            empirical = np.delete(counts[v] / counts[v].sum(), v)
            exact = transition_row(sg, v)
            np.testing.assert_allclose(empirical, exact, atol=0.02)

    def test_seed_determinism(self):
        sg = weighted_graph(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (0, 3, 0.5)])
        c1 = biased_walks(sg, 5, 20, seed=42)
        c2 = biased_walks(sg, 5, 20, seed=42)
        c3 = biased_walks(sg, 5, 20, seed=43)
        assert np.array_equal(c1.walks, c2.walks)
        assert not np.array_equal(c1.walks, c3.walks)

    def test_start_counts_and_lengths(self):
        sg = weighted_graph(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])
        p, length = 4, 7
        corpus = biased_walks(sg, p, length, seed=0)
        assert corpus.walks.shape == (3 * p, length)
        starts = corpus.walks[:, 0]
        for v in range(3):
            assert int(np.sum(starts == v)) == p

    def test_isolated_node_errors(self):
        sg = SimilarityGraph(2, np.array([0, 0, 0]), np.empty(0, dtype=np.int64),
                             np.empty(0), "pruned", 0, TransformSpec())
        with pytest.raises(ValueError):
            biased_walks(sg, 1, 5, seed=0)

    def test_parameter_floors(self):
        sg = weighted_graph(2, [(0, 1, 1.0)])
        with pytest.raises(ValueError):
            biased_walks(sg, 0, 5, seed=0)
        with pytest.raises(ValueError):
            biased_walks(sg, 1, 1, seed=0)


class TestUniformWalks:
    def test_interior_next_step_is_fair(self):
        g = path_graph(3)
        corpus = uniform_walks(g, walks_per_node=600, walk_len=4, seed=0)
        from_middle = [int(row[1]) for row in corpus.walks if row[0] == 1]
        frac = np.mean([v == 0 for v in from_middle])
        assert frac == pytest.approx(0.5, abs=0.07)

    def test_every_step_is_an_edge(self):
        g = random_graph(25, 50, seed=2)
        if np.any(g.degrees == 0):
            pytest.skip("random instance has an isolated node")
        corpus = uniform_walks(g, 3, 12, seed=5)
        for row in corpus.walks:
            for a, b in zip(row[:-1], row[1:]):
                assert g.has_edge(int(a), int(b))

    def test_determinism(self):
        g = path_graph(6)
        assert np.array_equal(uniform_walks(g, 2, 9, seed=7).walks,
                              uniform_walks(g, 2, 9, seed=7).walks)

    def test_isolated_node_rejected(self):
        g = build_graph(3, [(0, 1)])
        with pytest.raises(ValueError, match="isolated"):
            uniform_walks(g, 1, 4, seed=0)


class TestHuffman:
    def test_prefix_free_and_complete(self):
        freq = np.array([5, 9, 12, 13, 16, 45])
        codes, points, lengths = build_huffman(freq)
        words = ["".join(str(b) for b in codes[v, :lengths[v]]) for v in range(6)]
        assert len(set(words)) == 6
        for i, a in enumerate(words):
            for j, b in enumerate(words):
                if i != j:
                    assert not b.startswith(a)

    def test_frequent_words_get_short_codes(self):
        freq = np.array([1, 1, 1, 1, 100])
        codes, points, lengths = build_huffman(freq)
        assert lengths[4] == min(lengths)

    def test_deterministic(self):
        freq = np.array([3, 3, 3, 3, 3, 3])
        a = build_huffman(freq)
        b = build_huffman(freq)
        for x, y in zip(a, b):
            assert np.array_equal(x, y)

    def test_internal_node_ids_in_range(self):
        freq = np.array([2, 7, 1, 9, 4])
        codes, points, lengths = build_huffman(freq)
        n = 5
        for v in range(n):
            assert np.all(points[v, :lengths[v]] >= 0)
            assert np.all(points[v, :lengths[v]] < n - 1)


class TestContextWindow:
    def test_center_index_two_window_two(self):
        # length-5 sequence, center at index 2, window 2: 4 context pairs
        length, w, i = 5, 2, 2
        assert min(i + w, length - 1) - max(i - w, 0) == 4

    def test_total_pairs(self):
        # hand count for length 5, window 2: 2+3+4+3+2
        assert context_pair_count(5, 2) == 14


def _random_pair_point(rng, d, path_len):
    center = rng.standard_normal(d) * 0.5
    path = rng.standard_normal((path_len, d)) * 0.5
    bits = rng.integers(0, 2, size=path_len).astype(np.float64)
    return center, path, bits


class TestGradients:
    def test_hs_gradients_match_central_differences(self):
        rng = np.random.default_rng(0)
        eps = 1e-6
        for _ in range(20):
            d = int(rng.integers(2, 8))
            center, path, bits = _random_pair_point(rng, d, int(rng.integers(1, 6)))
            g_center, g_path = hs_pair_gradients(center, path, bits)
            for j in range(d):
                e = np.zeros(d)
                e[j] = eps
                fd = (hs_pair_loss(center + e, path, bits) -
                      hs_pair_loss(center - e, path, bits)) / (2 * eps)
                assert abs(fd - g_center[j]) <= 1e-4 * max(1.0, abs(fd))
            for r in range(path.shape[0]):
                for j in range(d):
                    bump = np.zeros_like(path)
                    bump[r, j] = eps
                    fd = (hs_pair_loss(center, path + bump, bits) -
                          hs_pair_loss(center, path - bump, bits)) / (2 * eps)
                    assert abs(fd - g_path[r, j]) <= 1e-4 * max(1.0, abs(fd))

    def test_ns_gradients_match_central_differences(self):
        rng = np.random.default_rng(1)
        eps = 1e-6
        for _ in range(20):
            d = int(rng.integers(2, 8))
            center = rng.standard_normal(d) * 0.5
            pos = rng.standard_normal(d) * 0.5
            negs = rng.standard_normal((int(rng.integers(1, 5)), d)) * 0.5
            g_center, g_pos, g_negs = ns_pair_gradients(center, pos, negs)
            for j in range(d):
                e = np.zeros(d)
                e[j] = eps
                fd = (ns_pair_loss(center + e, pos, negs) -
                      ns_pair_loss(center - e, pos, negs)) / (2 * eps)
                assert abs(fd - g_center[j]) <= 1e-4 * max(1.0, abs(fd))
                fd = (ns_pair_loss(center, pos + e, negs) -
                      ns_pair_loss(center, pos - e, negs)) / (2 * eps)
                assert abs(fd - g_pos[j]) <= 1e-4 * max(1.0, abs(fd))
            for r in range(negs.shape[0]):
                for j in range(d):
                    bump = np.zeros_like(negs)
                    bump[r, j] = eps
                    fd = (ns_pair_loss(center, pos, negs + bump) -
                          ns_pair_loss(center, pos, negs - bump)) / (2 * eps)
                    assert abs(fd - g_negs[r, j]) <= 1e-4 * max(1.0, abs(fd))


class TestSkipgramTraining:
    def test_trainer_single_pair_matches_reference_step(self):
        # one 2-token walk with window 1 gives exactly two (center, context)
        # pairs; replay them with the reference gradients
        n, d = 4, 3
        walks = np.array([[2, 0]], dtype=np.int64)
        corpus = WalkCorpus(walks, n, 1, 2, seed=0)
        lr = 0.1
        emb = skipgram_train(corpus, d, window=1, epochs=1, lr=lr, seed=11)
        freq = np.bincount(walks.ravel(), minlength=n)
        codes, points, lengths = build_huffman(freq)
        rng = np.random.default_rng([11, 0x5B])
        syn0 = (rng.random((n, d)) - 0.5) / d
        syn1 = np.zeros((n - 1, d))
        total = 2
        for t, (center, context) in enumerate([(2, 0), (0, 2)]):
            lr_t = lr + (lr / 100.0 - lr) * (t / total)
            path = syn1[points[context, :lengths[context]]]
            bits = codes[context, :lengths[context]].astype(np.float64)
            g_center, g_path = hs_pair_gradients(syn0[center], path, bits)
            syn1[points[context, :lengths[context]]] -= lr_t * g_path
            syn0[center] = syn0[center] - lr_t * g_center
        np.testing.assert_allclose(emb.vectors, syn0, atol=1e-12)

    def test_loss_non_increasing_on_karate_corpus(self):
        g = generate_mirrored_karate()
        corpus = uniform_walks(g, walks_per_node=10, walk_len=80, seed=0)
        for objective in ("hierarchical_softmax", "negative_sampling"):
            emb = skipgram_train(corpus, 16, window=10, epochs=5,
                                 objective=objective, seed=0)
            losses = emb.meta["epoch_loss"]
            violations = sum(1 for a, b in zip(losses, losses[1:]) if b > a)
            assert violations <= 1, f"{objective}: losses {losses}"

    def test_determinism(self):
        g = path_graph(8)
        corpus = uniform_walks(g, 3, 15, seed=1)
        for objective in ("hierarchical_softmax", "negative_sampling"):
            a = skipgram_train(corpus, 8, window=3, epochs=2,
                               objective=objective, seed=5)
            b = skipgram_train(corpus, 8, window=3, epochs=2,
                               objective=objective, seed=5)
            assert np.array_equal(a.vectors, b.vectors)

    def test_empty_corpus_rejected(self):
        corpus = WalkCorpus(np.empty((0, 0), dtype=np.int64), 0, 1, 2, seed=0)
        with pytest.raises(ValueError):
            skipgram_train(corpus, 4)

    def test_unknown_objective(self):
        g = path_graph(4)
        corpus = uniform_walks(g, 1, 4, seed=0)
        with pytest.raises(ValueError):
            skipgram_train(corpus, 4, objective="softmax")


class TestEmbeddingIO:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        emb = EmbeddingMatrix(rng.standard_normal((34, 16)),
                              [str(i + 1) for i in range(34)])
        path = tmp_path / "emb.txt"
        save_embeddings(emb, path)
        header = path.read_text().splitlines()[0]
        assert header == "34 16"
        loaded = load_embeddings(path)
        assert loaded.names == emb.names
        np.testing.assert_allclose(loaded.vectors, emb.vectors, atol=1e-8)

    def test_truncated_file_names_line(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("3 2\na 0.1 0.2\n")
        with pytest.raises(ValueError, match="line 3"):
            load_embeddings(path)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("banana\na 0.1\n")
        with pytest.raises(ValueError, match="header"):
            load_embeddings(path)

    def test_wrong_row_width(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("1 3\na 0.1 0.2\n")
        with pytest.raises(ValueError, match="line 2"):
            load_embeddings(path)


def test_corpus_dump(tmp_path):
    g = path_graph(4)
    corpus = uniform_walks(g, 2, 5, seed=3)
    out = tmp_path / "walks.txt"
    dump_corpus(corpus, g.names, out)
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 8
    assert all(len(line.split()) == 5 for line in lines)


def test_mirror_pairs_closer_than_random_pairs(karate_embeddings, mirrored_karate):
    # mean embedding distance over mirror pairs strictly below the mean over
    # random non-mirror pairs, for every seed
    g = mirrored_karate
    rng = np.random.default_rng(123)
    wins = 0
    for emb in karate_embeddings:
        mirror_d = []
        for v, mv in KARATE_MIRROR.items():
            a, b = g.name_to_id[str(v)], g.name_to_id[str(mv)]
            mirror_d.append(np.linalg.norm(emb.vectors[a] - emb.vectors[b]))
        random_d = []
        while len(random_d) < 200:
            a, b = rng.integers(68, size=2)
            if a == b:
                continue
            if KARATE_MIRROR.get(int(a) + 1) == int(b) + 1 or \
               KARATE_MIRROR.get(int(b) + 1) == int(a) + 1:
                continue
            random_d.append(np.linalg.norm(emb.vectors[a] - emb.vectors[b]))
        wins += np.mean(mirror_d) < np.mean(random_d)
    assert wins == 10
