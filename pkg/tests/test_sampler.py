# tests/test_sampler.py
import numpy as np
import pytest
from storage import GraphStore
from core.errors import DecodeError
from core.sampler import (SamplingConfig, decode, fetch_edge_metadata, fetch_metadata, fetch_node_metadata,
                          fetch_seed_features, run_template, sample, sample_k_hop_chained, sample_one_hop,
                          sample_two_hop)
from utils.memory_tracker import MemoryTracker
from conftest import build_store
def two_hop_row(src, hop1=None, hop2=None):
    feature = lambda node: None if node is None else np.array([1.0, 0.0])
    return {'src_id': src, 'node_1.id': hop1, 'node_1.features': feature(hop1),
            'node_2.id': hop2, 'node_2.features': feature(hop2)}
@pytest.fixture
def path_store(tmp_path):
    nodes = [(f"p{i}", [float(i), 0.0], i % 2) for i in range(4)]
    path = build_store(tmp_path / 'path', nodes, [('p0', 'p1'), ('p1', 'p2'), ('p2', 'p3')])
    with GraphStore(path, 'r') as store:
        yield store
class LocalClient:
    """Stands in for the sampling client: anything with run_template works as a source"""
    def __init__(self, store):
        self.store = store
        self.calls = 0
    def run_template(self, template, params, seed=0, sequence=0):
        self.calls += 1
        return run_template(self.store, template, params, seed, sequence)
class TestMetadata:
    def test_node_metadata(self, citation_store):
        meta = fetch_node_metadata(citation_store)
        assert len(meta.node_types) == 1
        paper = meta.node_type('PAPER')
        assert set(paper.keys) == {'id', 'features', 'label'}
        assert paper.feature_dim == 3 and paper.count == 5
    def test_edge_metadata(self, citation_store):
        edge = fetch_edge_metadata(citation_store).edge_types
        assert [(e.rel_type, e.source, e.target, e.keys, e.count) for e in edge] == [
            ('CITES', 'PAPER', 'PAPER', [], 7)]
    def test_empty_store(self, store_dir):
        with GraphStore(store_dir, 'w') as store:
            assert fetch_node_metadata(store).node_types == []
            assert fetch_edge_metadata(store).edge_types == []
    def test_nodes_without_edges(self, tmp_path):
        path = build_store(tmp_path / 'isolated', [('a', [1.0], 0), ('b', [2.0], 1)], [])
        with GraphStore(path, 'r') as store:
            assert fetch_edge_metadata(store).edge_types == []
            assert fetch_node_metadata(store).node_type('PAPER').count == 2
    def test_heterogeneous_graph(self, store_dir):
        with GraphStore(store_dir, 'w') as store:
            author = store.create_node(['AUTHOR'], {'id': 'a1', 'name': 'x'})
            paper = store.create_node(['PAPER'], {'id': 'p1', 'features': [0.5, 0.5]})
            store.create_edge(author, paper, 'WRITES', {'year': 2021})
            nodes = fetch_node_metadata(store)
            edges = fetch_edge_metadata(store).edge_types
        assert {t.label for t in nodes.node_types} == {'AUTHOR', 'PAPER'}
        assert nodes.node_type('AUTHOR').feature_dim is None
        assert nodes.feature_dim() == 2
        assert [(e.rel_type, e.source, e.target, e.keys, e.count) for e in edges] == [
            ('WRITES', 'AUTHOR', 'PAPER', ['year'], 1)]
    def test_fetch_metadata_counts_classes(self, citation_store):
        memory = MemoryTracker()
        meta = fetch_metadata(citation_store, 'PAPER', memory)
        assert meta.num_classes == 2
        assert meta.feature_dim('PAPER') == 3
        assert memory.peak == meta.nbytes > 0
class TestDecode:
    def test_shared_hop_one_node_is_deduplicated(self):
        graph = decode([two_hop_row('a', 'b', 'c'), two_hop_row('a', 'b', 'd')])
        assert graph.node_ids == ['a', 'b', 'c', 'd']
        assert graph.edge_pairs == [(0, 1), (1, 2), (1, 3)]
        assert len(graph.hop1) == 2 and len(graph.hop2) == 2
    def test_null_rows_keep_only_the_seed(self):
        graph = decode([two_hop_row('a'), two_hop_row('b', 'c')])
        assert graph.seed_ids == ['a', 'b']
        assert graph.node_ids == ['a', 'b', 'c']
        assert graph.edge_pairs == [(1, 2)]
        assert graph.hop2 == []
    def test_seeds_come_first(self):
        graph = decode([two_hop_row('b', 'a')], seed_ids=['a', 'b'])
        assert graph.local_index == {'a': 0, 'b': 1}
    def test_missing_column(self):
        row = two_hop_row('a', 'b')
        del row['node_2.features']
        with pytest.raises(DecodeError):
            decode([row])
    def test_null_source(self):
        with pytest.raises(DecodeError):
            decode([two_hop_row(None, 'b')])
    def test_features_require_every_node(self):
        graph = decode([two_hop_row('a', 'b')])
        # the seed itself came without features
        with pytest.raises(DecodeError):
            graph.features()
class TestSampling:
    def test_zero_budget_returns_seeds_only(self, tree_store, sampling_cfg):
        graph = sample_two_hop(tree_store, ['s0', 's1', 's2'], 0, sampling_cfg)
        assert graph.node_ids == ['s0', 's1', 's2']
        assert graph.num_edges == 0
    def test_sampled_nodes_lie_in_two_hop_closure(self, tree_store, sampling_cfg):
        closure = {'s0', 'h00', 'h01', 't000', 't001', 't010', 't011'}
        graph = sample_two_hop(tree_store, ['s0'], 3, sampling_cfg)
        assert set(graph.node_ids) <= closure
        assert graph.seed_ids == ['s0']
    def test_one_hop_limit(self, tree_store, sampling_cfg):
        ids = sample_one_hop(tree_store, ['s0', 's1', 's2'], 5, sampling_cfg)
        assert len(ids) == 5 and len(set(ids)) == 5
        assert all(i.startswith('h') for i in ids)
    def test_one_hop_from_sinks(self, tree_store, sampling_cfg):
        assert sample_one_hop(tree_store, ['t000', 't111'], 5, sampling_cfg) == []
    def test_one_hop_large_budget_returns_all(self, tree_store, sampling_cfg):
        ids = sample_one_hop(tree_store, ['s0', 's1', 's2'], 1000, sampling_cfg)
        assert sorted(ids) == sorted(f"h{s}{a}" for s in range(3) for a in range(2))
    def test_chained_hops_on_a_path(self, path_store):
        cfg = SamplingConfig(fanouts=[1, 1], strategy='per-hop-chained')
        graph = sample_k_hop_chained(path_store, ['p0'], cfg.fanouts, cfg)
        assert graph.node_ids == ['p0', 'p1', 'p2']
        assert graph.edge_pairs == [(0, 1), (1, 2)]
        assert [dst for _, dst, _ in graph.hop1] == ['p1']
        assert [dst for _, dst, _ in graph.hop2] == ['p2']
    def test_chained_stops_at_sinks(self, path_store):
        cfg = SamplingConfig(fanouts=[3, 3, 3], strategy='per-hop-chained')
        graph = sample_k_hop_chained(path_store, ['p2'], cfg.fanouts, cfg)
        assert graph.node_ids == ['p2', 'p3']
    def test_sample_attaches_seed_features_and_labels(self, tree_store, sampling_cfg):
        graph = sample(tree_store, ['s0', 's1'], sampling_cfg)
        # budget 2 * 2 * 2 covers every path below both seeds
        assert graph.num_nodes == 14 and graph.num_edges == 12
        assert graph.seed_labels == [0, 1]
        features = graph.features()
        assert features.shape == (14, 2)
        np.testing.assert_array_equal(features[1], [1.0, 0.0])
    def test_sample_drops_missing_seeds(self, tree_store, sampling_cfg):
        graph = sample(tree_store, ['s0', 'nope', 's0'], sampling_cfg)
        assert graph.seed_ids == ['s0']
    def test_sample_replays_with_the_same_seed(self, sbm_store, sampling_cfg):
        seeds = list(range(10))
        first = sample(sbm_store, seeds, sampling_cfg, sample_seed=4)
        second = sample(sbm_store, seeds, sampling_cfg, sample_seed=4)
        assert first.node_ids == second.node_ids
        assert first.edge_pairs == second.edge_pairs
    def test_sample_tracks_memory(self, tree_store, sampling_cfg):
        memory = MemoryTracker()
        sample(tree_store, ['s0', 's1'], sampling_cfg, memory=memory)
        assert memory.peak > 0
    def test_client_source_gives_the_same_rows(self, tree_store):
        cfg = SamplingConfig(fanouts=[2, 2], strategy='per-hop-chained')
        client = LocalClient(tree_store)
        remote = sample_k_hop_chained(client, ['s0'], cfg.fanouts, cfg, sample_seed=1)
        local = sample_k_hop_chained(tree_store, ['s0'], cfg.fanouts, cfg, sample_seed=1)
        assert client.calls == 2
        assert remote.node_ids == local.node_ids
    def test_seed_features_keep_seed_order(self, citation_store, sampling_cfg):
        ids, features, labels = fetch_seed_features(citation_store, ['p3', 'p1', 'p3', 'nope'], sampling_cfg)
        assert ids == ['p3', 'p1']
        assert labels == [1, 1]
        np.testing.assert_array_equal(features[0], [3.0, 1.0, 0.5])
    def test_seed_features_dedup_large_batch(self, sbm_store):
        cfg = SamplingConfig(fanouts=[2, 2], node_type='PAPER')
        seeds = list(reversed(range(80))) * 50
        ids, features, labels = fetch_seed_features(sbm_store, seeds, cfg)
        assert ids == list(reversed(range(80)))
        assert len(features) == len(labels) == 80
class TestSamplingConfig:
    @pytest.mark.parametrize('kwargs', [
        {'fanouts': []},
        {'fanouts': [0, 2]},
        {'strategy': 'random-walk'},
        {'fanouts': [2], 'strategy': 'global-limit'},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            SamplingConfig(**kwargs).validate()
    def test_chained_accepts_any_depth(self):
        SamplingConfig(fanouts=[5, 4, 3], strategy='per-hop-chained').validate()
    def test_global_budget(self):
        assert SamplingConfig(fanouts=[2, 3]).max_neighbours(4) == 24
