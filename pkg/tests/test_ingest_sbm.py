# tests/test_ingest_sbm.py
import numpy as np
import pytest
from storage import DuplicateId, GraphStore
from core.errors import IngestError, MalformedRow
from core.ingest import EdgeFile, IngestSpec, NodeFile, load_csv, parse_file_arg
from core.sbm_generator import SbmSpec, generate_sbm, sample_sbm
NODES_CSV = "id,features,label\na,0.1;0.2,0\nb,0.3;0.4,1\n"
EDGES_CSV = "src,dst,weight\na,b,0.5\n"
def write_csv(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding='utf-8')
    return path
def ingest_spec(tmp_path, nodes=NODES_CSV, edges=EDGES_CSV, feature_dim=2):
    return IngestSpec(node_files=[NodeFile(write_csv(tmp_path, 'nodes.csv', nodes), 'PAPER')],
                      edge_files=[EdgeFile(write_csv(tmp_path, 'edges.csv', edges), 'CITES')],
                      feature_dim=feature_dim)
def store_bytes(path):
    return {p.relative_to(path).as_posix(): p.read_bytes() for p in sorted(path.rglob('*')) if p.is_file()}
class TestIngest:
    def test_two_nodes_one_edge(self, tmp_path, store_dir):
        with GraphStore(store_dir, 'w') as store:
            counts = load_csv(ingest_spec(tmp_path), store)
            stats = store.stats()
        assert counts == {'nodes_loaded': 2, 'edges_loaded': 1}
        assert (stats.node_count, stats.edge_count) == (2, 1)
        with GraphStore(store_dir, 'r') as store, store.begin_read() as tx:
            a, b = tx.node_index_seek('PAPER', 'id', ['a', 'b'])
            np.testing.assert_array_equal(tx.get_property(a, 'features'), [0.1, 0.2])
            assert tx.get_property(b, 'label') == 1
            assert [n for _, n in tx.expand(a, 'out', 'CITES')] == [b]
            assert tx.edge_properties(0) == {'weight': '0.5'}
    def test_wrong_feature_width_names_the_line(self, tmp_path, store_dir):
        nodes = "id,features,label\na,0.1;0.2;0.3;0.4,0\nb,0.1;0.2;0.3,1\n"
        with GraphStore(store_dir, 'w') as store:
            with pytest.raises(MalformedRow) as info:
                load_csv(ingest_spec(tmp_path, nodes=nodes, feature_dim=4), store)
        assert info.value.line == 3
        assert 'features' in info.value.reason
    def test_bad_integer(self, tmp_path, store_dir):
        nodes = "id,features,label\na,0.1;0.2,zero\n"
        with GraphStore(store_dir, 'w') as store:
            with pytest.raises(MalformedRow) as info:
                load_csv(ingest_spec(tmp_path, nodes=nodes), store)
        assert info.value.line == 2
    def test_missing_id_column(self, tmp_path, store_dir):
        with GraphStore(store_dir, 'w') as store:
            with pytest.raises(MalformedRow) as info:
                load_csv(ingest_spec(tmp_path, nodes="name,label\na,0\n"), store)
        assert info.value.line == 1
    def test_unknown_edge_endpoint(self, tmp_path, store_dir):
        with GraphStore(store_dir, 'w') as store:
            with pytest.raises(MalformedRow) as info:
                load_csv(ingest_spec(tmp_path, edges="src,dst\na,zz\n"), store)
        assert 'zz' in info.value.reason
    def test_duplicate_id(self, tmp_path, store_dir):
        nodes = "id,features,label\na,0.1;0.2,0\na,0.3;0.4,1\n"
        with GraphStore(store_dir, 'w') as store:
            with pytest.raises(DuplicateId):
                load_csv(ingest_spec(tmp_path, nodes=nodes), store)
    def test_missing_input_file(self, tmp_path, store_dir):
        spec = IngestSpec(node_files=[NodeFile(tmp_path / 'absent.csv', 'PAPER')])
        with GraphStore(store_dir, 'w') as store:
            with pytest.raises(IngestError):
                load_csv(spec, store)
    def test_custom_id_column(self, tmp_path, store_dir):
        nodes = write_csv(tmp_path, 'nodes.csv', "paper_id,features\n7,1.0\n8,2.0\n")
        edges = write_csv(tmp_path, 'edges.csv', "src,dst\n7,8\n")
        spec = IngestSpec([NodeFile(nodes, 'PAPER', id_column='paper_id')], [EdgeFile(edges, 'CITES')],
                          feature_dim=1)
        with GraphStore(store_dir, 'w') as store:
            load_csv(spec, store)
        with GraphStore(store_dir, 'r') as store, store.begin_read() as tx:
            assert tx.node_index_seek('PAPER', 'id', ['7']) == [0]
            assert tx.out_degree(0) == 1
    def test_reload_is_byte_identical(self, tmp_path):
        outputs = []
        for name in ('first', 'second'):
            target = tmp_path / name
            with GraphStore(target, 'w') as store:
                load_csv(ingest_spec(tmp_path), store)
            outputs.append(store_bytes(target))
        assert outputs[0] == outputs[1]
    @pytest.mark.parametrize('text, expected', [
        ('data/nodes.csv:PAPER', ('data/nodes.csv', ['PAPER'])),
        ('edges.csv:CITES:PAPER:PAPER', ('edges.csv', ['CITES', 'PAPER', 'PAPER'])),
        ('C:/graphs/nodes.csv:AUTHOR', ('C:/graphs/nodes.csv', ['AUTHOR'])),
    ])
    def test_file_arguments(self, text, expected):
        assert parse_file_arg(text) == expected
class TestSbm:
    def test_complete_blocks(self, store_dir):
        spec = SbmSpec(communities=2, nodes_per_community=10, p_in=1.0, p_out=0.0, feature_dim=3, seed=1)
        with GraphStore(store_dir, 'w') as store:
            counts = generate_sbm(spec, store)
            assert counts == {'nodes_loaded': 20, 'edges_loaded': 180}
            with store.begin_read() as tx:
                assert tx.out_degree(0) == 9
                assert tx.get_property(15, 'label') == 1
                assert all(n < 10 for _, n in tx.expand(3, 'out', 'CITES'))
    def test_no_self_loops_or_duplicates(self):
        graph = sample_sbm(SbmSpec(communities=3, nodes_per_community=30, p_in=0.3, p_out=0.05, seed=4))
        pairs = list(zip(graph['src'].tolist(), graph['dst'].tolist()))
        assert all(src != dst for src, dst in pairs)
        assert len(set(pairs)) == len(pairs)
        assert pairs == sorted(pairs)
    def test_same_seed_same_store(self, tmp_path):
        outputs = []
        for name in ('first', 'second'):
            target = tmp_path / name
            with GraphStore(target, 'w') as store:
                generate_sbm(SbmSpec(communities=2, nodes_per_community=20, p_in=0.2, p_out=0.02, seed=5), store)
            outputs.append(store_bytes(target))
        assert outputs[0] == outputs[1]
    def test_edge_counts_are_binomial(self):
        n, p_in, p_out = 250, 0.05, 0.002
        graph = sample_sbm(SbmSpec(communities=4, nodes_per_community=n, p_in=p_in, p_out=p_out, seed=0))
        same = graph['src'] // n == graph['dst'] // n
        for observed, pairs, p in ((same.sum(), 4 * n * (n - 1), p_in), ((~same).sum(), 12 * n * n, p_out)):
            sigma = np.sqrt(pairs * p * (1 - p))
            assert abs(observed - pairs * p) <= 5 * sigma
    def test_features_follow_communities(self):
        graph = sample_sbm(SbmSpec(communities=2, nodes_per_community=50, feature_noise=0.0, seed=2))
        features, labels = graph['features'], graph['labels']
        assert np.allclose(features[labels == 0], features[0])
        assert not np.allclose(features[0], features[-1])
    @pytest.mark.parametrize('kwargs', [{'p_in': 0.1, 'p_out': 0.2}, {'communities': 0}, {'feature_dim': 0},
                                        {'feature_noise': -1.0}])
    def test_invalid_spec(self, kwargs):
        with pytest.raises(IngestError):
            sample_sbm(SbmSpec(**kwargs))
