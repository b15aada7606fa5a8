# tests/conftest.py
"""Shared store fixtures: the 3-seed tree, a small citation graph and a separable SBM."""
from pathlib import Path
from typing import Any, List, Sequence, Tuple
import pytest
from storage import GraphStore
from core.sbm_generator import SbmSpec, generate_sbm
from core.sampler import SamplingConfig
NodeSpec = Tuple[Any, Sequence[float], int]
def build_store(path: Path, nodes: List[NodeSpec], edges: List[Tuple[Any, Any]], label: str = 'PAPER',
                rel_type: str = 'CITES') -> Path:
    """Write a single-label store; nodes are (id, features, class label), edges are (src id, dst id)"""
    with GraphStore(path, 'w') as store:
        internal = {}
        for node_id, features, klass in nodes:
            internal[node_id] = store.create_node([label], {'id': node_id, 'features': list(features),
                                                            'label': int(klass)})
        for src, dst in edges:
            store.create_edge(internal[src], internal[dst], rel_type)
    return path
def tree_graph() -> Tuple[List[NodeSpec], List[Tuple[Any, Any]]]:
    """3 seeds, each with 2 out-neighbours, each of those with 2 more; all 21 nodes distinct"""
    nodes, edges = [], []
    for s in range(3):
        seed = f"s{s}"
        nodes.append((seed, [float(s), 0.0], s % 2))
        for a in range(2):
            hop1 = f"h{s}{a}"
            nodes.append((hop1, [float(s), float(a + 1)], (s + a) % 2))
            edges.append((seed, hop1))
            for b in range(2):
                hop2 = f"t{s}{a}{b}"
                nodes.append((hop2, [float(a), float(b + 2)], (a + b) % 2))
                edges.append((hop1, hop2))
    return nodes, edges
def tree_paths() -> List[Tuple[str, str, str]]:
    return [(f"s{s}", f"h{s}{a}", f"t{s}{a}{b}") for s in range(3) for a in range(2) for b in range(2)]
@pytest.fixture
def store_dir(tmp_path) -> Path:
    return tmp_path / 'store'
@pytest.fixture
def tree_store(tmp_path):
    nodes, edges = tree_graph()
    path = build_store(tmp_path / 'tree', nodes, edges)
    with GraphStore(path, 'r') as store:
        yield store
@pytest.fixture
def citation_store(tmp_path):
    """Five papers, seven citations; p4 is a sink"""
    nodes = [(f"p{i}", [float(i), 1.0, 0.5], i % 2) for i in range(5)]
    edges = [('p0', 'p1'), ('p0', 'p2'), ('p1', 'p2'), ('p1', 'p3'), ('p2', 'p3'), ('p2', 'p4'), ('p3', 'p4')]
    path = build_store(tmp_path / 'citation', nodes, edges)
    with GraphStore(path, 'r') as store:
        yield store
@pytest.fixture(scope='session')
def sbm_path(tmp_path_factory) -> Path:
    path = tmp_path_factory.mktemp('sbm') / 'store'
    spec = SbmSpec(communities=2, nodes_per_community=40, p_in=0.25, p_out=0.01, feature_dim=4,
                   feature_noise=1.0, seed=7)
    with GraphStore(path, 'w') as store:
        generate_sbm(spec, store)
    return path
@pytest.fixture
def sbm_store(sbm_path):
    with GraphStore(sbm_path, 'r') as store:
        yield store
@pytest.fixture
def sampling_cfg() -> SamplingConfig:
    return SamplingConfig(fanouts=[2, 2], strategy='global-limit', seed=0)
