# core/sbm_generator.py
"""
Stochastic block model generator writing straight into a GraphStore.

Nodes are numbered community-major (node i belongs to community i // n) and
carry an integer `id` equal to that number, a `label` property holding the
community, and `features` = community centroid + Gaussian noise. Directed
edges (no self loops) are drawn per ordered block pair: a binomial edge count,
then that many distinct positions without replacement.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Tuple
import numpy as np
from tqdm import tqdm
from storage import GraphStore
from .errors import IngestError
logger = logging.getLogger(__name__)
@dataclass
class SbmSpec:
    communities: int = 4
    nodes_per_community: int = 250
    p_in: float = 0.05
    p_out: float = 0.002
    feature_dim: int = 16
    feature_noise: float = 1.0
    seed: int = 0
    centroid_scale: float = 3.0
    node_label: str = 'PAPER'
    rel_type: str = 'CITES'
    def validate(self):
        if self.communities < 1 or self.nodes_per_community < 1:
            raise IngestError("communities and nodes_per_community must be positive")
        if not 0.0 <= self.p_out <= self.p_in <= 1.0:
            raise IngestError(f"need 0 <= p_out <= p_in <= 1, got p_in={self.p_in}, p_out={self.p_out}")
        if self.feature_dim < 1:
            raise IngestError("feature_dim must be positive")
        if self.feature_noise < 0:
            raise IngestError("feature_noise must be non-negative")
    @property
    def node_count(self) -> int:
        return self.communities * self.nodes_per_community
def _block_edges(rng: np.random.Generator, n: int, a: int, b: int, p: float) -> Tuple[np.ndarray, np.ndarray]:
    """Directed edges from community a to community b as global (src, dst) arrays"""
    pairs = n * (n - 1) if a == b else n * n
    if pairs == 0 or p <= 0.0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    count = int(rng.binomial(pairs, p))
    if count == pairs:
        positions = np.arange(pairs, dtype=np.int64)
    else:
        positions = np.sort(rng.choice(pairs, size=count, replace=False)).astype(np.int64)
    if a == b:
        src = positions // (n - 1)
        rest = positions % (n - 1)
        dst = np.where(rest < src, rest, rest + 1)
    else:
        src = positions // n
        dst = positions % n
    return src + a * n, dst + b * n
def sample_sbm(spec: SbmSpec) -> Dict[str, np.ndarray]:
    """Pure generation step: labels, features, and edges sorted by (src, dst)"""
    spec.validate()
    feature_seq, edge_seq = np.random.SeedSequence(spec.seed).spawn(2)
    feature_rng = np.random.default_rng(feature_seq)
    edge_rng = np.random.default_rng(edge_seq)
    n, c = spec.nodes_per_community, spec.communities
    labels = np.repeat(np.arange(c, dtype=np.int64), n)
    centroids = feature_rng.normal(0.0, spec.centroid_scale, size=(c, spec.feature_dim))
    noise = feature_rng.normal(0.0, spec.feature_noise, size=(spec.node_count, spec.feature_dim))
    features = centroids[labels] + noise
    sources, targets = [], []
    for a in range(c):
        for b in range(c):
            src, dst = _block_edges(edge_rng, n, a, b, spec.p_in if a == b else spec.p_out)
            sources.append(src)
            targets.append(dst)
    src = np.concatenate(sources)
    dst = np.concatenate(targets)
    order = np.lexsort((dst, src))
    return {'labels': labels, 'features': features, 'src': src[order], 'dst': dst[order]}
def generate_sbm(spec: SbmSpec, store: GraphStore, show_progress: bool = False) -> Dict[str, int]:
    graph = sample_sbm(spec)
    total = spec.node_count + len(graph['src'])
    logger.info(f"Generating SBM: {spec.communities} communities x {spec.nodes_per_community} nodes, "
                f"{len(graph['src'])} edges (seed {spec.seed})")
    with tqdm(total=total, desc="Generating SBM", unit="record", disable=not show_progress) as pbar:
        node_ids = np.empty(spec.node_count, dtype=np.int64)
        for i in range(spec.node_count):
            node_ids[i] = store.create_node([spec.node_label], {
                'id': i, 'features': graph['features'][i], 'label': int(graph['labels'][i])})
            pbar.update(1)
        for src, dst in zip(graph['src'].tolist(), graph['dst'].tolist()):
            store.create_edge(int(node_ids[src]), int(node_ids[dst]), spec.rel_type)
            pbar.update(1)
    store.flush()
    return {'nodes_loaded': spec.node_count, 'edges_loaded': int(len(graph['src']))}
