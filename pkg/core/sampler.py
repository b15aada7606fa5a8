# core/sampler.py
"""
GNN-facing retrieval: metadata queries for initialisation, neighbour sampling
templates, and decoding of sampled rows into SampledSubgraph.

Two sampling strategies are offered. `global-limit` issues the two-hop
template once with LIMIT = |seeds| * S1 * S2 and therefore samples uniformly
over two-hop PATHS, so high-degree seeds get proportionally more rows.
`per-hop-chained` issues one one-hop query per layer with
LIMIT = |frontier| * S_k and feeds the returned ids back in as the next
frontier. The two are not distributionally equivalent.

The sampling functions accept either a GraphStore or a SamplingClient, which
runs the same templates on a remote sampling server.
"""
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple
import numpy as np
from storage import GraphStore
from query.binder import bind
from query.executor import execute
from query.parser import get_parser
from query.planner import plan as plan_query
from utils.memory_tracker import MemoryTracker, estimate_bytes
from .errors import DecodeError
logger = logging.getLogger(__name__)
STRATEGIES = ('global-limit', 'per-hop-chained')
NODE_METADATA_QUERY = """MATCH (n)
WITH DISTINCT labels(n) AS NodeTypes, n
UNWIND NodeTypes AS NodeType
WITH NodeType, collect(distinct keys(n)) AS AllKeys
RETURN NodeType, reduce(s = [], k IN AllKeys | s + k) AS Attributes"""
EDGE_METADATA_QUERY = """MATCH (a)-[r]->(b)
WITH DISTINCT type(r) AS EdgeType, labels(a)[0] AS SourceType, labels(b)[0] AS TargetType, r
WITH EdgeType, SourceType, TargetType, collect(distinct keys(r)) AS AllKeys, count(r) AS edge_count
RETURN EdgeType, SourceType, TargetType, reduce(s = [], k IN AllKeys | s + k) AS UniqueKeys, edge_count"""
LABEL_SAMPLE_QUERY = """MATCH (n:$NODE_TYPE)
RETURN n.features AS features
LIMIT 1"""
LABEL_COUNT_QUERY = """MATCH (n:$NODE_TYPE)
RETURN count(n) AS node_count"""
CLASS_QUERY = """MATCH (n:$NODE_TYPE)
RETURN DISTINCT n.label AS label"""
TWO_HOP_TEMPLATE = """MATCH (node_0:$NODE_TYPE)
WHERE node_0.id IN $SEED_NODES
OPTIONAL MATCH (node_0)-[rel_1:$REL_TYPE]->(node_1:$NODE_TYPE)-[rel_2:$REL_TYPE]->(node_2:$NODE_TYPE)
WITH node_0, node_1, node_2
ORDER BY rand()
LIMIT $MAX_NEIGHBOURS
RETURN
  node_0.id as src_id,
  node_1.id, node_1.features,
  node_2.id, node_2.features;"""
ONE_HOP_TEMPLATE = """MATCH (node_src:$NODE_TYPE)-[rel:$REL_TYPE]-> (node_dst:$NODE_TYPE)
WHERE id(node_src) IN $SEED_NODES
RETURN id(node_dst), rand() as r
ORDER BY r
LIMIT $MAX_NEIGHBOURS"""
# one-hop with the source id and features kept, so a chained hop can be decoded without another read
ONE_HOP_EDGES_TEMPLATE = """MATCH (node_src:$NODE_TYPE)-[rel:$REL_TYPE]->(node_dst:$NODE_TYPE)
WHERE id(node_src) IN $SEED_NODES
RETURN id(node_src) AS src_id, id(node_dst) AS dst_id, node_dst.features AS features, rand() AS r
ORDER BY r
LIMIT $MAX_NEIGHBOURS"""
SEED_FEATURES_TEMPLATE = """MATCH (n:$NODE_TYPE)
WHERE n.id IN $SEED_NODES
RETURN n.id AS id, n.features AS features, n.label AS label"""
# wire names of the templates the sampling server will run
TEMPLATES = {
    'two_hop': TWO_HOP_TEMPLATE,
    'one_hop': ONE_HOP_TEMPLATE,
    'one_hop_edges': ONE_HOP_EDGES_TEMPLATE,
    'node_features': SEED_FEATURES_TEMPLATE,
}
TWO_HOP_COLUMNS = ('src_id', 'node_1.id', 'node_1.features', 'node_2.id', 'node_2.features')
Row = Dict[str, Any]
@dataclass
class SamplingConfig:
    fanouts: List[int] = field(default_factory=lambda: [12, 12])
    strategy: str = 'global-limit'
    seed: int = 0
    node_type: str = 'PAPER'
    rel_type: str = 'CITES'
    def validate(self):
        if not self.fanouts or any(int(s) <= 0 for s in self.fanouts):
            raise ValueError(f"fanouts must be positive, got {self.fanouts}")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown sampling strategy {self.strategy!r} (expected one of {STRATEGIES})")
        if self.strategy == 'global-limit' and len(self.fanouts) != 2:
            raise ValueError("the global-limit strategy samples exactly two hops")
    def max_neighbours(self, seed_count: int) -> int:
        return int(seed_count * np.prod([int(s) for s in self.fanouts]))
@dataclass
class NodeTypeInfo:
    label: str
    keys: List[str]
    feature_dim: Optional[int]
    count: int
@dataclass
class EdgeTypeInfo:
    rel_type: str
    source: str
    target: str
    keys: List[str]
    count: int
@dataclass
class GraphMetadata:
    node_types: List[NodeTypeInfo] = field(default_factory=list)
    edge_types: List[EdgeTypeInfo] = field(default_factory=list)
    num_classes: int = 0
    def node_type(self, label: str) -> Optional[NodeTypeInfo]:
        for info in self.node_types:
            if info.label == label:
                return info
        return None
    def feature_dim(self, label: Optional[str] = None) -> Optional[int]:
        """Feature width of `label`, or of the first label carrying features"""
        for info in self.node_types:
            if (label is None or info.label == label) and info.feature_dim:
                return info.feature_dim
        return None
    @property
    def nbytes(self) -> int:
        total = 0
        for info in self.node_types:
            total += estimate_bytes(info.label) + estimate_bytes(info.keys) + 16
        for info in self.edge_types:
            total += estimate_bytes([info.rel_type, info.source, info.target]) + estimate_bytes(info.keys) + 8
        return total + 8
@dataclass
class SampledSubgraph:
    """
    Nodes get dense local indices seeds-first, then in order of first appearance.
    An edge pair (src, dst) means src aggregates from dst.
    """
    seed_ids: List[Any] = field(default_factory=list)
    hops: List[List[Tuple[int, Any, Any]]] = field(default_factory=list)
    local_index: Dict[Any, int] = field(default_factory=dict)
    edge_pairs: List[Tuple[int, int]] = field(default_factory=list)
    node_features: Dict[Any, Any] = field(default_factory=dict)
    seed_labels: Optional[List[int]] = None
    @property
    def hop1(self) -> List[Tuple[int, Any, Any]]:
        return self.hops[0] if self.hops else []
    @property
    def hop2(self) -> List[Tuple[int, Any, Any]]:
        return self.hops[1] if len(self.hops) > 1 else []
    @property
    def node_ids(self) -> List[Any]:
        ids = [None] * len(self.local_index)
        for node_id, index in self.local_index.items():
            ids[index] = node_id
        return ids
    @property
    def num_nodes(self) -> int:
        return len(self.local_index)
    @property
    def num_edges(self) -> int:
        return len(self.edge_pairs)
    def features(self) -> np.ndarray:
        """Feature matrix in local-index order; every node must carry features"""
        ids = self.node_ids
        missing = [i for i in ids if self.node_features.get(i) is None]
        if missing:
            raise DecodeError(f"{len(missing)} sampled node(s) have no features, e.g. id {missing[0]!r}")
        return np.stack([np.asarray(self.node_features[i], dtype=np.float64) for i in ids]) \
            if ids else np.zeros((0, 0), dtype=np.float64)
    @property
    def nbytes(self) -> int:
        return (estimate_bytes(list(self.node_features.values())) + 16 * len(self.edge_pairs)
                + 16 * len(self.local_index))
class _SubgraphBuilder:
    def __init__(self, seed_ids: Iterable[Any] = ()):
        self.graph = SampledSubgraph()
        self._pairs = set()
        for seed_id in seed_ids:
            self.add_seed(seed_id)
    def _index(self, node_id: Any) -> int:
        local = self.graph.local_index.get(node_id)
        if local is None:
            local = len(self.graph.local_index)
            self.graph.local_index[node_id] = local
        return local
    def add_seed(self, seed_id: Any):
        if seed_id not in self.graph.local_index:
            self.graph.seed_ids.append(seed_id)
            self._index(seed_id)
    def add_edge(self, hop: int, src_id: Any, dst_id: Any, features: Any):
        while len(self.graph.hops) <= hop:
            self.graph.hops.append([])
        src = self._index(src_id)
        dst = self._index(dst_id)
        self.graph.hops[hop].append((src, dst_id, features))
        if features is not None and self.graph.node_features.get(dst_id) is None:
            self.graph.node_features[dst_id] = features
        if (src, dst) not in self._pairs:
            self._pairs.add((src, dst))
            self.graph.edge_pairs.append((src, dst))
@lru_cache(maxsize=32)
def _parsed(template: str):
    return get_parser().parse(template)
def run_template(store: GraphStore, template: str, params: Mapping[str, Any], seed: int = 0,
                 sequence: int = 0, memory: Optional[MemoryTracker] = None) -> List[Row]:
    """Bind, plan and run one template in its own read transaction"""
    bound = bind(_parsed(template), params)
    physical = plan_query(bound, store.stats())
    rows = list(execute(physical, store, bound.params, seed, sequence))
    if memory is not None:
        memory.track(rows)
    return rows
def _run(source, template: str, params: Mapping[str, Any], seed: int = 0, sequence: int = 0,
         memory: Optional[MemoryTracker] = None) -> List[Row]:
    """Run against a local GraphStore or anything with a run_template method (the sampling client)"""
    if isinstance(source, GraphStore):
        return run_template(source, template, params, seed, sequence, memory)
    rows = source.run_template(template, params, seed, sequence)
    if memory is not None:
        memory.track(rows)
    return rows
def _unique_keys(keys: Iterable[str]) -> List[str]:
    seen = []
    for key in keys or []:
        if key not in seen:
            seen.append(key)
    return seen
def fetch_node_metadata(store: GraphStore) -> GraphMetadata:
    rows = run_template(store, NODE_METADATA_QUERY, {})
    meta = GraphMetadata()
    for row in rows:
        label = row['NodeType']
        params = {'NODE_TYPE': label}
        sample = run_template(store, LABEL_SAMPLE_QUERY, params)
        features = sample[0]['features'] if sample else None
        feature_dim = len(features) if features is not None and hasattr(features, '__len__') else None
        count = run_template(store, LABEL_COUNT_QUERY, params)[0]['node_count']
        meta.node_types.append(NodeTypeInfo(label, _unique_keys(row['Attributes']), feature_dim, int(count)))
    logger.debug(f"Node metadata: {[(t.label, t.feature_dim, t.count) for t in meta.node_types]}")
    return meta
def fetch_edge_metadata(store: GraphStore) -> GraphMetadata:
    meta = GraphMetadata()
    for row in run_template(store, EDGE_METADATA_QUERY, {}):
        meta.edge_types.append(EdgeTypeInfo(row['EdgeType'], row['SourceType'], row['TargetType'],
                                            _unique_keys(row['UniqueKeys']), int(row['edge_count'])))
    return meta
def fetch_num_classes(store: GraphStore, node_type: str) -> int:
    rows = run_template(store, CLASS_QUERY, {'NODE_TYPE': node_type})
    return sum(1 for row in rows if row['label'] is not None)
def fetch_metadata(store: GraphStore, node_type: Optional[str] = None,
                   memory: Optional[MemoryTracker] = None) -> GraphMetadata:
    """Node and edge metadata plus the class count of `node_type` (first label when omitted)"""
    meta = fetch_node_metadata(store)
    meta.edge_types = fetch_edge_metadata(store).edge_types
    if node_type is None and meta.node_types:
        node_type = meta.node_types[0].label
    if node_type is not None and meta.node_type(node_type) is not None:
        meta.num_classes = fetch_num_classes(store, node_type)
    if memory is not None:
        memory.allocate(meta.nbytes)
    logger.info(f"Metadata: {len(meta.node_types)} node type(s), {len(meta.edge_types)} edge type(s), "
                f"{meta.num_classes} classes, ~{meta.nbytes} bytes")
    return meta
def fetch_seed_features(store: GraphStore, seeds: Sequence[Any], cfg: SamplingConfig,
                        memory: Optional[MemoryTracker] = None) -> Tuple[List[Any], List[Any], List[Any]]:
    """(ids, features, labels) of the seeds found in the store, in seed order"""
    rows = _run(store, SEED_FEATURES_TEMPLATE, {'NODE_TYPE': cfg.node_type, 'SEED_NODES': list(seeds)},
                memory=memory)
    by_id = {row['id']: row for row in rows}
    ids, features, labels = [], [], []
    for seed_id in seeds:
        # popping drops repeated seeds
        row = by_id.pop(seed_id, None)
        if row is None:
            continue
        ids.append(seed_id)
        features.append(row['features'])
        labels.append(row['label'])
    return ids, features, labels
def decode(rows: Iterable[Row], seed_ids: Optional[Sequence[Any]] = None) -> SampledSubgraph:
    """Turn two-hop template rows into a SampledSubgraph; rows with a null hop are skipped"""
    rows = list(rows)
    for row in rows:
        if not isinstance(row, Mapping) or any(column not in row for column in TWO_HOP_COLUMNS):
            raise DecodeError(f"row does not follow the two-hop schema {TWO_HOP_COLUMNS}: {row!r}")
        if row['src_id'] is None:
            raise DecodeError("row has a null src_id")
    # seeds-first: without an explicit seed list every src_id counts as a seed
    builder = _SubgraphBuilder(seed_ids if seed_ids is not None else [row['src_id'] for row in rows])
    for row in rows:
        src = row['src_id']
        builder.add_seed(src)
        hop1 = row['node_1.id']
        if hop1 is None:
            continue
        builder.add_edge(0, src, hop1, row['node_1.features'])
        hop2 = row['node_2.id']
        if hop2 is not None:
            builder.add_edge(1, hop1, hop2, row['node_2.features'])
    return builder.graph
def _two_hop_rows(store: GraphStore, seeds: Sequence[Any], max_neighbours: int, cfg: SamplingConfig,
                  sample_seed: Optional[int], memory: Optional[MemoryTracker]) -> List[Row]:
    if max_neighbours < 0:
        raise ValueError("max_neighbours must be non-negative")
    params = {'NODE_TYPE': cfg.node_type, 'REL_TYPE': cfg.rel_type, 'SEED_NODES': list(seeds),
              'MAX_NEIGHBOURS': int(max_neighbours)}
    seed = cfg.seed if sample_seed is None else sample_seed
    return _run(store, TWO_HOP_TEMPLATE, params, seed, 0, memory)
def sample_two_hop(store: GraphStore, seeds: Sequence[Any], max_neighbours: int, cfg: SamplingConfig,
                   sample_seed: Optional[int] = None, memory: Optional[MemoryTracker] = None) -> SampledSubgraph:
    """Global-limit two-hop sample; seeds absent from the store are dropped"""
    found, _, _ = fetch_seed_features(store, seeds, cfg)
    return decode(_two_hop_rows(store, found, max_neighbours, cfg, sample_seed, memory), found)
def sample_one_hop(store: GraphStore, seeds: Sequence[Any], max_neighbours: int, cfg: SamplingConfig,
                   sample_seed: Optional[int] = None) -> List[Any]:
    """Ids of up to `max_neighbours` out-neighbours of the seeds"""
    params = {'NODE_TYPE': cfg.node_type, 'REL_TYPE': cfg.rel_type, 'SEED_NODES': list(seeds),
              'MAX_NEIGHBOURS': int(max_neighbours)}
    seed = cfg.seed if sample_seed is None else sample_seed
    rows = _run(store, ONE_HOP_TEMPLATE, params, seed, 0)
    return [row['id(node_dst)'] for row in rows]
def sample_k_hop_chained(store: GraphStore, seeds: Sequence[Any], fanouts: Sequence[int], cfg: SamplingConfig,
                         sample_seed: Optional[int] = None,
                         memory: Optional[MemoryTracker] = None) -> SampledSubgraph:
    """One one-hop query per layer; each hop's distinct targets form the next frontier"""
    builder = _SubgraphBuilder(seeds)
    frontier = list(builder.graph.seed_ids)
    seed = cfg.seed if sample_seed is None else sample_seed
    for hop, fanout in enumerate(fanouts):
        if not frontier:
            break
        params = {'NODE_TYPE': cfg.node_type, 'REL_TYPE': cfg.rel_type, 'SEED_NODES': frontier,
                  'MAX_NEIGHBOURS': len(frontier) * int(fanout)}
        rows = _run(store, ONE_HOP_EDGES_TEMPLATE, params, seed, hop, memory)
        next_frontier, seen = [], set()
        for row in rows:
            builder.add_edge(hop, row['src_id'], row['dst_id'], row['features'])
            if row['dst_id'] not in seen:
                seen.add(row['dst_id'])
                next_frontier.append(row['dst_id'])
        frontier = next_frontier
    return builder.graph
def sample(store: GraphStore, seeds: Sequence[Any], cfg: SamplingConfig, sample_seed: Optional[int] = None,
           memory: Optional[MemoryTracker] = None) -> SampledSubgraph:
    """
    Sample a training subgraph for `seeds` with the configured strategy and attach
    the seeds' own features and labels. Seeds missing from the store are dropped.
    """
    cfg.validate()
    ids, features, labels = fetch_seed_features(store, seeds, cfg, memory)
    if cfg.strategy == 'global-limit':
        rows = _two_hop_rows(store, ids, cfg.max_neighbours(len(ids)), cfg, sample_seed, memory)
        graph = decode(rows, ids)
    else:
        graph = sample_k_hop_chained(store, ids, cfg.fanouts, cfg, sample_seed, memory)
    for seed_id, vector in zip(ids, features):
        graph.node_features[seed_id] = vector
    graph.seed_labels = list(labels)
    return graph
