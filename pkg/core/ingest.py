# core/ingest.py
"""
CSV bulk loader (OGB-style node-feature + edge-list files).

Dialect: comma separated, header row required, feature vectors packed into a
single column of semicolon-separated floats. Node files need an id column;
edge files reference node ids through src/dst columns.
"""
import re
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple
import pandas as pd
from tqdm import tqdm
from storage import DuplicateId, GraphStore, PropertyTypeError
from .errors import IngestError, MalformedRow
logger = logging.getLogger(__name__)
CHUNK_ROWS = 50_000
COLUMN_TYPES = ('string', 'int', 'float', 'vector')
_INT = re.compile(r'[+-]?\d+')
@dataclass
class NodeFile:
    path: Path
    label: str
    id_column: str = 'id'
    # column -> string | int | float | vector; unlisted columns load as strings
    columns: Dict[str, str] = field(default_factory=lambda: {'id': 'string', 'features': 'vector', 'label': 'int'})
@dataclass
class EdgeFile:
    path: Path
    rel_type: str
    src_column: str = 'src'
    dst_column: str = 'dst'
    src_label: Optional[str] = None
    dst_label: Optional[str] = None
@dataclass
class IngestSpec:
    node_files: List[NodeFile] = field(default_factory=list)
    edge_files: List[EdgeFile] = field(default_factory=list)
    feature_dim: int = 0
    id_column: str = 'id'
    def validate(self):
        if self.feature_dim < 0:
            raise IngestError(f"feature_dim must be non-negative, got {self.feature_dim}")
        for node_file in self.node_files:
            for column, kind in node_file.columns.items():
                if kind not in COLUMN_TYPES:
                    raise IngestError(f"column {column}: unknown type {kind!r} (expected one of {COLUMN_TYPES})")
        for path in [f.path for f in self.node_files] + [f.path for f in self.edge_files]:
            if not Path(path).is_file():
                raise IngestError(f"input file not found: {path}")
def parse_file_arg(text: str) -> Tuple[str, List[str]]:
    """Split a CLI `path:NAME[:...]` argument; the path may itself contain ':' (Windows drives)"""
    parts = text.split(':')
    for i in range(1, len(parts)):
        candidate = ':'.join(parts[:i])
        if Path(candidate).suffix:
            return candidate, parts[i:]
    return parts[0], parts[1:]
def _parse_cell(value: str, kind: str, feature_dim: int) -> Any:
    if kind == 'string':
        return value
    if kind == 'int':
        if not _INT.fullmatch(value.strip()):
            raise ValueError(f"expected an integer, got {value!r}")
        return int(value)
    if kind == 'float':
        return float(value)
    floats = [float(x) for x in value.split(';')] if value.strip() else []
    if feature_dim and len(floats) != feature_dim:
        raise ValueError(f"expected {feature_dim} features, got {len(floats)}")
    return floats
def _read_chunks(path: Path):
    try:
        return pd.read_csv(path, dtype=str, keep_default_na=False, chunksize=CHUNK_ROWS)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise MalformedRow(path, 1, f"unreadable CSV: {e}")
def _require_columns(path: Path, header: List[str], required: List[str]):
    missing = [c for c in required if c not in header]
    if missing:
        raise MalformedRow(path, 1, f"missing column(s): {', '.join(missing)}")
def _iter_rows(path: Path, required: List[str]):
    """Yields (line number, row dict); line 1 is the header"""
    line = 2
    try:
        for chunk in _read_chunks(path):
            _require_columns(path, list(chunk.columns), required)
            for record in chunk.to_dict(orient='records'):
                yield line, record
                line += 1
    except pd.errors.ParserError as e:
        raise MalformedRow(path, line, f"unparsable row: {e}")
def _load_nodes(node_file: NodeFile, spec: IngestSpec, store: GraphStore, progress: Optional[tqdm]) -> int:
    path = Path(node_file.path)
    id_column = node_file.id_column or spec.id_column
    columns = dict(node_file.columns)
    if id_column != 'id' and 'id' in columns and id_column not in columns:
        columns[id_column] = columns.pop('id')
    loaded = 0
    for line, record in _iter_rows(path, [id_column]):
        properties: Dict[str, Any] = {}
        for column, raw in record.items():
            kind = columns.get(column, 'string')
            key = 'id' if column == id_column else column
            if raw == '' and column != id_column:
                continue
            try:
                properties[key] = _parse_cell(raw, kind, spec.feature_dim if kind == 'vector' else 0)
            except ValueError as e:
                raise MalformedRow(path, line, f"column {column}: {e}")
        try:
            store.create_node([node_file.label], properties)
        except DuplicateId:
            logger.error(f"Duplicate id at {path}:{line}")
            raise
        except PropertyTypeError as e:
            raise MalformedRow(path, line, str(e))
        loaded += 1
        if progress is not None:
            progress.update(1)
    logger.info(f"Loaded {loaded} :{node_file.label} nodes from {path.name}")
    return loaded
def _resolve(store: GraphStore, labels: List[str], value: str) -> Optional[int]:
    candidates = [value]
    if _INT.fullmatch(value.strip()):
        candidates.append(int(value))
    for label in labels:
        index = store.indexes.get((label, 'id'))
        if index is None:
            continue
        for candidate in candidates:
            node_id = index.lookup(candidate)
            if node_id is not None:
                return node_id
    return None
def _load_edges(edge_file: EdgeFile, store: GraphStore, progress: Optional[tqdm]) -> int:
    path = Path(edge_file.path)
    all_labels = store.labels
    src_labels = [edge_file.src_label] if edge_file.src_label else all_labels
    dst_labels = [edge_file.dst_label] if edge_file.dst_label else all_labels
    loaded = 0
    for line, record in _iter_rows(path, [edge_file.src_column, edge_file.dst_column]):
        src = _resolve(store, src_labels, record[edge_file.src_column])
        dst = _resolve(store, dst_labels, record[edge_file.dst_column])
        if src is None or dst is None:
            missing = record[edge_file.src_column] if src is None else record[edge_file.dst_column]
            raise MalformedRow(path, line, f"unknown node id {missing!r}")
        properties = {k: v for k, v in record.items()
                      if k not in (edge_file.src_column, edge_file.dst_column) and v != ''}
        store.create_edge(src, dst, edge_file.rel_type, properties)
        loaded += 1
        if progress is not None:
            progress.update(1)
    logger.info(f"Loaded {loaded} :{edge_file.rel_type} edges from {path.name}")
    return loaded
def load_csv(spec: IngestSpec, store: GraphStore, show_progress: bool = False) -> Dict[str, int]:
    """Insert every node file, then every edge file; returns the loaded counts"""
    spec.validate()
    nodes_loaded = 0
    edges_loaded = 0
    with tqdm(desc="Ingesting", unit="row", disable=not show_progress) as progress:
        for node_file in spec.node_files:
            nodes_loaded += _load_nodes(node_file, spec, store, progress)
        for edge_file in spec.edge_files:
            edges_loaded += _load_edges(edge_file, store, progress)
    store.flush()
    logger.info(f"Ingest complete: {nodes_loaded} nodes, {edges_loaded} edges")
    return {'nodes_loaded': nodes_loaded, 'edges_loaded': edges_loaded}
