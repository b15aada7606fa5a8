# storage/graph_store.py
"""
Disk-backed labelled property graph store.

A store directory holds nodes.dat, edges.dat, props.dat, index/ and meta.json
(see README.md, "On-disk format"). One writer at a time; any number of read
transactions, each with its own AccessCounters.
"""
import json
import os
import re
import struct
import threading
import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple
import numpy as np
from .errors import (CorruptStore, DuplicateId, EmptyLabels, IndexNotFound, PropertyTypeError,
                     ReadOnlyStore, StoreNotFound, UnknownEdge, UnknownNode, WriteConflict)
from .hash_index import HashIndex
from .page_cache import PageCache, PagedFile
from .property_codec import TAG_VECTOR, block_length, decode_properties, encode_properties, normalize_value, value_tag
logger = logging.getLogger(__name__)
FORMAT_NAME = 'gtdb-lpg'
FORMAT_VERSION = 1
NODES_FILE = 'nodes.dat'
EDGES_FILE = 'edges.dat'
PROPS_FILE = 'props.dat'
META_FILE = 'meta.json'
INDEX_DIR = 'index'
LOCK_FILE = 'write.lock'
ID_KEY = 'id'
DEFAULT_PAGE_CACHE_BYTES = 64 * 1024 * 1024
# in_use | labelset_id | prop_offset | first_out | first_in
NODE_RECORD = struct.Struct('<B3xIqqq')
# in_use | type_id | src | dst | prop_offset | next_out | next_in | reserved
EDGE_RECORD = struct.Struct('<B3xIqqqqq16x')
NO_ENTRY = -1
DIRECTIONS = ('out', 'in', 'both')
@dataclass
class AccessCounters:
    db_hits: int = 0
    page_cache_hits: int = 0
    page_cache_misses: int = 0
    def merge(self, other: "AccessCounters"):
        self.db_hits += other.db_hits
        self.page_cache_hits += other.page_cache_hits
        self.page_cache_misses += other.page_cache_misses
    def copy(self) -> "AccessCounters":
        return AccessCounters(self.db_hits, self.page_cache_hits, self.page_cache_misses)
    def as_dict(self) -> Dict[str, int]:
        return {'db_hits': self.db_hits, 'page_cache_hits': self.page_cache_hits,
                'page_cache_misses': self.page_cache_misses}
@dataclass
class StoreStats:
    node_count: int = 0
    edge_count: int = 0
    label_counts: Dict[str, int] = field(default_factory=dict)
    rel_type_counts: Dict[str, int] = field(default_factory=dict)
    avg_out_degree: Dict[Tuple[str, str], float] = field(default_factory=dict)
    avg_in_degree: Dict[Tuple[str, str], float] = field(default_factory=dict)
    indexes: List[Tuple[str, str]] = field(default_factory=list)
    def out_degree(self, label: Optional[str], rel_type: Optional[str]) -> float:
        """Average degree used by the cardinality model; unlabelled/untyped fall back to global averages"""
        return self._degree(self.avg_out_degree, label, rel_type)
    def in_degree(self, label: Optional[str], rel_type: Optional[str]) -> float:
        return self._degree(self.avg_in_degree, label, rel_type)
    def _degree(self, table, label, rel_type) -> float:
        if label is not None and rel_type is not None:
            return table.get((label, rel_type), 0.0)
        if label is not None:
            return sum(v for (l, _), v in table.items() if l == label)
        edges = self.rel_type_counts.get(rel_type, 0) if rel_type is not None else self.edge_count
        return edges / self.node_count if self.node_count else 0.0
    def label_selectivity(self, label: str) -> float:
        if not self.node_count:
            return 0.0
        return self.label_counts.get(label, 0) / self.node_count
def _safe_name(text: str) -> str:
    return re.sub(r'[^A-Za-z0-9_.-]', '_', text)
class GraphStore:
    """Open store directory; use as a context manager"""
    def __init__(self, path, mode: str = 'r', page_cache_bytes: int = DEFAULT_PAGE_CACHE_BYTES,
                 use_write_lock: bool = True):
        if mode not in ('r', 'w'):
            raise ValueError(f"mode must be 'r' or 'w', got {mode!r}")
        self.path = Path(path)
        self.mode = mode
        self.writable = mode == 'w'
        self.cache = PageCache(page_cache_bytes)
        self.totals = AccessCounters()
        self._totals_lock = threading.Lock()
        self._reads_lock = threading.Lock()
        self._open_reads = 0
        self._lock_path: Optional[Path] = None
        self._closed = False
        if self.writable:
            self.path.mkdir(parents=True, exist_ok=True)
            (self.path / INDEX_DIR).mkdir(exist_ok=True)
            if use_write_lock:
                self._acquire_write_lock()
        elif not (self.path / META_FILE).exists():
            raise StoreNotFound(f"no graph store at {self.path}")
        self._load_meta()
        self.nodes = PagedFile(self.path / NODES_FILE, self.cache, self.writable,
                               self.node_count * NODE_RECORD.size)
        self.edges = PagedFile(self.path / EDGES_FILE, self.cache, self.writable,
                               self.edge_count * EDGE_RECORD.size)
        self.props = PagedFile(self.path / PROPS_FILE, self.cache, self.writable, self.meta['props_size'])
        self.indexes: Dict[Tuple[str, str], HashIndex] = {}
        for label, key in self.meta['indexes']:
            self.indexes[(label, key)] = HashIndex(self._index_path(label, key), label, key,
                                                   self.cache, self.writable)
        logger.info(f"Opened store {self.path} ({mode}): {self.node_count} nodes, {self.edge_count} edges")
    # ------------------------------------------------------------------ catalog
    def _acquire_write_lock(self):
        lock_path = self.path / LOCK_FILE
        try:
            fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise WriteConflict(f"store {self.path} is locked by another writer ({lock_path})")
        with os.fdopen(fd, 'w') as f:
            f.write(str(os.getpid()))
        self._lock_path = lock_path
    def _load_meta(self):
        meta_path = self.path / META_FILE
        if meta_path.exists():
            try:
                with open(meta_path, 'r', encoding='utf-8') as f:
                    self.meta = json.load(f)
            except (OSError, json.JSONDecodeError) as e:
                raise CorruptStore(f"unreadable {meta_path}: {e}")
            if self.meta.get('format') != FORMAT_NAME or self.meta.get('version') != FORMAT_VERSION:
                raise CorruptStore(f"{meta_path} is not a {FORMAT_NAME} v{FORMAT_VERSION} catalog")
        else:
            self.meta = {
                'format': FORMAT_NAME, 'version': FORMAT_VERSION,
                'node_count': 0, 'edge_count': 0, 'props_size': 0,
                'labels': [], 'rel_types': [], 'property_keys': [], 'label_sets': [],
                'label_counts': {}, 'rel_type_counts': {},
                'out_edge_counts': {}, 'in_edge_counts': {},
                'vector_dims': {}, 'indexes': [],
            }
        self._label_ids = {name: i for i, name in enumerate(self.meta['labels'])}
        self._rel_ids = {name: i for i, name in enumerate(self.meta['rel_types'])}
        self._key_ids = {name: i for i, name in enumerate(self.meta['property_keys'])}
        self._label_set_ids = {tuple(s): i for i, s in enumerate(self.meta['label_sets'])}
    def _save_meta(self):
        tmp = self.path / (META_FILE + '.tmp')
        with open(tmp, 'w', encoding='utf-8') as f:
            json.dump(self.meta, f, indent=2, sort_keys=True)
        os.replace(tmp, self.path / META_FILE)
    def _index_path(self, label: str, key: str) -> Path:
        return self.path / INDEX_DIR / f"{_safe_name(label)}.{_safe_name(key)}.idx"
    def _intern(self, table: Dict[str, int], catalog: List[str], name: str) -> int:
        ident = table.get(name)
        if ident is None:
            ident = len(catalog)
            catalog.append(name)
            table[name] = ident
        return ident
    def _key_id(self, key: str) -> int:
        if not isinstance(key, str) or not key:
            raise PropertyTypeError(f"property keys must be non-empty strings, got {key!r}")
        return self._intern(self._key_ids, self.meta['property_keys'], key)
    def _label_set_id(self, labels: Sequence[str]) -> int:
        ids = tuple(self._intern(self._label_ids, self.meta['labels'], l) for l in labels)
        ident = self._label_set_ids.get(ids)
        if ident is None:
            ident = len(self.meta['label_sets'])
            self.meta['label_sets'].append(list(ids))
            self._label_set_ids[ids] = ident
        return ident
    def label_set(self, labelset_id: int) -> List[str]:
        return [self.meta['labels'][i] for i in self.meta['label_sets'][labelset_id]]
    @property
    def node_count(self) -> int:
        return self.meta['node_count']
    @property
    def edge_count(self) -> int:
        return self.meta['edge_count']
    @property
    def labels(self) -> List[str]:
        return list(self.meta['labels'])
    @property
    def rel_types(self) -> List[str]:
        return list(self.meta['rel_types'])
    @property
    def property_keys(self) -> List[str]:
        return list(self.meta['property_keys'])
    def has_index(self, label: str, key: str) -> bool:
        return (label, key) in self.indexes
    def vector_dim(self, label: str, key: str) -> Optional[int]:
        return self.meta['vector_dims'].get(label, {}).get(key)
    # ------------------------------------------------------------------ records
    def _check_node(self, node_id) -> int:
        if isinstance(node_id, (bool, np.bool_)) or not isinstance(node_id, (int, np.integer)):
            raise UnknownNode(node_id)
        node_id = int(node_id)
        if not 0 <= node_id < self.node_count:
            raise UnknownNode(node_id)
        return node_id
    def _read_node(self, node_id: int, counters=()) -> Tuple[int, int, int, int, int]:
        raw = self.nodes.read(node_id * NODE_RECORD.size, NODE_RECORD.size, counters)
        return NODE_RECORD.unpack(raw)
    def _read_edge(self, edge_id: int, counters=()) -> Tuple[int, ...]:
        raw = self.edges.read(edge_id * EDGE_RECORD.size, EDGE_RECORD.size, counters)
        return EDGE_RECORD.unpack(raw)
    def _read_props(self, offset: int, counters=()) -> Dict[str, Any]:
        if offset == NO_ENTRY:
            return {}
        length = block_length(self.props.read(offset, 4, counters))
        payload = self.props.read(offset + 4, length, counters)
        return decode_properties(payload, self.meta['property_keys'])
    # ------------------------------------------------------------------ writes
    def _require_writable(self):
        if not self.writable:
            raise ReadOnlyStore(self.path)
        if self._closed:
            raise WriteConflict("store is closed")
        with self._reads_lock:
            if self._open_reads:
                raise WriteConflict(f"{self._open_reads} read transaction(s) open; writes are forbidden")
    def create_node(self, labels: Sequence[str], properties: Optional[Dict[str, Any]] = None) -> int:
        self._require_writable()
        labels = list(dict.fromkeys(labels or []))
        if not labels:
            raise EmptyLabels()
        for label in labels:
            if not isinstance(label, str) or not label:
                raise PropertyTypeError(f"labels must be non-empty strings, got {label!r}")
        props = {k: normalize_value(v) for k, v in (properties or {}).items()}
        # validate everything before anything is written
        if ID_KEY in props:
            for label in labels:
                index = self.indexes.get((label, ID_KEY))
                if index is not None and index.get_pending(props[ID_KEY]) is not None:
                    raise DuplicateId(label, props[ID_KEY])
        for key, value in props.items():
            if value_tag(value) == TAG_VECTOR:
                for label in labels:
                    dim = self.vector_dim(label, key)
                    if dim is not None and dim != len(value):
                        raise PropertyTypeError(
                            f"{label}.{key} vectors have dimension {dim}, got {len(value)}")
        prop_offset = self.props.append(encode_properties(props, self._key_id)) if props else NO_ENTRY
        self.meta['props_size'] = self.props.size
        node_id = self.node_count
        record = NODE_RECORD.pack(1, self._label_set_id(labels), prop_offset, NO_ENTRY, NO_ENTRY)
        self.nodes.write(node_id * NODE_RECORD.size, record)
        self.meta['node_count'] = node_id + 1
        for label in labels:
            self.meta['label_counts'][label] = self.meta['label_counts'].get(label, 0) + 1
            for key, value in props.items():
                if value_tag(value) == TAG_VECTOR:
                    self.meta['vector_dims'].setdefault(label, {})[key] = len(value)
            if ID_KEY in props:
                index = self.indexes.get((label, ID_KEY))
                if index is None:
                    index = HashIndex(self._index_path(label, ID_KEY), label, ID_KEY, self.cache, True)
                    self.indexes[(label, ID_KEY)] = index
                    self.meta['indexes'].append([label, ID_KEY])
                index.insert(props[ID_KEY], node_id)
        return node_id
    def create_edge(self, src: int, dst: int, rel_type: str, properties: Optional[Dict[str, Any]] = None) -> int:
        self._require_writable()
        src = self._check_node(src)
        dst = self._check_node(dst)
        if not isinstance(rel_type, str) or not rel_type:
            raise PropertyTypeError(f"relationship type must be a non-empty string, got {rel_type!r}")
        props = {k: normalize_value(v) for k, v in (properties or {}).items()}
        prop_offset = self.props.append(encode_properties(props, self._key_id)) if props else NO_ENTRY
        self.meta['props_size'] = self.props.size
        type_id = self._intern(self._rel_ids, self.meta['rel_types'], rel_type)
        _, src_set, src_props, src_out, src_in = self._read_node(src)
        edge_id = self.edge_count
        _, dst_set, dst_props, dst_out, dst_in = self._read_node(dst)
        record = EDGE_RECORD.pack(1, type_id, src, dst, prop_offset, src_out, dst_in)
        self.edges.write(edge_id * EDGE_RECORD.size, record)
        self.nodes.write(src * NODE_RECORD.size, NODE_RECORD.pack(1, src_set, src_props, edge_id, src_in))
        # re-read so a self loop keeps the out-pointer written just above
        _, dst_set, dst_props, dst_out, _ = self._read_node(dst)
        self.nodes.write(dst * NODE_RECORD.size, NODE_RECORD.pack(1, dst_set, dst_props, dst_out, edge_id))
        self.meta['edge_count'] = edge_id + 1
        self.meta['rel_type_counts'][rel_type] = self.meta['rel_type_counts'].get(rel_type, 0) + 1
        for label in self.label_set(src_set):
            per_label = self.meta['out_edge_counts'].setdefault(label, {})
            per_label[rel_type] = per_label.get(rel_type, 0) + 1
        for label in self.label_set(dst_set):
            per_label = self.meta['in_edge_counts'].setdefault(label, {})
            per_label[rel_type] = per_label.get(rel_type, 0) + 1
        return edge_id
    # ------------------------------------------------------------------ reads
    def begin_read(self) -> "ReadTransaction":
        if self._closed:
            raise StoreNotFound("store is closed")
        with self._reads_lock:
            self._open_reads += 1
        return ReadTransaction(self)
    def _end_read(self, tx: "ReadTransaction"):
        with self._reads_lock:
            self._open_reads -= 1
        with self._totals_lock:
            self.totals.merge(tx.counters)
    @contextmanager
    def _short_read(self):
        tx = self.begin_read()
        try:
            yield tx
        finally:
            tx.close()
    def node_index_seek(self, label: str, key: str, values: Sequence[Any]) -> List[int]:
        with self._short_read() as tx:
            return tx.node_index_seek(label, key, values)
    def expand(self, node_id: int, direction: str = 'out', rel_type: Optional[str] = None) -> List[Tuple[int, int]]:
        with self._short_read() as tx:
            return list(tx.expand(node_id, direction, rel_type))
    def get_property(self, node_id: int, key: str) -> Any:
        with self._short_read() as tx:
            return tx.get_property(node_id, key)
    def stats(self) -> StoreStats:
        stats = StoreStats(node_count=self.node_count, edge_count=self.edge_count,
                           label_counts=dict(self.meta['label_counts']),
                           rel_type_counts=dict(self.meta['rel_type_counts']),
                           indexes=[tuple(pair) for pair in self.meta['indexes']])
        for table, target in ((self.meta['out_edge_counts'], stats.avg_out_degree),
                              (self.meta['in_edge_counts'], stats.avg_in_degree)):
            for label, per_type in table.items():
                label_count = self.meta['label_counts'].get(label, 0)
                for rel_type, count in per_type.items():
                    target[(label, rel_type)] = count / label_count if label_count else 0.0
        return stats
    # ------------------------------------------------------------------ lifecycle
    def flush(self):
        if not self.writable or self._closed:
            return
        self.nodes.flush()
        self.edges.flush()
        self.props.flush()
        for index in self.indexes.values():
            index.flush()
        self._save_meta()
        logger.debug(f"Flushed store {self.path}")
    def close(self):
        if self._closed:
            return
        try:
            if self.writable:
                self.flush()
            for index in self.indexes.values():
                index.close()
            self.nodes.close()
            self.edges.close()
            self.props.close()
        finally:
            self._closed = True
            if self._lock_path is not None:
                try:
                    self._lock_path.unlink()
                except OSError as e:
                    logger.warning(f"Could not remove write lock {self._lock_path}: {e}")
            logger.info(f"Closed store {self.path}")
    def __enter__(self):
        return self
    def __exit__(self, exc_type, exc, tb):
        self.close()
class ReadTransaction:
    """Read operations with per-transaction accounting.

    Every read accepts an optional `charge` counter so the caller (a plan
    operator) gets the same hits attributed to it.
    """
    def __init__(self, store: GraphStore):
        self.store = store
        self.counters = AccessCounters()
        self.closed = False
    def _sinks(self, charge):
        return (self.counters,) if charge is None else (self.counters, charge)
    @staticmethod
    def _hit(sinks, n: int = 1):
        for c in sinks:
            c.db_hits += n
    def node_index_seek(self, label: str, key: str, values: Sequence[Any], charge=None) -> List[int]:
        index = self.store.indexes.get((label, key))
        if index is None:
            raise IndexNotFound(label, key)
        sinks = self._sinks(charge)
        found = []
        seen = set()
        for value in values:
            node_id = index.lookup(value, sinks)
            if node_id is None or node_id in seen:
                continue
            seen.add(node_id)
            # index probe + record fetch
            self._hit(sinks, 2)
            self.store._read_node(node_id, sinks)
            found.append(node_id)
        return found
    def expand(self, node_id: int, direction: str = 'out', rel_type: Optional[str] = None,
               charge=None) -> Iterator[Tuple[int, int]]:
        if direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}")
        node_id = self.store._check_node(node_id)
        return self._expand(node_id, direction, rel_type, self._sinks(charge))
    def _expand(self, node_id, direction, rel_type, sinks):
        _, _, _, first_out, first_in = self.store._read_node(node_id, sinks)
        self._hit(sinks)
        type_id = self.store._rel_ids.get(rel_type) if rel_type is not None else None
        if rel_type is not None and type_id is None:
            return
        if direction in ('out', 'both'):
            edge_id = first_out
            while edge_id != NO_ENTRY:
                _, etype, _src, dst, _p, next_out, _ni = self.store._read_edge(edge_id, sinks)
                if type_id is None or etype == type_id:
                    self._hit(sinks)
                    yield edge_id, dst
                edge_id = next_out
        if direction in ('in', 'both'):
            edge_id = first_in
            while edge_id != NO_ENTRY:
                _, etype, src, _dst, _p, _no, next_in = self.store._read_edge(edge_id, sinks)
                if type_id is None or etype == type_id:
                    self._hit(sinks)
                    yield edge_id, src
                edge_id = next_in
    def node_properties(self, node_id: int, charge=None) -> Dict[str, Any]:
        node_id = self.store._check_node(node_id)
        sinks = self._sinks(charge)
        self._hit(sinks)
        _, _, prop_offset, _, _ = self.store._read_node(node_id, sinks)
        return self.store._read_props(prop_offset, sinks)
    def get_property(self, node_id: int, key: str, charge=None) -> Any:
        return self.node_properties(node_id, charge).get(key)
    def node_labels(self, node_id: int, charge=None) -> List[str]:
        node_id = self.store._check_node(node_id)
        sinks = self._sinks(charge)
        self._hit(sinks)
        _, labelset, _, _, _ = self.store._read_node(node_id, sinks)
        return self.store.label_set(labelset)
    def has_label(self, node_id: int, label: str, charge=None) -> bool:
        return label in self.node_labels(node_id, charge)
    def _check_edge(self, edge_id) -> int:
        edge_id = int(edge_id)
        if not 0 <= edge_id < self.store.edge_count:
            raise UnknownEdge(edge_id)
        return edge_id
    def edge_type(self, edge_id: int, charge=None) -> str:
        sinks = self._sinks(charge)
        self._hit(sinks)
        _, type_id, _, _, _, _, _ = self.store._read_edge(self._check_edge(edge_id), sinks)
        return self.store.meta['rel_types'][type_id]
    def edge_endpoints(self, edge_id: int, charge=None) -> Tuple[int, int]:
        sinks = self._sinks(charge)
        self._hit(sinks)
        _, _, src, dst, _, _, _ = self.store._read_edge(self._check_edge(edge_id), sinks)
        return src, dst
    def edge_properties(self, edge_id: int, charge=None) -> Dict[str, Any]:
        sinks = self._sinks(charge)
        self._hit(sinks)
        _, _, _, _, prop_offset, _, _ = self.store._read_edge(self._check_edge(edge_id), sinks)
        return self.store._read_props(prop_offset, sinks)
    def all_nodes(self, charge=None) -> Iterator[int]:
        sinks = self._sinks(charge)
        for node_id in range(self.store.node_count):
            self._hit(sinks)
            self.store._read_node(node_id, sinks)
            yield node_id
    def nodes_by_label(self, label: str, charge=None) -> Iterator[int]:
        sinks = self._sinks(charge)
        label_id = self.store._label_ids.get(label)
        if label_id is None:
            return
        for node_id in range(self.store.node_count):
            self._hit(sinks)
            _, labelset, _, _, _ = self.store._read_node(node_id, sinks)
            if label_id in self.store.meta['label_sets'][labelset]:
                yield node_id
    def node_keys(self, node_id: int, charge=None) -> List[str]:
        return list(self.node_properties(node_id, charge))
    def edge_keys(self, edge_id: int, charge=None) -> List[str]:
        return list(self.edge_properties(edge_id, charge))
    def get_edge_property(self, edge_id: int, key: str, charge=None) -> Any:
        return self.edge_properties(edge_id, charge).get(key)
    def out_degree(self, node_id: int, rel_type: Optional[str] = None, charge=None) -> int:
        return sum(1 for _ in self.expand(node_id, 'out', rel_type, charge))
    def in_degree(self, node_id: int, rel_type: Optional[str] = None, charge=None) -> int:
        return sum(1 for _ in self.expand(node_id, 'in', rel_type, charge))
    def close(self):
        if not self.closed:
            self.closed = True
            self.store._end_read(self)
    def __enter__(self):
        return self
    def __exit__(self, exc_type, exc, tb):
        self.close()
