"""
Labelled property graph storage for Graph Training DB
"""
from .errors import (StorageError, StoreNotFound, CorruptStore, EmptyLabels, UnknownNode, UnknownEdge,
                     DuplicateId, IndexNotFound, ReadOnlyStore, WriteConflict, PropertyTypeError)
from .graph_store import AccessCounters, GraphStore, ReadTransaction, StoreStats, DEFAULT_PAGE_CACHE_BYTES
from .page_cache import PAGE_SIZE, PageCache
__all__ = ['GraphStore', 'ReadTransaction', 'AccessCounters', 'StoreStats', 'PageCache', 'PAGE_SIZE',
           'DEFAULT_PAGE_CACHE_BYTES', 'StorageError', 'StoreNotFound', 'CorruptStore', 'EmptyLabels',
           'UnknownNode', 'UnknownEdge', 'DuplicateId', 'IndexNotFound', 'ReadOnlyStore', 'WriteConflict',
           'PropertyTypeError']
