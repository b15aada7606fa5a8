"""Storage-layer exceptions."""
class StorageError(Exception):
    """Base class for every lpg-store failure"""
class StoreNotFound(StorageError):
    pass
class CorruptStore(StorageError):
    pass
class EmptyLabels(StorageError):
    def __init__(self):
        super().__init__("a node needs at least one label")
class UnknownNode(StorageError):
    def __init__(self, node_id):
        self.node_id = node_id
        super().__init__(f"unknown node {node_id}")
class UnknownEdge(StorageError):
    def __init__(self, edge_id):
        self.edge_id = edge_id
        super().__init__(f"unknown edge {edge_id}")
class DuplicateId(StorageError):
    def __init__(self, label, value):
        self.label = label
        self.value = value
        super().__init__(f"duplicate id {value!r} under label {label}")
class IndexNotFound(StorageError):
    def __init__(self, label, key):
        self.label = label
        self.key = key
        super().__init__(f"no index on :{label}({key})")
class ReadOnlyStore(StorageError):
    def __init__(self, path):
        super().__init__(f"store {path} is open read-only")
class WriteConflict(StorageError):
    pass
class PropertyTypeError(StorageError):
    pass
