# storage/hash_index.py
"""
Persistent hash index on (label, key) for point lookups.

File layout (little endian):
    header   4s magic "GTIX" | u32 version | u64 bucket_count | u64 entry_count
    buckets  bucket_count x i64 offset of the first entry in the chain (-1 when empty)
    entries  i64 node_id | i64 next_entry_offset | u32 key_length | key bytes

Keys are property values encoded with their type tag, hashed with crc32.
A writable index keeps its entries in memory and rewrites the file on flush;
a read-only index probes the file through the page cache.
"""
import struct
import zlib
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Optional
from .errors import CorruptStore, PropertyTypeError
from .page_cache import PageCache, PagedFile
from .property_codec import encode_value
logger = logging.getLogger(__name__)
MAGIC = b'GTIX'
VERSION = 1
_HEADER = struct.Struct('<4sIQQ')
_SLOT = struct.Struct('<q')
_ENTRY = struct.Struct('<qqI')
def _bucket_count(entries: int) -> int:
    count = 16
    while count < 2 * entries:
        count *= 2
    return count
def index_key(value: Any) -> Optional[bytes]:
    """Encoded lookup key, or None for values that can never be stored"""
    try:
        return encode_value(value)
    except PropertyTypeError:
        return None
class HashIndex:
    def __init__(self, path: Path, label: str, key: str, cache: PageCache, writable: bool):
        self.path = Path(path)
        self.label = label
        self.key = key
        self.writable = writable
        self._entries: Dict[bytes, int] = {}
        self._file: Optional[PagedFile] = None
        self._bucket_count = 0
        if writable:
            if self.path.exists():
                self._load_entries()
        else:
            self._file = PagedFile(self.path, cache, writable=False)
            self._read_header()
    def _read_header(self):
        raw = self._file.read(0, _HEADER.size)
        magic, version, bucket_count, entry_count = _HEADER.unpack(raw)
        if magic != MAGIC or version != VERSION:
            raise CorruptStore(f"bad index file {self.path}")
        self._bucket_count = bucket_count
        self.entry_count = entry_count
    def _load_entries(self):
        data = self.path.read_bytes()
        magic, version, bucket_count, entry_count = _HEADER.unpack_from(data, 0)
        if magic != MAGIC or version != VERSION:
            raise CorruptStore(f"bad index file {self.path}")
        pos = _HEADER.size + bucket_count * _SLOT.size
        for _ in range(entry_count):
            node_id, _next, key_len = _ENTRY.unpack_from(data, pos)
            pos += _ENTRY.size
            self._entries[bytes(data[pos:pos + key_len])] = node_id
            pos += key_len
    def __len__(self) -> int:
        if self.writable:
            return len(self._entries)
        return self.entry_count
    def get_pending(self, value: Any) -> Optional[int]:
        """Lookup in the writable in-memory table (no accounting)"""
        key = index_key(value)
        return None if key is None else self._entries.get(key)
    def insert(self, value: Any, node_id: int):
        self._entries[encode_value(value)] = int(node_id)
    def lookup(self, value: Any, counters: Iterable = ()) -> Optional[int]:
        key = index_key(value)
        if key is None:
            return None
        if self.writable:
            return self._entries.get(key)
        bucket = zlib.crc32(key) % self._bucket_count
        (offset,) = _SLOT.unpack(self._file.read(_HEADER.size + bucket * _SLOT.size, _SLOT.size, counters))
        while offset >= 0:
            node_id, next_offset, key_len = _ENTRY.unpack(self._file.read(offset, _ENTRY.size, counters))
            if key_len == len(key) and self._file.read(offset + _ENTRY.size, key_len, counters) == key:
                return node_id
            offset = next_offset
        return None
    def flush(self):
        """Rewrite the whole file from the in-memory table; entries keep insertion order"""
        if not self.writable:
            return
        bucket_count = _bucket_count(len(self._entries))
        slots = [-1] * bucket_count
        body = bytearray()
        base = _HEADER.size + bucket_count * _SLOT.size
        for key, node_id in self._entries.items():
            bucket = zlib.crc32(key) % bucket_count
            offset = base + len(body)
            body += _ENTRY.pack(node_id, slots[bucket], len(key))
            body += key
            slots[bucket] = offset
        with open(self.path, 'wb') as f:
            f.write(_HEADER.pack(MAGIC, VERSION, bucket_count, len(self._entries)))
            f.write(b''.join(_SLOT.pack(s) for s in slots))
            f.write(body)
        logger.debug(f"Wrote index :{self.label}({self.key}) with {len(self._entries)} entries")
    def close(self):
        if self.writable:
            self.flush()
        elif self._file is not None:
            self._file.close()
