# storage/page_cache.py
"""
Fixed-size LRU page cache shared by every data file of one open store.
Pages are 8 KiB; dirty pages are written back on eviction and on flush.
"""
import os
import threading
import logging
from collections import OrderedDict
from pathlib import Path
from typing import Dict, Iterable, Optional, Tuple
logger = logging.getLogger(__name__)
PAGE_SIZE = 8192
MIN_PAGES = 4
class _Page:
    __slots__ = ('data', 'dirty')
    def __init__(self, data: bytearray):
        self.data = data
        self.dirty = False
class PagedFile:
    """One data file addressed by byte offset through the shared cache"""
    def __init__(self, path: Path, cache: "PageCache", writable: bool, logical_size: int = None):
        self.path = Path(path)
        self.cache = cache
        self.writable = writable
        if writable and not self.path.exists():
            self.path.touch()
        self._fh = open(self.path, 'r+b' if writable else 'rb')
        self.size = os.path.getsize(self.path) if logical_size is None else int(logical_size)
        self._io_lock = threading.Lock()
        self.file_id = cache.register(self)
    def read_page(self, page_no: int) -> bytearray:
        with self._io_lock:
            self._fh.seek(page_no * PAGE_SIZE)
            data = self._fh.read(PAGE_SIZE)
        page = bytearray(PAGE_SIZE)
        page[:len(data)] = data
        return page
    def write_page(self, page_no: int, data: bytearray):
        start = page_no * PAGE_SIZE
        length = min(PAGE_SIZE, self.size - start)
        if length <= 0:
            return
        with self._io_lock:
            self._fh.seek(start)
            self._fh.write(data[:length])
    def read(self, offset: int, length: int, counters: Iterable = ()) -> bytes:
        return self.cache.read(self, offset, length, counters)
    def write(self, offset: int, data: bytes):
        self.cache.write(self, offset, data)
        self.size = max(self.size, offset + len(data))
    def append(self, data: bytes) -> int:
        offset = self.size
        self.write(offset, data)
        return offset
    def flush(self):
        if not self.writable:
            return
        self.cache.flush_file(self)
        with self._io_lock:
            self._fh.flush()
            self._fh.truncate(self.size)
            os.fsync(self._fh.fileno())
    def close(self):
        try:
            self.flush()
        finally:
            self.cache.drop_file(self)
            self._fh.close()
class PageCache:
    """LRU over (file, page) keys; hits/misses are charged to the counters passed in"""
    def __init__(self, capacity_bytes: int):
        self.capacity_pages = max(MIN_PAGES, int(capacity_bytes) // PAGE_SIZE)
        self._pages: "OrderedDict[Tuple[int, int], _Page]" = OrderedDict()
        self._files: Dict[int, PagedFile] = {}
        self._next_file_id = 0
        # guards the LRU map and the totals only; disk reads for misses run outside it
        self._lock = threading.RLock()
        self.hits = 0
        self.misses = 0
        self.evictions = 0
        logger.debug(f"Page cache with {self.capacity_pages} pages ({self.capacity_pages * PAGE_SIZE} bytes)")
    def register(self, paged_file: PagedFile) -> int:
        with self._lock:
            file_id = self._next_file_id
            self._next_file_id += 1
            self._files[file_id] = paged_file
            return file_id
    def _lookup(self, key: Tuple[int, int], counters: Iterable) -> Optional[_Page]:
        page = self._pages.get(key)
        if page is not None:
            self._pages.move_to_end(key)
            self.hits += 1
            for c in counters:
                c.page_cache_hits += 1
            return page
        self.misses += 1
        for c in counters:
            c.page_cache_misses += 1
        return None
    def _install(self, key: Tuple[int, int], page: _Page) -> _Page:
        existing = self._pages.get(key)
        if existing is not None:
            # another reader loaded the page first
            self._pages.move_to_end(key)
            return existing
        self._pages[key] = page
        self._evict()
        return page
    def _get_page(self, paged_file: PagedFile, page_no: int, counters: Iterable) -> _Page:
        key = (paged_file.file_id, page_no)
        page = self._lookup(key, counters)
        if page is None:
            page = self._install(key, _Page(paged_file.read_page(page_no)))
        return page
    def _evict(self):
        while len(self._pages) > self.capacity_pages:
            (file_id, page_no), page = self._pages.popitem(last=False)
            self.evictions += 1
            if page.dirty:
                self._files[file_id].write_page(page_no, page.data)
    def read(self, paged_file: PagedFile, offset: int, length: int, counters: Iterable = ()) -> bytes:
        out = bytearray()
        pos = offset
        end = offset + length
        while pos < end:
            page_no, page_off = divmod(pos, PAGE_SIZE)
            take = min(PAGE_SIZE - page_off, end - pos)
            key = (paged_file.file_id, page_no)
            with self._lock:
                page = self._lookup(key, counters)
                if page is not None:
                    out += page.data[page_off:page_off + take]
            if page is None:
                loaded = _Page(paged_file.read_page(page_no))
                with self._lock:
                    page = self._install(key, loaded)
                    out += page.data[page_off:page_off + take]
            pos += take
        return bytes(out)
    def write(self, paged_file: PagedFile, offset: int, data: bytes):
        pos = offset
        src = 0
        with self._lock:
            while src < len(data):
                page_no, page_off = divmod(pos, PAGE_SIZE)
                take = min(PAGE_SIZE - page_off, len(data) - src)
                page = self._get_page(paged_file, page_no, ())
                page.data[page_off:page_off + take] = data[src:src + take]
                page.dirty = True
                pos += take
                src += take
                # the written range must survive an eviction triggered by the next page
                if pos > paged_file.size:
                    paged_file.size = pos
    def flush_file(self, paged_file: PagedFile):
        with self._lock:
            for (file_id, page_no), page in self._pages.items():
                if file_id == paged_file.file_id and page.dirty:
                    paged_file.write_page(page_no, page.data)
                    page.dirty = False
    def drop_file(self, paged_file: PagedFile):
        with self._lock:
            for key in [k for k in self._pages if k[0] == paged_file.file_id]:
                del self._pages[key]
            self._files.pop(paged_file.file_id, None)
    def stats(self) -> dict:
        with self._lock:
            return {'capacity_pages': self.capacity_pages, 'resident_pages': len(self._pages),
                    'hits': self.hits, 'misses': self.misses, 'evictions': self.evictions}
