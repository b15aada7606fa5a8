# utils/memory_tracker.py
"""
Allocation accounting for graph-data buffers.
Sizes are deterministic estimates so measurements repeat exactly across runs.
"""
import threading
import logging
from typing import Any
import numpy as np
logger = logging.getLogger(__name__)
SCALAR_BYTES = 8
def estimate_bytes(value: Any) -> int:
    """Deterministic byte estimate of a row value, row, or buffer"""
    if value is None:
        return SCALAR_BYTES
    if isinstance(value, np.ndarray):
        return int(value.nbytes)
    if isinstance(value, str):
        return len(value.encode('utf-8'))
    if isinstance(value, (bytes, bytearray)):
        return len(value)
    if isinstance(value, dict):
        return sum(estimate_bytes(k) + estimate_bytes(v) for k, v in value.items())
    if isinstance(value, (list, tuple, set, frozenset)):
        return sum(estimate_bytes(v) for v in value)
    return SCALAR_BYTES
class MemoryTracker:
    """Thread-safe current/peak byte counter"""
    def __init__(self, name: str = "graph-data"):
        self.name = name
        self.current = 0
        self.peak = 0
        self._lock = threading.Lock()
    def allocate(self, nbytes: int):
        with self._lock:
            self.current += int(nbytes)
            if self.current > self.peak:
                self.peak = self.current
    def release(self, nbytes: int):
        with self._lock:
            self.current = max(0, self.current - int(nbytes))
    def track(self, value: Any) -> int:
        """Allocate the estimate of `value` and return it so callers can release it later"""
        nbytes = estimate_bytes(value)
        self.allocate(nbytes)
        return nbytes
    def reset(self):
        with self._lock:
            self.current = 0
            self.peak = 0
    def snapshot(self) -> dict:
        with self._lock:
            return {'name': self.name, 'current': self.current, 'peak': self.peak}
