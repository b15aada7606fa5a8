from .process_manager import ProcessManager
from .logging_config import setup_logging
from .memory_tracker import MemoryTracker, estimate_bytes
from .global_config import GlobalConfig
__all__ = ['ProcessManager', 'setup_logging', 'MemoryTracker', 'estimate_bytes', 'GlobalConfig']
