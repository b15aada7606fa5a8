import os
import signal
import psutil
import threading
import logging
from typing import Set
logger = logging.getLogger(__name__)
class ProcessManager:
    """Tracks training worker processes so a failure can take the whole group down"""
    def __init__(self):
        self.processes: Set[int] = set()
        self.main_pid = os.getpid()
        self._lock = threading.Lock()
    def track_process(self, pid: int):
        with self._lock:
            self.processes.add(pid)
    def untrack_process(self, pid: int):
        with self._lock:
            self.processes.discard(pid)
    def force_exit(self):
        """Kill all tracked processes and their children"""
        with self._lock:
            for pid in list(self.processes):
                try:
                    if pid != self.main_pid and psutil.pid_exists(pid):
                        proc = psutil.Process(pid)
                        for child in proc.children(recursive=True):
                            try:
                                child.kill()
                            except psutil.Error:
                                pass
                        proc.kill()
                except psutil.Error:
                    continue
            for pid in list(self.processes):
                try:
                    if pid != self.main_pid and psutil.pid_exists(pid):
                        os.kill(pid, signal.SIGKILL)
                except (OSError, AttributeError):
                    pass
            self.processes.clear()
        logger.debug("Worker processes terminated")
    def is_running(self) -> bool:
        with self._lock:
            return any(psutil.pid_exists(pid) for pid in self.processes)
