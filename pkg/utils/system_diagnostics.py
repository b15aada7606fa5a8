# utils/system_diagnostics.py
"""
Host Diagnostics for Graph Training DB
Core counts and memory facts recorded next to benchmark results
"""
import platform
import sys
import os
import psutil
import logging
from typing import Dict, Any, Callable, Optional
logger = logging.getLogger(__name__)
class SystemDiagnostics:
    """Host facts that decide worker defaults and annotate bench output"""
    def __init__(self, progress_callback: Optional[Callable[[str], None]] = None):
        self.progress_callback = progress_callback or (lambda x: logger.debug(x))
    def update_progress(self, message: str):
        if self.progress_callback:
            self.progress_callback(message)
    def get_cpu_info(self) -> Dict[str, Any]:
        try:
            return {
                'cores': psutil.cpu_count(logical=False) or os.cpu_count() or 1,
                'logical_cores': psutil.cpu_count(logical=True) or os.cpu_count() or 1,
            }
        except Exception as e:
            logger.warning(f"CPU query failed: {e}")
            count = os.cpu_count() or 1
            return {'cores': count, 'logical_cores': count}
    def get_system_info(self) -> Dict[str, Any]:
        """Platform, python, memory and CPU information"""
        self.update_progress("Analyzing host hardware...")
        info: Dict[str, Any] = {
            'platform': {
                'system': platform.system(),
                'release': platform.release(),
                'machine': platform.machine(),
            },
            'python': {'version': sys.version.split()[0]},
            'cpu': self.get_cpu_info(),
        }
        try:
            memory = psutil.virtual_memory()
            info['memory'] = {
                'total': self._format_bytes(memory.total),
                'available': self._format_bytes(memory.available),
                'percent': memory.percent,
            }
        except Exception as e:
            info['memory'] = {'error': str(e)}
        return info
    def physical_cores(self) -> int:
        return int(self.get_cpu_info()['cores'])
    def _format_bytes(self, bytes_size: float) -> str:
        """Format bytes to human readable string"""
        for unit in ['B', 'KB', 'MB', 'GB', 'TB']:
            if bytes_size < 1024.0:
                return f"{bytes_size:.1f} {unit}"
            bytes_size /= 1024.0
        return f"{bytes_size:.1f} PB"
    def get_diagnostic_summary(self, info: Optional[Dict[str, Any]] = None) -> str:
        info = info or self.get_system_info()
        lines = [f"OS: {info['platform']['system']} {info['platform']['release']}",
                 f"Python: {info['python']['version']}",
                 f"CPU: {info['cpu']['cores']} cores / {info['cpu']['logical_cores']} threads"]
        if 'total' in info.get('memory', {}):
            lines.append(f"RAM: {info['memory']['total']}")
        return " | ".join(lines)
