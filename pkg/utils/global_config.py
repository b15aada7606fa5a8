# utils/global_config.py
"""
Global Configuration Manager for Graph Training DB
Merges store, training, performance and server settings into config.ini with default values
"""
import configparser
import os
from pathlib import Path
from typing import Dict, Any, List, Optional
import logging
import psutil
logger = logging.getLogger(__name__)
SEED_ENV_VAR = "GTDB_SEED"
SECTION_ORDER = ['General', 'Storage', 'Training', 'Performance', 'Server']
class GlobalConfig:
    """Manages config.ini plus the seed/page-cache overrides every subsystem reads"""
    def __init__(self, config_path: Optional[Path] = None, persist: bool = True):
        self.config_path = config_path or Path(__file__).parent.parent / "config.ini"
        self.config = configparser.ConfigParser()
        self.persist = persist
        # Physical cores drive the worker default; logical count is the fallback
        self.physical_cores = psutil.cpu_count(logical=False) or os.cpu_count() or 4
        self._overrides: Dict[str, Any] = {}
        self.load_config()
        self.ensure_all_sections()
    def defaults(self) -> Dict[str, Dict[str, str]]:
        return {
            'General': {
                'store_path': 'graph_store',
                'seed': '0',
                'log_level': 'INFO',
                'detailed_logging': 'True',
            },
            'Storage': {
                'page_cache_mib': '64',
                'write_lock': 'True',
            },
            'Training': {
                'epochs': '10',
                'batch_size': '512',
                'fanouts': '12,12',
                'hidden_dim': '64',
                'lr': '0.1',
                'strategy': 'global-limit',
                'holdout_fraction': '0.2',
                'node_type': 'PAPER',
                'rel_type': 'CITES',
            },
            'Performance': {
                'workers': str(self.physical_cores),
                'operation_timeout': '300',
                'sync_timeout': '120',
            },
            'Server': {
                'listen': '127.0.0.1:7687',
            },
        }
    def load_config(self):
        """Load configuration, creating the file with defaults when missing"""
        try:
            if self.config_path.exists():
                self.config.read(self.config_path, encoding="utf-8")
                logger.info(f"Loaded config from {self.config_path}")
            else:
                logger.info("Config file not found, creating with defaults")
                self.create_default_config()
        except Exception as e:
            logger.warning(f"Failed to load config: {e}")
            self.create_default_config()
    def create_default_config(self):
        for section, values in self.defaults().items():
            if not self.config.has_section(section):
                self.config.add_section(section)
            for key, value in values.items():
                self.config.set(section, key, value)
        self.save_config()
    def save_config(self):
        """Save configuration with fixed section order and the tuning banner"""
        if not self.persist:
            return
        try:
            with open(self.config_path, 'w', encoding="utf-8") as f:
                sections = [s for s in SECTION_ORDER if self.config.has_section(s)]
                sections += [s for s in self.config.sections() if s not in SECTION_ORDER]
                for section_name in sections:
                    if section_name == 'Performance':
                        f.write('# ============================================================================\n')
                        f.write('# PERFORMANCE TUNING - PLEASE EDIT CAREFULLY\n')
                        f.write('# Worker counts above the physical core count do not speed up training.\n')
                        f.write('# Timeouts bound how long the coordinator waits for a worker at a barrier.\n')
                        f.write('# ============================================================================\n')
                    f.write(f'[{section_name}]\n')
                    for key, value in self.config.items(section_name):
                        f.write(f'{key} = {value}\n')
                    f.write('\n')
            logger.info(f"Saved config to {self.config_path}")
        except Exception as e:
            logger.error(f"Failed to save config: {e}")
    def ensure_all_sections(self):
        """Fill missing sections/options with defaults, preserving existing values"""
        changed = False
        for section, values in self.defaults().items():
            if not self.config.has_section(section):
                self.config.add_section(section)
                changed = True
            for key, value in values.items():
                if not self.config.has_option(section, key):
                    self.config.set(section, key, value)
                    changed = True
        if changed:
            self.save_config()
    def get_option(self, section: str, key: str, default: Any = None) -> Any:
        """Get an option, coercing bool/int/float the same way for every section"""
        override = self._overrides.get(f"{section}.{key}")
        if override is not None:
            return override
        try:
            if self.config.has_option(section, key):
                value = self.config.get(section, key)
                if value.lower() in ('true', 'false'):
                    return value.lower() == 'true'
                try:
                    return int(value)
                except ValueError:
                    try:
                        return float(value)
                    except ValueError:
                        return value
            return default
        except Exception as e:
            logger.warning(f"Failed to get option {section}.{key}: {e}")
            return default
    def set_option(self, section: str, key: str, value: Any, save: bool = False):
        if not self.config.has_section(section):
            self.config.add_section(section)
        self.config.set(section, key, str(value))
        if save:
            self.save_config()
    def override(self, section: str, key: str, value: Any):
        """Session-only override (CLI flags); never written back to config.ini"""
        if value is not None:
            self._overrides[f"{section}.{key}"] = value
    def get_seed(self) -> int:
        """CLI override > GTDB_SEED > config.ini > 0"""
        override = self._overrides.get('General.seed')
        if override is not None:
            return int(override)
        env_seed = os.environ.get(SEED_ENV_VAR)
        if env_seed not in (None, ''):
            try:
                return int(env_seed)
            except ValueError:
                logger.warning(f"Ignoring non-integer {SEED_ENV_VAR}={env_seed!r}")
        return int(self.get_option('General', 'seed', 0))
    def get_store_path(self) -> Path:
        return Path(str(self.get_option('General', 'store_path', 'graph_store')))
    def get_log_level(self) -> str:
        return str(self.get_option('General', 'log_level', 'INFO')).upper()
    def use_detailed_logging(self) -> bool:
        return bool(self.get_option('General', 'detailed_logging', True))
    def get_page_cache_bytes(self) -> int:
        mib = float(self.get_option('Storage', 'page_cache_mib', 64))
        return int(mib * 1024 * 1024)
    def use_write_lock(self) -> bool:
        return bool(self.get_option('Storage', 'write_lock', True))
    def get_fanouts(self) -> List[int]:
        raw = self.get_option('Training', 'fanouts', '12,12')
        return parse_int_list(str(raw))
    def get_worker_count(self) -> int:
        return int(self.get_option('Performance', 'workers', self.physical_cores))
    def get_sync_timeout(self) -> float:
        return float(self.get_option('Performance', 'sync_timeout', 120))
    def get_listen_address(self) -> str:
        return str(self.get_option('Server', 'listen', '127.0.0.1:7687'))
    def get_summary(self) -> str:
        return f"""
Configuration Summary:
- Store path: {self.get_store_path()}
- Page cache: {self.get_page_cache_bytes() // (1024 * 1024)} MiB
- Global seed: {self.get_seed()}
- Fanouts: {self.get_fanouts()}
- Workers: {self.get_worker_count()} (physical cores: {self.physical_cores})
        """.strip()
def parse_int_list(text: str) -> List[int]:
    """'12,12' -> [12, 12]"""
    values = [part.strip() for part in str(text).split(',') if part.strip()]
    return [int(v) for v in values]
