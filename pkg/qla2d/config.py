import os
from typing import Optional


class Config:
    """Environment-configurable settings"""

    # Output
    DEFAULT_OUTPUT_DIR = 'runs/qla2d'
    SNAPSHOT_DIR = 'snapshots'
    HEATMAP_DIR = 'heatmaps'
    LEDGER_FILE = 'ledger.csv'
    MANIFEST_FILE = 'manifest.json'

    # Logging
    LOG_LEVEL = os.environ.get('QLA2D_LOG_LEVEL', 'INFO').upper()

    # Performance settings
    DEFAULT_WORKERS = 1
    MIN_BLOCK_SITES = int(os.environ.get('QLA2D_MIN_BLOCK_SITES', 4096))

    # Host monitoring
    MEMORY_WARNING = float(os.environ.get('QLA2D_MEMORY_WARNING', 80.0))  # percent of host memory

    @staticmethod
    def output_dir_override() -> Optional[str]:
        """QLA2D_OUTPUT_DIR, read at call time so a run picks up the current environment."""
        value = os.environ.get('QLA2D_OUTPUT_DIR', '').strip()
        return value or None

    @staticmethod
    def workers() -> int:
        raw = os.environ.get('QLA2D_WORKERS', '').strip()
        if not raw:
            return Config.DEFAULT_WORKERS
        try:
            return max(1, int(raw))
        except ValueError:
            return Config.DEFAULT_WORKERS

    @staticmethod
    def log_level() -> str:
        return os.environ.get('QLA2D_LOG_LEVEL', Config.LOG_LEVEL).upper()
