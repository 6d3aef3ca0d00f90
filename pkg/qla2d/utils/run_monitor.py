import logging
import os
import platform
import sys
import time
from datetime import datetime, timezone
from typing import Any, Dict, Optional

import psutil

from qla2d.config import Config


class RunMonitor:
    """Host and process resource tracking for a simulation run"""

    def __init__(self, memory_warning: Optional[float] = None):
        self.logger = logging.getLogger(__name__)
        self.thresholds = {
            'memory_warning': Config.MEMORY_WARNING if memory_warning is None else float(memory_warning),
        }
        self.process = psutil.Process(os.getpid())
        self.started_at = datetime.now(timezone.utc)
        self._t0 = time.perf_counter()
        self.peak_rss = 0
        self.warned = False

    def elapsed(self) -> float:
        return time.perf_counter() - self._t0

    def host_snapshot(self) -> Dict[str, Any]:
        """Static description of the machine the run executes on."""
        memory = psutil.virtual_memory()
        return {
            'python': sys.version.split()[0],
            'platform': platform.platform(),
            'cpu_count_logical': psutil.cpu_count(logical=True),
            'cpu_count_physical': psutil.cpu_count(logical=False),
            'memory_total_mb': round(memory.total / 1024 / 1024, 1),
        }

    def check(self) -> Dict[str, Any]:
        """Sample process memory; warns once when host memory use crosses the threshold."""
        try:
            rss = self.process.memory_info().rss
            self.peak_rss = max(self.peak_rss, rss)
            memory_percent = psutil.virtual_memory().percent
        except psutil.Error as e:
            self.logger.warning(f"Resource sampling failed: {e}")
            return {}
        if memory_percent >= self.thresholds['memory_warning'] and not self.warned:
            self.warned = True
            self.logger.warning(
                f"Host memory use {memory_percent:.1f}% exceeds {self.thresholds['memory_warning']:.0f}%",
                extra={'context': {'rss_mb': round(rss / 1024 / 1024, 1)}},
            )
        return {'rss_mb': round(rss / 1024 / 1024, 1), 'memory_percent': memory_percent}

    def summary(self, iterations: int) -> Dict[str, Any]:
        """Timing and memory figures for the run manifest."""
        self.check()
        wall = self.elapsed()
        return {
            'started_at': self.started_at.isoformat(),
            'wall_time_s': round(wall, 6),
            'iterations': int(iterations),
            'iterations_per_s': round(iterations / wall, 3) if wall > 0 and iterations else 0.0,
            'peak_rss_mb': round(self.peak_rss / 1024 / 1024, 1),
            'host': self.host_snapshot(),
        }
