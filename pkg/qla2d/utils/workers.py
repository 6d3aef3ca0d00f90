"""Block-partitioned kernel execution on a joblib thread pool.

Operators hand the pool a kernel that works on one slice of a single
array axis. The pool splits the axis into contiguous blocks, one per
worker, and runs the kernel on each block. Every block writes a disjoint
part of the output, so the result does not depend on the worker count.
"""
import logging
from typing import Callable, List, Optional

from joblib import Parallel, delayed

from qla2d.config import Config

logger = logging.getLogger(__name__)

BlockKernel = Callable[[slice], None]


def partition(length: int, n_blocks: int) -> List[slice]:
    """Split ``range(length)`` into at most ``n_blocks`` contiguous, nearly equal slices."""
    if length <= 0:
        return []
    n_blocks = max(1, min(n_blocks, length))
    base, extra = divmod(length, n_blocks)
    blocks = []
    start = 0
    for k in range(n_blocks):
        stop = start + base + (1 if k < extra else 0)
        blocks.append(slice(start, stop))
        start = stop
    return blocks


class WorkerPool:
    """Thread pool for data-parallel lattice kernels.

    Args:
        n_workers: number of threads; 1 runs every kernel inline.
        min_block_sites: lattices smaller than this per worker are not split.
    """

    def __init__(self, n_workers: int = 1, min_block_sites: Optional[int] = None):
        if int(n_workers) < 1:
            raise ValueError(f"n_workers must be >= 1, got {n_workers}")
        self.n_workers = int(n_workers)
        self.min_block_sites = Config.MIN_BLOCK_SITES if min_block_sites is None else int(min_block_sites)
        self._parallel: Optional[Parallel] = None
        self.logger = logging.getLogger(__name__)

    def __enter__(self) -> "WorkerPool":
        if self.n_workers > 1:
            self._parallel = Parallel(n_jobs=self.n_workers, backend="threading")
            self._parallel.__enter__()
            self.logger.debug(f"Started {self.n_workers}-thread worker pool")
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        if self._parallel is not None:
            self._parallel.__exit__(exc_type, exc, tb)
            self._parallel = None

    def blocks_for(self, length: int, sites_per_line: int) -> List[slice]:
        if self.n_workers == 1:
            return [slice(0, length)]
        usable = max(1, (length * sites_per_line) // max(1, self.min_block_sites))
        return partition(length, min(self.n_workers, usable))

    def map_blocks(self, kernel: BlockKernel, length: int, sites_per_line: int = 1) -> None:
        """Run ``kernel`` on every block of an axis of the given length."""
        blocks = self.blocks_for(length, sites_per_line)
        if len(blocks) == 1:
            kernel(blocks[0])
            return
        if self._parallel is not None:
            self._parallel(delayed(kernel)(block) for block in blocks)
        else:
            Parallel(n_jobs=len(blocks), backend="threading")(delayed(kernel)(block) for block in blocks)


def run_blocks(pool: Optional[WorkerPool], kernel: BlockKernel, length: int, sites_per_line: int = 1) -> None:
    """Dispatch through ``pool`` when given, otherwise run the kernel on the whole axis."""
    if pool is None:
        kernel(slice(0, length))
    else:
        pool.map_blocks(kernel, length, sites_per_line)
