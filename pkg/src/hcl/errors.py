class MemoryCapError(RuntimeError):
    """Sampling or brute-force enumeration refused: the edge list would be too large."""


class ConvergenceError(RuntimeError):
    """An iterative eigensolver failed to reach its tolerance within max_iter."""
