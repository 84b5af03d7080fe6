import os


def thread_count() -> int:
    """Upper bound on internal parallelism, from ``MASTERGRAPH_THREADS``."""
    try:
        return max(1, int(os.environ.get("MASTERGRAPH_THREADS", "1")))
    except ValueError:
        return 1
