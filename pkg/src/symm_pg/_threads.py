import os

ENV_VAR = "SYMM_PG_THREADS"


def worker_count(default=None):
    """Worker cap from ``SYMM_PG_THREADS``; falls back to the CPU count."""
    raw = os.environ.get(ENV_VAR)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"{ENV_VAR} must be a positive integer, got {raw!r}") from None
    return default or os.cpu_count() or 1
