"""Runtime limits."""

import os

DEFAULT_SIZE_CAP = 10_000_000


def size_cap(explicit=None) -> int:
    """Intermediate-word letter cap; LAMTOOL_SIZE_CAP overrides the default."""
    if explicit is not None:
        return int(explicit)
    env = os.environ.get("LAMTOOL_SIZE_CAP")
    return int(env) if env else DEFAULT_SIZE_CAP
