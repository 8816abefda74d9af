import os

DEFAULT_CAP = 2_000_000


def enumeration_cap(override=None):
    """Cap on enumeration sizes; ``FRACTAL_CAP`` overrides the default."""
    if override is not None:
        return int(override)
    raw = os.environ.get("FRACTAL_CAP")
    if raw:
        return int(raw)
    return DEFAULT_CAP
