"""Small shared helpers: canonical JSON, config hashing, dB conversions."""

import hashlib
import json

import numpy as np


def canonical_json(obj) -> str:
    """Serialize to JSON with sorted keys and no whitespace variance.

    Used everywhere a reproducible, hashable representation is needed.
    """
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_json_default)


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"not JSON serializable: {type(o)!r}")


def config_hash(obj) -> str:
    """Stable hex digest of a config-like object (dicts/lists/scalars)."""
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()[:16]


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def db_to_linear(db):
    """Power dB -> linear ratio (dBm -> mW)."""
    return 10.0 ** (np.asarray(db, dtype=np.float64) / 10.0)


def linear_to_db(lin, floor_db=-np.inf):
    """Linear power -> dB, clamping non-positive inputs to ``floor_db``."""
    lin = np.asarray(lin, dtype=np.float64)
    out = np.full(lin.shape, floor_db, dtype=np.float64)
    np.log10(lin, out=out, where=lin > 0)
    out = np.where(lin > 0, 10.0 * out, floor_db)
    if out.ndim == 0:
        return float(out)
    return out
