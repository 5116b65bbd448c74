"""Model checkpoint file: flat binary with a JSON sidecar.

Binary layout (all integers little-endian):
    magic       8 bytes  b"RBMODEL\\x01"
    version     uint32   (currently 1)
    desc_len    uint32   followed by UTF-8 JSON layer descriptors
    n_params    uint32
    per param:  key_len uint32, key UTF-8, ndim uint32, dims uint64 each,
                payload float64 little-endian, row-major
The sidecar <path>.json holds hyperparameters plus the binary's SHA-256.
"""

import json
import struct

import numpy as np

from .. import __version__
from ..utils import sha256_file
from .model import Sequential, descriptors_for, layers_from_descriptors

MAGIC = b"RBMODEL\x01"
VERSION = 1


class CheckpointError(RuntimeError):
    pass


def save_checkpoint(path, model: Sequential, meta: dict) -> None:
    path = str(path)
    desc = json.dumps(descriptors_for(model)).encode()
    params = model.named_params()
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", VERSION))
        f.write(struct.pack("<I", len(desc)))
        f.write(desc)
        f.write(struct.pack("<I", len(params)))
        for key, p in params:
            kb = key.encode()
            f.write(struct.pack("<I", len(kb)))
            f.write(kb)
            f.write(struct.pack("<I", p.value.ndim))
            for d in p.value.shape:
                f.write(struct.pack("<Q", d))
            f.write(np.ascontiguousarray(p.value, dtype="<f8").tobytes())
    sidecar = dict(meta)
    sidecar["code_version"] = __version__
    sidecar["checksum_sha256"] = sha256_file(path)
    with open(path + ".json", "w") as f:
        json.dump(sidecar, f, indent=2, sort_keys=True)


def _read_exact(f, n):
    buf = f.read(n)
    if len(buf) != n:
        raise CheckpointError("truncated checkpoint")
    return buf


def load_checkpoint(path, verify_checksum: bool = True):
    """Returns (model, meta).  Checksum mismatches raise CheckpointError."""
    path = str(path)
    meta = load_sidecar(path)
    if verify_checksum:
        validate_checkpoint(path, meta)
    with open(path, "rb") as f:
        if _read_exact(f, 8) != MAGIC:
            raise CheckpointError(f"bad magic in {path}")
        (version,) = struct.unpack("<I", _read_exact(f, 4))
        if version != VERSION:
            raise CheckpointError(f"unsupported checkpoint version {version}")
        (dlen,) = struct.unpack("<I", _read_exact(f, 4))
        descs = json.loads(_read_exact(f, dlen).decode())
        model = Sequential(layers_from_descriptors(descs))
        (n_params,) = struct.unpack("<I", _read_exact(f, 4))
        by_key = dict(model.named_params())
        if n_params != len(by_key):
            raise CheckpointError("parameter count does not match descriptors")
        for _ in range(n_params):
            (klen,) = struct.unpack("<I", _read_exact(f, 4))
            key = _read_exact(f, klen).decode()
            (ndim,) = struct.unpack("<I", _read_exact(f, 4))
            shape = tuple(struct.unpack("<Q", _read_exact(f, 8))[0] for _ in range(ndim))
            count = int(np.prod(shape)) if shape else 1
            payload = np.frombuffer(_read_exact(f, count * 8), dtype="<f8").reshape(shape)
            if key not in by_key:
                raise CheckpointError(f"unknown parameter {key!r} in {path}")
            if by_key[key].value.shape != shape:
                raise CheckpointError(f"shape mismatch for {key!r} in {path}")
            by_key[key].value[...] = payload
    return model, meta


def load_sidecar(path) -> dict:
    try:
        with open(str(path) + ".json") as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise CheckpointError(f"missing sidecar for {path}") from e


def validate_checkpoint(path, meta=None) -> None:
    meta = meta or load_sidecar(path)
    want = meta.get("checksum_sha256")
    got = sha256_file(path)
    if want != got:
        raise CheckpointError(f"checksum failure for {path}: {got} != recorded {want}")
