"""Dataset container: a directory with meta.json plus flat binary tensors
(little-endian float64, row-major, shapes recorded in the metadata)."""

import json
import os

import numpy as np

SCHEMA_VERSION = 1


def write_container(dirpath, tensors: dict, meta: dict) -> None:
    os.makedirs(dirpath, exist_ok=True)
    shapes = {}
    for name, arr in tensors.items():
        arr = np.ascontiguousarray(arr, dtype="<f8")
        shapes[name] = list(arr.shape)
        arr.tofile(os.path.join(dirpath, name + ".bin"))
    doc = dict(meta)
    doc["schema_version"] = SCHEMA_VERSION
    doc["tensors"] = {n: {"shape": s, "dtype": "<f8"} for n, s in shapes.items()}
    with open(os.path.join(dirpath, "meta.json"), "w") as f:
        json.dump(doc, f, indent=2, sort_keys=True)


def read_meta(dirpath) -> dict:
    with open(os.path.join(dirpath, "meta.json")) as f:
        return json.load(f)


def load_container(dirpath):
    """Returns (tensors, meta)."""
    meta = read_meta(dirpath)
    if meta.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported container schema in {dirpath}")
    tensors = {}
    for name, spec in meta["tensors"].items():
        shape = tuple(spec["shape"])
        count = int(np.prod(shape)) if shape else 1
        arr = np.fromfile(os.path.join(dirpath, name + ".bin"), dtype="<f8", count=count)
        if arr.size != count:
            raise ValueError(f"tensor {name} in {dirpath} is truncated")
        tensors[name] = arr.reshape(shape)
    return tensors, meta
