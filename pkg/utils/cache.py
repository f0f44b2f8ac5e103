"""Content-hashed .npz caches for group enumerations and section bases."""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
import zipfile
from pathlib import Path

import numpy as np

from objects.groups import EnumeratedGroup
from objects.sections import SectionBasis, ThetaFamily
from utils.errors import CacheIntegrityError
from utils.logger import log

__all__ = [
    "CACHE_VERSION",
    "canonical_json",
    "payload_hash",
    "group_cache_key",
    "save_group",
    "load_group",
    "save_basis",
    "load_basis",
]

CACHE_VERSION = 1


def canonical_json(value):
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def payload_hash(arrays):
    """SHA-256 over (name, dtype, shape, bytes) of every array, in name order"""
    h = hashlib.sha256()
    for name in sorted(arrays):
        arr = np.ascontiguousarray(arrays[name])
        h.update(name.encode("utf-8"))
        h.update(arr.dtype.str.encode("utf-8"))
        h.update(canonical_json(list(arr.shape)).encode("utf-8"))
        h.update(arr.tobytes())
    return h.hexdigest()


def group_cache_key(space, radius, caps):
    ident = canonical_json({"space": space.describe(), "radius": float(radius), "caps": caps})
    return f"{space.kind}-{hashlib.sha256(ident.encode('utf-8')).hexdigest()[:16]}.npz"


def _write(path, arrays, header):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = dict(header, version=CACHE_VERSION, sha256=payload_hash(arrays))
    # Concurrent experiments may build the same cache; readers only ever see whole files
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".part")
    with os.fdopen(fd, "wb") as fp:
        np.savez(fp, header=np.array(canonical_json(header)), **arrays)
    os.replace(tmp, path)
    return path


def _read(path):
    try:
        with np.load(path, allow_pickle=False) as archive:
            arrays = {name: archive[name] for name in archive.files}
    except (OSError, ValueError, EOFError, zipfile.BadZipFile) as exc:
        raise CacheIntegrityError(f"unreadable cache file {path}: {exc}")
    if "header" not in arrays:
        raise CacheIntegrityError(f"cache file {path} has no header")
    header = json.loads(str(arrays.pop("header")))
    if header.get("version") != CACHE_VERSION:
        raise CacheIntegrityError(f"cache file {path} has version {header.get('version')}")
    digest = payload_hash(arrays)
    if digest != header.get("sha256"):
        raise CacheIntegrityError(f"content hash mismatch in {path}")
    return arrays, header


def save_group(enumeration, path, caps=None):
    arrays = {name: np.asarray(values) for name, values in enumeration.data.items()}
    arrays["displacements"] = enumeration.displacements
    header = {
        "kind": enumeration.group.kind,
        "radius": enumeration.radius,
        "basepoint": [enumeration.basepoint.real, enumeration.basepoint.imag],
        "count": len(enumeration),
        "caps": caps or {},
    }
    log.debug("writing %d-element group cache to %s", len(enumeration), path)
    return _write(path, arrays, header)


def load_group(path, space):
    arrays, header = _read(path)
    if header["kind"] != space.kind:
        raise CacheIntegrityError(f"cache holds a {header['kind']} group, not {space.kind}")
    displacements = arrays.pop("displacements")
    basepoint = complex(*header["basepoint"])
    return EnumeratedGroup(space.group, arrays, displacements, basepoint, header["radius"])


def save_basis(basis, path):
    arrays = {
        "gram": np.asarray(basis.gram),
        "coefficients": np.asarray(basis.coefficients),
    }
    header = {
        "family": basis.description,
        "rank": int(basis.rank),
        "quadrature": basis.quadrature,
        "method": basis.method,
        "flagged": bool(basis.flagged),
        "gram_error": float(basis.gram_error),
    }
    return _write(path, arrays, header)


def load_basis(path, family=None):
    """Load a SectionBasis; theta families are rebuilt from their description"""
    arrays, header = _read(path)
    description = header["family"]
    if family is None and description.get("kind") == "theta":
        family = ThetaFamily(description["N"], complex(*description["tau"]),
                             description["characteristics"])
    return SectionBasis(
        family=family,
        description=description,
        gram=arrays["gram"],
        coefficients=arrays["coefficients"],
        rank=header["rank"],
        quadrature=header["quadrature"],
        method=header["method"],
        flagged=header["flagged"],
        gram_error=header["gram_error"],
    )
