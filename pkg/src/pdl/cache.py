"""On-disk cache for class-number sweeps.

Little-endian binary layout:

    magic   4 bytes  b"PDL1"
    version u32      currently 1
    X       u64      sweep bound
    method  u8       0 = forms, 1 = dirichlet
    records (p: u64, h: u32), sorted by p
    crc32   u32      over the raw record bytes

The trailing checksum guards against partial writes; readers validate
magic, version, record count and checksum before trusting a file.
"""

from __future__ import annotations

import os
import struct
import zlib
from pathlib import Path

import numpy as np

from .errors import CacheError

MAGIC = b"PDL1"
VERSION = 1
_HEADER = struct.Struct("<4sIQB")
_RECORD_DTYPE = np.dtype([("p", "<u8"), ("h", "<u4")])

METHOD_CODES = {"forms": 0, "dirichlet": 1}
METHOD_NAMES = {v: k for k, v in METHOD_CODES.items()}


def records_bytes(ps: np.ndarray, hs: np.ndarray) -> bytes:
    rec = np.empty(len(ps), dtype=_RECORD_DTYPE)
    rec["p"] = ps
    rec["h"] = hs
    return rec.tobytes()


def table_checksum(ps: np.ndarray, hs: np.ndarray) -> int:
    """CRC32 over the serialized (p, h) records."""
    return zlib.crc32(records_bytes(ps, hs)) & 0xFFFFFFFF


def cache_path(cache_dir: Path, x: int, method: str) -> Path:
    return Path(cache_dir) / f"class_{method}_{x}.pdl"


def write_table(path: Path, x: int, method: str, ps: np.ndarray, hs: np.ndarray) -> None:
    if method not in METHOD_CODES:
        raise CacheError(f"unknown method {method!r}")
    body = records_bytes(ps, hs)
    blob = _HEADER.pack(MAGIC, VERSION, x, METHOD_CODES[method]) + body
    blob += struct.pack("<I", zlib.crc32(body) & 0xFFFFFFFF)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_bytes(blob)
    os.replace(tmp, path)


def read_table(path: Path) -> tuple[int, str, np.ndarray, np.ndarray]:
    """Returns (X, method, primes, class numbers); raises CacheError when invalid."""
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size + 4:
        raise CacheError(f"{path}: truncated cache file")
    magic, version, x, method_code = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise CacheError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise CacheError(f"{path}: unsupported version {version}")
    if method_code not in METHOD_NAMES:
        raise CacheError(f"{path}: unknown method code {method_code}")
    body = blob[_HEADER.size : -4]
    if len(body) % _RECORD_DTYPE.itemsize:
        raise CacheError(f"{path}: record section has odd length {len(body)}")
    (crc,) = struct.unpack("<I", blob[-4:])
    if crc != zlib.crc32(body) & 0xFFFFFFFF:
        raise CacheError(f"{path}: checksum mismatch")
    rec = np.frombuffer(body, dtype=_RECORD_DTYPE)
    return int(x), METHOD_NAMES[method_code], rec["p"].astype(np.int64), rec["h"].astype(np.int64)
