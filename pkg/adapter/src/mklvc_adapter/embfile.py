"""Minimal EMBF reader/writer for embedding sequences (payload kind 0).

This is the adapter's own implementation of the wire format shared with the
converter package; the two sides talk only through these files and the
converter's CLI, never in-process. Header (24 bytes, little-endian): magic
"EMBF", u16 version (1), u16 payload kind, u32 T, u32 D, u8 dtype code
(0 = float32 LE), 7 reserved zero bytes; then T*D float32 row-major.
"""

from __future__ import annotations

import os
import struct
import tempfile

import numpy as np

from .errors import FeatureFileError

MAGIC = b"EMBF"
VERSION = 1
KIND_EMBEDDING = 0
DTYPE_F32 = 0

_HEADER = struct.Struct("<4sHHIIB7x")
HEADER_SIZE = _HEADER.size


def write_features(path, frames: np.ndarray) -> None:
    frames = np.ascontiguousarray(frames, dtype="<f4")
    if frames.ndim != 2 or frames.shape[0] < 1 or frames.shape[1] < 1:
        raise FeatureFileError(f"features must be a non-empty 2-D array, got shape {frames.shape}")
    if not np.all(np.isfinite(frames)):
        raise FeatureFileError("features contain NaN or Inf")
    t, d = frames.shape
    header = _HEADER.pack(MAGIC, VERSION, KIND_EMBEDDING, t, d, DTYPE_F32)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".embf-", dir=directory)
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(header + frames.tobytes())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_features(path) -> np.ndarray:
    try:
        with open(path, "rb") as handle:
            blob = handle.read()
    except OSError as exc:
        raise FeatureFileError(f"cannot read {path}: {exc}") from exc
    if len(blob) < HEADER_SIZE:
        raise FeatureFileError(f"{path}: too short for an EMBF header ({len(blob)} bytes)")
    magic, version, kind, t, d, dtype = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise FeatureFileError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise FeatureFileError(f"{path}: unsupported version {version}")
    if kind != KIND_EMBEDDING:
        raise FeatureFileError(f"{path}: payload kind {kind} is not an embedding sequence")
    if dtype != DTYPE_F32:
        raise FeatureFileError(f"{path}: unknown dtype code {dtype}")
    expected = 4 * t * d
    actual = len(blob) - HEADER_SIZE
    if actual != expected:
        raise FeatureFileError(f"{path}: payload size mismatch, expected {expected} bytes, got {actual}")
    frames = np.frombuffer(blob, dtype="<f4", count=t * d, offset=HEADER_SIZE).reshape(t, d)
    if not np.all(np.isfinite(frames)):
        raise FeatureFileError(f"{path}: payload contains NaN or Inf")
    return frames.astype(np.float32)
