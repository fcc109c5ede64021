"""EMBF container files: embedding sequences, sort profiles, factorized maps.

One 24-byte little-endian header serves all three payload kinds::

    offset  size  field
    0       4     magic "EMBF"
    4       2     version (u16, = 1)
    6       2     payload_kind (u16): 0 embedding sequence, 1 sort profile,
                  2 factorized map
    8       4     T (u32): frames (kind 0) / source-tag byte length (kind 1)
                  / block dim (kind 2)
    12      4     D (u32): embedding dimension
    16      1     dtype code (u8): 0 = 32-bit little-endian float
    17      7     reserved, zero

followed by the payload:

    kind 0: T*D float32, row-major frames
    kind 1: D float32 std | D uint32 permutation | T bytes UTF-8 source tag
    kind 2: D uint32 permutation | D float32 source means | D float32 target
            means | per block (D/T of them): T*T float32 matrix + T float32
            offset

Floats are stored at 32 bits while all in-memory computation is 64-bit;
write-then-read round-trips are bit-exact at the file level. Writes go to a
temp file in the destination directory and are renamed into place, so a
failed run never leaves a partial output.
"""

from __future__ import annotations

import os
import struct
import tempfile

import numpy as np

from .errors import EmbeddingFileError, ValidationError
from .stats import EmbeddingSequence, SortProfile
from .transport import AffineMap, FactorizedMap

MAGIC = b"EMBF"
VERSION = 1
KIND_EMBEDDING = 0
KIND_PROFILE = 1
KIND_MAP = 2
DTYPE_F32 = 0

_HEADER = struct.Struct("<4sHHIIB7x")
HEADER_SIZE = _HEADER.size  # 24

_F4 = np.dtype("<f4")
_U4 = np.dtype("<u4")


def _pack_header(kind: int, t: int, d: int) -> bytes:
    for name, value in (("T", t), ("D", d)):
        if not 0 <= value <= 0xFFFFFFFF:
            raise ValidationError(f"{name}={value} does not fit the u32 header field")
    return _HEADER.pack(MAGIC, VERSION, kind, t, d, DTYPE_F32)


def _atomic_write(path, blob: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".embf-", dir=directory)
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(blob)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_header(blob: bytes, path):
    if len(blob) < HEADER_SIZE:
        raise EmbeddingFileError(
            f"file too short for header: expected {HEADER_SIZE} bytes, got {len(blob)}",
            path=path, offset=len(blob),
        )
    magic, version, kind, t, d, dtype = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise EmbeddingFileError(f"bad magic {magic!r}, expected {MAGIC!r}", path=path, offset=0)
    if version != VERSION:
        raise EmbeddingFileError(f"unsupported version {version}, expected {VERSION}", path=path, offset=4)
    if kind not in (KIND_EMBEDDING, KIND_PROFILE, KIND_MAP):
        raise EmbeddingFileError(f"unknown payload kind {kind}", path=path, offset=6)
    if dtype != DTYPE_F32:
        raise EmbeddingFileError(f"unknown dtype code {dtype}", path=path, offset=16)
    return kind, t, d


def _expected_payload(kind: int, t: int, d: int, path) -> int:
    if kind == KIND_EMBEDDING:
        if t < 1 or d < 1:
            raise EmbeddingFileError(f"embedding header requires T>=1 and D>=1, got T={t} D={d}", path=path, offset=8)
        return 4 * t * d
    if kind == KIND_PROFILE:
        if d < 1:
            raise EmbeddingFileError(f"profile header requires D>=1, got D={d}", path=path, offset=12)
        return 4 * d + 4 * d + t
    # KIND_MAP: t is the block dimension
    if d < 1 or t < 1 or d % t != 0:
        raise EmbeddingFileError(
            f"map header requires block dim dividing D, got block={t} D={d}", path=path, offset=8
        )
    n_blocks = d // t
    return 4 * d + 4 * d + 4 * d + n_blocks * (4 * t * t + 4 * t)


def _read_blob(path) -> bytes:
    try:
        with open(path, "rb") as handle:
            return handle.read()
    except OSError as exc:
        raise EmbeddingFileError(f"cannot read file: {exc}", path=path) from exc


def _load(path, expect_kind: int):
    blob = _read_blob(path)
    kind, t, d = _read_header(blob, path)
    expected = _expected_payload(kind, t, d, path)
    actual = len(blob) - HEADER_SIZE
    if actual != expected:
        raise EmbeddingFileError(
            f"payload size mismatch: expected {expected} bytes, got {actual}",
            path=path, offset=HEADER_SIZE + min(actual, expected),
        )
    if kind != expect_kind:
        raise EmbeddingFileError(
            f"expected payload kind {expect_kind}, found kind {kind}", path=path, offset=6
        )
    return blob, t, d


def write_embeddings(path, x: EmbeddingSequence) -> None:
    payload = np.ascontiguousarray(x.frames, dtype=_F4).tobytes()
    _atomic_write(path, _pack_header(KIND_EMBEDDING, x.n_frames, x.dim) + payload)


def read_embeddings(path) -> EmbeddingSequence:
    blob, t, d = _load(path, KIND_EMBEDDING)
    frames = np.frombuffer(blob, dtype=_F4, count=t * d, offset=HEADER_SIZE)
    frames = frames.reshape(t, d)
    if not np.all(np.isfinite(frames)):
        raise EmbeddingFileError("payload contains NaN or Inf", path=path, offset=HEADER_SIZE)
    return EmbeddingSequence(frames=frames)


def write_profile(path, profile: SortProfile) -> None:
    tag = profile.source_tag.encode("utf-8")
    payload = (
        np.ascontiguousarray(profile.std, dtype=_F4).tobytes()
        + np.ascontiguousarray(profile.permutation, dtype=_U4).tobytes()
        + tag
    )
    _atomic_write(path, _pack_header(KIND_PROFILE, len(tag), profile.dim) + payload)


def read_profile(path) -> SortProfile:
    blob, tag_len, d = _load(path, KIND_PROFILE)
    std = np.frombuffer(blob, dtype=_F4, count=d, offset=HEADER_SIZE)
    perm = np.frombuffer(blob, dtype=_U4, count=d, offset=HEADER_SIZE + 4 * d)
    tag = blob[HEADER_SIZE + 8 * d :].decode("utf-8")
    try:
        return SortProfile(std=std, permutation=perm.astype(np.int64), source_tag=tag)
    except ValidationError as exc:
        raise EmbeddingFileError(f"invalid profile payload: {exc}", path=path, offset=HEADER_SIZE) from exc


def write_map(path, fmap: FactorizedMap) -> None:
    k = fmap.block_dim
    parts = [
        np.ascontiguousarray(fmap.permutation, dtype=_U4).tobytes(),
        np.ascontiguousarray(fmap.source_means, dtype=_F4).tobytes(),
        np.ascontiguousarray(fmap.target_means, dtype=_F4).tobytes(),
    ]
    for blk in fmap.blocks:
        parts.append(np.ascontiguousarray(blk.matrix, dtype=_F4).tobytes())
        parts.append(np.ascontiguousarray(blk.offset, dtype=_F4).tobytes())
    _atomic_write(path, _pack_header(KIND_MAP, k, fmap.dim) + b"".join(parts))


def read_map(path) -> FactorizedMap:
    blob, k, d = _load(path, KIND_MAP)
    pos = HEADER_SIZE
    perm = np.frombuffer(blob, dtype=_U4, count=d, offset=pos)
    pos += 4 * d
    src_means = np.frombuffer(blob, dtype=_F4, count=d, offset=pos)
    pos += 4 * d
    tgt_means = np.frombuffer(blob, dtype=_F4, count=d, offset=pos)
    pos += 4 * d
    blocks = []
    for _ in range(d // k):
        matrix = np.frombuffer(blob, dtype=_F4, count=k * k, offset=pos).reshape(k, k)
        pos += 4 * k * k
        offset_vec = np.frombuffer(blob, dtype=_F4, count=k, offset=pos)
        pos += 4 * k
        blocks.append((matrix, offset_vec))
    floats = np.concatenate(
        [src_means, tgt_means] + [m.ravel() for m, _ in blocks] + [o for _, o in blocks]
    )
    if not np.all(np.isfinite(floats)):
        raise EmbeddingFileError("payload contains NaN or Inf", path=path, offset=HEADER_SIZE)
    try:
        return FactorizedMap(
            block_dim=k,
            permutation=perm.astype(np.int64),
            blocks=tuple(
                AffineMap(matrix=m.astype(np.float64), offset=o.astype(np.float64))
                for m, o in blocks
            ),
            source_means=src_means.astype(np.float64),
            target_means=tgt_means.astype(np.float64),
        )
    except (ValidationError, ValueError) as exc:
        raise EmbeddingFileError(f"invalid map payload: {exc}", path=path, offset=HEADER_SIZE) from exc
