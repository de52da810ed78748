"""SPFX binary feature container.

Layout (little-endian): magic "SPFX", version u16, num_channels u32,
num_frames u32, frame_shift_ms float32, kind u8, 3 reserved zero bytes,
then num_frames * num_channels float32 payload, time-major.  A kind byte of
255 marks a statistics container whose two payload rows are the per-channel
mean and variance.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import FormatError
from .features import FeatureMatrix
from .stats import CorpusStats

MAGIC = b"SPFX"
VERSION = 1
HEADER = struct.Struct("<4sHIIfB3x")
STATS_KIND = 255

KIND_CODES = {"log_mel": 0, "mfcc": 1, "standardized_log_mel": 2, "standardized_mfcc": 3}
CODE_KINDS = {code: kind for kind, code in KIND_CODES.items()}


def _pack(num_channels: int, num_frames: int, frame_shift_ms: float, kind_code: int, payload: np.ndarray) -> bytes:
    header = HEADER.pack(MAGIC, VERSION, num_channels, num_frames, frame_shift_ms, kind_code)
    return header + np.ascontiguousarray(payload, dtype="<f4").tobytes()


def _unpack(raw: bytes, path) -> tuple[int, int, float, int, np.ndarray]:
    if len(raw) < HEADER.size:
        raise FormatError(f"{path}: truncated header, got {len(raw)} bytes but need {HEADER.size}")
    magic, version, num_channels, num_frames, frame_shift_ms, kind_code = HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r} at byte offset 0")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version} at byte offset 4")
    expected = 4 * num_frames * num_channels
    actual = len(raw) - HEADER.size
    if actual != expected:
        raise FormatError(
            f"{path}: payload at byte offset {HEADER.size} has {actual} bytes, "
            f"expected 4*{num_frames}*{num_channels} = {expected}"
        )
    payload = np.frombuffer(raw, dtype="<f4", offset=HEADER.size).reshape(num_frames, num_channels)
    return num_channels, num_frames, frame_shift_ms, kind_code, payload


def write_spfx(features: FeatureMatrix, path) -> None:
    """Persist a feature matrix; the float64 data is rounded to float32."""
    blob = _pack(
        features.num_channels,
        features.num_frames,
        features.frame_shift_ms,
        KIND_CODES[features.kind],
        features.data,
    )
    Path(path).write_bytes(blob)


def read_spfx(path) -> FeatureMatrix:
    """Load a feature matrix; header/payload problems raise FormatError naming the byte offset."""
    raw = Path(path).read_bytes()
    num_channels, num_frames, frame_shift_ms, kind_code, payload = _unpack(raw, path)
    if kind_code not in CODE_KINDS:
        raise FormatError(f"{path}: unknown kind byte {kind_code} at byte offset 18")
    return FeatureMatrix(
        data=payload.astype(np.float64),
        frame_shift_ms=float(frame_shift_ms),
        kind=CODE_KINDS[kind_code],
    )


def write_stats_container(stats: CorpusStats, path) -> None:
    """Persist corpus stats as a kind-255 container: mean row then variance row."""
    payload = np.stack([stats.mean, stats.variance])
    Path(path).write_bytes(_pack(stats.num_channels, 2, 0.0, STATS_KIND, payload))


def read_stats_container(path) -> CorpusStats:
    """Load corpus stats.  The frame count is not persisted; it loads as 1."""
    raw = Path(path).read_bytes()
    num_channels, num_frames, _, kind_code, payload = _unpack(raw, path)
    if kind_code != STATS_KIND:
        raise FormatError(f"{path}: kind byte {kind_code} at byte offset 18 is not a stats container ({STATS_KIND})")
    if num_frames != 2:
        raise FormatError(f"{path}: stats container must have 2 rows, got {num_frames} (byte offset 10)")
    mean, variance = payload.astype(np.float64)
    return CorpusStats(mean=mean, variance=variance, count=1)
