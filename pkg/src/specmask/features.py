"""WAV decoding and log-mel / MFCC feature extraction.

All arithmetic is float64 and fully deterministic: the same input bytes and
configuration always produce bit-identical feature matrices.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, EmptyInputError, FormatError, UnsupportedFormatError

#: Legal values of FeatureMatrix.kind.
FEATURE_KINDS = ("log_mel", "mfcc", "standardized_log_mel", "standardized_mfcc")


@dataclass(frozen=True)
class PcmSignal:
    """Mono PCM audio: float64 samples nominally in [-1, 1] plus the sample rate in Hz."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=np.float64))
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise ValueError("samples must be a non-empty 1-D array")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("samples must be finite")
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")


@dataclass(frozen=True)
class FeatureMatrix:
    """T x num_channels feature frames (time-major) with frame-rate metadata."""

    data: np.ndarray
    frame_shift_ms: float
    kind: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "data", np.asarray(self.data, dtype=np.float64))
        if self.data.ndim != 2 or self.data.shape[0] < 1 or self.data.shape[1] < 1:
            raise ValueError(f"data must be a 2-D matrix with T >= 1 and channels >= 1, got shape {self.data.shape}")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("feature data must be finite")
        if self.kind not in FEATURE_KINDS:
            raise ValueError(f"kind must be one of {FEATURE_KINDS}, got {self.kind!r}")

    @property
    def num_frames(self) -> int:
        return self.data.shape[0]

    @property
    def num_channels(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class DspConfig:
    """Front-end parameters.

    `n_fft=None` selects the smallest power of two that covers one frame;
    `n_coeffs=None` keeps all mel channels when computing MFCCs;
    `fmax_hz=None` means Nyquist.
    """

    pre_emphasis: float = 0.97
    frame_len_ms: float = 25.0
    frame_shift_ms: float = 10.0
    n_fft: int | None = None
    n_mels: int = 40
    n_coeffs: int | None = None
    log_floor: float = 1e-10
    fmin_hz: float = 0.0
    fmax_hz: float | None = None
    feature: str = "log_mel"

    def __post_init__(self) -> None:
        if not 0.0 <= self.pre_emphasis < 1.0:
            raise ConfigError(f"pre_emphasis must be in [0, 1), got {self.pre_emphasis}")
        if self.frame_len_ms <= 0 or self.frame_shift_ms <= 0:
            raise ConfigError("frame_len_ms and frame_shift_ms must be positive")
        if self.n_fft is not None and (self.n_fft < 1 or self.n_fft & (self.n_fft - 1)):
            raise ConfigError(f"n_fft must be a power of two, got {self.n_fft}")
        if self.n_mels < 1:
            raise ConfigError(f"n_mels must be >= 1, got {self.n_mels}")
        if self.n_coeffs is not None and not 1 <= self.n_coeffs <= self.n_mels:
            raise ConfigError(f"n_coeffs must be in [1, n_mels={self.n_mels}], got {self.n_coeffs}")
        if self.log_floor <= 0:
            raise ConfigError(f"log_floor must be positive, got {self.log_floor}")
        if self.fmin_hz < 0:
            raise ConfigError(f"fmin_hz must be >= 0, got {self.fmin_hz}")
        if self.feature not in ("log_mel", "mfcc"):
            raise ConfigError(f"feature must be 'log_mel' or 'mfcc', got {self.feature!r}")

    def frame_length(self, sample_rate: int) -> int:
        return int(self.frame_len_ms * sample_rate / 1000.0 + 0.5)

    def frame_step(self, sample_rate: int) -> int:
        return int(self.frame_shift_ms * sample_rate / 1000.0 + 0.5)

    def fft_size(self, sample_rate: int) -> int:
        frame_len = self.frame_length(sample_rate)
        if self.n_fft is not None:
            if self.n_fft < frame_len:
                raise ConfigError(f"n_fft={self.n_fft} is smaller than the frame length {frame_len}")
            return self.n_fft
        n = 1
        while n < frame_len:
            n *= 2
        return n

    def effective_fmax(self, sample_rate: int) -> float:
        return sample_rate / 2.0 if self.fmax_hz is None else self.fmax_hz

    def effective_n_coeffs(self) -> int:
        return self.n_mels if self.n_coeffs is None else self.n_coeffs


#: Named front-end configurations: 40-channel log-mel and 80-coefficient MFCC.
#: 80 mel filters need a 1024-point FFT at 16 kHz to keep the edge bins distinct.
DSP_PRESETS = {
    "librispeech-like": DspConfig(n_mels=40, feature="log_mel"),
    "iwslt-like": DspConfig(n_mels=80, n_coeffs=80, feature="mfcc", n_fft=1024),
}


def read_wav(path) -> PcmSignal:
    """Decode a RIFF/WAVE file holding 16-bit mono PCM.

    Samples are scaled by 1/32768.  Malformed containers raise FormatError;
    well-formed files with an unsupported encoding raise UnsupportedFormatError
    naming the offending header field.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 12 or raw[0:4] != b"RIFF":
        raise FormatError(f"{path}: not a RIFF container (bad magic at byte offset 0)")
    if raw[8:12] != b"WAVE":
        raise FormatError(f"{path}: RIFF form type is not WAVE (byte offset 8)")

    fmt = None
    data = None
    pos = 12
    while pos + 8 <= len(raw):
        chunk_id = raw[pos : pos + 4]
        (chunk_size,) = struct.unpack_from("<I", raw, pos + 4)
        body = raw[pos + 8 : pos + 8 + chunk_size]
        if len(body) < chunk_size:
            raise FormatError(f"{path}: chunk {chunk_id!r} at byte offset {pos} is truncated")
        if chunk_id == b"fmt ":
            if chunk_size < 16:
                raise FormatError(f"{path}: fmt chunk too short ({chunk_size} bytes)")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            data = body
        pos += 8 + chunk_size + (chunk_size & 1)  # chunks are word-aligned

    if fmt is None:
        raise FormatError(f"{path}: missing fmt chunk")
    if data is None:
        raise FormatError(f"{path}: missing data chunk")
    audio_format, channels, sample_rate, _, _, bits = fmt
    if audio_format != 1:
        raise UnsupportedFormatError(f"{path}: audio_format={audio_format} (only PCM format 1 is supported)")
    if channels != 1:
        raise UnsupportedFormatError(f"{path}: channels={channels} (only mono is supported)")
    if bits != 16:
        raise UnsupportedFormatError(f"{path}: bits_per_sample={bits} (only 16-bit is supported)")
    if sample_rate == 0:
        raise FormatError(f"{path}: sample_rate is zero")
    if len(data) == 0:
        raise FormatError(f"{path}: data chunk is empty")
    if len(data) % 2:
        raise FormatError(f"{path}: data chunk length {len(data)} is not a multiple of 2")

    samples = np.frombuffer(data, dtype="<i2").astype(np.float64) / 32768.0
    return PcmSignal(samples=samples, sample_rate=sample_rate)


def pre_emphasize(samples: np.ndarray, coeff: float) -> np.ndarray:
    """First-order high-pass y[n] = x[n] - coeff*x[n-1], with y[0] = x[0]."""
    x = np.asarray(samples, dtype=np.float64)
    if coeff == 0.0:
        return x.copy()
    return np.concatenate(([x[0]], x[1:] - coeff * x[:-1]))


def frame_and_window(signal: PcmSignal, cfg: DspConfig) -> np.ndarray:
    """Pre-emphasize, slice into Hamming-windowed frames, zero-pad to the FFT size.

    The last partial frame is dropped.  Returns a (num_frames, n_fft) float64
    array; raises EmptyInputError when the signal is shorter than one frame.
    """
    frame_len = cfg.frame_length(signal.sample_rate)
    step = cfg.frame_step(signal.sample_rate)
    n_fft = cfg.fft_size(signal.sample_rate)
    emphasized = pre_emphasize(signal.samples, cfg.pre_emphasis)
    if emphasized.size < frame_len:
        raise EmptyInputError(
            f"signal of {emphasized.size} samples is shorter than one {frame_len}-sample frame"
        )
    num_frames = (emphasized.size - frame_len) // step + 1
    idx = np.arange(frame_len)[None, :] + step * np.arange(num_frames)[:, None]
    frames = emphasized[idx] * np.hamming(frame_len)
    if n_fft > frame_len:
        frames = np.pad(frames, ((0, 0), (0, n_fft - frame_len)))
    return frames


def power_spectrum(frames: np.ndarray) -> np.ndarray:
    """One-sided power spectrum |DFT_k|^2 per frame, bins 0..n_fft/2."""
    frames = np.asarray(frames, dtype=np.float64)
    power = np.abs(np.fft.rfft(frames, axis=1)) ** 2
    if not np.all(np.isfinite(power)):
        raise ValueError("power spectrum is not finite; check the input frames")
    return power


def hz_to_mel(hz):
    return 2595.0 * np.log10(1.0 + np.asarray(hz, dtype=np.float64) / 700.0)


def mel_to_hz(mel):
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_mels: int, n_fft: int, sample_rate: int, fmin_hz: float, fmax_hz: float) -> np.ndarray:
    """Triangular filters on n_mels+2 equally-mel-spaced edge points over [fmin, fmax].

    Edge points are rounded to FFT bins; they must stay distinct after
    rounding or the filter shapes degenerate (ConfigError).
    """
    if not 0 <= fmin_hz < fmax_hz <= sample_rate / 2.0:
        raise ConfigError(
            f"need 0 <= fmin < fmax <= sample_rate/2, got fmin={fmin_hz}, fmax={fmax_hz}, rate={sample_rate}"
        )
    mel_points = np.linspace(hz_to_mel(fmin_hz), hz_to_mel(fmax_hz), n_mels + 2)
    bin_points = np.floor((n_fft + 1) * mel_to_hz(mel_points) / sample_rate).astype(int)
    if np.any(np.diff(bin_points) < 1):
        raise ConfigError(
            f"{n_mels + 2} mel edge points are not distinct after rounding to {n_fft}-point FFT bins; "
            "reduce n_mels or increase n_fft"
        )
    bank = np.zeros((n_mels, n_fft // 2 + 1))
    for i in range(n_mels):
        left, center, right = bin_points[i], bin_points[i + 1], bin_points[i + 2]
        k = np.arange(left, center)
        bank[i, k] = (k - left) / (center - left)
        k = np.arange(center, right)
        bank[i, k] = (right - k) / (right - center)
    return bank


def mel_energies(power: np.ndarray, cfg: DspConfig, sample_rate: int) -> FeatureMatrix:
    """Filter-weighted band energies followed by log(max(x, log_floor))."""
    n_fft = 2 * (power.shape[1] - 1)
    bank = mel_filterbank(cfg.n_mels, n_fft, sample_rate, cfg.fmin_hz, cfg.effective_fmax(sample_rate))
    energies = power @ bank.T
    logmel = np.log(np.maximum(energies, cfg.log_floor))
    return FeatureMatrix(data=logmel, frame_shift_ms=cfg.frame_shift_ms, kind="log_mel")


def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II matrix G with G @ G.T = I."""
    k = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    g = np.cos(np.pi * (2 * m + 1) * k / (2 * n))
    g[0] *= np.sqrt(1.0 / n)
    g[1:] *= np.sqrt(2.0 / n)
    return g


def mfcc_from_logmel(logmel: FeatureMatrix, n_coeffs: int) -> FeatureMatrix:
    """Per-frame orthonormal DCT-II over channels, keeping coefficients 0..n_coeffs-1."""
    if logmel.kind != "log_mel":
        raise ValueError(f"mfcc_from_logmel requires kind 'log_mel', got {logmel.kind!r}")
    if n_coeffs > logmel.num_channels:
        raise ConfigError(f"n_coeffs={n_coeffs} exceeds the {logmel.num_channels} mel channels")
    g = dct_matrix(logmel.num_channels)
    coeffs = logmel.data @ g[:n_coeffs].T
    return replace(logmel, data=coeffs, kind="mfcc")


def extract(signal: PcmSignal, cfg: DspConfig) -> FeatureMatrix:
    """Full front end: frame/window -> power spectrum -> log-mel -> optional MFCC."""
    frames = frame_and_window(signal, cfg)
    power = power_spectrum(frames)
    logmel = mel_energies(power, cfg, signal.sample_rate)
    if cfg.feature == "mfcc":
        return mfcc_from_logmel(logmel, cfg.effective_n_coeffs())
    return logmel
