"""
From waveform to log-mel features
=================================

Synthesize a short tone, run the DSP front end, and round-trip the
result through the binary feature container.
"""

import sys
import wave
from pathlib import Path

import numpy as np

from specmask import DspConfig, extract, read_spfx, read_wav, write_spfx

out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_out")
out_dir.mkdir(parents=True, exist_ok=True)

# One second of a two-component tone at 16 kHz, written as 16-bit PCM.
rate = 16000
t = np.arange(rate) / rate
samples = 0.5 * np.sin(2 * np.pi * 440.0 * t) + 0.2 * np.sin(2 * np.pi * 2200.0 * t)
pcm = np.clip(np.round(samples * 32768.0), -32768, 32767).astype("<i2")
wav_path = out_dir / "tone.wav"
with wave.open(str(wav_path), "wb") as fh:
    fh.setnchannels(1)
    fh.setsampwidth(2)
    fh.setframerate(rate)
    fh.writeframes(pcm.tobytes())

signal = read_wav(wav_path)
print(f"read {signal.samples.size} samples at {signal.sample_rate} Hz")

# 25 ms frames every 10 ms: one second gives 98 full frames.
cfg = DspConfig()
logmel = extract(signal, cfg)
print(f"log-mel matrix: {logmel.num_frames} frames x {logmel.num_channels} channels ({logmel.kind})")

# The same front end emits MFCCs when asked; 80 mel filters need a longer FFT
# so the triangle edges stay on distinct bins.
mfcc = extract(signal, DspConfig(n_mels=26, n_coeffs=13, feature="mfcc"))
print(f"mfcc matrix:    {mfcc.num_frames} frames x {mfcc.num_channels} channels ({mfcc.kind})")

# Persisting casts to float32; reading back is bit-stable from then on.
spfx_path = out_dir / "tone.spfx"
write_spfx(logmel, spfx_path)
again = read_spfx(spfx_path)
print(f"round-trip max error: {np.max(np.abs(again.data - logmel.data)):.3e}")
print(f"wrote {wav_path} and {spfx_path}")
