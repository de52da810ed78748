"""
The four masking panels
=======================

Apply no masks, time masks, frequency masks, and both to one utterance
and render each as a plain-text PGM image (dark bands are masked).
"""

import sys
import wave
from pathlib import Path

import numpy as np

from specmask import (
    AugmentPolicy,
    DspConfig,
    RngState,
    augment,
    derive_utterance_seed,
    extract,
    read_wav,
    render_masks_pgm,
)

out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_out")
out_dir.mkdir(parents=True, exist_ok=True)

# A half-second chirp-ish tone gives the panels visible structure.
rate = 16000
t = np.arange(rate // 2) / rate
samples = 0.6 * np.sin(2 * np.pi * (300.0 + 800.0 * t) * t)
pcm = np.clip(np.round(samples * 32768.0), -32768, 32767).astype("<i2")
wav_path = out_dir / "chirp.wav"
with wave.open(str(wav_path), "wb") as fh:
    fh.setnchannels(1)
    fh.setsampwidth(2)
    fh.setframerate(rate)
    fh.writeframes(pcm.tobytes())

features = extract(read_wav(wav_path), DspConfig())
print(f"utterance: {features.num_frames} frames x {features.num_channels} channels")

panels = (
    ("none", AugmentPolicy(0, 0, 0, 0)),
    ("time", AugmentPolicy(0, 0, 12, 2)),
    ("freq", AugmentPolicy(9, 2, 0, 0)),
    ("both", AugmentPolicy(9, 2, 12, 2)),
)
seed = 7
for name, policy in panels:
    # Each panel draws its masks from its own derived stream, so adding a
    # panel never changes the ones before it.
    rng = RngState(derive_utterance_seed(seed, name))
    _, masks, _ = augment(features, policy, rng)
    path = out_dir / f"panel_{name}.pgm"
    render_masks_pgm(features, masks, path)
    described = ", ".join(f"{m.axis}[{m.start}:{m.start + m.length}]" for m in masks) or "no masks"
    print(f"{path}: {described}")
