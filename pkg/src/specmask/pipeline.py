"""Batch processing: manifest in, per-utterance SPFX + mask sidecars out.

Every utterance draws its masks from an RNG state derived from
(global seed, utterance id), so output bytes depend only on inputs, config
and seed, never on worker count or scheduling.  Augmentation is train-only:
eval mode forces the `none` policy.  A mask sidecar is always written, so an
eval-mode output tree is byte-identical to a policy-none tree.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigError, SpecmaskError
from .features import DspConfig, FeatureMatrix, extract, read_wav
from .masking import POLICY_PRESETS, AugmentPolicy, augment, masks_to_text
from .rng import RngState, derive_utterance_seed
from .spfx import read_spfx, read_stats_container, write_spfx
from .stats import CorpusStats, standardize
from .manifest import Manifest, ManifestRecord, parse_manifest

RUN_MODES = ("train", "eval")


@dataclass(frozen=True)
class RunConfig:
    """One pipeline invocation.  mode="eval" overrides the policy with `none`."""

    manifest_path: str
    output_dir: str
    dsp: DspConfig = DspConfig()
    policy: AugmentPolicy = POLICY_PRESETS["none"]
    seed: int = 0
    mode: str = "train"
    stats_path: str | None = None
    num_workers: int = 1

    def __post_init__(self) -> None:
        if self.mode not in RUN_MODES:
            raise ConfigError(f"mode must be one of {RUN_MODES}, got {self.mode!r}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a u64, got {self.seed}")
        if self.num_workers < 1:
            raise ConfigError(f"num_workers must be >= 1, got {self.num_workers}")

    @property
    def effective_policy(self) -> AugmentPolicy:
        return self.policy if self.mode == "train" else POLICY_PRESETS["none"]


@dataclass
class RunSummary:
    """Aggregated results in manifest order."""

    utterances_processed: int = 0
    masks_drawn: int = 0
    warnings: list[str] = field(default_factory=list)
    failures: list[tuple[str, str]] = field(default_factory=list)


def _load_features(record: ManifestRecord, base_dir: Path, dsp: DspConfig) -> FeatureMatrix:
    path = base_dir / record.path
    if path.suffix == ".spfx":
        return read_spfx(path)
    return extract(read_wav(path), dsp)


def _process_one(
    record: ManifestRecord,
    base_dir: Path,
    out_dir: Path,
    config: RunConfig,
    stats: CorpusStats | None,
) -> tuple[int, list[str]]:
    features = _load_features(record, base_dir, config.dsp)
    if stats is not None:
        features = standardize(features, stats)
    policy = config.effective_policy
    notes: list[str] = []
    capped_time = min(policy.num_time_masks, features.num_frames)
    if capped_time < policy.num_time_masks:
        notes.append(
            f"{record.utterance_id}: requested {policy.num_time_masks} time masks "
            f"but only {features.num_frames} frames; capped"
        )
    capped_freq = min(policy.num_freq_masks, features.num_channels)
    if capped_freq < policy.num_freq_masks:
        notes.append(
            f"{record.utterance_id}: requested {policy.num_freq_masks} frequency masks "
            f"but only {features.num_channels} channels; capped"
        )
    rng = RngState(derive_utterance_seed(config.seed, record.utterance_id))
    masked, masks, _ = augment(features, policy, rng)
    write_spfx(masked, out_dir / f"{record.utterance_id}.spfx")
    # the sidecar is written even when empty, so eval trees match policy-none trees
    (out_dir / f"{record.utterance_id}.masks").write_text(masks_to_text(masks), encoding="utf-8")
    return len(masks), notes


def run_pipeline(config: RunConfig) -> RunSummary:
    """Process every manifest record; per-utterance failures are collected, not fatal."""
    manifest_path = Path(config.manifest_path)
    manifest: Manifest = parse_manifest(manifest_path.read_text(encoding="utf-8"))
    base_dir = manifest_path.parent
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stats = read_stats_container(config.stats_path) if config.stats_path else None

    summary = RunSummary()
    with ThreadPoolExecutor(max_workers=config.num_workers) as pool:
        futures = [
            pool.submit(_process_one, record, base_dir, out_dir, config, stats)
            for record in manifest.records
        ]
        # merge in manifest order regardless of completion order
        for record, future in zip(manifest.records, futures):
            try:
                num_masks, notes = future.result()
            except (SpecmaskError, OSError, ValueError) as exc:
                summary.failures.append((record.utterance_id, str(exc)))
                continue
            summary.utterances_processed += 1
            summary.masks_drawn += num_masks
            summary.warnings.extend(notes)
    return summary


_DSP_INT_FIELDS = {"n_fft", "n_mels", "n_coeffs"}
_DSP_FLOAT_FIELDS = {"pre_emphasis", "frame_len_ms", "frame_shift_ms", "log_floor", "fmin_hz", "fmax_hz"}
_DSP_OPTIONAL_FIELDS = {"n_fft", "n_coeffs", "fmax_hz"}
_DSP_FIELD_NAMES = {f.name for f in fields(DspConfig)}


def parse_dsp_config(text: str) -> DspConfig:
    """Parse `key = value` lines into a DspConfig.

    `#` lines and blank lines are skipped; unknown keys are rejected.  The
    optional fields accept the value `none`.
    """
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"config line {lineno}: expected `key = value`, got {stripped!r}")
        key, _, raw_value = stripped.partition("=")
        key = key.strip()
        value = raw_value.strip()
        if key not in _DSP_FIELD_NAMES:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"config line {lineno}: duplicate key {key!r}")
        try:
            if key in _DSP_OPTIONAL_FIELDS and value.lower() == "none":
                values[key] = None
            elif key in _DSP_INT_FIELDS:
                values[key] = int(value)
            elif key in _DSP_FLOAT_FIELDS:
                values[key] = float(value)
            else:
                values[key] = value
        except ValueError:
            raise ConfigError(f"config line {lineno}: bad value {value!r} for {key!r}") from None
    return DspConfig(**values)
