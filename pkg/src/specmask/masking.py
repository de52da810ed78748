"""Time/frequency mask sampling and application.

Masks zero out whole frame intervals [t, t+tau) or channel intervals
[f, f+phi).  Widths are uniform on {0..max_width} inclusive, start positions
uniform over the whole axis with end-clamping, and start positions within one
call are pairwise distinct (rejection-resampled).  All randomness flows
through explicit RngState values, so augmentation is reproducible and safe to
parallelize across utterances.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import FormatError, MaskBoundsError
from .features import FeatureMatrix
from .rng import RngState, uniform, uniform_batch

MASK_AXES = ("time", "frequency")


@dataclass(frozen=True)
class MaskSpec:
    """One axis-aligned zeroing interval: `length` positions starting at `start`."""

    axis: str
    start: int
    length: int

    def __post_init__(self) -> None:
        if self.axis not in MASK_AXES:
            raise ValueError(f"axis must be one of {MASK_AXES}, got {self.axis!r}")
        if self.start < 0 or self.length < 0:
            raise ValueError(f"start and length must be nonnegative, got ({self.start}, {self.length})")


@dataclass(frozen=True)
class AugmentPolicy:
    """Masking policy (F, m_F, R, m_R).

    F/R bound the frequency/time mask widths, m_F/m_R are how many masks of
    each kind are drawn per utterance.
    """

    max_freq_width: int = 0
    num_freq_masks: int = 0
    max_time_width: int = 0
    num_time_masks: int = 0

    def __post_init__(self) -> None:
        for name in ("max_freq_width", "num_freq_masks", "max_time_width", "num_time_masks"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")

    @property
    def is_identity(self) -> bool:
        return (self.num_freq_masks == 0 or self.max_freq_width == 0) and (
            self.num_time_masks == 0 or self.max_time_width == 0
        )


#: Named policies, as (F, m_F, R, m_R).
POLICY_PRESETS = {
    "none": AugmentPolicy(0, 0, 0, 0),
    "libri-best": AugmentPolicy(5, 1, 40, 2),
    "iwslt-best": AugmentPolicy(4, 1, 40, 2),
    "ld-like": AugmentPolicy(27, 2, 100, 2),
}


def resolve_policy(spec: str) -> AugmentPolicy:
    """Turn a preset name or a literal `F,mF,R,mR` quadruple into a policy."""
    if spec in POLICY_PRESETS:
        return POLICY_PRESETS[spec]
    parts = spec.split(",")
    if len(parts) != 4:
        raise FormatError(
            f"policy must be a preset name {sorted(POLICY_PRESETS)} or four comma-separated integers, got {spec!r}"
        )
    try:
        f, m_f, r, m_r = (int(p) for p in parts)
    except ValueError as exc:
        raise FormatError(f"policy {spec!r} has a non-integer field") from exc
    try:
        return AugmentPolicy(f, m_f, r, m_r)
    except ValueError as exc:
        raise FormatError(f"policy {spec!r} is invalid: {exc}") from exc


def sample_axis_masks(
    max_width: int, count: int, extent: int, axis: str, rng: RngState
) -> tuple[list[MaskSpec], RngState]:
    """Draw `count` masks on one axis of the given extent.

    Per mask, in draw order: width uniform on {0..max_width}, then a start
    uniform on {0..extent-1} redrawn until it differs from every start already
    taken in this call.  The mask is clamped at the axis end, so its recorded
    length is min(width, extent - start).  A count above the extent is capped
    (with a warning) since only `extent` distinct starts exist.
    """
    if extent < 1:
        raise ValueError(f"extent must be >= 1, got {extent}")
    effective = min(count, extent)
    if effective < count:
        warnings.warn(
            f"requested {count} {axis} masks but the axis has {extent} positions; capping at {extent}",
            RuntimeWarning,
            stacklevel=2,
        )
    masks: list[MaskSpec] = []
    used: set[int] = set()
    for _ in range(effective):
        width, rng = uniform(rng, max_width + 1)
        start, rng = uniform(rng, extent)
        while start in used:
            start, rng = uniform(rng, extent)
        used.add(start)
        masks.append(MaskSpec(axis=axis, start=start, length=min(width, extent - start)))
    return masks, rng


def sample_axis_masks_batch(
    max_width: int, count: int, extent: int, states: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized twin of sample_axis_masks, one independent trial per state.

    Draw-for-draw equivalent to the scalar sampler: trial i consumes its
    stream exactly as sample_axis_masks would with RngState(states[i]).
    Returns (starts, lengths) as (n_trials, effective_count) int64 arrays plus
    the advanced states.
    """
    if extent < 1:
        raise ValueError(f"extent must be >= 1, got {extent}")
    states = np.asarray(states, dtype=np.uint64).copy()
    n = states.shape[0]
    effective = min(count, extent)
    if effective < count:
        warnings.warn(
            f"requested {count} masks but the axis has {extent} positions; capping at {extent}",
            RuntimeWarning,
            stacklevel=2,
        )
    starts = np.zeros((n, effective), dtype=np.int64)
    lengths = np.zeros((n, effective), dtype=np.int64)
    for i in range(effective):
        width, states = uniform_batch(states, max_width + 1)
        start, states = uniform_batch(states, extent)
        if i > 0:
            dup = (start[:, None] == starts[:, :i]).any(axis=1)
            while dup.any():
                idx = np.flatnonzero(dup)
                redraw, sub = uniform_batch(states[idx], extent)
                states[idx] = sub
                start[idx] = redraw
                dup[idx] = (redraw[:, None] == starts[idx, :i]).any(axis=1)
        starts[:, i] = start
        lengths[:, i] = np.minimum(width, extent - start)
    return starts, lengths, states


def sample_policy_masks(
    policy: AugmentPolicy, num_frames: int, num_channels: int, rng: RngState
) -> tuple[list[MaskSpec], RngState]:
    """Draw all masks for one utterance: time masks first, then frequency masks, one shared stream."""
    if num_frames < 1 or num_channels < 1:
        raise ValueError(f"need num_frames >= 1 and num_channels >= 1, got ({num_frames}, {num_channels})")
    time_masks, rng = sample_axis_masks(policy.max_time_width, policy.num_time_masks, num_frames, "time", rng)
    freq_masks, rng = sample_axis_masks(policy.max_freq_width, policy.num_freq_masks, num_channels, "frequency", rng)
    return time_masks + freq_masks, rng


def apply_masks(features: FeatureMatrix, masks: list[MaskSpec]) -> FeatureMatrix:
    """Zero every masked frame row / channel column; the input is left untouched."""
    data = features.data.copy()
    for mask in masks:
        extent = features.num_frames if mask.axis == "time" else features.num_channels
        if mask.start + mask.length > extent or mask.start >= extent:
            raise MaskBoundsError(
                f"{mask.axis} mask [{mask.start}, {mask.start + mask.length}) exceeds axis extent {extent}"
            )
        if mask.axis == "time":
            data[mask.start : mask.start + mask.length, :] = 0.0
        else:
            data[:, mask.start : mask.start + mask.length] = 0.0
    return replace(features, data=data)


def augment(
    features: FeatureMatrix, policy: AugmentPolicy, rng: RngState
) -> tuple[FeatureMatrix, list[MaskSpec], RngState]:
    """Sample masks for the policy and apply them to a copy of the features."""
    masks, rng = sample_policy_masks(policy, features.num_frames, features.num_channels, rng)
    return apply_masks(features, masks), masks, rng


def masks_to_text(masks: list[MaskSpec]) -> str:
    """Serialize masks one per line as `axis<TAB>start<TAB>length`."""
    return "".join(f"{m.axis}\t{m.start}\t{m.length}\n" for m in masks)


def masks_from_text(text: str) -> list[MaskSpec]:
    """Parse the masks_to_text format; malformed lines raise FormatError with their line number."""
    masks: list[MaskSpec] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise FormatError(f"mask line {lineno}: expected 3 tab-separated fields, got {len(fields)}")
        axis, start_s, length_s = fields
        if axis not in MASK_AXES:
            raise FormatError(f"mask line {lineno}: unknown axis {axis!r}")
        try:
            start, length = int(start_s), int(length_s)
        except ValueError:
            raise FormatError(f"mask line {lineno}: start and length must be integers") from None
        try:
            masks.append(MaskSpec(axis=axis, start=start, length=length))
        except ValueError as exc:
            raise FormatError(f"mask line {lineno}: {exc}") from None
    return masks
