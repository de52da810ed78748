"""
Nested corpus slices for data-scaling runs
==========================================

Slicing draws one seeded shuffle and takes prefixes, so every smaller
fraction is literally contained in every larger one.
"""

import sys
from fractions import Fraction
from pathlib import Path

from specmask import Manifest, ManifestRecord, format_manifest, slice_manifest

out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_out")
out_dir.mkdir(parents=True, exist_ok=True)

# A synthetic 1000-record manifest stands in for a real corpus listing.
manifest = Manifest(tuple(ManifestRecord(f"utt{i:04d}", f"utt{i:04d}.wav") for i in range(1000)))

fractions = [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1, 1)]
slices = slice_manifest(manifest, fractions, seed=3)
for frac, sliced in zip(fractions, slices):
    path = out_dir / f"slice_{frac.numerator}-{frac.denominator}.tsv"
    path.write_text(format_manifest(sliced), encoding="utf-8")
    print(f"{float(frac):4.2f} -> {len(sliced):4d} records -> {path}")

# Prefix containment is the whole point: a curve over these subsets
# varies the data amount and nothing else.
for smaller, larger in zip(slices, slices[1:]):
    assert larger.records[: len(smaller)] == smaller.records
print("each slice is a prefix of the next")

# The same shuffle at a different seed picks a different subset.
other = slice_manifest(manifest, [Fraction(1, 4)], seed=4)[0]
overlap = len(set(r.utterance_id for r in other.records) & set(r.utterance_id for r in slices[0].records))
print(f"seed 3 vs seed 4 quarter-slices share {overlap}/250 records")
