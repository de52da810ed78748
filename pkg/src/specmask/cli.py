"""Command-line interface.

Exit codes: 0 on success, 1 when individual utterances failed (or a check
failed), 2 on configuration/format errors.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from .errors import (
    ConfigError,
    EmptyInputError,
    EnumerationTooLargeError,
    FormatError,
    ManifestError,
    SpecmaskError,
)
from .features import DspConfig
from .manifest import format_manifest, parse_manifest, slice_manifest
from .masking import masks_from_text, resolve_policy
from .pipeline import RunConfig, RunSummary, _load_features, parse_dsp_config, run_pipeline
from .render import render_masks_pgm
from .spfx import read_spfx, read_stats_container, write_spfx, write_stats_container
from .stats import accumulate_stats, standardize, verify_grid
from .toy import (
    DEFAULT_DEMO_EPOCHS,
    DEFAULT_DEMO_LR,
    DEFAULT_DEMO_POLICY,
    DEFAULT_DEMO_SEED,
    default_params,
    generate_dataset,
    train,
)

VERIFY_EXTENTS = range(1, 13)
VERIFY_MAX_WIDTHS = range(0, 7)
VERIFY_COUNTS = (1, 2)


def _dsp_from_args(args) -> DspConfig:
    if args.config:
        return parse_dsp_config(Path(args.config).read_text(encoding="utf-8"))
    return DspConfig()


def _policy_from_args(args):
    if getattr(args, "preset", None):
        return resolve_policy(args.preset)
    if getattr(args, "policy", None):
        return resolve_policy(args.policy)
    return resolve_policy("none")


def _report_summary(summary: RunSummary) -> int:
    for note in summary.warnings:
        print(f"warning: {note}", file=sys.stderr)
    for utterance_id, message in summary.failures:
        print(f"failed: {utterance_id}: {message}", file=sys.stderr)
    print(f"processed {summary.utterances_processed} utterances, {summary.masks_drawn} masks drawn")
    return 1 if summary.failures else 0


def _cmd_extract(args) -> int:
    config = RunConfig(
        manifest_path=args.manifest,
        output_dir=args.out,
        dsp=_dsp_from_args(args),
        mode="eval",  # plain extraction never augments
        num_workers=args.workers,
    )
    return _report_summary(run_pipeline(config))


def _cmd_stats(args) -> int:
    dsp = _dsp_from_args(args)
    manifest_path = Path(args.manifest)
    manifest = parse_manifest(manifest_path.read_text(encoding="utf-8"))
    stream = (_load_features(record, manifest_path.parent, dsp) for record in manifest.records)
    stats = accumulate_stats(stream)
    write_stats_container(stats, args.out)
    print(f"accumulated {stats.count} frames over {stats.num_channels} channels")
    return 0


def _cmd_standardize(args) -> int:
    dsp = _dsp_from_args(args)
    stats = read_stats_container(args.stats)
    manifest_path = Path(args.manifest)
    manifest = parse_manifest(manifest_path.read_text(encoding="utf-8"))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    failures = 0
    for record in manifest.records:
        try:
            features = standardize(_load_features(record, manifest_path.parent, dsp), stats)
            write_spfx(features, out_dir / f"{record.utterance_id}.spfx")
        except (SpecmaskError, OSError, ValueError) as exc:
            print(f"failed: {record.utterance_id}: {exc}", file=sys.stderr)
            failures += 1
    print(f"standardized {len(manifest) - failures} of {len(manifest)} utterances")
    return 1 if failures else 0


def _cmd_augment(args) -> int:
    config = RunConfig(
        manifest_path=args.manifest,
        output_dir=args.out,
        dsp=_dsp_from_args(args),
        policy=_policy_from_args(args),
        seed=args.seed,
        mode=args.mode,
        stats_path=args.stats,
        num_workers=args.workers,
    )
    return _report_summary(run_pipeline(config))


def _cmd_slice(args) -> int:
    try:
        fractions = [Fraction(token) for token in args.fractions.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad fractions {args.fractions!r}: {exc}") from None
    manifest = parse_manifest(Path(args.manifest).read_text(encoding="utf-8"))
    try:
        slices = slice_manifest(manifest, fractions, args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for token, sliced in zip(args.fractions.split(","), slices):
        path = out_dir / f"slice_{token.replace('/', '-')}.tsv"
        path.write_text(format_manifest(sliced), encoding="utf-8")
        print(f"{path}: {len(sliced)} records")
    return 0


def _cmd_render(args) -> int:
    features = read_spfx(args.features)
    masks = masks_from_text(Path(args.masks).read_text(encoding="utf-8")) if args.masks else []
    render_masks_pgm(features, masks, args.out)
    print(f"wrote {args.out} ({features.num_frames}x{features.num_channels})")
    return 0


def _cmd_verify(args) -> int:
    rows = verify_grid(VERIFY_EXTENTS, VERIFY_MAX_WIDTHS, VERIFY_COUNTS, args.trials, args.seed)
    print(f"{'extent':>6} {'max_width':>9} {'count':>5} {'exact':>10} {'mc_mean':>10} {'stderr':>10} result")
    failures = 0
    for row in rows:
        status = "PASS" if row.passed else "FAIL"
        if not row.passed:
            failures += 1
        print(
            f"{row.extent:>6} {row.max_width:>9} {row.count:>5} "
            f"{row.exact:>10.6f} {row.mc_mean:>10.6f} {row.mc_stderr:>10.6f} {status}"
        )
    print(f"{len(rows) - failures}/{len(rows)} grid cells passed at trials={args.trials}")
    return 1 if failures else 0


def _cmd_demo(args) -> int:
    if args.preset or args.policy:
        policy = _policy_from_args(args)
    else:
        policy = DEFAULT_DEMO_POLICY
    dataset = generate_dataset(default_params(), args.seed)
    curve = train(dataset, policy, args.epochs, args.lr, args.seed)
    Path(args.out).write_text(curve.to_csv(), encoding="utf-8")
    print(
        f"epochs={curve.num_epochs} final train_nll={curve.train_nll[-1]:.4f} "
        f"dev_nll={curve.dev_nll[-1]:.4f} gap={curve.final_gap:.4f}"
    )
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="specmask", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract features for every manifest record")
    p.add_argument("--config", help="DSP config file (key = value lines)")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("stats", help="accumulate per-channel mean/variance over a corpus")
    p.add_argument("--config", help="DSP config file (for WAV inputs)")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="output stats container path")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("standardize", help="standardize features with precomputed stats")
    p.add_argument("--config", help="DSP config file (for WAV inputs)")
    p.add_argument("--stats", required=True, help="stats container from the stats subcommand")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_standardize)

    p = sub.add_parser("augment", help="run the masking pipeline over a manifest")
    p.add_argument("--config", help="DSP config file (for WAV inputs)")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--preset", help="policy preset name")
    group.add_argument("--policy", help="literal policy F,mF,R,mR")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("train", "eval"), default="train")
    p.add_argument("--stats", help="standardize with this stats container before masking")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_augment)

    p = sub.add_parser("slice", help="write nested random manifest subsets")
    p.add_argument("--manifest", required=True)
    p.add_argument("--fractions", required=True, help="comma-separated fractions in (0, 1], ascending")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_slice)

    p = sub.add_parser("render", help="render a feature matrix (plus masks) as a PGM image")
    p.add_argument("--features", required=True, help="input .spfx file")
    p.add_argument("--masks", help="mask sidecar to overlay")
    p.add_argument("--out", required=True, help="output .pgm path")
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("verify", help="check the mask sampler against exact enumeration oracles")
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("demo", help="train the toy classifier and emit its learning curve")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--preset", help="policy preset name")
    group.add_argument("--policy", help="literal policy F,mF,R,mR (default: the shipped demo policy)")
    p.add_argument("--epochs", type=int, default=DEFAULT_DEMO_EPOCHS)
    p.add_argument("--lr", type=float, default=DEFAULT_DEMO_LR)
    p.add_argument("--seed", type=int, default=DEFAULT_DEMO_SEED)
    p.add_argument("--out", default="curve.csv", help="output CSV path")
    p.set_defaults(func=_cmd_demo)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FormatError, ManifestError, EmptyInputError, EnumerationTooLargeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SpecmaskError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
