"""Command-line interface: subcommand behaviour and exit codes."""

from __future__ import annotations

import math

import numpy as np
import pytest

from specmask.cli import main
from specmask.masking import masks_from_text
from specmask.spfx import read_spfx, read_stats_container
from specmask.stats import accumulate_stats

from conftest import build_corpus, tree_bytes


def test_extract_writes_features_and_empty_sidecars(tmp_path, capsys):
    manifest = build_corpus(tmp_path, 3)
    out = tmp_path / "out"
    assert main(["extract", "--manifest", str(manifest), "--out", str(out)]) == 0
    for i in range(3):
        features = read_spfx(out / f"utt{i:03d}.spfx")
        assert features.kind == "log_mel"
        assert features.num_channels == 40
        assert (out / f"utt{i:03d}.masks").read_text() == ""
    assert "processed 3 utterances" in capsys.readouterr().out


def test_extract_config_file_changes_output(tmp_path):
    manifest = build_corpus(tmp_path, 1)
    config = tmp_path / "dsp.cfg"
    config.write_text("n_mels = 26\nfeature = mfcc\nn_coeffs = 13\n", encoding="utf-8")
    out = tmp_path / "out"
    assert main(["extract", "--config", str(config), "--manifest", str(manifest), "--out", str(out)]) == 0
    features = read_spfx(out / "utt000.spfx")
    assert features.kind == "mfcc"
    assert features.num_channels == 13


def test_extract_equals_augment_eval_tree(tmp_path):
    manifest = build_corpus(tmp_path, 4)
    extract_out = tmp_path / "extract"
    augment_out = tmp_path / "augment"
    assert main(["extract", "--manifest", str(manifest), "--out", str(extract_out)]) == 0
    assert main([
        "augment", "--preset", "libri-best", "--seed", "11", "--mode", "eval",
        "--manifest", str(manifest), "--out", str(augment_out),
    ]) == 0
    assert tree_bytes(extract_out) == tree_bytes(augment_out)


def test_augment_train_sidecar_counts(tmp_path):
    manifest = build_corpus(tmp_path, 3)
    out = tmp_path / "out"
    assert main([
        "augment", "--preset", "libri-best", "--seed", "7",
        "--manifest", str(manifest), "--out", str(out),
    ]) == 0
    for i in range(3):
        masks = masks_from_text((out / f"utt{i:03d}.masks").read_text())
        assert sum(m.axis == "time" for m in masks) == 2
        assert sum(m.axis == "frequency" for m in masks) == 1


def test_augment_literal_policy_and_determinism(tmp_path):
    manifest = build_corpus(tmp_path, 3)
    trees = []
    for run in range(2):
        out = tmp_path / f"out{run}"
        assert main([
            "augment", "--policy", "3,1,5,2", "--seed", "21",
            "--manifest", str(manifest), "--out", str(out),
        ]) == 0
        trees.append(tree_bytes(out))
    assert trees[0] == trees[1]
    masks = masks_from_text((tmp_path / "out0" / "utt000.masks").read_text())
    assert len(masks) == 3


def test_augment_worker_count_is_invisible(tmp_path):
    manifest = build_corpus(tmp_path, 5)
    out1 = tmp_path / "w1"
    out8 = tmp_path / "w8"
    args = ["augment", "--preset", "ld-like", "--seed", "5", "--manifest", str(manifest)]
    assert main(args + ["--out", str(out1), "--workers", "1"]) == 0
    assert main(args + ["--out", str(out8), "--workers", "8"]) == 0
    assert tree_bytes(out1) == tree_bytes(out8)


def test_stats_then_standardize_centers_the_corpus(tmp_path, capsys):
    manifest = build_corpus(tmp_path, 4)
    stats_path = tmp_path / "corpus.spfx-stats"
    assert main(["stats", "--manifest", str(manifest), "--out", str(stats_path)]) == 0
    stats = read_stats_container(stats_path)
    assert stats.num_channels == 40

    out = tmp_path / "std"
    assert main([
        "standardize", "--stats", str(stats_path),
        "--manifest", str(manifest), "--out", str(out),
    ]) == 0
    standardized = [read_spfx(out / f"utt{i:03d}.spfx") for i in range(4)]
    assert all(f.kind == "standardized_log_mel" for f in standardized)
    merged = accumulate_stats(standardized)
    assert np.all(np.abs(merged.mean) < 1e-5)
    assert np.all(np.abs(merged.variance - 1.0) < 1e-4)
    assert "standardized 4 of 4" in capsys.readouterr().out


def test_augment_with_stats_standardizes_before_masking(tmp_path):
    manifest = build_corpus(tmp_path, 2)
    stats_path = tmp_path / "corpus.spfx-stats"
    assert main(["stats", "--manifest", str(manifest), "--out", str(stats_path)]) == 0
    out = tmp_path / "out"
    assert main([
        "augment", "--preset", "libri-best", "--seed", "3", "--stats", str(stats_path),
        "--manifest", str(manifest), "--out", str(out),
    ]) == 0
    assert read_spfx(out / "utt000.spfx").kind == "standardized_log_mel"


def test_slice_sizes_and_nesting(tmp_path, capsys):
    manifest = build_corpus(tmp_path, 10)
    out = tmp_path / "slices"
    assert main([
        "slice", "--manifest", str(manifest), "--fractions", "0.3,0.7,1.0",
        "--seed", "2", "--out", str(out),
    ]) == 0
    sizes = []
    texts = []
    for token in ("0.3", "0.7", "1.0"):
        text = (out / f"slice_{token}.tsv").read_text()
        texts.append(text)
        sizes.append(len(text.splitlines()))
    assert sizes == [3, 7, 10]
    assert texts[1].startswith(texts[0])
    assert texts[2].startswith(texts[1])
    assert "3 records" in capsys.readouterr().out


def test_slice_rejects_bad_fractions(tmp_path, capsys):
    manifest = build_corpus(tmp_path, 4)
    out = str(tmp_path / "slices")
    base = ["slice", "--manifest", str(manifest), "--out", out]
    assert main(base + ["--fractions", "0.7,0.3"]) == 2
    assert main(base + ["--fractions", "0"]) == 2
    assert main(base + ["--fractions", "1.5"]) == 2
    assert main(base + ["--fractions", "abc"]) == 2
    assert "error:" in capsys.readouterr().err


def test_render_writes_parseable_pgm(tmp_path):
    manifest = build_corpus(tmp_path, 1)
    out = tmp_path / "out"
    assert main([
        "augment", "--preset", "libri-best", "--seed", "9",
        "--manifest", str(manifest), "--out", str(out),
    ]) == 0
    image = tmp_path / "panel.pgm"
    assert main([
        "render", "--features", str(out / "utt000.spfx"),
        "--masks", str(out / "utt000.masks"), "--out", str(image),
    ]) == 0
    lines = image.read_text(encoding="ascii").splitlines()
    assert lines[0] == "P2"
    width, height = map(int, lines[1].split())
    features = read_spfx(out / "utt000.spfx")
    assert (width, height) == (features.num_frames, features.num_channels)
    assert lines[2] == "255"
    values = [int(tok) for line in lines[3:] for tok in line.split()]
    assert len(values) == width * height
    assert min(values) >= 0 and max(values) <= 255


def test_render_without_masks(tmp_path):
    manifest = build_corpus(tmp_path, 1)
    out = tmp_path / "out"
    assert main(["extract", "--manifest", str(manifest), "--out", str(out)]) == 0
    image = tmp_path / "plain.pgm"
    assert main(["render", "--features", str(out / "utt000.spfx"), "--out", str(image)]) == 0
    assert image.read_text(encoding="ascii").startswith("P2\n")


def test_verify_grid_passes_at_reduced_trials(capsys):
    assert main(["verify", "--trials", "10000"]) == 0
    out = capsys.readouterr().out
    assert "168/168 grid cells passed" in out
    assert "FAIL" not in out


def test_demo_writes_learning_curve(tmp_path, capsys):
    curve_path = tmp_path / "curve.csv"
    assert main(["demo", "--epochs", "5", "--seed", "3", "--out", str(curve_path)]) == 0
    lines = curve_path.read_text().splitlines()
    assert lines[0] == "epoch,train_nll,dev_nll"
    assert len(lines) == 6
    for epoch, line in enumerate(lines[1:], start=1):
        fields = line.split(",")
        assert int(fields[0]) == epoch
        assert math.isfinite(float(fields[1])) and math.isfinite(float(fields[2]))
    assert "wrote" in capsys.readouterr().out


def test_demo_policy_none_differs_from_default(tmp_path):
    masked = tmp_path / "masked.csv"
    clean = tmp_path / "clean.csv"
    assert main(["demo", "--epochs", "6", "--seed", "3", "--out", str(masked)]) == 0
    assert main(["demo", "--epochs", "6", "--seed", "3", "--policy", "0,0,0,0", "--out", str(clean)]) == 0
    assert masked.read_text() != clean.read_text()


def test_missing_manifest_exits_2(tmp_path, capsys):
    assert main(["extract", "--manifest", str(tmp_path / "nope.tsv"), "--out", str(tmp_path / "o")]) == 2
    assert "error:" in capsys.readouterr().err


def test_malformed_manifest_exits_2(tmp_path, capsys):
    manifest = tmp_path / "bad.tsv"
    manifest.write_text("one-field-only\n", encoding="utf-8")
    assert main(["extract", "--manifest", str(manifest), "--out", str(tmp_path / "o")]) == 2
    assert "line 1" in capsys.readouterr().err


def test_bad_policy_string_exits_2(tmp_path, capsys):
    manifest = build_corpus(tmp_path, 1)
    assert main([
        "augment", "--policy", "1,2,3", "--manifest", str(manifest), "--out", str(tmp_path / "o"),
    ]) == 2
    assert "error:" in capsys.readouterr().err


def test_missing_wav_is_per_utterance_failure(tmp_path, capsys):
    manifest = build_corpus(tmp_path, 2)
    with manifest.open("a", encoding="utf-8") as fh:
        fh.write("ghost\tghost.wav\n")
    out = tmp_path / "out"
    assert main(["extract", "--manifest", str(manifest), "--out", str(out)]) == 1
    captured = capsys.readouterr()
    assert "failed: ghost" in captured.err
    assert "processed 2 utterances" in captured.out
    assert (out / "utt000.spfx").exists()
    assert not (out / "ghost.spfx").exists()


def test_missing_required_argument_exits_2(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["extract", "--out", "somewhere"])
    assert excinfo.value.code == 2
