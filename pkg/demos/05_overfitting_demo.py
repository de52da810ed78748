"""
Masking as a regularizer
========================

Train the toy softmax classifier on a small synthetic corpus twice,
with and without masking, and compare the train/dev gap.
"""

import sys
from pathlib import Path

from specmask import POLICY_PRESETS, train
from specmask.toy import (
    DEFAULT_DEMO_EPOCHS,
    DEFAULT_DEMO_LR,
    DEFAULT_DEMO_POLICY,
    DEFAULT_DEMO_SEED,
    default_params,
    generate_dataset,
)

out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_out")
out_dir.mkdir(parents=True, exist_ok=True)

# 32 training examples against 512 dev examples invites overfitting.
params = default_params()
dataset = generate_dataset(params, DEFAULT_DEMO_SEED)
print(
    f"dataset: {params.templates.shape[0]} classes, {len(dataset.train)} train / "
    f"{len(dataset.dev)} dev examples, {params.num_frames} frames x {params.templates.shape[1]} channels"
)

runs = (
    ("clean", POLICY_PRESETS["none"]),
    ("masked", DEFAULT_DEMO_POLICY),
)
curves = {}
for name, policy in runs:
    curve = train(dataset, policy, DEFAULT_DEMO_EPOCHS, DEFAULT_DEMO_LR, DEFAULT_DEMO_SEED)
    curves[name] = curve
    path = out_dir / f"curve_{name}.csv"
    path.write_text(curve.to_csv(), encoding="utf-8")
    print(
        f"{name:>6}: final train_nll={curve.train_nll[-1]:.4f} "
        f"dev_nll={curve.dev_nll[-1]:.4f} gap={curve.final_gap:.4f} -> {path}"
    )

shrunk = curves["masked"].final_gap < curves["clean"].final_gap
print(f"masking {'shrank' if shrunk else 'did not shrink'} the generalization gap")

# Both runs saw identical inputs at epoch one (metrics are recorded before
# the step), so the curves separate only once the masked gradients act.
first_equal = curves["masked"].dev_nll[0] == curves["clean"].dev_nll[0]
print(f"epoch-1 dev nll identical across runs: {first_equal}")
