"""Synthetic blob datasets for self-contained training and benchmark runs.

Class means are mutually orthogonal directions scaled by ``separation``
(sigma units), so the pairwise mean distance is sqrt(2)*separation and the
classes stay linearly separable after the amplitude-embedding normalization.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Tuple

import numpy as np

from .errors import ConfigError


def generate_blobs(
    trials: int,
    features: int,
    classes: int,
    separation: float = 6.0,
    seed: int = 7,
) -> Tuple[np.ndarray, np.ndarray]:
    """Balanced Gaussian blobs: (trials, features) float data and int labels."""
    if classes > features:
        raise ConfigError("orthogonal means need classes <= features")
    if trials < classes:
        raise ConfigError("need at least one trial per class")
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.normal(size=(features, classes)))
    means = separation * q.T
    labels = np.arange(trials) % classes
    x = means[labels] + rng.normal(size=(trials, features))
    perm = rng.permutation(trials)
    return x[perm], labels[perm]


def write_synthetic_dataset(
    out_dir,
    trials: int = 400,
    features: int = 8,
    classes: int = 4,
    separation: float = 6.0,
    seed: int = 7,
    name: str = "synth-blobs",
    channels: int = 0,
    time_steps: int = 1,
) -> Path:
    """Write a blob dataset (tensors + manifest) and a ready experiment config.

    Returns the manifest path.  By default the tensor layout is
    (trials, features, 1): one "channel" per feature and a single time step,
    which fits the plain model mode.  Passing ``channels``/``time_steps``
    reshapes the same features into a multichannel time series instead
    (``channels * time_steps`` must equal ``features``).
    """
    from . import harness  # local import: harness owns the file formats

    if channels == 0:
        channels = features
    if channels * time_steps != features:
        raise ConfigError(
            f"channels*time_steps must equal features: "
            f"{channels}*{time_steps} != {features}"
        )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    x, y = generate_blobs(trials, features, classes, separation, seed)

    harness.write_tensor(out / "data.qtns", x.reshape(trials, channels, time_steps))
    harness.write_tensor(out / "labels.qtns", y.astype(np.float32))
    manifest = {
        "name": name,
        "modality": "synthetic",
        "channels": channels,
        "time": time_steps,
        "num_classes": classes,
        "subjects": 1,
        "files": [{"tensor": "data.qtns", "labels": "labels.qtns", "subject": 0}],
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2))

    if time_steps == 1 and features <= 8:
        experiment = {
            "manifest": str(manifest_path),
            "epochs": 50,
            "batch_size": 128,
            "lr": 0.1,
            "split": {"train_fraction": 0.8, "stratified": True, "seed": seed},
            "metrics_out": str(out / "metrics.jsonl"),
            "checkpoint_out": str(out / "model.ckpt"),
            "model": {
                "mode": "plain",
                "n_qubits": 3,
                "layers": 2,
                "channels": channels,
                "time_steps": 1,
                "num_classes": classes,
                "seed": seed,
            },
        }
        (out / "experiment.json").write_text(json.dumps(experiment, indent=2))
    return manifest_path
