"""Dataset files, deterministic splits, training loops, and the benchmark runner.

On-disk contracts (all integers little-endian):

* Tensor container ("QTNS"): magic ``QTNS`` | version u8 = 1 | dtype u8 = 1
  (float32) | rank u32 | dims rank*u32 | payload row-major float32.
* Dataset manifest: JSON document naming the dataset and listing per-subject
  tensor/label file pairs (paths relative to the manifest).
* Checkpoint ("QCKP"): magic ``QCKP`` | version u8 = 1 | header-length u32 |
  JSON header (model config + tensor name order) | one QTNS blob per tensor.
* Metrics log: one JSON record per line per epoch.
"""

from __future__ import annotations

import json
import struct
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigError, FormatError, ManifestError, SplitError
from .model import Model, ModelConfig

TENSOR_MAGIC = b"QTNS"
TENSOR_VERSION = 1
DTYPE_FLOAT32 = 1
CHECKPOINT_MAGIC = b"QCKP"
CHECKPOINT_VERSION = 1


# ---------------------------------------------------------------------------
# tensor container


def _write_tensor_stream(f, array: np.ndarray) -> None:
    arr = np.ascontiguousarray(array, dtype="<f4")
    f.write(TENSOR_MAGIC)
    f.write(bytes([TENSOR_VERSION, DTYPE_FLOAT32]))
    f.write(struct.pack("<I", arr.ndim))
    f.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
    f.write(arr.tobytes())


def _read_exact(f, count: int, what: str) -> bytes:
    data = f.read(count)
    if len(data) != count:
        raise FormatError(f"truncated tensor file while reading {what}")
    return data


def _read_tensor_stream(f) -> np.ndarray:
    if _read_exact(f, 4, "magic") != TENSOR_MAGIC:
        raise FormatError("bad magic: not a QTNS tensor")
    version, dtype = _read_exact(f, 2, "version/dtype")
    if version != TENSOR_VERSION:
        raise FormatError(f"unsupported tensor version {version}")
    if dtype != DTYPE_FLOAT32:
        raise FormatError(f"unsupported dtype code {dtype}")
    (rank,) = struct.unpack("<I", _read_exact(f, 4, "rank"))
    dims = struct.unpack(f"<{rank}I", _read_exact(f, 4 * rank, "dims"))
    count = int(np.prod(dims, dtype=np.int64)) if rank else 1
    payload = _read_exact(f, 4 * count, "payload")
    return np.frombuffer(payload, dtype="<f4").reshape(dims).copy()


def write_tensor(path, array: np.ndarray) -> None:
    with open(path, "wb") as f:
        _write_tensor_stream(f, array)


def read_tensor(path) -> np.ndarray:
    with open(path, "rb") as f:
        arr = _read_tensor_stream(f)
        if f.read(1):
            raise FormatError("trailing bytes after tensor payload")
    return arr


# ---------------------------------------------------------------------------
# datasets


@dataclass
class Dataset:
    name: str
    x: np.ndarray  # (trials, channels, time) float32
    y: np.ndarray  # (trials,) int
    subjects: np.ndarray  # (trials,) int
    num_classes: int

    @property
    def channels(self) -> int:
        return self.x.shape[1]

    @property
    def time_steps(self) -> int:
        return self.x.shape[2]

    def take(self, idx: np.ndarray) -> "Dataset":
        return Dataset(
            self.name, self.x[idx], self.y[idx], self.subjects[idx], self.num_classes
        )


_MANIFEST_KEYS = {
    "name",
    "modality",
    "channels",
    "time",
    "num_classes",
    "subjects",
    "files",
}
_MANIFEST_OPTIONAL = {"notes"}


def load_dataset(manifest_path) -> Dataset:
    """Load and validate every tensor a manifest references."""
    manifest_path = Path(manifest_path)
    try:
        doc = json.loads(manifest_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot read manifest {manifest_path}: {exc}") from exc
    missing = _MANIFEST_KEYS - set(doc)
    if missing:
        raise ManifestError(f"manifest missing keys: {sorted(missing)}")
    unknown = set(doc) - _MANIFEST_KEYS - _MANIFEST_OPTIONAL
    if unknown:
        raise ManifestError(f"manifest has unknown keys: {sorted(unknown)}")

    channels, steps = int(doc["channels"]), int(doc["time"])
    num_classes = int(doc["num_classes"])
    base = manifest_path.parent
    xs, ys, subs = [], [], []
    for entry in doc["files"]:
        if set(entry) != {"tensor", "labels", "subject"}:
            raise ManifestError(f"bad file entry: {entry}")
        try:
            x = read_tensor(base / entry["tensor"])
        except OSError as exc:
            raise ManifestError(f"cannot read {entry['tensor']}: {exc}") from exc
        if x.ndim != 3 or x.shape[1] != channels or x.shape[2] != steps:
            raise ManifestError(
                f"{entry['tensor']}: dims {x.shape} disagree with manifest "
                f"(trials, {channels}, {steps})"
            )
        try:
            labels = read_tensor(base / entry["labels"])
        except OSError as exc:
            raise ManifestError(f"cannot read {entry['labels']}: {exc}") from exc
        if labels.ndim != 1 or labels.shape[0] != x.shape[0]:
            raise ManifestError(
                f"{entry['labels']}: expected {x.shape[0]} labels, got {labels.shape}"
            )
        if np.any(labels != np.round(labels)):
            raise ManifestError(f"{entry['labels']}: labels must be integers")
        y = labels.astype(int)
        if y.size and (y.min() < 0 or y.max() >= num_classes):
            raise ManifestError(
                f"{entry['labels']}: label outside [0, {num_classes})"
            )
        xs.append(x)
        ys.append(y)
        subs.append(np.full(x.shape[0], int(entry["subject"])))
    if not xs:
        raise ManifestError("manifest lists no files")
    return Dataset(
        name=str(doc["name"]),
        x=np.concatenate(xs),
        y=np.concatenate(ys),
        subjects=np.concatenate(subs),
        num_classes=num_classes,
    )


def split(
    dataset: Dataset,
    seed: int,
    train_fraction: float = 0.8,
    stratified: bool = True,
    by_subject: bool = False,
) -> Tuple[np.ndarray, np.ndarray]:
    """Deterministic train/test index split.

    Default is pooled-subject stratified sampling per class; ``by_subject``
    instead holds out whole subjects (cross-subject evaluation).
    """
    if not 0.0 < train_fraction < 1.0:
        raise SplitError(f"train_fraction must be in (0,1), got {train_fraction}")
    rng = np.random.default_rng(seed)
    n = len(dataset.y)

    if by_subject:
        ids = np.unique(dataset.subjects)
        if len(ids) < 2:
            raise SplitError("cross-subject split needs >= 2 subjects")
        ids = rng.permutation(ids)
        n_train = min(max(1, round(train_fraction * len(ids))), len(ids) - 1)
        train_ids = set(ids[:n_train].tolist())
        mask = np.array([s in train_ids for s in dataset.subjects])
        train_idx, test_idx = np.where(mask)[0], np.where(~mask)[0]
    elif stratified:
        train_parts, test_parts = [], []
        for c in range(dataset.num_classes):
            idx = np.where(dataset.y == c)[0]
            if len(idx) < 2:
                raise SplitError(f"class {c} has {len(idx)} trial(s); need >= 2")
            idx = rng.permutation(idx)
            n_train = min(max(1, round(train_fraction * len(idx))), len(idx) - 1)
            train_parts.append(idx[:n_train])
            test_parts.append(idx[n_train:])
        train_idx = np.sort(np.concatenate(train_parts))
        test_idx = np.sort(np.concatenate(test_parts))
    else:
        idx = rng.permutation(n)
        n_train = min(max(1, round(train_fraction * n)), n - 1)
        train_idx = np.sort(idx[:n_train])
        test_idx = np.sort(idx[n_train:])

    # leakage guard: disjoint and jointly exhaustive
    assert len(np.intersect1d(train_idx, test_idx)) == 0
    assert len(train_idx) + len(test_idx) == n
    return train_idx, test_idx


# ---------------------------------------------------------------------------
# experiment configuration


@dataclass
class SplitConfig:
    train_fraction: float = 0.8
    stratified: bool = True
    seed: int = 0
    by_subject: bool = False

    @classmethod
    def from_dict(cls, data: dict) -> "SplitConfig":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown split config keys: {sorted(unknown)}")
        return cls(**data)


@dataclass
class ExperimentConfig:
    model: ModelConfig
    manifest: str
    epochs: int = 50
    batch_size: int = 128
    lr: float = 0.1
    split: SplitConfig = field(default_factory=SplitConfig)
    metrics_out: Optional[str] = None
    checkpoint_out: Optional[str] = None

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown experiment config keys: {sorted(unknown)}")
        data = dict(data)
        data["model"] = ModelConfig.from_dict(data["model"])
        if "split" in data:
            data["split"] = SplitConfig.from_dict(data["split"])
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read experiment config {path}: {exc}") from exc
        return cls.from_dict(doc)


# ---------------------------------------------------------------------------
# training and evaluation


def accuracy_percent(model: Model, x: np.ndarray, y: np.ndarray) -> float:
    """100 * fraction of correct argmax predictions (ties -> lowest index)."""
    if len(y) == 0:
        return 0.0
    return 100.0 * float(np.mean(model.predict(x) == y))


def _check_dataset_matches(cfg: ModelConfig, dataset: Dataset) -> None:
    if (
        cfg.channels != dataset.channels
        or cfg.time_steps != dataset.time_steps
        or cfg.num_classes != dataset.num_classes
    ):
        raise ConfigError(
            f"model config ({cfg.channels}, {cfg.time_steps}, K={cfg.num_classes}) "
            f"does not match dataset ({dataset.channels}, {dataset.time_steps}, "
            f"K={dataset.num_classes})"
        )


def train(
    exp: ExperimentConfig, dataset: Optional[Dataset] = None
) -> Tuple[List[dict], Model]:
    """Run one experiment; returns the per-epoch metrics and the final model."""
    if dataset is None:
        dataset = load_dataset(exp.manifest)
    _check_dataset_matches(exp.model, dataset)
    train_idx, test_idx = split(
        dataset,
        seed=exp.split.seed,
        train_fraction=exp.split.train_fraction,
        stratified=exp.split.stratified,
        by_subject=exp.split.by_subject,
    )
    train_ds, test_ds = dataset.take(train_idx), dataset.take(test_idx)

    model = Model(exp.model)
    adam = model.make_adam_states(lr=exp.lr)
    shuffle_rng = np.random.default_rng(exp.split.seed + 1)

    metrics: List[dict] = []
    metrics_file = open(exp.metrics_out, "w") if exp.metrics_out else None
    try:
        for epoch in range(1, exp.epochs + 1):
            started = time.perf_counter()
            order = shuffle_rng.permutation(len(train_ds.y))
            loss_sum, seen = 0.0, 0
            for lo in range(0, len(order), exp.batch_size):
                batch = order[lo : lo + exp.batch_size]
                loss = model.train_step(train_ds.x[batch], train_ds.y[batch], adam)
                loss_sum += loss * len(batch)
                seen += len(batch)
            record = {
                "epoch": epoch,
                "train_loss": loss_sum / seen,
                "train_acc": accuracy_percent(model, train_ds.x, train_ds.y),
                "test_acc": accuracy_percent(model, test_ds.x, test_ds.y),
                "seconds": time.perf_counter() - started,
            }
            metrics.append(record)
            if metrics_file:
                metrics_file.write(json.dumps(record) + "\n")
                metrics_file.flush()
    finally:
        if metrics_file:
            metrics_file.close()

    if exp.checkpoint_out:
        save_checkpoint(exp.checkpoint_out, model)
    return metrics, model


def evaluate(checkpoint_path, manifest_path) -> float:
    """Test accuracy (percent) of a checkpoint over a whole manifest dataset."""
    model = load_checkpoint(checkpoint_path)
    dataset = load_dataset(manifest_path)
    _check_dataset_matches(model.config, dataset)
    return accuracy_percent(model, dataset.x, dataset.y)


# ---------------------------------------------------------------------------
# checkpoints


def save_checkpoint(path, model: Model) -> None:
    params = model.named_parameters()
    buffers = model.named_buffers()
    header = json.dumps(
        {
            "config": model.config.to_dict(),
            "params": list(params),
            "buffers": list(buffers),
        }
    ).encode()
    with open(path, "wb") as f:
        f.write(CHECKPOINT_MAGIC)
        f.write(bytes([CHECKPOINT_VERSION]))
        f.write(struct.pack("<I", len(header)))
        f.write(header)
        for arr in params.values():
            _write_tensor_stream(f, arr)
        for arr in buffers.values():
            _write_tensor_stream(f, arr)


def load_checkpoint(path) -> Model:
    with open(path, "rb") as f:
        if _read_exact(f, 4, "magic") != CHECKPOINT_MAGIC:
            raise FormatError("bad magic: not a checkpoint")
        (version,) = _read_exact(f, 1, "version")
        if version != CHECKPOINT_VERSION:
            raise FormatError(f"unsupported checkpoint version {version}")
        (header_len,) = struct.unpack("<I", _read_exact(f, 4, "header length"))
        header = json.loads(_read_exact(f, header_len, "header"))
        model = Model(ModelConfig.from_dict(header["config"]))
        params = model.named_parameters()
        buffers = model.named_buffers()
        if list(params) != header["params"] or list(buffers) != header["buffers"]:
            raise ConfigError("checkpoint tensors do not match the rebuilt model")
        for name in header["params"]:
            value = _read_tensor_stream(f)
            if value.shape != params[name].shape:
                raise ConfigError(f"checkpoint tensor {name} has shape {value.shape}")
            params[name][...] = value
        for name in header["buffers"]:
            value = _read_tensor_stream(f)
            if value.shape != buffers[name].shape:
                raise ConfigError(f"checkpoint tensor {name} has shape {value.shape}")
            buffers[name][...] = value
    return model


# ---------------------------------------------------------------------------
# benchmark runner


def bench(suite: dict) -> List[dict]:
    """Train the classical-control and quantum variants of every experiment.

    Each suite entry runs twice under identical splits and seeds: once with
    the quantum block ablated (identity-passthrough dense) and once as
    configured.  Failures are recorded per row, not raised.
    """
    if set(suite) - {"experiments"}:
        raise ConfigError(f"unknown suite keys: {sorted(set(suite) - {'experiments'})}")
    rows: List[dict] = []
    for entry in suite.get("experiments", []):
        name = entry.get("name", entry.get("manifest", "?"))
        try:
            entry = dict(entry)
            entry.pop("name", None)
            exp = ExperimentConfig.from_dict(entry)
            results = {}
            for label, ablate in (("classical", True), ("quantum", False)):
                model_cfg = ModelConfig.from_dict(
                    {**exp.model.to_dict(), "ablate_quantum": ablate}
                )
                variant = ExperimentConfig(
                    model=model_cfg,
                    manifest=exp.manifest,
                    epochs=exp.epochs,
                    batch_size=exp.batch_size,
                    lr=exp.lr,
                    split=exp.split,
                )
                metrics, model = train(variant)
                results[label] = {
                    "test_acc": metrics[-1]["test_acc"],
                    "total_params": model.total_param_count(),
                    "quantum_params": model.quantum_param_count,
                }
            rows.append(
                {
                    "name": name,
                    "classical_acc": results["classical"]["test_acc"],
                    "quantum_acc": results["quantum"]["test_acc"],
                    "quantum_params": results["quantum"]["quantum_params"],
                    "classical_total_params": results["classical"]["total_params"],
                    "quantum_total_params": results["quantum"]["total_params"],
                }
            )
        except Exception as exc:  # a failed row is reported, not fatal
            rows.append({"name": name, "error": f"{type(exc).__name__}: {exc}"})
    return rows


def format_bench_table(rows: Sequence[dict]) -> str:
    """Aligned text table: one row per dataset, both accuracy columns."""
    header = ("dataset", "classical %", "quantum %", "theta", "params(c)", "params(q)")
    body = []
    for row in rows:
        if "error" in row:
            body.append((str(row["name"]), "error: " + row["error"], "", "", "", ""))
        else:
            body.append(
                (
                    str(row["name"]),
                    f"{row['classical_acc']:.2f}",
                    f"{row['quantum_acc']:.2f}",
                    str(row["quantum_params"]),
                    str(row["classical_total_params"]),
                    str(row["quantum_total_params"]),
                )
            )
    widths = [
        max(len(header[i]), *(len(r[i]) for r in body)) if body else len(header[i])
        for i in range(len(header))
    ]
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(header, widths)),
        "  ".join("-" * w for w in widths),
    ]
    for r in body:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)))
    return "\n".join(lines)
