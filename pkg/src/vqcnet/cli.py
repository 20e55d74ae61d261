"""Command-line interface.

Subcommands: ``circuit`` (inspect the gate program), ``gradcheck`` (compare
gradient engines against finite differences), ``train`` / ``eval`` / ``bench``
(harness operations), and ``gen-synth`` (write a synthetic dataset).

Exit codes: 0 success, 1 failed check (gradcheck), 2 invalid arguments or
input files, 3 runtime failure.  Diagnostics go to stderr, results to stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import harness, synth
from .ansatz import AnsatzConfig, build_circuit, param_count, trainable_slot_count
from .errors import (
    ConfigError,
    FormatError,
    LabelError,
    ManifestError,
    SizeError,
    SplitError,
    ZeroVectorError,
)
from .measurement import adjoint_grad, parameter_shift_grad
from .qstate import GateKind

_VALIDATION_ERRORS = (
    ConfigError,
    SizeError,
    FormatError,
    ManifestError,
    SplitError,
    LabelError,
    ZeroVectorError,
    FileNotFoundError,
    IsADirectoryError,
    json.JSONDecodeError,
)

FAULT_ENV = "VQCNET_FAULT_INJECT"


def _fmt_op(op, params) -> str:
    if op.kind is GateKind.CZ:
        return f"CZ q{op.control} q{op.target}"
    if op.trainable:
        line = f"RY q{op.target} slot={op.param_slot}"
        if params is not None:
            line += f" value={params[op.param_slot]:.10f}"
        return line
    return f"RY q{op.target} fixed={op.angle:.10f}"


def cmd_circuit(args) -> int:
    cfg = AnsatzConfig(
        n_qubits=args.qubits,
        layers=args.layers,
        initial_fixed_rotation=not args.no_initial_rotation,
    )
    params = None
    if args.params:
        params = np.loadtxt(args.params, ndmin=1)
    ops = build_circuit(cfg, params)
    for op in ops:
        print(_fmt_op(op, params))
    print(f"trainable parameters: {trainable_slot_count(ops)}")
    return 0


def cmd_gradcheck(args) -> int:
    cfg = AnsatzConfig(n_qubits=args.qubits, layers=args.layers)
    rng = np.random.default_rng(args.seed)
    n_params = param_count(args.qubits, args.layers)
    h = 1e-4

    def weighted(theta, state, upstream):
        from .ansatz import apply_ansatz
        from .measurement import expect_z_all

        return float(expect_z_all(apply_ansatz(state, cfg, theta)) @ upstream)

    max_engine = 0.0
    max_adj_fd = 0.0
    max_shift_fd = 0.0
    for _ in range(args.trials):
        theta = rng.uniform(-np.pi, np.pi, size=n_params)
        vec = rng.normal(size=1 << args.qubits)
        state = (vec / np.linalg.norm(vec)).astype(complex)
        upstream = rng.normal(size=args.qubits)

        adj = adjoint_grad(cfg, theta, state, upstream).d_theta
        if os.environ.get(FAULT_ENV) == "sign":
            adj = -adj  # test-only negative control
        shift = parameter_shift_grad(cfg, theta, state, upstream)
        fd = np.zeros(n_params)
        for j in range(n_params):
            bumped = theta.copy()
            bumped[j] += h
            up = weighted(bumped, state, upstream)
            bumped[j] -= 2 * h
            down = weighted(bumped, state, upstream)
            fd[j] = (up - down) / (2 * h)

        scale = np.maximum(1.0, np.maximum(np.abs(adj), np.abs(fd)))
        max_engine = max(max_engine, float(np.abs(adj - shift).max()))
        max_adj_fd = max(max_adj_fd, float((np.abs(adj - fd) / scale).max()))
        scale = np.maximum(1.0, np.maximum(np.abs(shift), np.abs(fd)))
        max_shift_fd = max(max_shift_fd, float((np.abs(shift - fd) / scale).max()))

    print(f"adjoint vs parameter-shift: max |diff| = {max_engine:.3e}")
    print(f"adjoint vs finite-diff:     max rel dev = {max_adj_fd:.3e}")
    print(f"shift vs finite-diff:       max rel dev = {max_shift_fd:.3e}")
    ok = max_engine <= 1e-8 and max_adj_fd <= 1e-5 and max_shift_fd <= 1e-5
    if not ok:
        print("gradient engines disagree beyond tolerance", file=sys.stderr)
    return 0 if ok else 1


def cmd_train(args) -> int:
    exp = harness.ExperimentConfig.from_file(args.config)
    metrics, _ = harness.train(exp)
    for rec in metrics:
        print(
            f"epoch {rec['epoch']}/{exp.epochs} "
            f"loss={rec['train_loss']:.4f} "
            f"train={rec['train_acc']:.2f}% test={rec['test_acc']:.2f}% "
            f"({rec['seconds']:.2f}s)"
        )
    if exp.checkpoint_out:
        print(f"checkpoint: {exp.checkpoint_out}")
    if exp.metrics_out:
        print(f"metrics: {exp.metrics_out}")
    return 0


def cmd_eval(args) -> int:
    acc = harness.evaluate(args.checkpoint, args.manifest)
    print(f"test accuracy: {acc:.2f}%")
    return 0


def cmd_bench(args) -> int:
    try:
        suite = json.loads(Path(args.suite).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read suite {args.suite}: {exc}") from exc
    rows = harness.bench(suite)
    print(harness.format_bench_table(rows))
    if args.out:
        Path(args.out).write_text(json.dumps(rows, indent=2))
    return 0


def cmd_gen_synth(args) -> int:
    manifest = synth.write_synthetic_dataset(
        args.out,
        trials=args.trials,
        features=args.features,
        classes=args.classes,
        separation=args.separation,
        seed=args.seed,
    )
    print(f"manifest: {manifest}")
    print(f"experiment config: {Path(args.out) / 'experiment.json'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vqcnet",
        description="variational quantum circuits for biosignal classification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("circuit", help="print the gate program of an ansatz")
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--layers", type=int, required=True)
    p.add_argument("--no-initial-rotation", action="store_true")
    p.add_argument("--params", help="text file with one angle per line")
    p.set_defaults(func=cmd_circuit)

    p = sub.add_parser("gradcheck", help="cross-check the gradient engines")
    p.add_argument("--qubits", type=int, default=4)
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("train", help="train a model from an experiment config")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on a dataset")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="run a comparison suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--out", help="write the rows as JSON")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen-synth", help="write a synthetic blob dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--trials", type=int, default=400)
    p.add_argument("--features", type=int, default=8)
    p.add_argument("--classes", type=int, default=4)
    p.add_argument("--separation", type=float, default=6.0)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_gen_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
