import json
import subprocess
import sys

import numpy as np
import pytest

from vqcnet.cli import FAULT_ENV, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCircuit:
    def test_param_footer(self, capsys):
        code, out, _ = run_cli(capsys, "circuit", "--qubits", "5", "--layers", "3")
        assert code == 0
        assert out.strip().splitlines()[-1] == "trainable parameters: 24"

    def test_minimal_program_lines(self, capsys):
        code, out, _ = run_cli(
            capsys, "circuit", "--qubits", "2", "--layers", "1",
            "--no-initial-rotation",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[:-1] == ["CZ q0 q1", "RY q0 slot=0", "RY q1 slot=1"]

    def test_single_qubit_rejected(self, capsys):
        code, _, err = run_cli(capsys, "circuit", "--qubits", "1", "--layers", "1")
        assert code == 2
        assert "error" in err

    def test_params_file(self, capsys, tmp_path):
        path = tmp_path / "theta.txt"
        np.savetxt(path, [0.5, -0.25])
        code, out, _ = run_cli(
            capsys, "circuit", "--qubits", "2", "--layers", "1",
            "--no-initial-rotation", "--params", str(path),
        )
        assert code == 0
        assert "value=0.5000000000" in out

    def test_params_length_mismatch(self, capsys, tmp_path):
        path = tmp_path / "theta.txt"
        np.savetxt(path, [0.5])
        code, _, err = run_cli(
            capsys, "circuit", "--qubits", "2", "--layers", "1",
            "--params", str(path),
        )
        assert code == 2

    def test_unknown_flag(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["circuit", "--qubits", "2", "--layers", "1", "--wat"])
        assert info.value.code == 2


class TestGradcheck:
    def test_small_run_passes(self, capsys):
        code, out, _ = run_cli(
            capsys, "gradcheck", "--qubits", "3", "--layers", "1",
            "--trials", "3", "--seed", "1",
        )
        assert code == 0
        assert "adjoint vs parameter-shift" in out
        assert "finite-diff" in out

    def test_fault_injection_fails(self, capsys, monkeypatch):
        monkeypatch.setenv(FAULT_ENV, "sign")
        code, _, err = run_cli(
            capsys, "gradcheck", "--qubits", "3", "--layers", "1",
            "--trials", "2", "--seed", "1",
        )
        assert code != 0


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli-synth")
    code = main(["gen-synth", "--out", str(out), "--trials", "160", "--seed", "9"])
    assert code == 0
    return out


class TestPipeline:
    def test_gen_synth_outputs(self, synth_dir):
        assert (synth_dir / "manifest.json").exists()
        assert (synth_dir / "data.qtns").exists()
        assert (synth_dir / "labels.qtns").exists()
        assert (synth_dir / "experiment.json").exists()

    def test_train_eval_round_trip(self, capsys, synth_dir):
        config = json.loads((synth_dir / "experiment.json").read_text())
        config["epochs"] = 3
        path = synth_dir / "short.json"
        path.write_text(json.dumps(config))

        code, out, _ = run_cli(capsys, "train", "--config", str(path))
        assert code == 0
        epoch_lines = [l for l in out.splitlines() if l.startswith("epoch ")]
        assert len(epoch_lines) == 3
        metrics = [json.loads(l) for l in open(config["metrics_out"])]
        assert len(metrics) == 3

        code, out, _ = run_cli(
            capsys, "eval", "--checkpoint", config["checkpoint_out"],
            "--manifest", str(synth_dir / "manifest.json"),
        )
        assert code == 0
        assert out.startswith("test accuracy:")

    def test_train_missing_config(self, capsys):
        code, _, err = run_cli(capsys, "train", "--config", "/no/such/file.json")
        assert code == 2
        assert err

    def test_eval_bad_checkpoint(self, capsys, synth_dir, tmp_path):
        bad = tmp_path / "bad.ckpt"
        bad.write_bytes(b"not a checkpoint")
        code, _, err = run_cli(
            capsys, "eval", "--checkpoint", str(bad),
            "--manifest", str(synth_dir / "manifest.json"),
        )
        assert code == 2

    def test_bench_two_rows(self, capsys, synth_dir, tmp_path):
        other = tmp_path / "second"
        assert main(["gen-synth", "--out", str(other), "--trials", "120",
                     "--seed", "13"]) == 0
        capsys.readouterr()  # drop gen-synth output
        suite = {
            "experiments": [
                {
                    "name": name,
                    "manifest": str(d / "manifest.json"),
                    "epochs": 2,
                    "batch_size": 64,
                    "lr": 0.1,
                    "split": {"seed": 2},
                    "model": {"mode": "plain", "n_qubits": 3, "layers": 2,
                              "channels": 8, "time_steps": 1, "num_classes": 4,
                              "seed": 2},
                }
                for name, d in (("one", synth_dir), ("two", other))
            ]
        }
        suite_path = tmp_path / "suite.json"
        suite_path.write_text(json.dumps(suite))
        out_path = tmp_path / "rows.json"
        code, out, _ = run_cli(
            capsys, "bench", "--suite", str(suite_path), "--out", str(out_path)
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0].startswith("dataset")
        assert len(lines) == 4  # header, rule, two rows
        rows = json.loads(out_path.read_text())
        assert [r["name"] for r in rows] == ["one", "two"]


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "vqcnet", "circuit", "--qubits", "2",
         "--layers", "1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "trainable parameters: 2" in proc.stdout


def test_usage_error_exit_code():
    proc = subprocess.run(
        [sys.executable, "-m", "vqcnet", "circuit", "--qubits", "2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2
