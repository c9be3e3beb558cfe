import numpy as np
import pytest
import yaml

from pulseseq.cli import main
from pulseseq.config import ConfigError, parse_config, load_unitary


BASE = {
    "system": {"kind": "morse", "levels": 4, "anharmonicity": 0.1},
    "objective": {"kind": "transfer"},
    "initial": {"kind": "ground"},
    "shape": {"kind": "square", "tau0": 30},
    "timing": {"slot": 200},
    "simulation": {"modes": ["piecewise"]},
}


def _write(tmp_path, data, name="scenario.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data))
    return path


class TestParseConfig:
    def test_defaults(self):
        cfg = parse_config({})
        assert cfg.system_kind == "morse" and cfg.levels == 4
        assert cfg.objective == "transfer"
        assert cfg.slot == 200.0 and cfg.total_time is None
        assert cfg.modes == ["rwa"]

    def test_round_trip(self):
        cfg = parse_config(dict(BASE))
        again = parse_config(yaml.safe_load(cfg.dump()))
        assert again.dump() == cfg.dump()

    def test_collects_multiple_errors(self):
        bad = {
            "system": {"kind": "morse", "levels": 0},
            "objective": {"kind": "wiggle"},
            "timing": {"slot": 100, "total": 500},
            "bogus": {},
        }
        with pytest.raises(ConfigError) as exc:
            parse_config(bad)
        msgs = "\n".join(exc.value.errors)
        assert "system.levels" in msgs
        assert "objective.kind" in msgs
        assert "either total or slot" in msgs
        assert "bogus" in msgs
        assert len(exc.value.errors) == 4

    def test_superpose_needs_normalized_amplitudes(self):
        data = dict(BASE)
        data["objective"] = {"kind": "superpose", "amplitudes": [0.9, 0.9, 0.0, 0.0]}
        with pytest.raises(ConfigError, match="sum to 1"):
            parse_config(data)

    def test_explicit_system(self):
        data = dict(BASE)
        data["system"] = {"kind": "explicit", "energies": [0.0, 1.0, 2.1], "dipoles": [1.0, 1.4]}
        cfg = parse_config(data)
        assert cfg.energies == [0.0, 1.0, 2.1]


class TestLoadUnitary:
    def test_reads_complex_rows(self, tmp_path):
        path = tmp_path / "u.txt"
        path.write_text("# a comment\n0j 1+0j\n1+0j 0j\n")
        u = load_unitary(path)
        assert np.allclose(u, [[0, 1], [1, 0]])


class TestCliRun:
    def test_validate_ok(self, tmp_path, capsys):
        path = _write(tmp_path, BASE)
        assert main(["validate", str(path)]) == 0
        out = capsys.readouterr().out
        assert yaml.safe_load(out)["objective"]["kind"] == "transfer"

    def test_validate_bad_config_exit_1(self, tmp_path, capsys):
        path = _write(tmp_path, {"timing": {"slot": -5}})
        assert main(["validate", str(path)]) == 1
        assert "timing.slot" in capsys.readouterr().err

    def test_missing_file_exit_1(self, tmp_path, capsys):
        assert main(["validate", str(tmp_path / "nope.yaml")]) == 1
        assert "config error" in capsys.readouterr().err

    def test_run_transfer_piecewise(self, tmp_path, capsys):
        path = _write(tmp_path, BASE)
        out_dir = tmp_path / "out"
        assert main(["run", str(path), "--out-dir", str(out_dir)]) == 0
        stdout = capsys.readouterr().out
        assert "transfer [piecewise]" in stdout
        assert "final_p4=1" in stdout
        assert (out_dir / "schedule.txt").exists()
        csv = (out_dir / "trace_piecewise.csv").read_text()
        assert csv.splitlines()[0] == "t,p1,p2,p3,p4,energy"

    def test_run_outputs_deterministic(self, tmp_path):
        path = _write(tmp_path, BASE)
        texts = []
        for sub in ("a", "b"):
            out_dir = tmp_path / sub
            assert main(["run", str(path), "--out-dir", str(out_dir)]) == 0
            texts.append(
                (out_dir / "schedule.txt").read_text()
                + (out_dir / "trace_piecewise.csv").read_text()
            )
        assert texts[0] == texts[1]

    def test_run_mode_override_and_figures(self, tmp_path):
        data = dict(BASE)
        data["outputs"] = {"figures": True}
        path = _write(tmp_path, data)
        out_dir = tmp_path / "out"
        assert main(["run", str(path), "--mode", "piecewise", "--out-dir", str(out_dir)]) == 0
        assert (out_dir / "trace_piecewise.png").stat().st_size > 0

    def test_run_custom_unitary(self, tmp_path, capsys):
        u = np.zeros((4, 4))
        u[0, 3] = u[3, 0] = u[1, 1] = u[2, 2] = 1.0
        upath = tmp_path / "u.txt"
        upath.write_text(
            "\n".join(" ".join(repr(complex(x)) for x in row) for row in u)
        )
        data = dict(BASE)
        data["objective"] = {"kind": "custom", "unitary_file": str(upath)}
        path = _write(tmp_path, data)
        assert main(["run", str(path), "--out-dir", str(tmp_path / "out")]) == 0
        assert "final_p4=1" in capsys.readouterr().out

    def test_run_numeric_error_exit_2(self, tmp_path, capsys):
        data = dict(BASE)
        data["timing"] = {"slot": 10}  # shorter than twice the rise time
        path = _write(tmp_path, data)
        assert main(["run", str(path), "--out-dir", str(tmp_path / "out")]) == 2
        assert "rise time" in capsys.readouterr().err

    def test_run_seeded_random_phases_reproducible(self, tmp_path, capsys):
        data = dict(BASE)
        data["objective"] = {"kind": "transfer", "pulse_phases": "random"}
        path = _write(tmp_path, data)
        outs = []
        for sub in ("a", "b"):
            out_dir = tmp_path / sub
            assert main(["run", str(path), "--out-dir", str(out_dir), "--seed", "5"]) == 0
            outs.append((out_dir / "schedule.txt").read_text())
        capsys.readouterr()
        assert outs[0] == outs[1]

    def test_warns_on_flagged_detuning(self, tmp_path, capsys):
        data = dict(BASE)
        data["shape"] = {"kind": "square", "tau0": 3}
        data["timing"] = {"slot": 20}
        path = _write(tmp_path, data)
        assert main(["run", str(path), "--out-dir", str(tmp_path / "out")]) == 0
        assert "detuning margin" in capsys.readouterr().err
