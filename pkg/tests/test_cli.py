"""Command-line interface: subcommands, config loading, exit codes."""
import json
from dataclasses import replace

import pytest

from cfem.bench import CSV_HEADER, default_config
from cfem.cli import main


def write_config(tmp_path, config, name="config.json"):
    path = tmp_path / name
    config.save(path)
    return str(path)


class TestGridCommand:
    def test_prints_lengths(self, capsys):
        assert main(["grid", "--n", "4"]) == 0
        out = capsys.readouterr().out
        rows = [line for line in out.splitlines() if not line.startswith("#")]
        assert len(rows) == 4

    def test_validate_passes_low_order(self, capsys):
        assert main(["grid", "--n", "5", "--validate"]) == 0
        assert "ok" in capsys.readouterr().out

    def test_validate_beyond_table_fails_cleanly(self, capsys):
        assert main(["grid", "--n", "20", "--validate"]) == 1

    def test_ordering_flag(self, capsys):
        assert main(["grid", "--n", "6", "--ordering", "conjugate_interleaved"]) == 0
        assert "conjugate_interleaved" in capsys.readouterr().out


class TestExperimentCommands:
    def test_bvp1d_writes_csv(self, tmp_path, capsys):
        config = replace(
            default_config("e1_elliptic"), params=(10.0,), element_counts=(2, 4)
        )
        out = tmp_path / "out.csv"
        code = main(
            ["bvp1d", "--config", write_config(tmp_path, config), "--csv", str(out)]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 3

    def test_stdout_emission(self, tmp_path, capsys):
        config = replace(
            default_config("e1_elliptic"), params=(10.0,), element_counts=(3,)
        )
        assert main(["bvp1d", "--config", write_config(tmp_path, config)]) == 0
        assert capsys.readouterr().out.startswith(CSV_HEADER)

    def test_helmholtz_variant_flag(self, tmp_path):
        config = replace(
            default_config("e2_helmholtz1d"), params=(4.0,), element_counts=(5,)
        )
        path = write_config(tmp_path, config)
        assert main(["bvp1d", "--helmholtz", "--config", path]) == 0

    def test_experiment_mismatch_rejected(self, tmp_path, capsys):
        config = replace(
            default_config("e1_elliptic"), params=(10.0,), element_counts=(2,)
        )
        path = write_config(tmp_path, config)
        assert main(["laplace2d", "--config", path]) == 1

    def test_assert_passes_when_thresholds_met(self, tmp_path, capsys):
        config = replace(
            default_config("e1_elliptic"),
            params=(200.0,),
            element_counts=tuple(range(1, 21)),
        )
        path = write_config(tmp_path, config)
        assert main(["bvp1d", "--config", path, "--assert"]) == 0
        assert "PASS" in capsys.readouterr().err

    def test_assert_exit_code_two_on_failure(self, tmp_path, capsys):
        # truncated sweep: the omega=40 curve never converges by n=10, so
        # the onset lands outside the accepted window
        config = replace(
            default_config("e2_helmholtz1d"),
            params=(40.0,),
            element_counts=tuple(range(1, 11)),
        )
        path = write_config(tmp_path, config)
        assert main(["bvp1d", "--helmholtz", "--config", path, "--assert"]) == 2
        assert "FAIL" in capsys.readouterr().err

    def test_fem_baseline_rows_appended(self, tmp_path):
        config = replace(
            default_config("e3_laplace2d"),
            nz=10,
            reference_nx=64,
            element_counts=(4,),
        )
        out = tmp_path / "out.csv"
        path = write_config(tmp_path, config)
        assert main(
            ["laplace2d", "--config", path, "--csv", str(out), "--fem-baseline", "8", "16"]
        ) == 0
        body = out.read_text()
        assert "regular" in body
        assert len(body.splitlines()) == 4

    def test_unreadable_config_raises(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"experiment": "e1_elliptic"}))
        with pytest.raises(ValueError):
            main(["bvp1d", "--config", str(bad)])
