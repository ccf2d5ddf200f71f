"""Experiment harness: configs, records, CSV contract, sweeps."""
import json
import os
from dataclasses import replace

import numpy as np
import pytest

from cfem import bench
from cfem.bench import (
    CSV_HEADER,
    BaselineComparison,
    ConvergenceRecord,
    ExperimentConfig,
    compare_baseline,
    convergence_onset,
    default_config,
    emit_csv,
    floor_error,
    format_csv,
    run_experiment,
    run_regular_sweep,
)


def record(n, param=1.0, error=0.1, experiment="e1_elliptic"):
    return ConvergenceRecord(experiment, n, param, error, 0.0, "phase_monotone")


class TestExperimentConfig:
    def test_round_trip(self):
        for experiment in bench.EXPERIMENT_IDS:
            config = default_config(experiment)
            assert ExperimentConfig.from_json(config.to_json()) == config

    def test_unknown_keys_rejected(self):
        text = default_config("e1_elliptic").to_json()
        data = json.loads(text)
        data["smoothing"] = True
        with pytest.raises(ValueError, match="unknown config keys"):
            ExperimentConfig.from_json(json.dumps(data))

    def test_missing_keys_rejected(self):
        data = json.loads(default_config("e1_elliptic").to_json())
        del data["nz"]
        with pytest.raises(ValueError, match="missing config keys"):
            ExperimentConfig.from_json(json.dumps(data))

    def test_invalid_experiment_rejected(self):
        with pytest.raises(ValueError):
            replace(default_config("e1_elliptic"), experiment="e7_mystery")

    def test_moduli_count_must_match_subdomains(self):
        config = default_config("e5_multidomain")
        with pytest.raises(ValueError):
            replace(config, moduli=((1.0, 0.0),))

    def test_invalid_ordering_rejected(self):
        with pytest.raises(ValueError):
            replace(default_config("e1_elliptic"), ordering="shuffled")

    def test_subdomain_lengths(self):
        config = default_config("e5_multidomain")
        assert config.subdomain_lengths == (5.0, 5.0)
        assert config.complex_moduli == (1.0 + 0.01j, 2.0 + 0.02j)

    def test_save_and_load(self, tmp_path):
        config = default_config("e3_laplace2d")
        path = tmp_path / "config.json"
        config.save(path)
        assert ExperimentConfig.load(path) == config

    def test_shipped_configs_match_defaults(self):
        configs_dir = os.path.join(os.path.dirname(__file__), "..", "configs")
        for experiment in bench.EXPERIMENT_IDS:
            loaded = ExperimentConfig.load(
                os.path.join(configs_dir, f"{experiment}.json")
            )
            assert loaded == default_config(experiment)

    def test_defaults_match_published_setups(self):
        e1 = default_config("e1_elliptic")
        assert min(e1.params) >= 10 and max(e1.params) <= 200
        assert e1.domain_length == 1.0
        e2 = default_config("e2_helmholtz1d")
        assert min(e2.params) >= 4 and max(e2.params) <= 40
        for experiment in ("e3_laplace2d", "e4_helmholtz2d", "e5_multidomain"):
            config = default_config(experiment)
            assert config.domain_length == 10.0
            assert config.nz == 200
        assert default_config("e4_helmholtz2d").complex_moduli == (1 + 0.01j,)
        e5 = default_config("e5_multidomain")
        assert e5.subdomain_splits == (5.0,)
        assert e5.complex_moduli[1] == 2 + 0.02j
        e6 = default_config("e6_elastic")
        assert e6.poisson_ratio == 0.35
        assert e6.density == 1.0
        assert e6.params == (3.0,)


class TestConvergenceRecord:
    def test_negative_error_rejected(self):
        with pytest.raises(ValueError):
            ConvergenceRecord("e1_elliptic", 3, 10.0, -0.1, 0.0, "phase_monotone")


class TestCsv:
    def test_empty_records_header_only(self, tmp_path):
        path = tmp_path / "out.csv"
        emit_csv([], path)
        assert path.read_text() == CSV_HEADER + "\n"

    def test_single_record_two_lines(self, tmp_path):
        path = tmp_path / "out.csv"
        emit_csv([record(3)], path)
        lines = path.read_text().splitlines()
        assert len(lines) == 2
        assert lines[0] == CSV_HEADER

    def test_identical_records_identical_bytes(self, tmp_path):
        records = [record(n, param=p) for p in (1.0, 2.0) for n in (1, 2, 3)]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_csv(records, a)
        emit_csv(list(records), b)
        assert a.read_bytes() == b.read_bytes()

    def test_sorted_by_param_then_n(self):
        records = [record(2, 2.0), record(1, 1.0), record(3, 1.0), record(1, 2.0)]
        rows = format_csv(records).splitlines()[1:]
        keys = [(float(r.split(",")[2]), int(r.split(",")[1])) for r in rows]
        assert keys == sorted(keys)

    def test_fifteen_significant_digits(self):
        rec = ConvergenceRecord(
            "e1_elliptic", 1, 1.0 / 3.0, 2.0 / 3.0, 0.0, "phase_monotone"
        )
        row = format_csv([rec]).splitlines()[1]
        assert "0.333333333333333" in row
        assert "0.666666666666667" in row


class TestTwoPointSweeps:
    def test_e1_error_levels(self):
        config = replace(
            default_config("e1_elliptic"),
            params=(10.0, 200.0),
            element_counts=tuple(range(1, 21)),
        )
        records = run_experiment(config)
        assert floor_error(records, 200.0, 20) <= 1e-3
        assert floor_error(records, 10.0, 15) <= 1e-12

    def test_rerun_errors_bitwise_identical(self):
        config = replace(
            default_config("e1_elliptic"), params=(50.0,), element_counts=(5, 10)
        )
        first = run_experiment(config)
        second = run_experiment(config)
        # deterministic apart from wall-time measurements
        assert [(r.n, r.param, r.error) for r in first] == [
            (r.n, r.param, r.error) for r in second
        ]

    def test_thread_count_does_not_change_errors(self, monkeypatch):
        config = replace(
            default_config("e2_helmholtz1d"), params=(10.0,), element_counts=(5, 10, 15)
        )
        base = [r.error for r in run_experiment(config)]
        monkeypatch.setenv("CFEM_THREADS", "3")
        threaded = [r.error for r in run_experiment(config)]
        assert base == threaded

    def test_onset_and_reordering_floor(self):
        config = replace(default_config("e2_helmholtz1d"), params=(40.0,))
        mono = run_experiment(config)
        onset = convergence_onset(mono, 40.0)
        assert 17 <= onset <= 23
        inter = run_experiment(replace(config, ordering="conjugate_interleaved"))
        assert floor_error(inter, 40.0, 40) <= floor_error(mono, 40.0, 40) / 100

    def test_solver_error_annotated_with_sweep_point(self):
        config = replace(
            default_config("e1_elliptic"),
            domain_length=-1.0,  # grid construction must fail
            params=(50.0,),
            element_counts=(2,),
        )
        with pytest.raises(RuntimeError, match=r"param=50.*n=2"):
            run_experiment(config)


@pytest.fixture(scope="module")
def small_e3():
    return replace(
        default_config("e3_laplace2d"),
        nz=40,
        reference_nx=512,
        element_counts=(4, 8, 12, 16),
    )


class TestLayerSweeps:
    def test_errors_decay(self, small_e3):
        records = run_experiment(small_e3)
        errors = [r.error for r in records]
        assert errors[0] > errors[-1]
        assert errors[-1] <= 1e-3

    def test_regular_sweep_and_comparison(self, small_e3):
        cfem_records = run_experiment(small_e3)
        fem_records = run_regular_sweep(small_e3, (16, 32, 64, 128))
        assert all(r.ordering == "regular" for r in fem_records)
        table = compare_baseline(cfem_records, fem_records, targets=(5e-2, 1e-9))
        assert table[0].n_cfem is not None
        assert table[0].n_cfem < table[0].nx_fem
        assert table[1] == BaselineComparison(1e-9, None, None)

    def test_records_sorted(self, small_e3):
        records = run_experiment(small_e3)
        keys = [(r.param, r.n) for r in records]
        assert keys == sorted(keys)


class TestSummaries:
    def test_floor_error_missing_point(self):
        with pytest.raises(ValueError):
            floor_error([record(1)], 1.0, 99)

    def test_convergence_onset_all_converged(self):
        records = [record(n, error=1e-6) for n in (3, 4, 5)]
        assert convergence_onset(records, 1.0) == 3

    def test_convergence_onset_requires_records(self):
        with pytest.raises(ValueError):
            convergence_onset([record(1)], 2.0)

    def test_check_thresholds_pass_and_fail(self):
        config = default_config("e3_laplace2d")
        good = [
            record(10, 0.0, 5e-3, "e3_laplace2d"),
            record(14, 0.0, 1e-4, "e3_laplace2d"),
        ]
        assert all(ok for _, ok in bench.check_thresholds(config, good))
        bad = [record(10, 0.0, 0.5, "e3_laplace2d")]
        results = bench.check_thresholds(config, bad)
        assert len(results) == 1 and not results[0][1]
