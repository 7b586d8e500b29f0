import io
import json
import math

import numpy as np
import pytest

from matchspec.errors import ConfigurationError
from matchspec.harness import cli
from matchspec.harness.analysis import deviation_fits, page_deviation_slope
from matchspec.harness.calibration import CalibrationCheck, CalibrationSettings, run_calibration, write_calibration_csv
from matchspec.harness.config import ExperimentConfig, default_post_layers, load_config
from matchspec.harness.experiments import run_experiment, write_outputs
from matchspec.harness.oracle import run_oracle
from matchspec.harness.records import RunRecord, SummaryRow, read_records, read_summary, summarize
from matchspec.harness.simulate import CircuitJob, child_seed, run_circuit
from matchspec.inputs import InputKind, InputSpec
from matchspec.stats import page_entropy


def small(**kw):
    d = {"experiment": "SwapInjection", "num_qubits": [4, 6], "num_circuits": 3,
         "pre_layers": 8, "post_layers": 12, "tail_window": 6, "num_swaps": [0, 1]}
    d.update(kw)
    return ExperimentConfig.from_dict(d)


# -- config ----------------------------------------------------------------------


def test_default_post_layers():
    assert [default_post_layers(n) for n in (12, 14, 16, 18, 20)] == [100, 120, 140, 160, 180]


@pytest.mark.parametrize("override, message", [
    ({"tail_window": 50}, "tail_window"),
    ({"num_qubits": [5]}, "even"),
    ({"num_qubits": [22]}, "guard"),
    ({"num_swaps": [6]}, "num_swaps"),
    ({"num_circuits": 0}, "num_circuits"),
    ({"experiment": "InputStates", "num_qubits": [12], "block_sizes": [5]}, "k=5"),
    ({"experiment": "Conjugation", "conjugation": ["C4"], "num_qubits": [2]}, "C4"),
    ({"conjugation": ["C9"]}, "C9"),
])
def test_config_errors(override, message):
    with pytest.raises(ConfigurationError, match=message):
        small(**override).validate()


def test_block_size_divisibility():
    with pytest.raises(ConfigurationError, match="divide"):
        small(experiment="InputStates", num_qubits=[8], block_sizes=[3]).validate()


def test_unknown_keys_and_bad_enum():
    with pytest.raises(ConfigurationError, match="unknown"):
        ExperimentConfig.from_dict({"experiment": "SwapInjection", "qubits": [4]})
    with pytest.raises(ConfigurationError):
        ExperimentConfig.from_dict({"experiment": "Teleport"})


def test_max_qubits_override():
    small(num_qubits=[22]).validate(max_qubits=24)


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigurationError, match="not found"):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigurationError, match="invalid JSON"):
        load_config(bad)


def test_post_layers_table():
    c = small(post_layers={"4": 10, "6": 14})
    assert c.post_layers_for(6) == 14
    with pytest.raises(ConfigurationError):
        c.post_layers_for(8)


def test_config_hash_stable_and_sensitive():
    assert small().config_hash() == small().config_hash()
    assert small().config_hash() != small(master_seed=1).config_hash()
    assert ExperimentConfig.from_dict(small().to_dict()).to_dict() == small().to_dict()


# -- seeds and single circuits -----------------------------------------------------


def test_child_seeds_distinct_and_stable():
    seeds = [child_seed(0, i) for i in range(1000)]
    assert len(set(seeds)) == 1000
    assert child_seed(0, 5) == child_seed(0, 5) != child_seed(1, 5)


def test_r_tilde_inf_is_tail_mean():
    job = CircuitJob(0, 123, 6, 6, 20, tail_window=8)
    res = run_circuit(job)
    assert len(res.r_tilde_trace) == 20
    assert abs(res.r_tilde_inf - np.nanmean(res.r_tilde_trace[-8:])) <= 1e-12
    assert abs(res.spectrum.sum() - 1) < 1e-9


def test_circuit_is_deterministic():
    job = CircuitJob(0, 99, 6, 4, 10, num_swaps=1, tail_window=4, keep_tail_ratios=True)
    a, b = run_circuit(job), run_circuit(job)
    assert np.array_equal(a.r_tilde_trace, b.r_tilde_trace)
    assert np.array_equal(a.tail_ratios, b.tail_ratios)


def test_conjugated_job_runs():
    job = CircuitJob(0, 1, 6, 2, 6, conjugation="C2", tail_window=2,
                     input=InputSpec(InputKind.COMPUTATIONAL_BASIS, bits="000000"))
    assert np.isfinite(run_circuit(job).entropy)


# -- records and summaries -----------------------------------------------------------


def test_records_round_trip_and_summary_invariants(tmp_path):
    res = run_experiment(small())
    assert len(res.records) == 12
    assert [r.circuit_index for r in res.records] == list(range(12))
    write_outputs(res, tmp_path)
    back = read_records(tmp_path / "records.jsonl")
    assert back == res.records
    rows = read_summary(tmp_path / "summary.csv")
    assert len(rows) == 4
    for row in rows:
        recs = [r for r in back if (r.num_qubits, r.num_swaps) == (row.num_qubits, row.num_swaps)]
        vals = np.array([r.r_tilde_inf for r in recs])
        assert abs(row.mean_r_tilde_inf - vals.mean()) <= 1e-12
        assert abs(row.std_r_tilde_inf - vals.std(ddof=1)) <= 1e-12
        page = page_entropy(2 ** (row.num_qubits // 2), 2 ** (row.num_qubits // 2))
        ent = np.mean([r.entropy for r in recs])
        assert abs(row.page_deviation - (page - ent)) <= 1e-12
        assert row.n_samples == 3


def test_record_json_has_spec_fields():
    res = run_experiment(small(num_qubits=[4], num_swaps=[0], num_circuits=1))
    d = json.loads(res.records[0].to_json())
    for key in ("config_hash", "circuit_index", "seed", "r_tilde_trace", "r_tilde_inf",
                "spectrum", "entropy", "renyi2", "trace_powers"):
        assert key in d


def test_nan_trace_serializes_as_null():
    rec = RunRecord("h", 0, 1, 2, 0, "x", "none", "matchgate", [math.nan, 0.5], math.nan,
                    [1.0, 0.0], 0.0, 0.0, {})
    line = rec.to_json()
    assert "NaN" not in line
    back = RunRecord.from_json(line)
    assert math.isnan(back.r_tilde_inf) and back.r_tilde_trace[1] == 0.5


def test_threads_do_not_change_outputs(tmp_path):
    cfg = small()
    a, b = tmp_path / "a", tmp_path / "b"
    write_outputs(run_experiment(cfg, threads=1), a)
    write_outputs(run_experiment(cfg, threads=2), b)
    for name in ("records.jsonl", "summary.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_streamed_records_match_batch_file(tmp_path):
    buf = io.StringIO()
    res = run_experiment(small(), stream=buf)
    write_outputs(res, tmp_path)
    assert buf.getvalue() == (tmp_path / "records.jsonl").read_text()


def test_summarize_recomputes_from_records():
    res = run_experiment(small(num_qubits=[4], num_swaps=[0]))
    assert summarize(res.records) == res.summary


# -- experiment runners ----------------------------------------------------------------


def test_input_states_groups():
    res = run_experiment(small(experiment="InputStates", num_qubits=[6], num_swaps=[0], block_sizes=[1, 2, 3]))
    assert sorted(r.input for r in res.summary) == ["haar_blocks_k1", "haar_blocks_k2", "haar_blocks_k3"]


def test_conjugation_stores_weight():
    res = run_experiment(small(experiment="Conjugation", num_qubits=[4], num_swaps=[0],
                               conjugation=["none", "C3", "C4"]))
    weights = {r.conjugation: r.fermionic_weight for r in res.summary}
    assert weights == {"none": None, "C3": 2, "C4": 4}


def test_kl_analysis_outputs(tmp_path):
    res = run_experiment(small(experiment="KlAnalysis", num_qubits=[6], num_swaps=[0, 3], num_circuits=2))
    kinds = {(r["brickwork"], r["num_swaps"]) for r in res.tables["kl"]}
    assert kinds == {("matchgate", 0), ("matchgate", 3), ("haar", 0)}
    haar = next(r for r in res.tables["kl"] if r["brickwork"] == "haar")
    assert abs(haar["kl_haar_same_n"]) < 1e-12
    assert res.warnings  # 2 circuits x 6 layers cannot fill 51 bins
    written = write_outputs(res, tmp_path)
    assert (tmp_path / "hist_N6_haar.csv") in written and (tmp_path / "kl.csv").exists()


def test_entropy_scan_tables():
    res = run_experiment(small(experiment="EntropyScan", num_qubits=[6], num_swaps=[1, 5], block_sizes=[2]))
    series = {r["series"] for r in res.tables["entropy_scan"]}
    assert series == {"swap_density", "block_size", "haar_brickwork"}
    alphas = {r["alpha"] for r in res.tables["trace_powers"]}
    assert alphas == {2.0, 3.0, 4.0}


def test_calibration_is_not_a_circuit_experiment():
    with pytest.raises(ConfigurationError):
        run_experiment(ExperimentConfig.from_dict({"experiment": "Calibration"}))


# -- analysis ----------------------------------------------------------------------------


def _row(n, r, page=0.0, swaps=1):
    return SummaryRow(n, swaps, "random_real_product", "none", "matchgate", r, 0.01, 1.0, page, 10, 0.1)


def test_deviation_fit_recovers_exponential():
    rows = [_row(n, 0.603 - 0.2 * math.exp(-0.15 * n)) for n in (10, 12, 14)]
    (fit,) = deviation_fits(rows)
    assert abs(fit.fit.gamma - 0.15) < 1e-9 and fit.sizes == (10, 12, 14)


def test_deviation_fit_needs_two_sizes():
    with pytest.raises(ConfigurationError):
        deviation_fits([_row(10, 0.5)])


def test_page_slope():
    slope, _ = page_deviation_slope([_row(n, 0.5, page=0.1 * n) for n in (10, 12, 14)])
    assert abs(slope - 0.1) < 1e-12


# -- calibration and oracle suites -------------------------------------------------------------


def test_small_calibration_runs_and_is_deterministic(tmp_path):
    s = CalibrationSettings(poisson_spectra=2000, gue_matrices=20, kl_ratios=2000, haar_states=20, haar_qubits=6)
    a, b = run_calibration(3, s), run_calibration(3, s)
    assert a == b
    write_calibration_csv(a, tmp_path / "c.csv")
    head = (tmp_path / "c.csv").read_text().splitlines()[0]
    assert head == "check,value,target,tolerance,passed"


def test_check_modes():
    assert CalibrationCheck("x", 0.5, 0.5, 0.01).passed
    assert not CalibrationCheck("x", 0.52, 0.5, 0.01).passed
    assert CalibrationCheck("kl", 0.005, 0.0, 0.01, mode="max").passed
    assert not CalibrationCheck("kl", math.nan, 0.0, 0.01, mode="max").passed


def test_oracle_suite_small():
    rep = run_oracle(seed=1, num_circuits=10, max_qubits=6)
    assert rep.passed and rep.max_error < 1e-10


# -- CLI ---------------------------------------------------------------------------------


def test_cli_weight(capsys):
    assert cli.main(["weight", "C4", "8"]) == 0
    assert capsys.readouterr().out.strip() == "4"


def test_cli_missing_config(capsys, tmp_path):
    assert cli.main(["run", str(tmp_path / "missing.json")]) == 1
    assert "not found" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [["frobnicate"], ["weight", "C4", "8", "--bogus"], [], ["weight", "C7", "8"]])
def test_cli_usage_errors(argv):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == 1


def test_cli_weight_below_minimum():
    assert cli.main(["weight", "C4", "2"]) == 1


def test_cli_run_fit_plot(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(small(num_qubits=[4, 6, 8]).to_dict()))
    out = tmp_path / "out"
    assert cli.main(["run", str(cfg), "--out-dir", str(out), "--seed", "5"]) == 0
    recs = read_records(out / "records.jsonl")
    assert len(recs) == 18 and recs[0].seed == child_seed(5, 0)
    assert cli.main(["fit", str(out / "summary.csv"), "--num-swaps", "1", "--out-dir", str(out)]) == 0
    assert "gamma=" in capsys.readouterr().out
    assert cli.main(["plot", str(out / "summary.csv"), "--out-dir", str(out)]) == 0
    svg = (out / "summary.svg").read_text()
    assert svg.lstrip().startswith("<?xml") and "SVG 1.1" in svg
    first = (out / "summary.svg").read_bytes()
    assert cli.main(["plot", str(out / "summary.csv"), "--out-dir", str(out)]) == 0
    assert (out / "summary.svg").read_bytes() == first


def test_cli_plot_histogram(tmp_path):
    res = run_experiment(small(experiment="KlAnalysis", num_qubits=[4], num_swaps=[0], num_circuits=2))
    write_outputs(res, tmp_path)
    assert cli.main(["plot", str(tmp_path / "hist_wigner_dyson.csv"), "--out-dir", str(tmp_path)]) == 0
    assert (tmp_path / "hist_wigner_dyson.svg").exists()
    assert cli.main(["plot", str(tmp_path / "kl.csv"), "--out-dir", str(tmp_path)]) == 1


def test_cli_oracle(capsys):
    assert cli.main(["oracle", "--circuits", "5", "--seed", "2"]) == 0
    assert "PASS" in capsys.readouterr().out
