"""Experiment pipelines: build circuit jobs, run them, collect records."""
from __future__ import annotations

import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigurationError
from ..fermion import fermionic_weight
from ..gates import conjugation_circuit
from ..inputs import InputKind, InputSpec
from ..stats import (
    WIGNER_DYSON, Histogram, default_edges, histogram, kl_divergence, reference_histogram,
    write_histogram_csv,
)
from .config import DEFAULT_MAX_QUBITS, Experiment, ExperimentConfig
from .records import RunRecord, SummaryRow, summarize, write_records, write_summary
from .simulate import CircuitJob, child_seed, run_circuit

log = logging.getLogger(__name__)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[RunRecord]
    summary: list[SummaryRow]
    histograms: dict[str, Histogram] = field(default_factory=dict)
    tables: dict[str, list[dict]] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def row(self, **keys) -> SummaryRow:
        hits = [r for r in self.summary if all(getattr(r, k) == v for k, v in keys.items())]
        if len(hits) != 1:
            raise KeyError(f"{len(hits)} summary rows match {keys}")
        return hits[0]


class _JobBuilder:
    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.jobs: list[CircuitJob] = []

    def add_group(self, n: int, *, num_swaps=0, input_spec=None, brickwork=None,
                  conjugation=None, keep_tail_ratios=False):
        c = self.config
        for _ in range(c.num_circuits):
            idx = len(self.jobs)
            self.jobs.append(CircuitJob(
                circuit_index=idx,
                seed=child_seed(c.master_seed, idx),
                num_qubits=n,
                pre_layers=c.pre_layers_for(n),
                post_layers=c.post_layers_for(n),
                num_swaps=num_swaps,
                input=input_spec or c.input,
                brickwork=brickwork or c.brickwork,
                conjugation=conjugation,
                tail_window=c.tail_window,
                cut=c.cut,
                floor=c.floor,
                alphas=tuple(c.alphas),
                keep_tail_ratios=keep_tail_ratios,
            ))


def execute(jobs: list[CircuitJob], threads: int = 1):
    """Yield results in circuit_index order, in parallel when ``threads > 1``."""
    if threads <= 1 or len(jobs) < 2:
        yield from map(run_circuit, jobs)
        return
    with ProcessPoolExecutor(max_workers=threads) as pool:
        yield from pool.map(run_circuit, jobs, chunksize=max(1, len(jobs) // (4 * threads)))


def _weights(config: ExperimentConfig, job: CircuitJob, cache: dict):
    if job.conjugation is None:
        return None
    key = (job.conjugation, job.num_qubits)
    if key not in cache:
        cache[key] = fermionic_weight(conjugation_circuit(*key))
    return cache[key]


def _collect(config: ExperimentConfig, jobs, threads: int, stream=None):
    """Run jobs, turning each result into a RunRecord; lines go to ``stream`` as they land."""
    h = config.config_hash()
    cache: dict = {}
    results, records = [], []
    for res in execute(jobs, threads):
        rec = RunRecord.from_result(h, res, _weights(config, res.job, cache))
        if stream is not None:
            stream.write(rec.to_json() + "\n")
            stream.flush()
        results.append(res)
        records.append(rec)
    return results, records


def run_swap_injection(config: ExperimentConfig, threads: int = 1, stream=None) -> ExperimentResult:
    b = _JobBuilder(config)
    for n in config.num_qubits:
        for s in config.num_swaps:
            b.add_group(n, num_swaps=s)
    _, records = _collect(config, b.jobs, threads, stream)
    return ExperimentResult(config, records, summarize(records))


def run_input_states(config: ExperimentConfig, threads: int = 1, stream=None) -> ExperimentResult:
    b = _JobBuilder(config)
    for n in config.num_qubits:
        for spec in config.input_specs():
            b.add_group(n, input_spec=spec)
    _, records = _collect(config, b.jobs, threads, stream)
    return ExperimentResult(config, records, summarize(records))


def run_conjugation(config: ExperimentConfig, threads: int = 1, stream=None) -> ExperimentResult:
    b = _JobBuilder(config)
    for n in config.num_qubits:
        for conj in config.conjugations():
            for spec in config.input_specs():
                b.add_group(n, input_spec=spec, conjugation=conj)
    _, records = _collect(config, b.jobs, threads, stream)
    return ExperimentResult(config, records, summarize(records))


def _pooled_histograms(results, edges) -> dict[tuple, Histogram]:
    pooled: dict[tuple, list[np.ndarray]] = {}
    for r in results:
        key = (r.job.num_qubits, r.job.brickwork, r.job.num_swaps)
        pooled.setdefault(key, []).append(r.tail_ratios)
    return {k: histogram(np.concatenate(v), edges) for k, v in pooled.items()}


def run_kl_analysis(config: ExperimentConfig, threads: int = 1, stream=None) -> ExperimentResult:
    """r-histograms of matchgate+SWAP and Haar brickwork circuits, with KL tables."""
    b = _JobBuilder(config)
    for n in config.num_qubits:
        for s in config.num_swaps:
            b.add_group(n, num_swaps=s, brickwork="matchgate", keep_tail_ratios=True)
        if config.haar_baseline:
            b.add_group(n, brickwork="haar", keep_tail_ratios=True)
    results, records = _collect(config, b.jobs, threads, stream)
    edges = default_edges(config.bins, config.r_max)
    hists = _pooled_histograms(results, edges)
    wd = reference_histogram(WIGNER_DYSON, edges)

    warnings, table, named = [], [], {"wigner_dyson": wd}
    for (n, kind, s), h in hists.items():
        label = f"N{n}_haar" if kind == "haar" else f"N{n}_swaps{s}"
        named[label] = h
        if h.count < 10 * h.mass.size:
            msg = f"{label}: {h.count} ratios for {h.mass.size} bins (< 10 per bin)"
            log.warning(msg)
            warnings.append(msg)
        haar = hists.get((n, "haar", 0))
        table.append({
            "num_qubits": n,
            "brickwork": kind,
            "num_swaps": s,
            "n_ratios": h.count,
            "kl_wigner_dyson": kl_divergence(h, wd),
            "kl_haar_same_n": kl_divergence(h, haar) if haar is not None else float("nan"),
        })
    return ExperimentResult(config, records, summarize(records), named, {"kl": table}, warnings)


def run_entropy_scan(config: ExperimentConfig, threads: int = 1, stream=None) -> ExperimentResult:
    """Entropy and Page deviation vs SWAP density and input block size."""
    b = _JobBuilder(config)
    for n in config.num_qubits:
        for s in config.num_swaps:
            b.add_group(n, num_swaps=s)
        for k in config.block_sizes or []:
            b.add_group(n, input_spec=InputSpec(InputKind.HAAR_BLOCKS, k))
        if config.haar_baseline:
            b.add_group(n, brickwork="haar")
    _, records = _collect(config, b.jobs, threads, stream)
    res = ExperimentResult(config, records, summarize(records))

    scan, powers = [], []
    for row in res.summary:
        if row.brickwork == "haar":
            series, x = "haar_brickwork", float("nan")
        elif row.input.startswith("haar_blocks"):
            series, x = "block_size", float(row.input.rsplit("k", 1)[1])
        else:
            series, x = "swap_density", row.num_swaps / (row.num_qubits - 1)
        scan.append({
            "num_qubits": row.num_qubits, "series": series, "x": x,
            "mean_entropy": row.mean_entropy, "std_entropy": row.std_entropy,
            "page_deviation": row.page_deviation, "n_samples": row.n_samples,
        })
    groups: dict[tuple, list[RunRecord]] = {}
    for rec in res.records:
        groups.setdefault(rec.group(), []).append(rec)
    for key, recs in groups.items():
        for a in recs[0].trace_powers:
            vals = np.array([r.trace_powers[a] for r in recs])
            powers.append({
                "num_qubits": key[0], "num_swaps": key[1], "input": key[2], "brickwork": key[4],
                "alpha": float(a), "mean_trace_power": float(vals.mean()),
                "std_trace_power": float(np.std(vals, ddof=1)) if vals.size > 1 else 0.0,
            })
    res.tables = {"entropy_scan": scan, "trace_powers": powers}
    return res


def run_experiment(config: ExperimentConfig, threads: int = 1,
                   max_qubits: int = DEFAULT_MAX_QUBITS, stream=None) -> ExperimentResult:
    config.validate(max_qubits)
    runners = {
        Experiment.SWAP_INJECTION: run_swap_injection,
        Experiment.INPUT_STATES: run_input_states,
        Experiment.CONJUGATION: run_conjugation,
        Experiment.KL_ANALYSIS: run_kl_analysis,
        Experiment.ENTROPY_SCAN: run_entropy_scan,
    }
    if config.experiment not in runners:
        raise ConfigurationError(f"{config.experiment.value} is not a circuit experiment")
    return runners[config.experiment](config, threads, stream)


def write_table(rows: list[dict], path: str | Path) -> None:
    if not rows:
        return
    cols = list(rows[0])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in (row[c] for c in cols)])


def write_outputs(result: ExperimentResult, out_dir: str | Path, records_written: bool = False) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [out / "records.jsonl", out / "summary.csv"]
    if not records_written:
        write_records(result.records, written[0])
    write_summary(result.summary, written[1])
    for name, h in result.histograms.items():
        p = out / f"hist_{name}.csv"
        write_histogram_csv(h, p)
        written.append(p)
    for name, rows in result.tables.items():
        p = out / f"{name}.csv"
        write_table(rows, p)
        written.append(p)
    if result.warnings:
        p = out / "warnings.txt"
        p.write_text("\n".join(result.warnings) + "\n")
        written.append(p)
    return written
