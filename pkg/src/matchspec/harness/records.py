"""RunRecord / SummaryRow types and their JSONL / CSV forms."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from ..stats import page_entropy
from .simulate import CircuitResult

GROUP_KEYS = ("num_qubits", "num_swaps", "input", "conjugation", "brickwork")
SUMMARY_COLUMNS = GROUP_KEYS + (
    "mean_r_tilde_inf", "std_r_tilde_inf", "mean_entropy", "page_deviation", "n_samples",
    "std_entropy", "fermionic_weight",
)


def _num(x):
    if x is None:
        return None
    x = float(x)
    return None if math.isnan(x) else x


@dataclass
class RunRecord:
    config_hash: str
    circuit_index: int
    seed: int
    num_qubits: int
    num_swaps: int
    input: str
    conjugation: str
    brickwork: str
    r_tilde_trace: list[float]
    r_tilde_inf: float
    spectrum: list[float]
    entropy: float
    renyi2: float
    trace_powers: dict[str, float]
    fermionic_weight: int | None = None
    wall_time: float = field(default=0.0, compare=False)

    @classmethod
    def from_result(cls, config_hash: str, res: CircuitResult, fermionic_weight=None) -> "RunRecord":
        job = res.job
        return cls(
            config_hash=config_hash,
            circuit_index=job.circuit_index,
            seed=job.seed,
            num_qubits=job.num_qubits,
            num_swaps=job.num_swaps,
            input=job.input.label,
            conjugation=job.conjugation or "none",
            brickwork=job.brickwork,
            r_tilde_trace=[float(v) for v in res.r_tilde_trace],
            r_tilde_inf=float(res.r_tilde_inf),
            spectrum=[float(v) for v in res.spectrum],
            entropy=float(res.entropy),
            renyi2=float(res.renyi2),
            trace_powers={repr(a): float(v) for a, v in res.trace_powers.items()},
            fermionic_weight=fermionic_weight,
            wall_time=res.wall_time,
        )

    def group(self) -> tuple:
        return tuple(getattr(self, k) for k in GROUP_KEYS)

    def to_json(self) -> str:
        # wall time is left out so repeated runs produce identical files
        d = {
            "config_hash": self.config_hash,
            "circuit_index": self.circuit_index,
            "seed": self.seed,
            "num_qubits": self.num_qubits,
            "num_swaps": self.num_swaps,
            "input": self.input,
            "conjugation": self.conjugation,
            "brickwork": self.brickwork,
            "r_tilde_trace": [_num(v) for v in self.r_tilde_trace],
            "r_tilde_inf": _num(self.r_tilde_inf),
            "spectrum": self.spectrum,
            "entropy": self.entropy,
            "renyi2": self.renyi2,
            "trace_powers": self.trace_powers,
            "fermionic_weight": self.fermionic_weight,
        }
        return json.dumps(d, allow_nan=False)

    @classmethod
    def from_json(cls, line: str) -> "RunRecord":
        d = json.loads(line)
        d["r_tilde_trace"] = [float("nan") if v is None else v for v in d["r_tilde_trace"]]
        d["r_tilde_inf"] = float("nan") if d["r_tilde_inf"] is None else d["r_tilde_inf"]
        return cls(**d)


@dataclass
class SummaryRow:
    num_qubits: int
    num_swaps: int
    input: str
    conjugation: str
    brickwork: str
    mean_r_tilde_inf: float
    std_r_tilde_inf: float
    mean_entropy: float
    page_deviation: float
    n_samples: int
    std_entropy: float
    fermionic_weight: int | None = None

    def key(self) -> tuple:
        return tuple(getattr(self, k) for k in GROUP_KEYS)

    @property
    def sem_r_tilde_inf(self) -> float:
        return self.std_r_tilde_inf / math.sqrt(self.n_samples)

    @property
    def sem_entropy(self) -> float:
        return self.std_entropy / math.sqrt(self.n_samples)


def _std(x: np.ndarray) -> float:
    return float(np.std(x, ddof=1)) if x.size > 1 else 0.0


def summarize(records: Iterable[RunRecord]) -> list[SummaryRow]:
    """One row per group, recomputed from scratch from the records."""
    groups: dict[tuple, list[RunRecord]] = {}
    for rec in records:
        groups.setdefault(rec.group(), []).append(rec)
    rows = []
    for key, recs in groups.items():
        r_inf = np.array([r.r_tilde_inf for r in recs], dtype=float)
        r_inf = r_inf[np.isfinite(r_inf)]
        ent = np.array([r.entropy for r in recs], dtype=float)
        n = key[0]
        half = 2 ** (n // 2)
        s_page = page_entropy(half, 2 ** (n - n // 2))
        rows.append(SummaryRow(
            *key,
            mean_r_tilde_inf=float(r_inf.mean()) if r_inf.size else float("nan"),
            std_r_tilde_inf=_std(r_inf),
            mean_entropy=float(ent.mean()),
            page_deviation=float(s_page - ent.mean()),
            n_samples=len(recs),
            std_entropy=_std(ent),
            fermionic_weight=recs[0].fermionic_weight,
        ))
    return rows


def write_records(records: Iterable[RunRecord], path: str | Path) -> None:
    with open(path, "w") as fh:
        for rec in sorted(records, key=lambda r: r.circuit_index):
            fh.write(rec.to_json() + "\n")


def read_records(path: str | Path) -> list[RunRecord]:
    with open(path) as fh:
        return [RunRecord.from_json(line) for line in fh if line.strip()]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_summary(rows: Iterable[SummaryRow], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for row in rows:
            w.writerow([_fmt(getattr(row, c)) for c in SUMMARY_COLUMNS])


def read_summary(path: str | Path) -> list[SummaryRow]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(SUMMARY_COLUMNS[:10]) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing summary columns {sorted(missing)}")
        rows = []
        for d in reader:
            rows.append(SummaryRow(
                num_qubits=int(d["num_qubits"]),
                num_swaps=int(d["num_swaps"]),
                input=d["input"],
                conjugation=d["conjugation"],
                brickwork=d["brickwork"],
                mean_r_tilde_inf=float(d["mean_r_tilde_inf"]),
                std_r_tilde_inf=float(d["std_r_tilde_inf"]),
                mean_entropy=float(d["mean_entropy"]),
                page_deviation=float(d["page_deviation"]),
                n_samples=int(d["n_samples"]),
                std_entropy=float(d.get("std_entropy") or 0.0),
                fermionic_weight=int(d["fermionic_weight"]) if d.get("fermionic_weight") else None,
            ))
        return rows
