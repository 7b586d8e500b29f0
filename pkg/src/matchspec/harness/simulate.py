"""One circuit realization: input, Clifford prefix, brickwork, SWAPs, recording."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..gates import BrickworkKind, conjugation_circuit, layer_matrices, swap_injection
from ..inputs import InputSpec, prepare
from ..statevector import apply_matrix, schmidt_values
from ..stats import modified_ratios, plain_ratios, renyi_entropy, trace_power, von_neumann_entropy


def child_seed(master_seed: int, circuit_index: int) -> int:
    """64-bit seed for one realization, split from the master seed by index."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(circuit_index),))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)


@dataclass
class CircuitJob:
    circuit_index: int
    seed: int
    num_qubits: int
    pre_layers: int
    post_layers: int
    num_swaps: int = 0
    input: InputSpec = field(default_factory=InputSpec)
    brickwork: str = BrickworkKind.MATCHGATE.value
    conjugation: str | None = None
    tail_window: int = 40
    cut: int | None = None
    floor: float = 0.0
    alphas: tuple[float, ...] = (2.0, 3.0, 4.0)
    keep_tail_ratios: bool = False


@dataclass
class CircuitResult:
    job: CircuitJob
    r_tilde_trace: np.ndarray
    r_tilde_inf: float
    spectrum: np.ndarray
    entropy: float
    renyi2: float
    trace_powers: dict
    wall_time: float
    tail_ratios: np.ndarray | None = None


def _layer_r_tilde(p: np.ndarray, floor: float) -> float:
    if floor > 0:
        p = p[p >= floor * p[0]]
    rt = modified_ratios(p)
    rt = rt[np.isfinite(rt)]
    return float(rt.mean()) if rt.size else float("nan")


def run_circuit(job: CircuitJob) -> CircuitResult:
    t0 = time.perf_counter()
    n = job.num_qubits
    rng = np.random.default_rng(job.seed)
    amps = prepare(job.input, n, rng).amplitudes
    if job.conjugation:
        for g in conjugation_circuit(job.conjugation, n).gates():
            amps = apply_matrix(amps, n, g.matrix, g.site)

    def apply_layer(index, amps):
        for site, m in layer_matrices(n, index, job.brickwork, rng):
            amps = apply_matrix(amps, n, m, site)
        return amps

    for i in range(job.pre_layers):
        amps = apply_layer(i, amps)
    if job.num_swaps:
        for g in swap_injection(n, job.num_swaps).gates():
            amps = apply_matrix(amps, n, g.matrix, g.site)

    trace = np.empty(job.post_layers)
    tail_start = job.post_layers - job.tail_window
    tail_ratios = []
    p = schmidt_values(amps, n, job.cut)
    for j in range(job.post_layers):
        amps = apply_layer(job.pre_layers + j, amps)
        p = schmidt_values(amps, n, job.cut)
        trace[j] = _layer_r_tilde(p, job.floor)
        if job.keep_tail_ratios and j >= tail_start:
            kept = p[p >= job.floor * p[0]] if job.floor > 0 else p
            r = plain_ratios(kept)
            tail_ratios.append(r[np.isfinite(r)])

    tail = trace[tail_start:]
    r_inf = float(np.nanmean(tail)) if np.any(np.isfinite(tail)) else float("nan")
    return CircuitResult(
        job=job,
        r_tilde_trace=trace,
        r_tilde_inf=r_inf,
        spectrum=p,
        entropy=von_neumann_entropy(p),
        renyi2=renyi_entropy(p, 2.0),
        trace_powers={float(a): trace_power(p, a) for a in job.alphas},
        wall_time=time.perf_counter() - t0,
        tail_ratios=np.concatenate(tail_ratios) if tail_ratios else None,
    )
