"""Reference suite: Poisson and GUE level statistics, Haar random states."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..inputs import haar_state
from ..statevector import schmidt_values
from ..stats import (
    GUE_R_TILDE, POISSON_R_TILDE, WIGNER_DYSON, gue_levels, histogram, kl_divergence,
    modified_ratios, page_entropy, plain_ratios, poisson_levels, von_neumann_entropy,
)

CALIBRATION_COLUMNS = ("check", "value", "target", "tolerance", "passed")


@dataclass(frozen=True)
class CalibrationSettings:
    poisson_spectra: int = 100_000
    poisson_length: int = 20
    gue_matrices: int = 1000
    gue_dim: int = 64
    kl_ratios: int = 1_000_000
    haar_states: int = 1000
    haar_qubits: int = 10


@dataclass(frozen=True)
class CalibrationCheck:
    check: str
    value: float
    target: float
    tolerance: float
    mode: str = "abs"  # "abs": |value - target| <= tol; "max": value < tol

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.value):
            return False
        if self.mode == "max":
            return self.value < self.tolerance
        return abs(self.value - self.target) <= self.tolerance


def _mean_ratio(levels: np.ndarray) -> float:
    r = modified_ratios(levels)
    return float(np.nanmean(r))


def poisson_check(rng: np.random.Generator, s: CalibrationSettings) -> CalibrationCheck:
    levels = poisson_levels(rng, s.poisson_length, s.poisson_spectra)
    return CalibrationCheck("poisson_r_tilde", _mean_ratio(levels), POISSON_R_TILDE, 0.005)


def gue_checks(rng: np.random.Generator, s: CalibrationSettings) -> list[CalibrationCheck]:
    per = s.gue_dim - 2
    count = max(s.gue_matrices, -(-s.kl_ratios // per))
    levels = gue_levels(rng, s.gue_dim, count)
    rt = _mean_ratio(levels[: s.gue_matrices])
    r = plain_ratios(levels)
    r = r[np.isfinite(r)][: s.kl_ratios]
    kl = kl_divergence(histogram(r), WIGNER_DYSON)
    return [
        CalibrationCheck("gue_r_tilde", rt, 0.60, 0.015),
        CalibrationCheck("gue_kl_wigner_dyson", kl, 0.0, 0.01, mode="max"),
    ]


def haar_checks(rng: np.random.Generator, s: CalibrationSettings) -> list[CalibrationCheck]:
    n = s.haar_qubits
    dim_a = 2 ** (n // 2)
    ent, rts = np.empty(s.haar_states), np.empty(s.haar_states)
    for i in range(s.haar_states):
        p = schmidt_values(haar_state(2 ** n, rng), n)
        ent[i] = von_neumann_entropy(p)
        rts[i] = np.nanmean(modified_ratios(p))
    page = page_entropy(dim_a, 2 ** n // dim_a)
    return [
        CalibrationCheck(f"haar_page_entropy_N{n}", float(ent.mean()), page, 0.01),
        # finite 32-level Schmidt spectra sit slightly below the bulk GUE value
        CalibrationCheck(f"haar_r_tilde_N{n}", float(rts.mean()), GUE_R_TILDE, 0.03),
    ]


def run_calibration(seed: int = 0, settings: CalibrationSettings | None = None) -> list[CalibrationCheck]:
    s = settings or CalibrationSettings()
    streams = np.random.SeedSequence(int(seed)).spawn(3)
    rngs = [np.random.default_rng(ss) for ss in streams]
    return [poisson_check(rngs[0], s), *gue_checks(rngs[1], s), *haar_checks(rngs[2], s)]


def write_calibration_csv(checks: list[CalibrationCheck], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CALIBRATION_COLUMNS)
        for c in checks:
            w.writerow([c.check, repr(c.value), repr(c.target), repr(c.tolerance), str(c.passed).lower()])
