"""Fits over summary tables: exponential approach to WD, linear Page-deviation trend."""
from __future__ import annotations

from dataclasses import dataclass

from ..errors import ConfigurationError
from ..stats import GUE_R_TILDE, FitResult, fit_exponential, fit_linear
from .records import SummaryRow


@dataclass(frozen=True)
class GroupFit:
    num_swaps: int
    input: str
    conjugation: str
    brickwork: str
    sizes: tuple[int, ...]
    fit: FitResult


def _series_key(row: SummaryRow) -> tuple:
    return (row.num_swaps, row.input, row.conjugation, row.brickwork)


def group_series(rows: list[SummaryRow]) -> dict[tuple, list[SummaryRow]]:
    """Summary rows grouped by everything except N, each sorted by N."""
    out: dict[tuple, list[SummaryRow]] = {}
    for row in rows:
        out.setdefault(_series_key(row), []).append(row)
    return {k: sorted(v, key=lambda r: r.num_qubits) for k, v in out.items()}


def deviation_fit(rows: list[SummaryRow], target: float = GUE_R_TILDE) -> FitResult:
    """Fit delta_r = target - <r~>_inf to r0 exp(-gamma N) over the rows given."""
    pts = [(r.num_qubits, target - r.mean_r_tilde_inf) for r in rows]
    return fit_exponential(pts)


def deviation_fits(rows: list[SummaryRow], target: float = GUE_R_TILDE,
                   num_swaps: int | None = None) -> list[GroupFit]:
    fits = []
    for key, series in group_series(rows).items():
        if num_swaps is not None and key[0] != num_swaps:
            continue
        if len(series) < 2:
            continue
        try:
            fit = deviation_fit(series, target)
        except ConfigurationError:
            continue  # a point at or beyond the target has no log
        fits.append(GroupFit(*key, tuple(r.num_qubits for r in series), fit))
    if not fits:
        raise ConfigurationError("no series with two or more sizes below the target to fit")
    return fits


def page_deviation_slope(rows: list[SummaryRow]) -> tuple[float, float]:
    """(slope, intercept) of the Page deviation against N."""
    rows = sorted(rows, key=lambda r: r.num_qubits)
    return fit_linear([r.num_qubits for r in rows], [r.page_deviation for r in rows])
