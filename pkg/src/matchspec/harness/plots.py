"""Minimal SVG figures from summary and histogram CSVs."""
from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..errors import ConfigurationError  # noqa: E402
from ..stats import GUE_R_TILDE, POISSON_R_TILDE, poisson_pdf, read_histogram_csv, wigner_dyson_pdf  # noqa: E402
from .analysis import group_series  # noqa: E402
from .records import read_summary  # noqa: E402

# fixed ids and no timestamp, so identical data gives identical files
plt.rcParams["svg.hashsalt"] = "matchspec"
_SVG_META = {"Date": None}


def _header(path: Path) -> list[str]:
    with open(path, newline="") as fh:
        return next(csv.reader(fh), [])


def _save(fig, out: Path) -> Path:
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, format="svg", metadata=_SVG_META)
    plt.close(fig)
    return out


def _label(key: tuple) -> str:
    swaps, inp, conj, kind = key
    parts = [kind]
    if swaps:
        parts.append(f"{swaps} SWAP")
    if conj != "none":
        parts.append(conj)
    parts.append(inp)
    return ", ".join(parts)


def plot_summary(path: str | Path, out: str | Path) -> Path:
    """<r~>_inf against N for every series, with one-sigma error bars."""
    rows = read_summary(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    for key, series in group_series(rows).items():
        n = [r.num_qubits for r in series]
        ax.errorbar(n, [r.mean_r_tilde_inf for r in series], yerr=[r.std_r_tilde_inf for r in series],
                    marker="o", capsize=3, label=_label(key))
    ax.axhline(POISSON_R_TILDE, ls="--", c="gray", label="Poisson")
    ax.axhline(GUE_R_TILDE, ls=":", c="black", label="Wigner-Dyson")
    ax.set_xlabel("N")
    ax.set_ylabel(r"$\langle \tilde r \rangle_\infty$")
    ax.legend(fontsize="small")
    fig.tight_layout()
    return _save(fig, Path(out))


def plot_histogram(path: str | Path, out: str | Path) -> Path:
    """Empirical P(r) as a step curve with the analytic reference densities."""
    h = read_histogram_csv(path)
    lefts, rights, dens = h.lefts, h.rights, h.density()
    finite = np.isfinite(rights)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.stairs(dens[finite], np.append(lefts[finite], rights[finite][-1]), label=Path(path).stem)
    r = np.linspace(0, rights[finite][-1], 400)
    ax.plot(r, poisson_pdf(r), ls="--", c="gray", label="Poisson")
    ax.plot(r, wigner_dyson_pdf(r), ls=":", c="black", label="Wigner-Dyson")
    ax.set_xlabel("r")
    ax.set_ylabel("P(r)")
    ax.legend(fontsize="small")
    fig.tight_layout()
    return _save(fig, Path(out))


def plot_csv(path: str | Path, out_dir: str | Path) -> Path:
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"file not found: {path}")
    cols = _header(path)
    out = Path(out_dir) / f"{path.stem}.svg"
    if "mean_r_tilde_inf" in cols:
        return plot_summary(path, out)
    if cols[:3] == ["bin_left", "bin_right", "density"]:
        return plot_histogram(path, out)
    raise ConfigurationError(f"{path}: not a summary or histogram CSV")
