"""Command-line entry point: ``matchspec <command> ...``."""
from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from ..errors import ConfigurationError
from ..fermion import fermionic_weight
from ..gates import conjugation_circuit
from .analysis import deviation_fits
from .calibration import run_calibration, write_calibration_csv
from .config import DEFAULT_MAX_QUBITS, Experiment, load_config
from .experiments import run_experiment, write_outputs, write_table
from .oracle import run_oracle
from .plots import plot_csv
from .records import read_summary

log = logging.getLogger("matchspec")

EXIT_OK, EXIT_CONFIG, EXIT_CHECK = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; here usage errors are config errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=None, help="master seed (overrides the config)")
    p.add_argument("--threads", type=int, default=1, help="worker processes")
    p.add_argument("--out-dir", default="out", help="directory for output files")
    p.add_argument("--max-qubits", type=int, default=DEFAULT_MAX_QUBITS,
                   help="resource guard on N (default %(default)s)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="matchspec", description="Entanglement spectrum statistics of matchgate circuits.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("run", parents=[common], help="run an experiment config")
    p.add_argument("config", help="experiment JSON file")

    sub.add_parser("calibrate", parents=[common], help="Poisson/GUE/Haar reference suite")

    p = sub.add_parser("fit", parents=[common], help="exponential fit of the deviation from WD")
    p.add_argument("summary", help="summary CSV")
    p.add_argument("--target", type=float, default=0.603, help="reference <r~> (default %(default)s)")
    p.add_argument("--num-swaps", type=int, default=None, help="restrict to one SWAP count")

    p = sub.add_parser("plot", parents=[common], help="SVG plot of a summary or histogram CSV")
    p.add_argument("csv", nargs="+")

    p = sub.add_parser("oracle", parents=[common], help="free-fermion cross-validation suite")
    p.add_argument("--circuits", type=int, default=100)

    p = sub.add_parser("weight", parents=[common], help="fermionic weight of a conjugation circuit")
    p.add_argument("circuit", choices=["C1", "C2", "C3", "C4"])
    p.add_argument("num_qubits", type=int)
    return parser


def cmd_run(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config.master_seed = args.seed
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if config.experiment is Experiment.CALIBRATION:
        config.validate(args.max_qubits)
        return _calibrate(config.master_seed, out)
    config.validate(args.max_qubits)
    t0 = time.perf_counter()
    with open(out / "records.jsonl", "w") as stream:
        result = run_experiment(config, args.threads, args.max_qubits, stream=stream)
    written = write_outputs(result, out, records_written=True)
    log.info("%d circuits in %.1f s", len(result.records), time.perf_counter() - t0)
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    for p in written:
        print(p)
    return EXIT_OK


def _calibrate(seed: int, out: Path) -> int:
    checks = run_calibration(seed)
    path = out / "calibration.csv"
    write_calibration_csv(checks, path)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.check:<24} {c.value:.6f}  (target {c.target:.6f}, tol {c.tolerance})")
    print(path)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_CHECK


def cmd_calibrate(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return _calibrate(0 if args.seed is None else args.seed, out)


def cmd_fit(args) -> int:
    path = Path(args.summary)
    if not path.exists():
        raise ConfigurationError(f"file not found: {path}")
    fits = deviation_fits(read_summary(path), args.target, args.num_swaps)
    rows = []
    for f in fits:
        print(f"swaps={f.num_swaps} input={f.input} conj={f.conjugation} {f.brickwork} N={list(f.sizes)}: "
              f"r0={f.fit.r0:.6g} gamma={f.fit.gamma:.6g} residual={f.fit.residual:.3g}")
        rows.append({"num_swaps": f.num_swaps, "input": f.input, "conjugation": f.conjugation,
                     "brickwork": f.brickwork, "sizes": " ".join(map(str, f.sizes)),
                     "r0": f.fit.r0, "gamma": f.fit.gamma, "residual": f.fit.residual})
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_table(rows, out / "fit.csv")
    return EXIT_OK


def cmd_plot(args) -> int:
    for path in args.csv:
        print(plot_csv(path, args.out_dir))
    return EXIT_OK


def cmd_oracle(args) -> int:
    report = run_oracle(0 if args.seed is None else args.seed, args.circuits, min(10, args.max_qubits))
    rejected = sum(c.swap_rejected for c in report.cases)
    print(f"circuits={len(report.cases)} max|<Z> error|={report.max_error:.3e} (tol {report.tolerance:g})")
    print(f"SWAP rejected as non-Gaussian: {rejected}/{len(report.cases)}")
    print("PASS" if report.passed else "FAIL")
    return EXIT_OK if report.passed else EXIT_CHECK


def cmd_weight(args) -> int:
    print(fermionic_weight(conjugation_circuit(args.circuit, args.num_qubits)))
    return EXIT_OK


COMMANDS = {
    "run": cmd_run, "calibrate": cmd_calibrate, "fit": cmd_fit,
    "plot": cmd_plot, "oracle": cmd_oracle, "weight": cmd_weight,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigurationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
