"""Experiment configuration (JSON) with strict validation."""
from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ConfigurationError
from ..gates import CONJUGATION_MIN_QUBITS, BrickworkKind
from ..inputs import InputKind, InputSpec

DEFAULT_MAX_QUBITS = 20


class Experiment(str, enum.Enum):
    SWAP_INJECTION = "SwapInjection"
    INPUT_STATES = "InputStates"
    CONJUGATION = "Conjugation"
    KL_ANALYSIS = "KlAnalysis"
    ENTROPY_SCAN = "EntropyScan"
    CALIBRATION = "Calibration"


def default_post_layers(num_qubits: int) -> int:
    """100 for N=12, 120 for N=14, ..., 180 for N=20 (extended linearly)."""
    return 10 * num_qubits - 20


# circuits per N used for the published runs
PUBLISHED_CIRCUIT_COUNTS = {12: 1050, 14: 1050, 16: 1050, 18: 525, 20: 225}


@dataclass
class ExperimentConfig:
    experiment: Experiment
    num_qubits: list[int] = field(default_factory=lambda: [8, 10, 12])
    num_circuits: int = 100
    pre_layers: int | str = "N^2"
    post_layers: int | str | dict = "default"
    num_swaps: list[int] = field(default_factory=lambda: [0])
    input: InputSpec = field(default_factory=InputSpec)
    block_sizes: list[int] | None = None
    brickwork: str = BrickworkKind.MATCHGATE.value
    conjugation: list[str] = field(default_factory=lambda: ["none"])
    master_seed: int = 0
    tail_window: int = 40
    bins: int = 50
    r_max: float = 3.0
    floor: float = 0.0
    cut: int | None = None
    alphas: list[float] = field(default_factory=lambda: [2.0, 3.0, 4.0])
    haar_baseline: bool = True

    def __post_init__(self):
        try:
            self.experiment = Experiment(self.experiment)
            self.brickwork = BrickworkKind(self.brickwork).value
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from None
        if isinstance(self.input, dict):
            self.input = InputSpec.from_dict(self.input)
        if isinstance(self.conjugation, str):
            self.conjugation = [self.conjugation]

    # -- derived values --------------------------------------------------------

    def pre_layers_for(self, n: int) -> int:
        if self.pre_layers == "N^2":
            return n * n
        return int(self.pre_layers)

    def post_layers_for(self, n: int) -> int:
        pl = self.post_layers
        if pl == "default":
            return default_post_layers(n)
        if isinstance(pl, dict):
            if str(n) not in pl:
                raise ConfigurationError(f"post_layers table has no entry for N={n}")
            return int(pl[str(n)])
        return int(pl)

    def conjugations(self) -> list[str | None]:
        return [None if c.lower() == "none" else c.upper() for c in self.conjugation]

    def input_specs(self) -> list[InputSpec]:
        if self.block_sizes:
            return [InputSpec(InputKind.HAAR_BLOCKS, k) for k in self.block_sizes]
        return [self.input]

    # -- validation --------------------------------------------------------------

    def validate(self, max_qubits: int = DEFAULT_MAX_QUBITS) -> None:
        if self.num_circuits < 1:
            raise ConfigurationError("num_circuits must be >= 1")
        if not self.num_qubits:
            raise ConfigurationError("num_qubits must list at least one size")
        if self.tail_window < 1:
            raise ConfigurationError("tail_window must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigurationError("master_seed must be a 64-bit unsigned integer")
        if self.pre_layers != "N^2" and (not isinstance(self.pre_layers, int) or self.pre_layers < 0):
            raise ConfigurationError("pre_layers must be 'N^2' or a nonnegative integer")
        if self.floor < 0 or self.bins < 1 or self.r_max <= 0:
            raise ConfigurationError("floor, bins and r_max must be positive")
        if any(a <= 0 for a in self.alphas):
            raise ConfigurationError("alphas must be positive")
        if self.experiment is Experiment.CALIBRATION:
            return
        for c in self.conjugations():
            if c is not None and c not in CONJUGATION_MIN_QUBITS:
                raise ConfigurationError(f"unknown conjugation {c!r}")
        if self.experiment is Experiment.INPUT_STATES and not self.block_sizes:
            raise ConfigurationError("InputStates needs block_sizes")
        for n in self.num_qubits:
            if n > max_qubits:
                raise ConfigurationError(f"N={n} exceeds the {max_qubits}-qubit guard (use --max-qubits)")
            if n < 2 or n % 2:
                raise ConfigurationError(f"N={n}: brickwork experiments need even N >= 2")
            post = self.post_layers_for(n)
            if post < 1:
                raise ConfigurationError(f"N={n}: post_layers must be positive")
            if self.tail_window > post:
                raise ConfigurationError(
                    f"tail_window {self.tail_window} exceeds post_layers {post} at N={n}"
                )
            for s in self.num_swaps:
                if not 0 <= s <= n - 1:
                    raise ConfigurationError(f"num_swaps={s} out of range for N={n}")
            for spec in self.input_specs():
                spec.validate(n)
            for c in self.conjugations():
                if c is not None and n < CONJUGATION_MIN_QUBITS[c]:
                    raise ConfigurationError(f"{c} needs N >= {CONJUGATION_MIN_QUBITS[c]}")
            if self.cut is not None and not 1 <= self.cut <= n - 1:
                raise ConfigurationError(f"cut {self.cut} out of range for N={n}")

    # -- (de)serialization -----------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment.value,
            "num_qubits": list(self.num_qubits),
            "num_circuits": self.num_circuits,
            "pre_layers": self.pre_layers,
            "post_layers": self.post_layers,
            "num_swaps": list(self.num_swaps),
            "input": self.input.to_dict(),
            "block_sizes": self.block_sizes,
            "brickwork": self.brickwork,
            "conjugation": list(self.conjugation),
            "master_seed": self.master_seed,
            "tail_window": self.tail_window,
            "bins": self.bins,
            "r_max": self.r_max,
            "floor": self.floor,
            "cut": self.cut,
            "alphas": list(self.alphas),
            "haar_baseline": self.haar_baseline,
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        if "experiment" not in d:
            raise ConfigurationError("config needs an 'experiment' key")
        return cls(**d)


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"config file not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise ConfigurationError(f"{path}: top level must be an object")
    try:
        return ExperimentConfig.from_dict(doc)
    except TypeError as exc:
        raise ConfigurationError(str(exc)) from None
