"""Run configuration shared by every checker.

All asymptotic verdicts in this package are heuristics on finite windows; the
thresholds that drive them live here so that they can be surfaced in reports
and overridden from a JSON file (``ULTRACLASS_CONFIG``).
"""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

ENV_VAR = "ULTRACLASS_CONFIG"


@dataclass(frozen=True)
class RunConfig:
    """Thresholds and defaults.

    Attributes
    ----------
    K : default truncation order.
    tol : absolute tolerance in log-space for every inequality check.
    tail_fraction : fraction of a window treated as its tail.
    theta : threshold for the (M0) evidence, ``log m_K / K > log theta``.
    delta : minimal tail drop accepted as divergence evidence on its own.
    decel : ratio of consecutive tail-quarter increments above which a
        monotone tail is read as converging rather than diverging.
    beurling_eps : a final ``h`` below this value is Beurling evidence on its own.
    lambdas : default lambda grid for weight matrices.
    cutoff : default spectral cutoff.
    cutoff_fraction : rows whose dominant frequency exceeds this fraction of
        the cutoff are flagged as cutoff-limited.
    max_words : cap on the number of enumerated operator words.
    seeds : seeds used by randomized batteries.
    out_dir : report directory for the CLI.
    """

    K: int = 128
    tol: float = 1e-9
    tail_fraction: float = 0.25
    theta: float = 10.0
    delta: float = 0.5
    decel: float = 1.6
    beurling_eps: float = 0.1
    lambdas: tuple[float, ...] = (0.25, 0.5, 1.0, 2.0, 4.0)
    cutoff: int = 4096
    cutoff_fraction: float = 0.8
    max_words: int = 4096
    seeds: tuple[int, ...] = tuple(range(20))
    out_dir: str = "."

    def __post_init__(self):
        for name in ("tol", "tail_fraction", "theta", "delta", "decel",
                     "beurling_eps", "cutoff_fraction"):
            if not getattr(self, name) > 0:
                raise ValueError(f"RunConfig.{name} must be positive")
        if self.K < 8:
            raise ValueError("RunConfig.K must be >= 8")
        if self.cutoff < 1 or self.max_words < 1:
            raise ValueError("RunConfig.cutoff and max_words must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambdas"] = list(self.lambdas)
        d["seeds"] = list(self.seeds)
        return d

    def updated(self, **changes) -> "RunConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown RunConfig fields: {sorted(unknown)}")
        data = dict(data)
        for key in ("lambdas", "seeds"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "RunConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    @classmethod
    def from_env(cls) -> "RunConfig":
        path = os.environ.get(ENV_VAR)
        if path and Path(path).is_file():
            return cls.from_file(path)
        return cls()


DEFAULT = RunConfig()


def resolve(config: RunConfig | None) -> RunConfig:
    return DEFAULT if config is None else config
