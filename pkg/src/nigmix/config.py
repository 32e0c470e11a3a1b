"""Fit configuration shared by both engines and the command-line front-end."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field


@dataclass
class FitConfig:
    """All knobs of a variational fit, with the documented defaults.

    ``hyper_init`` is the flat-prior mass placed on every conjugate
    hyperparameter; ``prune_threshold`` is the minimum effective component
    count kept alive.
    """

    model: str = "unig"
    g_init: int = 10
    init_mode: str = "kmeans"
    hyper_init: float = 1e-8
    prune_threshold: float = 1.0
    tol: float = 1e-6
    max_iter: int = 500
    seed: int = 0
    columns: list[str] | None = field(default=None)
    label_column: str | None = None

    def __post_init__(self):
        if self.model not in ("unig", "mnig"):
            raise ValueError(f"unknown model {self.model!r}")
        if self.init_mode not in ("random", "kmeans"):
            raise ValueError(f"unknown init_mode {self.init_mode!r}")
        if self.g_init < 2:
            raise ValueError("g_init must be >= 2")
        if not (self.hyper_init > 0.0 and self.prune_threshold > 0.0):
            raise ValueError("hyper_init and prune_threshold must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "FitConfig":
        return cls(**d)
