"""One bundle for everything a ranking session is parameterized by.

Defaults are the published operating point: K=32 Elo updates, base ratings
linear on [1200, 1800] across 5 buckets with +/-75 noise, softmax temperature
0.1, and threshold schedule theta0=0.15, alpha=0.3, beta=0.9.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .errors import InputError
from .preorder import EloInitConfig
from .rating import AS_WRITTEN, INVERTED, ThresholdState


@dataclass(slots=True)
class SessionConfig:
    bucket_count: int = 5
    rating_base_min: float = 1200.0
    rating_base_max: float = 1800.0
    noise_halfwidth: float = 75.0
    rng_seed: int = 0
    k_factor: float = 32.0
    theta0: float = 0.15
    alpha: float = 0.3
    beta: float = 0.9
    exponent_mode: str = AS_WRITTEN
    batch_size: int = 10
    merge_cycle: int = 10
    tau: float = 0.1

    def validate(self) -> None:
        self.elo_init().validate()
        self.threshold(0).validate()
        if not self.tau > 0:
            raise InputError("tau must be positive")
        if self.k_factor <= 0:
            raise InputError("k_factor must be positive")

    def elo_init(self) -> EloInitConfig:
        return EloInitConfig(
            bucket_count=self.bucket_count,
            rating_base_min=self.rating_base_min,
            rating_base_max=self.rating_base_max,
            noise_halfwidth=self.noise_halfwidth,
            rng_seed=self.rng_seed,
        )

    def threshold(self, total_estimate: int) -> ThresholdState:
        return ThresholdState(
            theta0=self.theta0,
            alpha=self.alpha,
            beta=self.beta,
            comparisons_total_estimate=total_estimate,
            batch_size=self.batch_size,
            merge_cycle=self.merge_cycle,
            exponent_mode=self.exponent_mode,
        )

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SessionConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise InputError(
                f"unknown config field(s): {', '.join(sorted(unknown))}",
                details={"fields": sorted(unknown)},
            )
        cfg = cls(**data)
        if cfg.exponent_mode not in (AS_WRITTEN, INVERTED):
            raise InputError(f"unknown exponent_mode {cfg.exponent_mode!r}")
        cfg.validate()
        return cfg
