"""Dimensionful model constants shared by the oscillator and Gibbs machinery."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ModelConstants:
    """hbar (action), mass, omega (frequency) and beta (inverse energy), all > 0."""

    hbar: float = 1.0
    mass: float = 1.0
    omega: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "mass", "omega", "beta"):
            v = getattr(self, name)
            if not (v > 0):
                raise ValueError(f"{name} must be strictly positive, got {v}")

    @property
    def beta_hbar_omega(self) -> float:
        return self.beta * self.hbar * self.omega

    def to_json(self) -> dict:
        return {"hbar": self.hbar, "mass": self.mass,
                "omega": self.omega, "beta": self.beta}

    @classmethod
    def from_json(cls, data: dict) -> "ModelConstants":
        return cls(**{k: float(v) for k, v in data.items()
                      if k in ("hbar", "mass", "omega", "beta")})
