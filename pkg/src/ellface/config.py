"""Parameter packs and truncation control.

Environment overrides (read by :func:`TruncationConfig.from_env`):

``ELLFACE_TOL``            target tolerance
``ELLFACE_MAX_PRODUCT``    cap on product factors
``ELLFACE_MAX_SUM``        cap on series terms
``ELLFACE_MAX_MODES``      cap on oscillator modes in contraction sums
"""
from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass, replace

from .errors import ConfigError


@dataclass(frozen=True)
class TruncationConfig:
    max_product_terms: int = 4000
    max_sum_terms: int = 4000
    target_tol: float = 1e-16
    max_modes: int = 4000

    def __post_init__(self):
        if self.max_product_terms < 1 or self.max_sum_terms < 1 or self.max_modes < 1:
            raise ConfigError("term caps must be >= 1")
        if not self.target_tol > 0:
            raise ConfigError("target_tol must be positive")

    @classmethod
    def from_env(cls, base: "TruncationConfig | None" = None, environ=None) -> "TruncationConfig":
        env = os.environ if environ is None else environ
        base = base or cls()
        kw = {}
        try:
            if "ELLFACE_TOL" in env:
                kw["target_tol"] = float(env["ELLFACE_TOL"])
            if "ELLFACE_MAX_PRODUCT" in env:
                kw["max_product_terms"] = int(env["ELLFACE_MAX_PRODUCT"])
            if "ELLFACE_MAX_SUM" in env:
                kw["max_sum_terms"] = int(env["ELLFACE_MAX_SUM"])
            if "ELLFACE_MAX_MODES" in env:
                kw["max_modes"] = int(env["ELLFACE_MAX_MODES"])
        except ValueError as exc:
            raise ConfigError(f"bad truncation override: {exc}") from None
        return replace(base, **kw)


DEFAULT_CFG = TruncationConfig()


@dataclass(frozen=True)
class ModelParams:
    """Global parameters: modulus x, level r, center c, dynamical variable pi_hat.

    ``allow_small_r`` lifts the r > 4 requirement (needed e.g. for the
    trigonometric comparison at small r); it must be requested explicitly.
    """

    x: complex = 0.3
    r: float = 6.0
    c: float = 1.0
    pi_hat: float = 2.5
    allow_small_r: bool = False

    def __post_init__(self):
        if not (0 < abs(self.x) < 1):
            raise ConfigError(f"need 0 < |x| < 1, got {self.x!r}")
        if not math.isfinite(self.r) or (self.r <= 4 and not self.allow_small_r):
            raise ConfigError(f"need r > 4, got r={self.r}")
        if self.r <= 0:
            raise ConfigError("r must be positive")
        if not self.r - self.c > 0:
            raise ConfigError(f"need r - c > 0, got r={self.r}, c={self.c}")

    @property
    def w(self) -> complex:
        """The w with x = exp(i pi w); Im w > 0 for |x| < 1."""
        return cmath.log(self.x) / (1j * math.pi)

    @property
    def r_star(self) -> float:
        return self.r - self.c

    def with_(self, **kw) -> "ModelParams":
        return replace(self, **kw)
