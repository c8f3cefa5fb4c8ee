"""Simulation parameters and their JSON form."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
import math
import warnings

from .errors import ConfigError
from .slit_map import params_from_capacity


@dataclass(frozen=True)
class GridConfig:
    """Discretization of the attachment density.

    coarse: number of uniform cells covering the circle.
    depth: cells per unit of asinh(phi / sigma) in the core of each pole
        window; the centre cell has width about sigma / depth.
    window: half-width of the windows around the two newest poles
        (None means beta / 4).
    """

    coarse: int = 4096
    depth: int = 8
    window: float | None = None

    def validate(self):
        if int(self.coarse) < 8:
            raise ConfigError("grid.coarse must be at least 8")
        if int(self.depth) < 1:
            raise ConfigError("grid.depth must be a positive integer")
        if self.window is not None and not (0.0 < self.window):
            raise ConfigError("grid.window must be positive")


@dataclass(frozen=True)
class SimParams:
    """Model and run parameters.

    ``sigma`` is ``c ** sigma_exponent`` unless given explicitly. Exactly one
    of ``T`` and ``N`` determines the run length; ``N = floor(T / c)``.
    ``d_stat`` is the stopping radius (None means beta / 4).
    """

    c: float = 1e-3
    nu: float = 4.0
    alpha: float = 0.0
    sigma_exponent: float = 6.0
    T: float | None = None
    N: int | None = None
    seed: int = 0
    grid: GridConfig = field(default_factory=GridConfig)
    d_stat: float | None = None
    refine_old_basepoints: bool = False
    old_basepoint_count: int = 2
    sigma_override: float | None = None

    def __post_init__(self):
        if isinstance(self.grid, dict):
            object.__setattr__(self, "grid", GridConfig(**self.grid))
        self.validate()

    def validate(self):
        c = self.c
        if not isinstance(c, (int, float)) or not math.isfinite(c) or c <= 0:
            raise ConfigError(f"c must be a positive finite number, got {c!r}")
        if not math.isfinite(self.nu) or self.nu < 0:
            raise ConfigError("nu must be finite and non-negative")
        if not math.isfinite(self.alpha) or self.alpha < 0:
            raise ConfigError("alpha must be finite and non-negative")
        if self.sigma_override is None and not (self.sigma_exponent > 0):
            raise ConfigError("sigma_exponent must be positive")
        if not self.sigma > 0:
            raise ConfigError("sigma underflows to zero, lower sigma_exponent")
        if self.T is not None and (not math.isfinite(self.T) or self.T < 0):
            raise ConfigError("T must be finite and non-negative")
        if self.N is not None and int(self.N) < 0:
            raise ConfigError("N must be non-negative")
        if self.d_stat is not None and not self.d_stat > 0:
            raise ConfigError("d_stat must be positive")
        if int(self.old_basepoint_count) < 0:
            raise ConfigError("old_basepoint_count must be non-negative")
        self.grid.validate()

    @property
    def sigma(self) -> float:
        if self.sigma_override is not None:
            return float(self.sigma_override)
        return float(self.c) ** float(self.sigma_exponent)

    @property
    def n_particles(self) -> int:
        if self.N is not None:
            return int(self.N)
        if self.T is None:
            return 0
        # guard against T/c landing a hair below an integer
        return int(math.floor(self.T / self.c * (1 + 1e-12)))

    @property
    def total_time(self) -> float:
        return self.T if self.T is not None else self.n_particles * self.c

    @property
    def beta(self) -> float:
        return params_from_capacity(self.c).beta

    @property
    def stop_radius(self) -> float:
        return self.d_stat if self.d_stat is not None else self.beta / 4

    @property
    def window(self) -> float:
        return self.grid.window if self.grid.window is not None else self.beta / 4

    def warn_phase(self):
        if self.nu <= 2:
            warnings.warn(f"nu = {self.nu} <= 2: outside the concentrated phase", stacklevel=2)

    # JSON ----------------------------------------------------------------

    def to_dict(self) -> dict:
        d = asdict(self)
        return {k: v for k, v in d.items() if v is not None or k in ("T", "N")}

    @classmethod
    def from_dict(cls, d: dict) -> "SimParams":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        d = dict(d)
        if "grid" in d:
            g = d["grid"]
            if not isinstance(g, dict):
                raise ConfigError("grid must be an object")
            gk = {f.name for f in fields(GridConfig)}
            if set(g) - gk:
                raise ConfigError(f"unknown grid keys: {sorted(set(g) - gk)}")
            d["grid"] = GridConfig(**g)
        try:
            return cls(**d)
        except TypeError as e:
            raise ConfigError(str(e)) from None
