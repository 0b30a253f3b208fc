"""Shared frame geometry, traffic and power configuration, and the Pmf vector type.

Everything downstream (analytical engine, energy model, Monte Carlo simulator,
CLI) consumes these types. All of them are immutable after construction and can
be shared freely across worker processes or threads.

Units are SI throughout: slot/frame durations in seconds, rates in 1/s, power
in watts, energy in joules. Millijoules appear only at the reporting edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np


class ConfigError(ValueError):
    """Raised for infeasible or malformed configurations."""


def derive_partition(F: int, k_w: int, k_c: int, Q: int) -> int:
    """Number of push slots P left in a frame of F slots after Q pull opportunities.

    Each pull opportunity costs k_w wake-up-signal slots plus one data slot; the
    push sub-frame keeps k_c control slots. Rejects partitions with P < 0.
    """
    _check_nonneg_int(F=F, k_w=k_w, k_c=k_c, Q=Q)
    P = F - Q * (k_w + 1) - k_c
    if P < 0:
        raise ConfigError(
            f"infeasible partition: Q={Q} needs {Q * (k_w + 1) + k_c} slots "
            f"but the frame has only F={F}"
        )
    return P


def derive_q(F: int, k_w: int, k_c: int, P: int) -> int:
    """Largest pull capacity Q that leaves at least P push slots (inverse of derive_partition)."""
    _check_nonneg_int(F=F, k_w=k_w, k_c=k_c, P=P)
    if P > F - k_c:
        raise ConfigError(f"P={P} exceeds the {F - k_c} slots available for the push sub-frame")
    return (F - P - k_c) // (k_w + 1)


def alpha_from_rate(lambda_a: float, T: float) -> float:
    """Per-node per-frame alarm probability for alarm rate lambda_a over a frame of T seconds."""
    if lambda_a < 0 or T < 0:
        raise ConfigError("lambda_a and T must be nonnegative")
    alpha = lambda_a * T
    if alpha > 1.0:
        raise ConfigError(f"lambda_a*T = {alpha} is not a probability (must be <= 1)")
    return alpha


def _check_nonneg_int(**kwargs) -> None:
    for name, value in kwargs.items():
        if not isinstance(value, (int, np.integer)) or value < 0:
            raise ConfigError(f"{name} must be a nonnegative integer, got {value!r}")


@dataclass(frozen=True)
class FrameConfig:
    """Slot/frame geometry of the dual pull/push MAC frame.

    tau     seconds per slot
    F       slots per frame
    k_w     slots per wake-up signal
    k_c     slots for the push-sub-frame control signal
    Q       pull opportunities (WuS + pull slot pairs) per frame
    beta_t  fraction of a slot used by the UL payload
    beta_r  fraction of a slot used by the ACK
    """

    tau: float
    F: int
    k_w: int
    k_c: int
    Q: int
    beta_t: float
    beta_r: float

    def __post_init__(self):
        if self.tau <= 0:
            raise ConfigError("tau must be positive")
        if self.beta_t < 0 or self.beta_r < 0 or self.beta_t + self.beta_r > 1.0 + 1e-12:
            raise ConfigError("need beta_t >= 0, beta_r >= 0, beta_t + beta_r <= 1")
        derive_partition(self.F, self.k_w, self.k_c, self.Q)  # rejects P < 0

    @property
    def P(self) -> int:
        return derive_partition(self.F, self.k_w, self.k_c, self.Q)

    @property
    def T(self) -> float:
        return self.tau * self.F

    @property
    def T_w(self) -> float:
        return (self.k_w + 1) * self.tau

    @property
    def T_pull(self) -> float:
        return self.Q * self.T_w

    @property
    def T_push(self) -> float:
        return (self.P + self.k_c) * self.tau

    def with_q(self, Q: int) -> "FrameConfig":
        return FrameConfig(self.tau, self.F, self.k_w, self.k_c, Q, self.beta_t, self.beta_r)

    @classmethod
    def from_push_slots(cls, tau, F, k_w, k_c, P, beta_t, beta_r) -> "FrameConfig":
        """Build from a requested push-slot count; Q is the largest feasible capacity.

        The realized P (recomputed from Q) can exceed the request when the
        leftover slots do not fill a whole pull opportunity.
        """
        Q = derive_q(F, k_w, k_c, P)
        return cls(tau, F, k_w, k_c, Q, beta_t, beta_r)


@dataclass(frozen=True)
class TrafficConfig:
    """Node population and offered load.

    N         number of nodes
    lambda_q  queries per second per node
    lambda_a  alarms per second per node
    """

    N: int
    lambda_q: float
    lambda_a: float

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or self.N < 1:
            raise ConfigError("N must be an integer >= 1")
        if self.lambda_q < 0 or self.lambda_a < 0:
            raise ConfigError("rates must be nonnegative")

    def alpha(self, frame: FrameConfig) -> float:
        """Per-node per-frame alarm probability, alpha = lambda_a * T."""
        return alpha_from_rate(self.lambda_a, frame.T)

    def mu_q(self, frame: FrameConfig) -> float:
        """Mean queries per frame over the whole population, mu_q = N * lambda_q * T."""
        return self.N * self.lambda_q * frame.T


@dataclass(frozen=True)
class PowerProfile:
    """Radio power draw in watts: wake-up receiver on, main radio RX, main radio TX."""

    xi_w: float
    xi_r: float
    xi_t: float

    def __post_init__(self):
        if not (0 <= self.xi_w <= self.xi_r <= self.xi_t):
            raise ConfigError("need 0 <= xi_w <= xi_r <= xi_t")


@dataclass(frozen=True)
class HorizonConfig:
    """Observation window: T_O recorded frames.

    By default frame 0 is a warm-up (queries flow but no node can be alarmed
    yet) and the recorded window is frames 1..T_O. Setting
    include_warmup_frame records frames 0..T_O-1 instead; calibration against
    the published analytical curves selects the default (see README).
    """

    T_O: int
    include_warmup_frame: bool = False

    def __post_init__(self):
        if not isinstance(self.T_O, (int, np.integer)) or self.T_O < 1:
            raise ConfigError("T_O must be an integer >= 1")

    @property
    def recorded_frames(self) -> range:
        if self.include_warmup_frame:
            return range(0, self.T_O)
        return range(1, self.T_O + 1)


_NORM_TOL = 1e-9


class Pmf:
    """Probability mass function on {0, ..., n} backed by an immutable float64 vector.

    Construction accepts any nonnegative vector with positive sum and
    normalizes it; negative entries or an all-zero vector are rejected.
    """

    __slots__ = ("_probs",)

    def __init__(self, probs: Iterable[float]):
        v = np.asarray(list(probs) if not isinstance(probs, np.ndarray) else probs, dtype=np.float64)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("Pmf needs a nonempty 1-D vector")
        if np.any(v < 0):
            raise ValueError("Pmf entries must be nonnegative")
        total = float(v.sum())
        if total <= 0:
            raise ValueError("Pmf must have positive total mass")
        if abs(total - 1.0) > _NORM_TOL:
            v = v / total
        v = v.copy()
        v.flags.writeable = False
        self._probs = v

    @classmethod
    def point_mass(cls, n: int, at: int) -> "Pmf":
        v = np.zeros(n + 1)
        v[at] = 1.0
        return cls(v)

    @property
    def probs(self) -> np.ndarray:
        return self._probs

    @property
    def n(self) -> int:
        """Largest supported value (vector index range is 0..n)."""
        return self._probs.size - 1

    def mean(self) -> float:
        return float(np.arange(self._probs.size) @ self._probs)

    def __getitem__(self, k: int) -> float:
        return float(self._probs[k])

    def __len__(self) -> int:
        return self._probs.size

    def __repr__(self) -> str:
        return f"Pmf(n={self.n}, mean={self.mean():.6g})"


# Default parameter set used by all shipped experiment grids: 40 nodes, 41
# slots of 0.25 ms (T = 10.25 ms), 4-slot WuS, 1-slot push control, 1/55/50 mW
# radio profile, 4:3 payload/ACK slot split, 10 observed frames.
TABLE2_DEFAULTS: Mapping[str, float | int | bool] = {
    "N": 40,
    "tau": 0.25e-3,
    "F": 41,
    "k_w": 4,
    "k_c": 1,
    "Q": 1,
    "beta_t": 4.0 / 7.0,
    "beta_r": 3.0 / 7.0,
    "lambda_q": 15.0,
    "lambda_a": 15.0,
    "xi_w": 1e-3,
    "xi_r": 50e-3,
    "xi_t": 55e-3,
    "T_O": 10,
    "include_warmup_frame": False,
}

_CONFIG_TYPES = {
    "N": int,
    "tau": float,
    "F": int,
    "k_w": int,
    "k_c": int,
    "Q": int,
    "beta_t": float,
    "beta_r": float,
    "lambda_q": float,
    "lambda_a": float,
    "xi_w": float,
    "xi_r": float,
    "xi_t": float,
    "T_O": int,
    "include_warmup_frame": bool,
}


def parse_config_text(text: str) -> dict:
    """Parse a 'key = value' configuration file body; unknown keys are an error."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, rhs = line.partition("=")
        key, rhs = key.strip(), rhs.strip()
        if key not in _CONFIG_TYPES:
            raise ConfigError(f"line {lineno}: unknown configuration key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        kind = _CONFIG_TYPES[key]
        try:
            if kind is bool:
                if rhs.lower() not in ("true", "false"):
                    raise ValueError
                values[key] = rhs.lower() == "true"
            elif kind is int:
                values[key] = int(rhs)
            else:
                values[key] = float(rhs)
        except ValueError:
            raise ConfigError(f"line {lineno}: cannot parse {rhs!r} as {kind.__name__} for {key!r}") from None
    return values


def load_config(path: str | Path | None) -> dict:
    """Resolve a full configuration: file values (if any) over the built-in defaults."""
    resolved = dict(TABLE2_DEFAULTS)
    if path is not None:
        resolved.update(parse_config_text(Path(path).read_text()))
    return resolved


def build_configs(resolved: Mapping) -> tuple[FrameConfig, TrafficConfig, PowerProfile, HorizonConfig]:
    frame = FrameConfig(
        tau=float(resolved["tau"]),
        F=int(resolved["F"]),
        k_w=int(resolved["k_w"]),
        k_c=int(resolved["k_c"]),
        Q=int(resolved["Q"]),
        beta_t=float(resolved["beta_t"]),
        beta_r=float(resolved["beta_r"]),
    )
    traffic = TrafficConfig(N=int(resolved["N"]), lambda_q=float(resolved["lambda_q"]),
                            lambda_a=float(resolved["lambda_a"]))
    power = PowerProfile(xi_w=float(resolved["xi_w"]), xi_r=float(resolved["xi_r"]),
                         xi_t=float(resolved["xi_t"]))
    horizon = HorizonConfig(T_O=int(resolved["T_O"]),
                            include_warmup_frame=bool(resolved["include_warmup_frame"]))
    alpha_from_rate(traffic.lambda_a, frame.T)  # reject alpha > 1 early
    return frame, traffic, power, horizon
