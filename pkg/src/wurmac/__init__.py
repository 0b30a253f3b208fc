"""wurmac: dual-mode (pull/push) wake-up-radio MAC model and simulator."""

from .core import (
    ConfigError,
    FrameConfig,
    HorizonConfig,
    Pmf,
    PowerProfile,
    TABLE2_DEFAULTS,
    TrafficConfig,
    alpha_from_rate,
    derive_partition,
    derive_q,
)

__all__ = [
    "ConfigError",
    "FrameConfig",
    "HorizonConfig",
    "Pmf",
    "PowerProfile",
    "TABLE2_DEFAULTS",
    "TrafficConfig",
    "alpha_from_rate",
    "derive_partition",
    "derive_q",
]

__version__ = "0.1.0"
