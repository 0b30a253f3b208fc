import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from wurmac.core import FrameConfig, HorizonConfig, PowerProfile, TrafficConfig

TABLE2_FRAME = dict(tau=0.25e-3, F=41, k_w=4, k_c=1, beta_t=4 / 7, beta_r=3 / 7)


def make_frame(Q: int) -> FrameConfig:
    return FrameConfig(Q=Q, **TABLE2_FRAME)


def make_traffic(lambda_q: float, lambda_a: float, N: int = 40) -> TrafficConfig:
    return TrafficConfig(N=N, lambda_q=lambda_q, lambda_a=lambda_a)


@pytest.fixture
def power() -> PowerProfile:
    return PowerProfile(xi_w=1e-3, xi_r=50e-3, xi_t=55e-3)


@pytest.fixture
def horizon() -> HorizonConfig:
    return HorizonConfig(T_O=10)
