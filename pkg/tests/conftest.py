from pathlib import Path

import pytest

from padeconv.model import MeromorphicModel, PoleSpec
from padeconv.polyalg import Poly
from padeconv.precision import EXACT


CONFIGS = Path(__file__).parent.parent / "configs"


@pytest.fixture
def configs_dir() -> Path:
    return CONFIGS


@pytest.fixture
def two_pole_model() -> MeromorphicModel:
    """a(z) = 2 / (1 - z^2)"""
    return MeromorphicModel(
        radius=2,
        poles=(PoleSpec.polar(1, 0), PoleSpec.polar(1, "0.5")),
        rational_numerator=Poly((-2,)),
    )


@pytest.fixture
def single_pole_model() -> MeromorphicModel:
    """a(z) = 1 / (z - 1)"""
    return MeromorphicModel(radius=2, poles=(PoleSpec.polar(1, 0),))


@pytest.fixture
def torus_model() -> MeromorphicModel:
    """
    (z^2 + z) / D(z) with simple poles exp(2 pi i sqrt(k)), k = 2, 3, 5, and 1/2
    """
    ctx = EXACT.ctx
    return MeromorphicModel(
        radius=2,
        poles=(
            PoleSpec.polar(1, ctx.sqrt(2)),
            PoleSpec.polar(1, ctx.sqrt(3)),
            PoleSpec.polar(1, ctx.sqrt(5)),
            PoleSpec(0.5),
        ),
        rational_numerator=Poly((0, 1, 1)),
    )
