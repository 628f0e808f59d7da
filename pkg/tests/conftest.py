import numpy as np
import pytest

from geodar import LogCholeskySpd, ScalarLine, SpdPoint, WassersteinGrid


def make_space(tag: str):
    if tag == "scalar":
        return ScalarLine()
    if tag == "wasserstein":
        return WassersteinGrid(64)
    if tag == "spd":
        return LogCholeskySpd(4)
    raise ValueError(tag)


def random_point(space, gen: np.random.Generator):
    """A generic random point of the given space."""
    if space.name == "scalar":
        return float(gen.normal(0.0, 2.0))
    if space.name == "wasserstein":
        lo, hi = space.support_lo, space.support_hi
        values = lo + (hi - lo) * np.sort(gen.random(space.m))
        return space.point(values)
    if space.name == "spd":
        return SpdPoint(
            gen.normal(0.0, 0.7, size=space.n_lower),
            gen.normal(0.0, 0.5, size=space.dim),
        )
    raise ValueError(space.name)


@pytest.fixture(params=["scalar", "wasserstein", "spd"])
def any_space(request):
    return make_space(request.param)
