import pytest

from hyperperc.tiling import TilingSpec, build_ball


@pytest.fixture(scope="session")
def ball37_r4():
    return build_ball(TilingSpec(3, 7, 4))


@pytest.fixture(scope="session")
def ball37_r8():
    return build_ball(TilingSpec(3, 7, 8))


@pytest.fixture(scope="session")
def ball45_r4():
    return build_ball(TilingSpec(4, 5, 4))


@pytest.fixture(scope="session")
def ball44_r6():
    return build_ball(TilingSpec(4, 4, 6, non_paper_regime=True))
