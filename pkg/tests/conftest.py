import pytest

from modalcorr.semantics import FiniteFrame


def frame(size, r=(), rp=()):
    return FiniteFrame(size, frozenset(r), frozenset(rp))


@pytest.fixture
def two_chain():
    """Two worlds, R = {(0,1)}, no Rp edges."""
    return frame(2, r=[(0, 1)])


@pytest.fixture
def two_reflexive():
    """Two worlds, R reflexive, no Rp edges."""
    return frame(2, r=[(0, 0), (1, 1)])
