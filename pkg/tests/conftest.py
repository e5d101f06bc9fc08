import math

import pytest

from troptherm.dynamics import TransitionSystem, discretize_doubling, from_map, from_sft


@pytest.fixture
def fixa():
    """Full 2-shift with potentials [[0,-1],[-1,-3]]; Q=0, Aubry={0}."""
    return from_sft([[1, 1], [1, 1]], [[0.0, -1.0], [-1.0, -3.0]])


@pytest.fixture
def fixb():
    """Doubling map at order 2 sampling cos(2 pi t); Q=1 on the 00 loop."""
    return discretize_doubling(2, lambda t: math.cos(2 * math.pi * t))


@pytest.fixture
def fixc():
    """Plain 3-cycle with vertex potentials (1,2,3); Q=2."""
    return from_map([1, 2, 0], [1.0, 2.0, 3.0])


@pytest.fixture
def two_loops():
    """Two zero self-loops joined by negative arcs: two critical classes."""
    return from_sft([[1, 1], [1, 1]], [[0.0, -2.0], [-1.0, 0.0]])


@pytest.fixture
def one_state():
    return TransitionSystem(1, [(0, 0, 1.5)])
