import numpy as np
import pytest

from quivertilt.algebra import Quiver, build_algebra, make_path
from quivertilt.linalg import Matrix
from quivertilt.modules import Module
from quivertilt.census import census


@pytest.fixture(scope="session")
def strands():
    """Double arrows 1 => 2 => 3 with both straight composites zero."""
    q = Quiver(
        ["1", "2", "3"],
        [("x1", "1", "2"), ("y1", "1", "2"), ("x2", "2", "3"), ("y2", "2", "3")],
    )
    rels = [[(1, make_path(q, ["x1", "x2"]))], [(1, make_path(q, ["y1", "y2"]))]]
    return build_algebra(q, rels, p=2)


@pytest.fixture(scope="session")
def strands_T(strands):
    """The zigzag thread x1 then y2; indecomposable, dims (1,1,1)."""
    ai = strands.quiver.arrow_index
    mats = [None] * 4
    mats[ai["x1"]] = Matrix(2, [[1]])
    mats[ai["y1"]] = Matrix(2, [[0]])
    mats[ai["x2"]] = Matrix(2, [[0]])
    mats[ai["y2"]] = Matrix(2, [[1]])
    return Module(strands, (1, 1, 1), mats)


@pytest.fixture(scope="session")
def triangle():
    """Oriented 3-cycle with two length-2 composites zero."""
    q = Quiver(["1", "2", "3"], [("a", "1", "2"), ("b", "2", "3"), ("c", "3", "1")])
    rels = [[(1, make_path(q, ["b", "c"]))], [(1, make_path(q, ["c", "a"]))]]
    return build_algebra(q, rels, p=2)


@pytest.fixture(scope="session")
def triangle_T(triangle):
    """The interval module on 1 -> 2."""
    ai = triangle.quiver.arrow_index
    mats = [None] * 3
    mats[ai["a"]] = Matrix(2, [[1]])
    mats[ai["b"]] = Matrix(2, np.zeros((0, 1)))
    mats[ai["c"]] = Matrix(2, np.zeros((1, 0)))
    return Module(triangle, (1, 1, 0), mats)


@pytest.fixture(scope="session")
def a2():
    q = Quiver(["1", "2"], [("al", "1", "2")])
    return build_algebra(q, [], p=2)


@pytest.fixture(scope="session")
def strands_census(strands):
    return census(strands, (2, 2, 2))


@pytest.fixture(scope="session")
def triangle_census(triangle):
    return census(triangle, (2, 2, 2))


@pytest.fixture(scope="session")
def a2_census(a2):
    return census(a2, (2, 2))
