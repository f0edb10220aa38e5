import pytest

from rectmorley.cli import solve_problem
from rectmorley.element import build_reference_element


@pytest.fixture(scope="session")
def ref2():
    return build_reference_element(2)


@pytest.fixture(scope="session")
def ref3():
    return build_reference_element(3)


@pytest.fixture(scope="session")
def solve_cached():
    """Memoized (dim, n, bc) -> (dofmap, EigenResult); shared across tests."""
    cache = {}

    def get(dim, n, bc, k=6, solver="auto"):
        key = (dim, n, bc, k, solver)
        if key not in cache:
            cache[key] = solve_problem(dim, n, bc, k=k, solver=solver)
        return cache[key]

    return get
