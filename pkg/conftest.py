"""Shared instances for the test suite."""

import numpy as np
import pytest

from forms import Instance, validate_instance

E1 = np.diag([1.0, 0.0])
E2 = np.diag([0.0, 1.0])
I2 = np.eye(2)


@pytest.fixture
def canonical() -> Instance:
    """T = I, A = diag(1, 0), B = diag(0, 1): tight, certified with alpha = 1."""
    return validate_instance(I2, E1, E2)


@pytest.fixture
def shrunk() -> Instance:
    """T = I / 2 with the canonical A, B: refuted along (1, 1) / sqrt(2)."""
    return validate_instance(0.5 * I2, E1, E2)


@pytest.fixture
def equal_forms() -> Instance:
    """T = 2I, A = B = I: the equality case."""
    return validate_instance(2.0 * I2, I2, I2)


@pytest.fixture
def plateau() -> Instance:
    """T = diag(4, 1, 0): f(s) = min(4 - s, 1 - 1/s, 0) is 0 on all of [1, 4]."""
    return validate_instance(
        np.diag([4.0, 1.0, 0.0]), np.diag([1.0, 0.0, 0.0]), np.diag([0.0, 1.0, 0.0])
    )


@pytest.fixture
def interval() -> Instance:
    """T = diag(4, 1): every alpha in [1, 4] is a certificate, f peaks at (3 + sqrt 13) / 2."""
    return validate_instance(np.diag([4.0, 1.0]), E1, E2)
