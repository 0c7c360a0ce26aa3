import numpy as np
from simoe.linalg import frobenius_norm, as_matrix
import pytest
from simoe.errors import ShapeError


def test_frobenius_norm() -> None:
    assert frobenius_norm([[3.0, 0.0], [0.0, 4.0]]) == 5.0
    assert frobenius_norm(np.zeros((2, 2))) == 0.0


def test_as_matrix_rejects_vector() -> None:
    with pytest.raises(ShapeError):
        as_matrix([1.0, 2.0])
