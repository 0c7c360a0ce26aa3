# simoe/linalg.py
"""Dense linear algebra kernel.

Every matrix and vector in simoe is a float64 numpy array. This module
adds the checks, the multiply-accumulate bookkeeping and the SVD used by
the gate and the codec.

It contains the following functions:
    - `as_matrix(data)` - Returns: a 2-D float64 array.
    - `as_vector(data)` - Returns: a 1-D float64 array.
    - `count_macs()` - Returns: a context manager tallying multiply-accumulates.
    - `matmul(a, b)` - Returns: matrix product.
    - `matvec(a, x)` - Returns: matrix-vector product.
    - `softmax(v)` - Returns: numerically stable softmax.
    - `jacobi_svd(a, tol, max_sweeps)` - Returns: thin SVD by one-sided Jacobi rotations.
    - `truncated_svd(a, r, method)` - Returns: rank r factors (U_r, S_r, V_r).
    - `low_rank(u, s, v)` - Returns: U diag(S) V^T.
    - `frobenius_norm(a)` - Returns: Frobenius norm.
"""

import contextlib
import contextvars
import dataclasses
import typing
import numpy as np
import numpy.typing as npt
from simoe.errors import ShapeError

Matrix = npt.NDArray[np.float64]
Vector = npt.NDArray[np.float64]


@dataclasses.dataclass
class MacCounter:
    """Running total of multiply-accumulates."""

    macs: int = 0


_counters: contextvars.ContextVar[tuple[MacCounter, ...]] = contextvars.ContextVar(
    "mac_counters", default=()
)


@contextlib.contextmanager
def count_macs() -> typing.Iterator[MacCounter]:
    """Count multiply-accumulates done by `matmul` and `matvec`.

    Counters nest: an outer counter also sees the work tallied
    by inner ones.

    Returns:
        The active counter.
    """
    counter = MacCounter()
    token = _counters.set(_counters.get() + (counter,))
    try:
        yield counter
    finally:
        _counters.reset(token)


def _tally(macs: int) -> None:
    for counter in _counters.get():
        counter.macs += macs


def as_matrix(data: npt.ArrayLike) -> Matrix:
    """Convert data to a float64 matrix.

    Args:
        data: Nested sequence or array with two dimensions.

    Returns:
        A 2-D float64 array.
    """
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError("as_matrix", arr.shape)
    return arr


def as_vector(data: npt.ArrayLike) -> Vector:
    """Convert data to a float64 vector.

    Args:
        data: Sequence or array with one dimension.

    Returns:
        A 1-D float64 array.
    """
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 1:
        raise ShapeError("as_vector", arr.shape)
    return arr


def matmul(a: npt.ArrayLike, b: npt.ArrayLike) -> Matrix:
    """Multiply two matrices.

    Args:
        a: Left matrix (n x k).
        b: Right matrix (k x m).

    Returns:
        The n x m product.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError("matmul", a.shape, b.shape)
    _tally(a.shape[0] * a.shape[1] * b.shape[1])
    return a @ b


def matvec(a: npt.ArrayLike, x: npt.ArrayLike) -> Vector:
    """Multiply a matrix by a vector.

    Args:
        a: Matrix (n x k).
        x: Vector of length k.

    Returns:
        Vector of length n.
    """
    a = as_matrix(a)
    x = as_vector(x)
    if a.shape[1] != x.shape[0]:
        raise ShapeError("matvec", a.shape, x.shape)
    _tally(a.shape[0] * a.shape[1])
    return a @ x


def softmax(v: npt.ArrayLike) -> Vector:
    """Softmax with max subtraction.

    Args:
        v: Finite logits.

    Returns:
        Probabilities summing to one.
    """
    v = as_vector(v)
    if v.size == 0:
        raise ValueError("softmax of an empty vector")
    shifted = np.exp(v - v.max())
    return shifted / shifted.sum()


def _complete_left(work: Matrix, sigma: Vector) -> Matrix:
    """Normalize Jacobi columns into U, completing null directions."""
    rows, cols = work.shape
    rank = 0
    if sigma.size and sigma[0] > 0.0:
        rank = int(np.sum(sigma > sigma[0] * 1e-13))
    u = np.zeros((rows, cols))
    u[:, :rank] = work[:, :rank] / sigma[:rank]
    if rank < cols:
        q, _ = np.linalg.qr(np.hstack([u[:, :rank], np.eye(rows)]))
        u[:, rank:] = q[:, rank:cols]
    return u


def jacobi_svd(
    a: npt.ArrayLike, tol: float = 1e-13, max_sweeps: int = 60
) -> tuple[Matrix, Vector, Matrix]:
    """Thin SVD by one-sided Jacobi rotations.

    Columns of a working copy are rotated pairwise until all of them
    are mutually orthogonal; their norms are the singular values.

    Args:
        a: Matrix to decompose.
        tol: Relative orthogonality tolerance between column pairs.
        max_sweeps: Upper bound on sweeps over all pairs.

    Returns:
        U (rows x k), S (k, non-increasing) and V (cols x k),
        with k = min(rows, cols) and a = U diag(S) V^T.
    """
    a = as_matrix(a)
    rows, cols = a.shape
    if rows < cols:
        v, s, u = jacobi_svd(a.T, tol, max_sweeps)
        return u, s, v

    work = a.copy()
    v = np.eye(cols)
    for _ in range(max_sweeps):
        rotated = False
        for p in range(cols - 1):
            for q in range(p + 1, cols):
                alpha = work[:, p] @ work[:, p]
                beta = work[:, q] @ work[:, q]
                gamma = work[:, p] @ work[:, q]
                if gamma == 0.0 or abs(gamma) <= tol * np.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = np.copysign(1.0, zeta) / (abs(zeta) + np.sqrt(1.0 + zeta**2))
                c = 1.0 / np.sqrt(1.0 + t**2)
                s = c * t
                col_p = work[:, p].copy()
                work[:, p] = c * col_p - s * work[:, q]
                work[:, q] = s * col_p + c * work[:, q]
                v_p = v[:, p].copy()
                v[:, p] = c * v_p - s * v[:, q]
                v[:, q] = s * v_p + c * v[:, q]
        if not rotated:
            break

    sigma = np.sqrt(np.sum(work**2, axis=0))
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    work = work[:, order]
    v = v[:, order]
    return _complete_left(work, sigma), sigma, v


def truncated_svd(
    a: npt.ArrayLike, r: int, method: str = "jacobi"
) -> tuple[Matrix, Vector, Matrix]:
    """Best rank r factorization of a matrix.

    Args:
        a: Matrix to approximate.
        r: Target rank, 1 <= r <= min(a.shape).
        method: "jacobi" (one-sided Jacobi) or "lapack" (numpy.linalg.svd).

    Returns:
        U_r (rows x r), S_r (r) and V_r (cols x r).
    """
    a = as_matrix(a)
    if not 1 <= r <= min(a.shape):
        raise ValueError(f"rank {r} out of range for shape {a.shape}")
    if method == "jacobi":
        u, s, v = jacobi_svd(a)
    elif method == "lapack":
        u, s, vt = np.linalg.svd(a, full_matrices=False)
        v = vt.T
    else:
        raise ValueError(f"unknown SVD method {method!r}")
    return u[:, :r], s[:r], v[:, :r]


def low_rank(u: Matrix, s: Vector, v: Matrix) -> Matrix:
    """Rebuild U diag(S) V^T."""
    return (u * s) @ v.T


def frobenius_norm(a: npt.ArrayLike) -> float:
    """Frobenius norm of a matrix.

    Args:
        a: Matrix.

    Returns:
        Square root of the sum of squared entries.
    """
    a = np.asarray(a, dtype=np.float64)
    return float(np.sqrt(np.sum(a**2)))
