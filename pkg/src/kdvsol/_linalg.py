"""Small dense solves in extended precision.

The coupling systems and soliton matrices are tiny (N <= ~16) but feed
finite-difference checks that amplify rounding noise by 1/h^3, so the
solutions here are polished to long-double accuracy: LAPACK factorizes in
double, then a few iterative-refinement sweeps with long-double residuals
push the forward error down to the extended-precision level.
"""

from __future__ import annotations

import numpy as np

LD = np.longdouble
_LD_EPS = float(np.finfo(LD).eps)


def solve_refined(a_ld: np.ndarray, b_ld: np.ndarray, max_sweeps: int = 4) -> np.ndarray:
    """Solve a x = b for long-double a, b via double LU plus refinement."""
    a64 = a_ld.astype(np.float64)
    b64 = b_ld.astype(np.float64)
    x = np.linalg.solve(a64, b64).astype(LD)
    for _ in range(max_sweeps):
        r = b_ld - a_ld @ x
        dx = np.linalg.solve(a64, r.astype(np.float64)).astype(LD)
        x = x + dx
        if np.max(np.abs(dx)) <= 4.0 * _LD_EPS * max(1.0, float(np.max(np.abs(x)))):
            break
    return x


def cholesky_ld(a: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor of a symmetric positive-definite long-double matrix."""
    n = a.shape[0]
    low = np.zeros_like(a)
    for j in range(n):
        d = a[j, j] - np.dot(low[j, :j], low[j, :j])
        if not d > 0.0:
            raise np.linalg.LinAlgError("matrix is not positive definite")
        low[j, j] = np.sqrt(d)
        if j + 1 < n:
            low[j + 1 :, j] = (a[j + 1 :, j] - low[j + 1 :, :j] @ low[j, :j]) / low[j, j]
    return low


def cho_solve_ld(low: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve (L L^T) x = b given the lower factor."""
    n = low.shape[0]
    y = np.zeros_like(b)
    for i in range(n):
        y[i] = (b[i] - np.dot(low[i, :i], y[:i])) / low[i, i]
    x = np.zeros_like(b)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - np.dot(low[i + 1 :, i], x[i + 1 :])) / low[i, i]
    return x
