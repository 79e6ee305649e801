"""Shared dense-solve helper with an explicit pivot check."""
from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from .errors import SingularSystem

PIVOT_TOL = 1e-14


def lu_factor_checked(A: NDArray, context: str):
    """LU factorization with partial pivoting; raises ``SingularSystem``
    when a pivot falls below ``1e-14`` (scipy's own warning is silenced
    because the condition is handled here)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
    if np.min(np.abs(np.diagonal(lu))) < PIVOT_TOL:
        raise SingularSystem(f"{context}: matrix is numerically singular")
    return lu, piv


def solve_checked(A: NDArray, b: NDArray, context: str) -> NDArray:
    if A.shape[0] == 0:
        return np.zeros_like(np.asarray(b, dtype=float))
    lu, piv = lu_factor_checked(A, context)
    return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)
