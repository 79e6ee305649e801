"""Katz-type centrality and the closed-form clearing expressions.

Under a system-wide shock the loss vector ``l - p`` of the clearing model
solves ``(I - r C) sigma = beta`` with a beta built from liabilities and
interbank claims -- the same functional form as a Katz centrality, with the
claims matrix playing the role of the (attenuated) adjacency matrix. This
module computes that generalized measure, the classic Katz special case,
and the closed-form payment vectors the equivalence checks compare against.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ._linalg import solve_checked
from .errors import InvalidInterpolation, SingularSystem
from .net_model import (
    ClearingParams,
    FinancialSystem,
    broadcast_rate,
    relative_claims,
    total_liabilities,
)
from .spectral import INVERTIBILITY_MARGIN, spectral_radius

__all__ = [
    "CentralityResult",
    "beta_vector",
    "generalized_katz",
    "standard_katz",
    "closed_form_full_shock",
    "printed_relaxed_closed_form",
]


@dataclass(frozen=True)
class CentralityResult:
    """Centrality vector ``sigma`` solving ``(I - r C) sigma = beta``.

    ``sigma``'s sink entry is reported as zero by convention (the claims
    matrix stores the sink last and its column is zero, so bank entries are
    unaffected); ``residual`` is the max-norm defect of the linear system
    over bank rows.
    """

    sigma: NDArray
    beta: NDArray
    r: float | NDArray
    m: float | NDArray | None
    residual: float


def _validate_m(m, n: int) -> NDArray:
    vec = broadcast_rate(m, n, "m")
    if np.any(vec <= 0) or np.any(vec >= 1):
        raise InvalidInterpolation(
            f"interpolation coefficient must lie strictly inside (0, 1), got {m}"
        )
    return vec


def beta_vector(system: FinancialSystem, r, m) -> NDArray:
    """Source term ``beta_i = (1 - m) l_i - (r - m) (C l)_i`` per bank.

    The sink entry is zero. For ``r = m`` this collapses to
    ``(1 - r) l_i``. ``r`` and ``m`` may be scalars or per-node vectors.
    """
    n = system.node_count
    r_vec = broadcast_rate(r, n, "r")
    m_vec = _validate_m(m, n)
    l = total_liabilities(system)
    cl = relative_claims(system).matrix @ l
    beta = (1.0 - m_vec) * l - (r_vec - m_vec) * cl
    beta[system.sink] = 0.0
    return beta


def generalized_katz(
    C: NDArray, r, beta: NDArray, m=None, radius: float | None = None
) -> CentralityResult:
    """Solve ``(I - r C) sigma = beta`` by a direct linear solve.

    ``C`` is a full claims matrix with the sink stored last; the sink entry
    of the result is zeroed by convention. The radius precondition
    ``r * rho(C) < 1`` is checked up front (pass ``radius`` to reuse a
    previously computed estimate).
    """
    C = np.asarray(C, dtype=float)
    n = C.shape[0]
    r_vec = broadcast_rate(r, n, "r")
    beta = np.asarray(beta, dtype=float)

    rho = spectral_radius(C) if radius is None else float(radius)
    if float(np.max(r_vec)) * rho >= 1.0 - INVERTIBILITY_MARGIN:
        raise SingularSystem(
            f"r * rho(C) = {float(np.max(r_vec)) * rho:.6f} is not safely below 1"
        )
    sigma = solve_checked(np.eye(n) - r_vec[:, None] * C, beta, "centrality solve")
    sigma[-1] = 0.0
    defect = np.abs(sigma - r_vec * (C @ sigma) - beta)[:-1]
    return CentralityResult(
        sigma=sigma,
        beta=beta,
        r=r,
        m=m,
        residual=float(defect.max(initial=0.0)),
    )


def standard_katz(adjacency: NDArray, alpha: float) -> NDArray:
    """Textbook Katz centrality ``(I - alpha A)^{-1} 1``.

    ``A[i, j] = 1`` means node ``j`` feeds node ``i`` (the same orientation
    as the claims matrix: debtor in the column, creditor in the row).
    """
    A = np.asarray(adjacency, dtype=float)
    n = A.shape[0]
    if float(alpha) * spectral_radius(A) >= 1.0 - INVERTIBILITY_MARGIN:
        raise SingularSystem(
            f"alpha = {alpha} is not safely below 1 / rho(adjacency)"
        )
    return solve_checked(np.eye(n) - float(alpha) * A, np.ones(n), "Katz solve")


def closed_form_full_shock(system: FinancialSystem, params: ClearingParams, m) -> NDArray:
    """One-round clearing vector under the full-default shock.

    Evaluates ``p = (I - r C)^{-1} ((r - m) C l - (1 - m) l) + l``, which is
    algebraically ``(I - r C)^{-1} a`` with ``a = m (l - C l)`` -- the
    all-defaulted solve. Bank entries match the clearing solver under the
    corresponding shock; the sink entry follows this formula and carries no
    meaning.
    """
    n = system.node_count
    r_vec = params.recovery_vector(n)
    m_vec = _validate_m(m, n)
    l = total_liabilities(system)
    C = relative_claims(system).matrix
    cl = C @ l
    rhs = (r_vec - m_vec) * cl - (1.0 - m_vec) * l
    return solve_checked(np.eye(n) - r_vec[:, None] * C, rhs, "full-shock form") + l


def printed_relaxed_closed_form(system: FinancialSystem, r, m) -> NDArray:
    """Alternative closed form ``(I - (r - m) C)^{-1} m (l + r C l)``.

    Kept verbatim for comparison against the certified relaxed-shock
    candidate; the two disagree in general (for ``r = m`` this one reduces
    to ``r l + r^2 C l``), and the equivalence reports carry both residuals
    so the discrepancy is visible as data.
    """
    n = system.node_count
    r_vec = broadcast_rate(r, n, "r")
    m_vec = _validate_m(m, n)
    l = total_liabilities(system)
    C = relative_claims(system).matrix
    A = np.eye(n) - (r_vec - m_vec)[:, None] * C
    return solve_checked(A, m_vec * (l + r_vec * (C @ l)), "relaxed closed form")
