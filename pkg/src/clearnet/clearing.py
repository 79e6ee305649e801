"""Clearing payment vectors for obligation networks with recovery rates.

Solvent banks pay their liabilities in full; a defaulted bank pays the
recovered value of its assets: ``r`` times what it collects from other
banks plus ``r_a`` times its external assets. A clearing vector is a fixed
point of that map. Two independent routes to the fixed point live here:

* the default-set iteration (start from full payment, freeze the current
  default set, solve the reduced linear system, repeat until the set is
  stable), which terminates in at most ``N`` outer rounds, and
* a plain fixed-point iteration of the map itself, kept as a slow,
  assumption-free oracle for cross-checking every closed-form result.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from .errors import (
    DivisionByZero,
    NoConvergence,
    OracleNoConvergence,
)
from ._linalg import lu_factor_checked
from .net_model import (
    ClearingParams,
    DefaultIndicator,
    FinancialSystem,
    default_indicator,
    relative_claims,
    total_liabilities,
)

ORACLE_STEP_TOL = 1e-12
ORACLE_MAX_ITER = 10**6

__all__ = [
    "ClearingSolution",
    "apply_clearing_map",
    "solve_given_defaults",
    "fictitious_default_sequence",
    "picard_clearing_oracle",
    "systemic_loss",
    "capitalization_adjusted_loss",
]


@dataclass(frozen=True)
class ClearingSolution:
    """Converged clearing vector plus the trail the solver took.

    ``payments`` includes a sink entry computed by the same formula as the
    banks'; it carries no economic meaning and is excluded from every norm
    and loss measure. ``residual`` is the max-norm of ``f(p) - p`` over
    bank entries. ``uniqueness_ok`` records whether every node had strictly
    positive external assets (the sufficient condition for uniqueness).
    """

    payments: NDArray
    defaults: DefaultIndicator
    default_history: tuple[DefaultIndicator, ...]
    iterations: int
    residual: float
    uniqueness_ok: bool = True


def _scaled_claims(params: ClearingParams, system: FinancialSystem, C: NDArray) -> NDArray:
    """Row-scaled matrix diag(r) @ C (plain r * C for scalar recovery)."""
    r = params.recovery_vector(system.node_count)
    return r[:, None] * C


def apply_clearing_map(
    system: FinancialSystem, params: ClearingParams, p: NDArray
) -> NDArray:
    """One application of the clearing map to a payment vector.

    Banks solvent under ``p`` pay their full liabilities; defaulted banks
    (and the sink, defaulted by convention) pay the recovered value of
    their claims on others -- valued at ``p`` for defaulted counterparties
    and at ``l`` for solvent ones -- plus recovered external assets.
    """
    p = np.asarray(p, dtype=float)
    l = total_liabilities(system)
    C = relative_claims(system).matrix
    flags = default_indicator(system, p).flags
    mixed = np.where(flags, p, l)
    rC = _scaled_claims(params, system, C)
    paid = rC @ mixed + params.r_a * system.external_assets
    return np.where(flags, paid, l)


def solve_given_defaults(
    system: FinancialSystem, params: ClearingParams, defaults: DefaultIndicator
) -> NDArray:
    """Fixed point of the clearing map with the default set frozen.

    Solvent nodes pay ``l`` directly; the linear solve is restricted to the
    rows and columns of defaulted nodes, which is what keeps the cost low
    when only a few banks fail. Dense LU with partial pivoting on the
    reduced block.

    Raises
    ------
    SingularSystem
        If the reduced matrix has a pivot below ``1e-14``; with a sink
        node present (or ``r < 1``) this signals a convention violation.
    """
    l = total_liabilities(system)
    C = relative_claims(system).matrix
    rC = _scaled_claims(params, system, C)
    idx = np.flatnonzero(defaults.flags)

    p = l.copy()
    if idx.size == 0:
        return p

    A = np.eye(idx.size) - rC[np.ix_(idx, idx)]
    b = (params.r_a * system.external_assets + rC @ l - l)[idx]
    lu, piv = lu_factor_checked(
        A, f"reduced system on {idx.size} defaulted node(s)"
    )
    p[idx] += scipy.linalg.lu_solve((lu, piv), b, check_finite=False)
    return p


def _bank_residual(system: FinancialSystem, params: ClearingParams, p: NDArray) -> float:
    gap = np.abs(apply_clearing_map(system, params, p) - p)[system.banks]
    return float(gap.max(initial=0.0))


def fictitious_default_sequence(
    system: FinancialSystem, params: ClearingParams
) -> ClearingSolution:
    """Clearing vector via the default-set iteration started at ``p = l``.

    Each round freezes the current default set, solves the reduced system,
    and re-evaluates defaults under the new payments; it stops as soon as
    the set is stable. The default set can only grow, so at most ``N``
    rounds are needed; anything past that is a bug and raises loudly.
    """
    N = system.node_count
    l = total_liabilities(system)
    uniqueness_ok = bool(np.all(system.external_assets > 0))

    current = default_indicator(system, l)
    history = [current]
    p = l
    for iteration in range(1, N + 2):
        p = solve_given_defaults(system, params, current)
        nxt = default_indicator(system, p)
        history.append(nxt)
        if nxt == current:
            # rounding guard only: the converged vector is within [0, l]
            # on banks up to machine noise
            p = p.copy()
            p[system.banks] = np.clip(p[system.banks], 0.0, l[system.banks])
            p.setflags(write=False)
            return ClearingSolution(
                payments=p,
                defaults=nxt,
                default_history=tuple(history),
                iterations=iteration,
                residual=_bank_residual(system, params, p),
                uniqueness_ok=uniqueness_ok,
            )
        current = nxt
    raise NoConvergence(
        f"default set still changing after {N + 1} rounds on {N} nodes"
    )


def picard_clearing_oracle(
    system: FinancialSystem,
    params: ClearingParams,
    p0: NDArray | None = None,
    step_tol: float = ORACLE_STEP_TOL,
    max_iter: int = ORACLE_MAX_ITER,
) -> NDArray:
    """Brute-force clearing vector: iterate the map until it stops moving.

    Starts from full payment (or ``p0``) and applies the clearing map until
    the max-norm step over banks drops below ``step_tol * max(1, max l)``.
    Deliberately knows nothing about default sets or linear solves, so it
    serves as the independent ground truth for the closed-form routes.
    """
    l = total_liabilities(system)
    scale = max(1.0, float(l.max(initial=0.0)))
    p = l.copy() if p0 is None else np.asarray(p0, dtype=float).copy()
    banks = system.banks
    for _ in range(max_iter):
        f = apply_clearing_map(system, params, p)
        step = np.abs(f - p)[banks]
        if float(step.max(initial=0.0)) <= step_tol * scale:
            return f
        p = f
    raise OracleNoConvergence(
        f"fixed-point iteration still moving after {max_iter} steps"
    )


def systemic_loss(solution: ClearingSolution, l: NDArray) -> NDArray:
    """Payment shortfall ``l - p`` per node; the sink entry is 0 by convention."""
    sigma = np.asarray(l, dtype=float) - solution.payments
    sigma[-1] = 0.0
    return np.maximum(sigma, 0.0)


def capitalization_adjusted_loss(
    solution: ClearingSolution, system: FinancialSystem
) -> NDArray:
    """Losses rescaled by shock size relative to initial financial health.

    Multiplies each bank's shortfall by ``s_i / (o_i + (C l)_i)``, where
    ``s = a - o`` is the shock that was applied. Requires the system to
    carry post-shock assets; the sink entry is reported as 0.
    """
    l = total_liabilities(system)
    C = relative_claims(system).matrix
    shock = system.external_assets - system.pre_shock_assets
    denom = system.pre_shock_assets + C @ l
    zero = denom[system.banks] == 0
    if np.any(zero):
        i = int(np.argmax(zero))
        raise DivisionByZero(
            f"bank {i} has zero pre-shock assets and no interbank claims"
        )
    sigma = systemic_loss(solution, l)
    out = np.zeros_like(sigma)
    b = system.banks
    out[b] = sigma[b] * shock[b] / denom[b]
    return out
