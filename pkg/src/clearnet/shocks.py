"""System-wide shock scenarios that drive every bank into default.

Two constructions are provided. The *full-default* shock interpolates each
bank's post-shock assets into the open interval where it is insolvent even
if everyone else pays in full, so the clearing iteration converges in a
single round. The *relaxed* constructions aim for the milder regime where
some banks fail only through contagion: a stepwise search over shrinking
asset levels, and a self-referential interpolation whose fixed point has a
closed form that the clearing solver then certifies.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import NDArray

from ._linalg import solve_checked
from .centrality import printed_relaxed_closed_form
from .clearing import ClearingSolution, fictitious_default_sequence
from .errors import (
    InvalidInterpolation,
    NotAllDefaulted,
    PreconditionViolated,
    SearchExhausted,
    SelfConsistencyFailed,
)
from .net_model import (
    ClearingParams,
    FinancialSystem,
    broadcast_rate,
    relative_claims,
    total_liabilities,
)

__all__ = [
    "ShockKind",
    "ShockScenario",
    "RelaxedShockCertificate",
    "full_default_shock",
    "shocked_system",
    "relaxed_shock_search",
    "relaxed_interpolated_shock",
]


class ShockKind(Enum):
    FULL_DEFAULT = "full_default"
    RELAXED = "relaxed"


@dataclass(frozen=True)
class ShockScenario:
    """A shock vector ``s`` and the asset vector ``a = o + s`` it produces.

    ``interpolation`` is the coefficient that places the post-shock assets
    inside the admissible interval (for searched scenarios it is the
    effective value ``1 - k / max_steps`` at the accepted step ``k``).
    ``search_steps``/``max_steps`` are populated by the stepwise search
    only. The sink keeps its pre-shock assets in every scenario.
    """

    shock: NDArray
    interpolation: float | NDArray
    kind: ShockKind
    post_shock_assets: NDArray
    search_steps: int | None = None
    max_steps: int | None = None

    @property
    def assets_positive(self) -> bool:
        """Whether every node kept strictly positive assets (the sufficient
        condition for a unique clearing vector)."""
        return bool(np.all(self.post_shock_assets > 0))


@dataclass(frozen=True)
class RelaxedShockCertificate:
    """Outcome of the self-referential relaxed construction.

    ``candidate`` is the closed-form payment vector the construction is
    built around; ``clearing`` is the full solver's answer under the
    resulting shock; ``candidate_gap`` is their max-norm disagreement over
    banks. ``printed_payments``/``printed_gap`` evaluate the alternative
    closed form kept for comparison (see
    :func:`clearnet.centrality.printed_relaxed_closed_form`).
    """

    scenario: ShockScenario
    candidate: NDArray
    clearing: ClearingSolution
    candidate_gap: float
    printed_payments: NDArray
    printed_gap: float


def _validate_interpolation(m, n: int) -> NDArray:
    vec = broadcast_rate(m, n, "m")
    if np.any(vec <= 0) or np.any(vec >= 1):
        raise InvalidInterpolation(
            f"interpolation coefficient must lie strictly inside (0, 1), got {m}"
        )
    return vec


def _require_interbank_margin(l: NDArray, cl: NDArray, n_banks: int) -> None:
    bad = np.flatnonzero(cl[:n_banks] >= l[:n_banks])
    if bad.size:
        raise PreconditionViolated(
            "bank(s) %s have interbank claims covering their total liabilities "
            "((C l)_i >= l_i); no asset shock can put them in fundamental default"
            % bad.tolist()
        )


def full_default_shock(system: FinancialSystem, m) -> ShockScenario:
    """Shock placing every bank strictly inside fundamental default.

    With interpolation ``m`` the shock is ``s_i = m l_i - m (C l)_i - o_i``
    per bank (the sink is untouched), so post-shock assets land at
    ``a_i = m (l_i - (C l)_i)``: positive, but too small to stay solvent
    even when every counterparty pays in full.
    """
    n = system.node_count
    m_vec = _validate_interpolation(m, n)
    l = total_liabilities(system)
    cl = relative_claims(system).matrix @ l
    _require_interbank_margin(l, cl, system.n_banks)

    a = system.pre_shock_assets.copy()
    b = system.banks
    a[b] = m_vec[b] * (l[b] - cl[b])
    shock = a - system.pre_shock_assets

    # both hold by construction; a violation means corrupted inputs
    if np.any(a[b] <= 0) or np.any(a[b] + cl[b] >= l[b]):
        raise PreconditionViolated("shock left some bank outside the default interval")

    return ShockScenario(
        shock=shock,
        interpolation=m if np.isscalar(m) else m_vec,
        kind=ShockKind.FULL_DEFAULT,
        post_shock_assets=a,
    )


def shocked_system(system: FinancialSystem, scenario: ShockScenario) -> FinancialSystem:
    """The same network with the scenario's post-shock assets installed."""
    return system.with_external_assets(scenario.post_shock_assets)


def _search_assets(l, cl, o, banks, k: int, max_steps: int) -> NDArray:
    a = o.copy()
    frac = 1.0 - k / max_steps
    # floor at zero: banks whose claims exceed their liabilities would get
    # negative assets from the formula and can then only surface in the
    # exhaustion diagnostics
    a[banks] = np.maximum(frac * (l[banks] - cl[banks]), 0.0)
    return a


def relaxed_shock_search(
    system: FinancialSystem,
    params: ClearingParams,
    max_steps: int = 1000,
    method: str = "linear",
) -> ShockScenario:
    """Smallest shock on a stepwise grid that defaults every node.

    Step ``k`` scales every bank's assets to ``(1 - k/max_steps)`` of its
    fundamental-default headroom ``l_i - (C l)_i``, runs the full clearing
    model, and accepts the first ``k`` whose solution flags every node.
    Later steps only shrink assets, so default sets grow monotonically in
    ``k``; ``method='bisect'`` exploits that and returns the same minimal
    ``k`` as the linear scan.

    Raises
    ------
    SearchExhausted
        If even the most severe step leaves some bank solvent; the
        exception carries those bank indices.
    """
    if max_steps < 1:
        raise ValueError(f"max_steps must be at least 1, got {max_steps}")
    if method not in ("linear", "bisect"):
        raise ValueError(f"unknown search method {method!r}")

    l = total_liabilities(system)
    cl = relative_claims(system).matrix @ l
    o = system.pre_shock_assets
    banks = system.banks

    def defaults_at(k: int):
        a = _search_assets(l, cl, o, banks, k, max_steps)
        solution = fictitious_default_sequence(
            system.with_external_assets(a), params
        )
        return solution.defaults.flags, a

    def scenario_at(k: int, a: NDArray) -> ShockScenario:
        return ShockScenario(
            shock=a - o,
            interpolation=1.0 - k / max_steps,
            kind=ShockKind.RELAXED,
            post_shock_assets=a,
            search_steps=k,
            max_steps=max_steps,
        )

    if method == "linear":
        for k in range(1, max_steps + 1):
            flags, a = defaults_at(k)
            if flags.all():
                return scenario_at(k, a)
        raise SearchExhausted(
            f"banks {np.flatnonzero(~flags).tolist()} stayed solvent at "
            f"k = max_steps = {max_steps}",
            solvent_banks=np.flatnonzero(~flags),
        )

    flags, a = defaults_at(max_steps)
    if not flags.all():
        raise SearchExhausted(
            f"banks {np.flatnonzero(~flags).tolist()} stayed solvent at "
            f"k = max_steps = {max_steps}",
            solvent_banks=np.flatnonzero(~flags),
        )
    lo, hi, best = 1, max_steps, (max_steps, a)
    while lo <= hi:
        mid = (lo + hi) // 2
        flags, a = defaults_at(mid)
        if flags.all():
            best = (mid, a)
            hi = mid - 1
        else:
            lo = mid + 1
    return scenario_at(best[0], best[1])


def relaxed_interpolated_shock(
    system: FinancialSystem,
    params: ClearingParams,
    m,
    tol: float = 1e-8,
) -> RelaxedShockCertificate:
    """Self-referential shock ``s_i = m l_i - m (C p)_i - o_i`` resolved in
    closed form and certified by the clearing solver.

    Substituting the implied assets ``a = m (l - C p)`` into the all-default
    solution ``p = (I - r C)^{-1} a`` and collecting terms gives the
    candidate ``q = m (I - (r - m) C)^{-1} l``. The scenario installs
    ``a = m (l - C q)``, runs the full model, and certifies that (i) the
    clearing vector reproduces ``q`` on banks within ``tol`` and (ii) every
    node is in default. The alternative closed form
    ``(I - (r-m)C)^{-1} m (l + r C l)`` is evaluated alongside and its gap
    reported as data, not a failure.
    """
    n = system.node_count
    m_vec = _validate_interpolation(m, n)
    r_vec = params.recovery_vector(n)
    l = total_liabilities(system)
    C = relative_claims(system).matrix

    A = np.eye(n) - (r_vec - m_vec)[:, None] * C
    q = m_vec * solve_checked(A, l, "relaxed-shock candidate")

    a = system.pre_shock_assets.copy()
    b = system.banks
    a[b] = m_vec[b] * (l[b] - (C @ q)[b])
    if np.any(a[b] <= 0):
        raise PreconditionViolated(
            "candidate assets are not positive for banks "
            f"{np.flatnonzero(a[b] <= 0).tolist()}"
        )
    scenario = ShockScenario(
        shock=a - system.pre_shock_assets,
        interpolation=m if np.isscalar(m) else m_vec,
        kind=ShockKind.RELAXED,
        post_shock_assets=a,
    )

    solution = fictitious_default_sequence(shocked_system(system, scenario), params)
    if not solution.defaults.flags.all():
        raise NotAllDefaulted(
            "banks %s stayed solvent under the interpolated shock"
            % np.flatnonzero(~solution.defaults.flags).tolist()
        )
    gap = float(np.abs(solution.payments - q)[b].max(initial=0.0))
    if gap > tol:
        raise SelfConsistencyFailed(
            f"clearing vector differs from the candidate by {gap:.3e} (tol {tol:.1e})"
        )

    printed = printed_relaxed_closed_form(system, params.r, m)
    printed_gap = float(np.abs(solution.payments - printed)[b].max(initial=0.0))
    return RelaxedShockCertificate(
        scenario=scenario,
        candidate=q,
        clearing=solution,
        candidate_gap=gap,
        printed_payments=printed,
        printed_gap=printed_gap,
    )
