"""Financial-system data model: an obligation network with a sink node.

A system holds ``N`` nodes: ``N - 1`` banks plus one sink node, stored
last, that collects every liability owed outside the banking system
(deposits, bonds held by households, ...). The sink owes nothing and is
treated as defaulted by convention, which is what makes the clearing
algebra well posed for any recovery rate.

Everything in this module is immutable after construction and every
operation is a pure function of its inputs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import (
    DimensionMismatch,
    NegativeEntry,
    NonzeroDiagonal,
    NonzeroSinkRow,
)

# Relative half-width of the solvency boundary band: a bank whose equity is
# within -DEFAULT_BAND * max(1, l_i) of zero still counts as solvent, so
# floating-point noise cannot flip the default flag at the boundary.
DEFAULT_BAND = 1e-12

__all__ = [
    "DEFAULT_BAND",
    "FinancialSystem",
    "RelativeClaims",
    "DefaultIndicator",
    "ClearingParams",
    "broadcast_rate",
    "build_system",
    "total_liabilities",
    "relative_claims",
    "equity",
    "default_indicator",
    "fundamental_defaults",
]


def _readonly(a: NDArray) -> NDArray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class FinancialSystem:
    """Liability network plus asset endowments.

    Attributes
    ----------
    node_count : int
        Number of nodes ``N`` (banks plus the sink, which is index ``N-1``).
    liabilities : (N, N) ndarray
        ``liabilities[i, j]`` is what node ``i`` owes node ``j``. The sink
        row is all zeros and the diagonal is zero.
    external_assets : (N,) ndarray
        Current external assets ``a`` (post-shock when a shock was applied).
    pre_shock_assets : (N,) ndarray
        Asset values ``o`` before any shock.
    """

    node_count: int
    liabilities: NDArray
    external_assets: NDArray
    pre_shock_assets: NDArray

    @property
    def sink(self) -> int:
        return self.node_count - 1

    @property
    def n_banks(self) -> int:
        return self.node_count - 1

    @property
    def banks(self) -> slice:
        """Slice selecting the bank entries of any length-N vector."""
        return slice(0, self.node_count - 1)

    def with_external_assets(self, assets: NDArray) -> "FinancialSystem":
        """Copy of the system with a new external-asset vector ``a``."""
        assets = np.asarray(assets, dtype=float)
        if assets.shape != (self.node_count,):
            raise DimensionMismatch(
                f"external assets have shape {assets.shape}, "
                f"expected ({self.node_count},)"
            )
        if np.any(assets < 0):
            i = int(np.argmax(assets < 0))
            raise NegativeEntry(f"external_assets[{i}] = {assets[i]} is negative")
        return FinancialSystem(
            node_count=self.node_count,
            liabilities=self.liabilities,
            external_assets=_readonly(assets),
            pre_shock_assets=self.pre_shock_assets,
        )


@dataclass(frozen=True)
class RelativeClaims:
    """Column-normalized claims matrix ``C``.

    ``matrix[i, j]`` is the share of node ``j``'s total liabilities owed to
    node ``i``; columns of nodes with no liabilities are zero, so ``C @ x``
    values a payment vector ``x`` for the creditors.
    """

    matrix: NDArray


@dataclass(frozen=True, eq=False)
class DefaultIndicator:
    """Boolean default flags, one per node; the sink is always flagged."""

    flags: NDArray

    def __eq__(self, other) -> bool:
        if not isinstance(other, DefaultIndicator):
            return NotImplemented
        return bool(np.array_equal(self.flags, other.flags))

    def as_diagonal(self) -> NDArray:
        """The 0/1 diagonal matrix D with D[i, i] = 1 for defaulted nodes."""
        return np.diag(self.flags.astype(float))

    def issubset(self, other: "DefaultIndicator") -> bool:
        return bool(np.all(other.flags[self.flags]))

    @property
    def count(self) -> int:
        return int(self.flags.sum())


def broadcast_rate(value, n: int, name: str) -> NDArray:
    """Expand a scalar-or-vector rate (recovery, interpolation) to length n."""
    vec = np.asarray(value, dtype=float)
    if vec.ndim == 0:
        vec = np.full(n, float(vec))
    if vec.shape != (n,):
        raise DimensionMismatch(f"{name} must be a scalar or length-{n} vector")
    return vec


@dataclass(frozen=True)
class ClearingParams:
    """Recovery rates used by the clearing map.

    ``r`` applies to interbank claims on a defaulted bank and may be a
    scalar or a per-node vector (applied as a diagonal matrix); ``r_a``
    applies to external assets and defaults to 1.
    """

    r: float | NDArray = 1.0
    r_a: float = 1.0

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        if np.any(r < 0) or np.any(r > 1):
            raise ValueError(f"recovery rate r must lie in [0, 1], got {self.r}")
        if not 0.0 <= self.r_a <= 1.0:
            raise ValueError(f"recovery rate r_a must lie in [0, 1], got {self.r_a}")

    def recovery_vector(self, node_count: int) -> NDArray:
        return broadcast_rate(self.r, node_count, "r")


def build_system(
    liabilities,
    pre_shock_assets,
    external_assets=None,
    *,
    sink_liabilities=None,
    sink_assets: float = 1.0,
) -> FinancialSystem:
    """Validate raw inputs and assemble a :class:`FinancialSystem`.

    ``liabilities`` either already contains the sink (last row/column) or,
    when ``sink_liabilities`` is given, holds only the bank block; in that
    case a sink column is appended from ``sink_liabilities`` together with
    a zero sink row, and the asset vectors are extended by ``sink_assets``.

    ``external_assets`` defaults to ``pre_shock_assets`` (no shock yet).

    Raises
    ------
    DimensionMismatch, NegativeEntry, NonzeroDiagonal, NonzeroSinkRow
        Each names the offending index.
    """
    L = np.asarray(liabilities, dtype=float)
    o = np.asarray(pre_shock_assets, dtype=float)

    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise DimensionMismatch(f"liability matrix must be square, got shape {L.shape}")

    if sink_liabilities is not None:
        ext = np.asarray(sink_liabilities, dtype=float)
        n = L.shape[0]
        if ext.shape != (n,):
            raise DimensionMismatch(
                f"sink_liabilities has shape {ext.shape}, expected ({n},)"
            )
        full = np.zeros((n + 1, n + 1))
        full[:n, :n] = L
        full[:n, n] = ext
        L = full
        o = np.concatenate([o, [float(sink_assets)]])
        if external_assets is not None:
            external_assets = np.concatenate(
                [np.asarray(external_assets, dtype=float), [float(sink_assets)]]
            )

    N = L.shape[0]
    if o.shape != (N,):
        raise DimensionMismatch(
            f"pre_shock_assets has shape {o.shape}, expected ({N},)"
        )
    a = o if external_assets is None else np.asarray(external_assets, dtype=float)
    if a.shape != (N,):
        raise DimensionMismatch(
            f"external_assets has shape {a.shape}, expected ({N},)"
        )

    if not (np.all(np.isfinite(L)) and np.all(np.isfinite(o)) and np.all(np.isfinite(a))):
        raise DimensionMismatch("liabilities and assets must be finite")

    if np.any(L < 0):
        i, j = np.unravel_index(int(np.argmin(L)), L.shape)
        raise NegativeEntry(f"liabilities[{i}][{j}] = {L[i, j]} is negative")
    diag = np.diagonal(L)
    if np.any(diag != 0):
        i = int(np.argmax(diag != 0))
        raise NonzeroDiagonal(f"node {i} has a self-liability of {diag[i]}")
    if np.any(L[N - 1] != 0):
        j = int(np.argmax(L[N - 1] != 0))
        raise NonzeroSinkRow(f"sink owes {L[N - 1, j]} to node {j}")
    if np.any(o < 0):
        i = int(np.argmax(o < 0))
        raise NegativeEntry(f"pre_shock_assets[{i}] = {o[i]} is negative")
    if o[N - 1] <= 0:
        raise NegativeEntry(f"sink pre_shock_assets must be positive, got {o[N - 1]}")
    if np.any(a < 0):
        i = int(np.argmax(a < 0))
        raise NegativeEntry(f"external_assets[{i}] = {a[i]} is negative")

    return FinancialSystem(
        node_count=N,
        liabilities=_readonly(L),
        external_assets=_readonly(a),
        pre_shock_assets=_readonly(o),
    )


def total_liabilities(system: FinancialSystem) -> NDArray:
    """Row sums ``l_i`` of the liability matrix; zero for the sink."""
    return system.liabilities.sum(axis=1)


def relative_claims(system: FinancialSystem) -> RelativeClaims:
    """Column-normalized claims matrix ``C[i, j] = L[j, i] / l_j``.

    Columns of nodes without liabilities (including the sink) are zero.
    """
    L = system.liabilities
    l = total_liabilities(system)
    C = np.zeros_like(L)
    nz = l > 0
    C[:, nz] = L[nz].T / l[nz]
    return RelativeClaims(matrix=_readonly(C))


def equity(system: FinancialSystem, payments: NDArray) -> NDArray:
    """Balance-sheet equity ``a + C p - l`` under a payment vector ``p``."""
    p = np.asarray(payments, dtype=float)
    C = relative_claims(system).matrix
    return system.external_assets + C @ p - total_liabilities(system)


def default_indicator(system: FinancialSystem, payments: NDArray) -> DefaultIndicator:
    """Default flags under a payment vector.

    A bank defaults when its equity is below the (tiny) tolerance band
    around zero, so exact boundary solvency counts as solvent; the sink is
    flagged by convention.
    """
    l = total_liabilities(system)
    eq = equity(system, payments)
    flags = eq < -DEFAULT_BAND * np.maximum(1.0, l)
    flags[system.sink] = True
    flags.setflags(write=False)
    return DefaultIndicator(flags=flags)


def fundamental_defaults(system: FinancialSystem) -> DefaultIndicator:
    """Banks insolvent even when every counterparty pays in full (p = l)."""
    return default_indicator(system, total_liabilities(system))
