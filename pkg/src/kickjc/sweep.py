"""Parameter-grid sweeps over (kappa_tau, betaT).

Every cell is a pure function of the grid and its index, so cells can be evaluated in
any order and on any number of worker threads with identical results.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from kickjc.classical import (
    CONVENTIONS,
    IntegrationAbort,
    average_N2,
    canonical_initial_state,
)
from kickjc.floquet import (
    build_floquet,
    evolve,
    floquet_spectrum,
    h0_reference_basis,
    random_state_mean,
)
from kickjc.jc import SystemParams
from kickjc.sector import QuantumState, build_basis, observable_matrix

OK = "ok"
ABORTED = "integration-abort"
DELOCALIZED = "delocalized"
FAILED = "error"

SWEEP_OBSERVABLES = ("sz1_pop", "n1", "szsz")


def _check_axis(name: str, axis) -> tuple[float, ...]:
    values = tuple(float(v) for v in axis)
    if not values:
        raise ValueError(f"{name} must not be empty")
    if any(not math.isfinite(v) or v < 0 for v in values):
        raise ValueError(f"{name} values must be finite and >= 0")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError(f"{name} must be strictly ascending")
    return values


@dataclass(frozen=True)
class SweepGrid:
    """Axes of a 2-D sweep plus the parameters held fixed across it."""

    kappa_tau_axis: tuple[float, ...]
    betaT_axis: tuple[float, ...]
    beta: float = 1.0
    delta: float = 0.0
    L: int = 2
    n_kicks: int = 1000
    substeps: int | None = None
    kick_sign: int = -1
    classical_kick: str = "rotation"

    def __post_init__(self):
        object.__setattr__(self, "kappa_tau_axis", _check_axis("kappa_tau_axis", self.kappa_tau_axis))
        object.__setattr__(self, "betaT_axis", _check_axis("betaT_axis", self.betaT_axis))
        if self.betaT_axis[0] <= 0:
            raise ValueError("betaT_axis values must be > 0")
        if self.L < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")
        if self.n_kicks < 1:
            raise ValueError(f"n_kicks must be >= 1, got {self.n_kicks}")
        if self.substeps is not None and self.substeps < 1:
            raise ValueError(f"substeps must be >= 1, got {self.substeps}")
        if self.kick_sign not in (-1, 1):
            raise ValueError(f"kick_sign must be +1 or -1, got {self.kick_sign}")
        if self.classical_kick not in CONVENTIONS:
            raise ValueError(f"classical_kick must be one of {CONVENTIONS}, got {self.classical_kick!r}")
        SystemParams(beta=self.beta, delta=self.delta)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.kappa_tau_axis), len(self.betaT_axis)

    def params(self, i: int, j: int) -> SystemParams:
        return SystemParams.from_dimensionless(
            self.betaT_axis[j], self.kappa_tau_axis[i], self.delta / self.beta, self.beta
        )


@dataclass(frozen=True)
class SweepResult:
    """``values[i, j]`` belongs to ``kappa_tau_axis[i]`` and ``betaT_axis[j]``."""

    grid: SweepGrid
    values: np.ndarray
    status: np.ndarray = field(repr=False)

    def rows(self):
        for i, kt in enumerate(self.grid.kappa_tau_axis):
            for j, bt in enumerate(self.grid.betaT_axis):
                yield kt, bt, float(self.values[i, j]), str(self.status[i, j])


def run_cells(
    grid: SweepGrid, cell: Callable[[SweepGrid, int, int], tuple[float, str]], workers: int = 1
) -> SweepResult:
    """Evaluate ``cell(grid, i, j)`` for every cell; exceptions become NaN with status ``error``."""

    def safe(ij):
        try:
            return cell(grid, *ij)
        except Exception:  # noqa: BLE001 - one bad cell must not sink the sweep
            return math.nan, FAILED

    index = [(i, j) for i in range(grid.shape[0]) for j in range(grid.shape[1])]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(safe, index))
    else:
        out = [safe(ij) for ij in index]
    values = np.full(grid.shape, math.nan)
    status = np.empty(grid.shape, dtype=object)
    for (i, j), (v, s) in zip(index, out):
        values[i, j] = v
        status[i, j] = s
    return SweepResult(grid, values, status)


def quantum_participation_cell(grid: SweepGrid, i: int, j: int) -> tuple[float, str]:
    params = grid.params(i, j)
    basis = build_basis(grid.L)
    u_f = build_floquet(basis, params, grid.kick_sign)
    spec = floquet_spectrum(u_f, basis, params, h0_reference_basis(basis, params))
    return spec.mean_participation, OK


def classical_localization_cell(grid: SweepGrid, i: int, j: int) -> tuple[float, str]:
    params = grid.params(i, j)
    try:
        value = average_N2(
            canonical_initial_state(float(grid.L)), params, grid.n_kicks, grid.substeps, grid.classical_kick
        )
    except IntegrationAbort:
        return math.nan, ABORTED
    return value, OK


def sweep_quantum_participation(grid: SweepGrid, workers: int = 1) -> SweepResult:
    """Mean Floquet participation number per cell."""
    return run_cells(grid, quantum_participation_cell, workers)


def sweep_classical_localization(grid: SweepGrid, workers: int = 1) -> SweepResult:
    """Average ``N2`` over ``grid.n_kicks`` strobed kicks from the canonical initial condition."""
    return run_cells(grid, classical_localization_cell, workers)


@dataclass(frozen=True)
class ObservablesTable:
    """Long-time averages versus kick strength at fixed ``betaT``.

    ``averages[name][i]`` is the average of observable ``name`` at ``kappa_tau[i]``;
    ``haar[name]`` is the random-state reference value.
    """

    kappa_tau: np.ndarray
    betaT: float
    averages: dict[str, np.ndarray]
    mean_participation: np.ndarray
    haar: dict[str, float]


def sweep_observables_vs_kick(
    kappa_tau_axis,
    params: SystemParams,
    psi0: QuantumState | None = None,
    n_kicks: int = 2000,
    burn_in: int = 100,
    L: int = 2,
    kick_sign: int = -1,
    observables=SWEEP_OBSERVABLES,
    workers: int = 1,
) -> ObservablesTable:
    """Long-time observable averages (kicks ``burn_in..n_kicks``) and mean participation per kick strength.

    ``params.kappa_tau`` is ignored; the default initial state has all ``L`` photons in cavity 1.
    """
    axis = np.array(_check_axis("kappa_tau_axis", kappa_tau_axis))
    basis = build_basis(L) if psi0 is None else psi0.basis
    if psi0 is None:
        psi0 = QuantumState.bare(basis, f"g{basis.L};g0")
    ops = {name: observable_matrix(name, basis) for name in observables}

    def row(kt):
        p = SystemParams(params.beta, params.delta, params.period_T, float(kt))
        u_f = build_floquet(basis, p, kick_sign)
        ev = evolve(psi0, u_f, n_kicks, ops)
        spec = floquet_spectrum(u_f, basis, p)
        return [ev.long_time_average(name, burn_in) for name in ops], spec.mean_participation

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, axis))
    else:
        rows = [row(kt) for kt in axis]
    averages = {name: np.array([r[0][k] for r in rows]) for k, name in enumerate(ops)}
    return ObservablesTable(
        kappa_tau=axis,
        betaT=params.betaT,
        averages=averages,
        mean_participation=np.array([r[1] for r in rows]),
        haar={name: random_state_mean(op) for name, op in ops.items()},
    )
