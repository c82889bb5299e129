"""Single-cavity Jaynes-Cummings structure: excitation doublets and dressed states."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of the kicked two-cavity system.

    Attributes:
        beta: atom-photon coupling; sets the frequency unit.
        delta: atom-photon detuning, same units as ``beta``.
        period_T: time between kicks.
        kappa_tau: dimensionless kick strength (hopping rate times pulse width).
    """

    beta: float = 1.0
    delta: float = 0.0
    period_T: float = 1.0
    kappa_tau: float = 0.0

    def __post_init__(self):
        for name in ("beta", "delta", "period_T", "kappa_tau"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.beta <= 0:
            raise ValueError(f"beta must be > 0, got {self.beta!r}")
        if self.period_T <= 0:
            raise ValueError(f"period_T must be > 0, got {self.period_T!r}")
        if self.kappa_tau < 0:
            raise ValueError(f"kappa_tau must be >= 0, got {self.kappa_tau!r}")

    @classmethod
    def from_dimensionless(
        cls, betaT: float, kappa_tau: float, delta_over_beta: float = 0.0, beta: float = 1.0
    ) -> SystemParams:
        return cls(beta=beta, delta=delta_over_beta * beta, period_T=betaT / beta, kappa_tau=kappa_tau)

    @property
    def betaT(self) -> float:
        return self.beta * self.period_T

    @property
    def delta_over_beta(self) -> float:
        return self.delta / self.beta


@dataclass(frozen=True)
class DressedLevel:
    """One member of the ``l``-excitation dressed doublet.

    ``amplitudes`` are over the bare pair ``(|g,l>, |e,l-1>)``.
    """

    l: int
    sign: int
    theta: float
    chi: float
    energy: float
    amplitudes: np.ndarray


def chi(l: int, params: SystemParams) -> float:
    """Generalized Rabi frequency ``sqrt(beta^2 l + delta^2 / 4)``."""
    if l < 0:
        raise ValueError(f"excitation number must be >= 0, got {l}")
    return math.sqrt(params.beta**2 * l + params.delta**2 / 4)


def mixing_angle(l: int, params: SystemParams) -> float:
    # delta + 2 chi > 0 whenever beta > 0 and l >= 1, so theta is in [0, pi/2)
    return math.atan2(2 * params.beta * math.sqrt(l), params.delta + 2 * chi(l, params))


def dressed_states(l: int, params: SystemParams) -> tuple[DressedLevel, DressedLevel]:
    """Return the ``(+, -)`` dressed levels of the ``l``-excitation doublet.

    Energies follow the ``+-chi(l) - delta/2`` labelling; the bare-basis block from
    :func:`jc_block_hamiltonian` has eigenvalues ``energy + delta``.
    """
    if l < 1:
        raise ValueError(f"dressed doublet needs l >= 1 (l = 0 is the lone ground state), got {l}")
    c = chi(l, params)
    theta = mixing_angle(l, params)
    s, co = math.sin(theta), math.cos(theta)
    plus = DressedLevel(l, +1, theta, c, c - params.delta / 2, np.array([s, co]))
    minus = DressedLevel(l, -1, theta, c, -c - params.delta / 2, np.array([co, -s]))
    return plus, minus


def jc_block_hamiltonian(l: int, params: SystemParams) -> np.ndarray:
    """JC Hamiltonian restricted to ``l`` excitations, bare order ``(|g,l>, |e,l-1>)``.

    ``<g,l|H|g,l> = 0`` and ``<e,l-1|H|e,l-1> = delta``. For ``l = 0`` this is ``[[0]]``.
    """
    if l < 0:
        raise ValueError(f"excitation number must be >= 0, got {l}")
    if l == 0:
        return np.zeros((1, 1), dtype=complex)
    g = params.beta * math.sqrt(l)
    return np.array([[0.0, g], [g, params.delta]], dtype=complex)
