"""Semi-classical kicked dynamics: Bloch-field equations between kicks, rotation kicks.

A state is packed as the complex vector ``[E1, E2, S1, S2, Sz1, Sz2]`` (the inversions
carry zero imaginary part). Between kicks each cavity evolves on its own under

    dE/dt  = -i beta S
    dS/dt  =  i delta S + i beta E Sz
    dSz/dt =  2 i beta (S E* - S* E)

which conserves ``N = |E|^2 + (Sz + 1)/2`` and ``Sz^2 + 4|S|^2`` per cavity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from kickjc.jc import SystemParams

CONVENTIONS = ("rotation", "unitary")
BLOCH_ABORT = 1e-6


class IntegrationAbort(RuntimeError):
    """The Bloch constraint drifted past the abort threshold."""


@dataclass(frozen=True)
class ClassicalState:
    E1: complex
    E2: complex
    S1: complex
    S2: complex
    Sz1: float
    Sz2: float

    def to_array(self) -> np.ndarray:
        return np.array([self.E1, self.E2, self.S1, self.S2, self.Sz1, self.Sz2], dtype=complex)

    @classmethod
    def from_array(cls, y) -> ClassicalState:
        y = np.asarray(y, dtype=complex)
        return cls(complex(y[0]), complex(y[1]), complex(y[2]), complex(y[3]), float(y[4].real), float(y[5].real))

    @classmethod
    def from_bloch_angles(cls, E1: complex, E2: complex, theta1: float, phi1: float, theta2: float, phi2: float):
        """Atoms placed on the Bloch sphere: ``Sz = cos(theta)``, ``S = sin(theta) e^{i phi} / 2``."""
        return cls(
            E1, E2,
            0.5 * math.sin(theta1) * complex(math.cos(phi1), math.sin(phi1)),
            0.5 * math.sin(theta2) * complex(math.cos(phi2), math.sin(phi2)),
            math.cos(theta1), math.cos(theta2),
        )


@dataclass(frozen=True)
class ClassicalInvariants:
    N1: np.ndarray
    N2: np.ndarray
    bloch1: np.ndarray
    bloch2: np.ndarray

    @property
    def N_total(self) -> np.ndarray:
        return self.N1 + self.N2


def invariants(samples) -> ClassicalInvariants:
    """Excitation numbers and Bloch-constraint residuals for one state or an ``(n, 6)`` array."""
    if isinstance(samples, ClassicalState):
        samples = samples.to_array()
    y = np.atleast_2d(np.asarray(samples, dtype=complex))
    sz1, sz2 = y[:, 4].real, y[:, 5].real
    return ClassicalInvariants(
        N1=np.abs(y[:, 0]) ** 2 + 0.5 * (sz1 + 1),
        N2=np.abs(y[:, 1]) ** 2 + 0.5 * (sz2 + 1),
        bloch1=np.abs(sz1**2 + 4 * np.abs(y[:, 2]) ** 2 - 1),
        bloch2=np.abs(sz2**2 + 4 * np.abs(y[:, 3]) ** 2 - 1),
    )


def canonical_initial_state(n_total: float = 2.0) -> ClassicalState:
    """All field energy in cavity 2 (``E2 = sqrt(n_total)``), both atoms in the ground state."""
    return ClassicalState(0j, complex(math.sqrt(n_total)), 0j, 0j, -1.0, -1.0)


def seeded_initial_state(seed, n_total: float = 2.0, atoms: str = "ground") -> ClassicalState:
    """Random point on the ``N1 + N2 = n_total`` shell.

    With ``atoms="ground"`` only the field split and phases are random; with
    ``atoms="random"`` the Bloch vectors are drawn too (cos(theta) uniform) and the
    field carries the remainder.
    """
    rng = np.random.default_rng(seed)
    if atoms == "ground":
        sz = np.array([-1.0, -1.0])
    elif atoms == "random":
        sz = rng.uniform(-1.0, 1.0, 2)
    else:
        raise ValueError(f"atoms must be 'ground' or 'random', got {atoms!r}")
    field = n_total - 0.5 * (sz + 1).sum()
    if field < 0:
        raise ValueError(f"n_total={n_total} too small for the drawn atomic excitation")
    u = rng.uniform()
    phases = rng.uniform(0.0, 2 * math.pi, 4)
    E = np.sqrt([field * u, field * (1 - u)]) * np.exp(1j * phases[:2])
    S = 0.5 * np.sqrt(1 - sz**2) * np.exp(1j * phases[2:])
    return ClassicalState(complex(E[0]), complex(E[1]), complex(S[0]), complex(S[1]), float(sz[0]), float(sz[1]))


def default_substeps(betaT: float) -> int:
    return max(400, math.ceil(200 * betaT))


@numba.njit(cache=True, nogil=True)
def _rhs(y, beta, delta, out):
    for c in range(2):
        E = y[c]
        S = y[2 + c]
        Sz = y[4 + c].real
        out[c] = -1j * beta * S
        out[2 + c] = 1j * delta * S + 1j * beta * E * Sz
        out[4 + c] = (2j * beta * (S * np.conj(E) - np.conj(S) * E)).real


@numba.njit(cache=True, nogil=True)
def _rk4(y, h, n, beta, delta):
    k1 = np.empty(6, np.complex128)
    k2 = np.empty(6, np.complex128)
    k3 = np.empty(6, np.complex128)
    k4 = np.empty(6, np.complex128)
    tmp = np.empty(6, np.complex128)
    y = y.copy()
    for _ in range(n):
        _rhs(y, beta, delta, k1)
        for i in range(6):
            tmp[i] = y[i] + 0.5 * h * k1[i]
        _rhs(tmp, beta, delta, k2)
        for i in range(6):
            tmp[i] = y[i] + 0.5 * h * k2[i]
        _rhs(tmp, beta, delta, k3)
        for i in range(6):
            tmp[i] = y[i] + h * k3[i]
        _rhs(tmp, beta, delta, k4)
        for i in range(6):
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        # inversions are real; drop rounding noise in the imaginary part
        y[4] = y[4].real
        y[5] = y[5].real
    return y


@numba.njit(cache=True, nogil=True)
def _kick(y, kappa, unitary):
    c = math.cos(kappa)
    s = math.sin(kappa)
    e1 = y[0]
    e2 = y[1]
    if unitary:
        y[0] = c * e1 - 1j * s * e2
        y[1] = -1j * s * e1 + c * e2
    else:
        y[0] = c * e1 + s * e2
        y[1] = -s * e1 + c * e2


@numba.njit(cache=True, nogil=True)
def _strobe(y, h, substeps, n_kicks, beta, delta, kappa, unitary):
    out = np.empty((n_kicks, 6), np.complex128)
    for n in range(n_kicks):
        y = _rk4(y, h, substeps, beta, delta)
        _kick(y, kappa, unitary)
        out[n] = y
    return out


def deriv(state: ClassicalState, params: SystemParams) -> ClassicalState:
    """Time derivative of ``state`` between kicks (returned in the same container)."""
    out = np.empty(6, dtype=complex)
    _rhs(state.to_array(), params.beta, params.delta, out)
    return ClassicalState.from_array(out)


def integrate(state: ClassicalState, params: SystemParams, duration: float, substeps: int) -> ClassicalState:
    """Fixed-step RK4 over ``duration`` (negative runs backwards) with ``substeps`` steps."""
    if substeps < 1:
        raise ValueError(f"substeps must be >= 1, got {substeps}")
    y = _rk4(state.to_array(), duration / substeps, substeps, params.beta, params.delta)
    return ClassicalState.from_array(y)


def step_between_kicks(state: ClassicalState, params: SystemParams, substeps: int | None = None) -> ClassicalState:
    """Advance by one period ``T`` of free evolution."""
    if substeps is None:
        substeps = default_substeps(params.betaT)
    return integrate(state, params, params.period_T, substeps)


def kick_map(state: ClassicalState, params: SystemParams) -> ClassicalState:
    """Real rotation of ``(E1, E2)`` by ``kappa_tau``; atoms untouched."""
    y = state.to_array()
    _kick(y, params.kappa_tau, False)
    return ClassicalState.from_array(y)


def kick_map_quantum_convention(state: ClassicalState, params: SystemParams) -> ClassicalState:
    """Unitary mixing ``E1 -> cos k E1 - i sin k E2`` (the Heisenberg image of the quantum kick)."""
    y = state.to_array()
    _kick(y, params.kappa_tau, True)
    return ClassicalState.from_array(y)


@dataclass(frozen=True)
class StrobeTrajectory:
    """States sampled just after kicks ``1..n_kicks`` as an ``(n_kicks, 6)`` complex array."""

    samples: np.ndarray

    def __len__(self):
        return len(self.samples)

    def state(self, n: int) -> ClassicalState:
        return ClassicalState.from_array(self.samples[n])

    def invariants(self) -> ClassicalInvariants:
        return invariants(self.samples)

    @property
    def field_energy(self) -> np.ndarray:
        return np.abs(self.samples[:, 0]) ** 2 + np.abs(self.samples[:, 1]) ** 2


def strobe_trajectory(
    init: ClassicalState,
    params: SystemParams,
    n_kicks: int,
    substeps: int | None = None,
    convention: str = "rotation",
) -> StrobeTrajectory:
    """Alternate free evolution over ``T`` and a kick, recording the state after each kick.

    Raises:
        IntegrationAbort: if either Bloch residual exceeds ``1e-6`` at any sample.
    """
    if n_kicks < 1:
        raise ValueError(f"n_kicks must be >= 1, got {n_kicks}")
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}, got {convention!r}")
    if substeps is None:
        substeps = default_substeps(params.betaT)
    if substeps < 1:
        raise ValueError(f"substeps must be >= 1, got {substeps}")
    inv0 = invariants(init)
    if max(inv0.bloch1[0], inv0.bloch2[0]) > BLOCH_ABORT:
        raise ValueError(
            f"initial state violates the Bloch constraint (residuals {inv0.bloch1[0]:.3e}, {inv0.bloch2[0]:.3e})"
        )
    samples = _strobe(
        init.to_array(),
        params.period_T / substeps,
        substeps,
        n_kicks,
        params.beta,
        params.delta,
        params.kappa_tau,
        convention == "unitary",
    )
    inv = invariants(samples)
    worst = np.maximum(inv.bloch1, inv.bloch2)
    bad = np.flatnonzero(~(worst <= BLOCH_ABORT))
    if bad.size:
        n = int(bad[0])
        raise IntegrationAbort(
            f"Bloch residual {worst[n]:.3e} exceeds {BLOCH_ABORT:g} after kick {n + 1} "
            f"(betaT={params.betaT:g}, kappa_tau={params.kappa_tau:g}, substeps={substeps})"
        )
    return StrobeTrajectory(samples)


def average_N2(
    init: ClassicalState,
    params: SystemParams,
    n_kicks: int = 1000,
    substeps: int | None = None,
    convention: str = "rotation",
) -> float:
    """Mean of ``N2`` over the strobed samples."""
    traj = strobe_trajectory(init, params, n_kicks, substeps, convention)
    return float(np.mean(traj.invariants().N2))
