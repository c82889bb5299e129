"""Floquet analysis of the kicked two-cavity sector.

One period is free JC evolution for time T preceded by an instantaneous photon-hopping
kick. Participation numbers are measured against the kick-free eigenbasis with
cavity-swap doublets resolved into symmetric/antisymmetric pairs.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from kickjc.jc import SystemParams
from kickjc.operators import (
    EigDecomposition,
    check_unitary,
    hermitian_eig,
    unitary_eig,
    unitary_exp,
)
from kickjc.sector import (
    QuantumState,
    SectorBasis,
    build_H0,
    build_K,
    observable_matrix,
    swap_matrix,
)


class DelocalizedError(ValueError):
    """No Floquet doublet carries dominant weight on the all-in-one-cavity subspace."""


def build_floquet(basis: SectorBasis, params: SystemParams, kick_sign: int = -1) -> np.ndarray:
    """One-period propagator ``exp(-i H0 T) exp(i * kick_sign * kappa_tau * K)``.

    ``kick_sign = -1`` is the physical impulse propagator; ``+1`` reproduces the
    literal ``e^{+iK}`` form. Localization diagnostics do not depend on the choice.
    """
    if kick_sign not in (-1, 1):
        raise ValueError(f"kick_sign must be +1 or -1, got {kick_sign!r}")
    free = unitary_exp(build_H0(basis, params), -params.period_T)
    kick = unitary_exp(build_K(basis), kick_sign * params.kappa_tau)
    return free @ kick


def parity_subspaces(basis: SectorBasis) -> dict[int, np.ndarray]:
    """Orthonormal real bases (as columns) of the swap-antisymmetric (-1) and symmetric (+1) subspaces."""
    perm = basis.swap_permutation()
    d = basis.dim
    cols = {-1: [], 1: []}
    for i in range(d):
        j = perm[i]
        if j == i:
            v = np.zeros(d)
            v[i] = 1.0
            cols[1].append(v)
        elif i < j:
            for sign in (1, -1):
                v = np.zeros(d)
                v[i], v[j] = 1 / math.sqrt(2), sign / math.sqrt(2)
                cols[sign].append(v)
    return {p: np.array(c, dtype=complex).T.reshape(d, len(c)) for p, c in cols.items()}


def _fix_phase(vecs: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude amplitude of each column real and positive (first index on ties)."""
    out = vecs.copy()
    for k in range(out.shape[1]):
        mag = np.abs(out[:, k])
        i = int(np.flatnonzero(mag >= mag.max() - 1e-9)[0])
        out[:, k] *= np.conj(out[i, k]) / mag[i]
    return out


def _parity_ordered(values: np.ndarray, vecs: np.ndarray, parity: np.ndarray):
    # ascending value; exact ties (to 1e-9) broken antisymmetric first
    order = np.lexsort((parity, np.round(values, 9)))
    return values[order], vecs[:, order], parity[order]


def h0_reference_basis(basis: SectorBasis, params: SystemParams) -> EigDecomposition:
    """Kick-free eigenstates with each swap doublet split into symmetric/antisymmetric states.

    Columns are ordered by ascending energy and phase-fixed so the largest amplitude is
    real positive, which makes the basis deterministic across runs.
    """
    h0 = build_H0(basis, params)
    energies, vecs, parity = [], [], []
    for p, q in parity_subspaces(basis).items():
        if q.shape[1] == 0:
            continue
        w, v = hermitian_eig(q.conj().T @ h0 @ q)
        energies.append(w)
        vecs.append(q @ v)
        parity.append(np.full(len(w), p))
    e, v, _ = _parity_ordered(np.concatenate(energies), np.hstack(vecs), np.concatenate(parity))
    return EigDecomposition(e, _fix_phase(v))


def _as_vector(psi) -> np.ndarray:
    if isinstance(psi, QuantumState):
        return psi.amplitudes
    return np.asarray(psi, dtype=complex)


def participation_numbers(states: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Participation number of every column of ``states`` against orthonormal ``reference`` columns."""
    reference = np.asarray(reference, dtype=complex)
    d = reference.shape[0]
    gram_err = np.abs(reference.conj().T @ reference - np.eye(reference.shape[1])).max()
    if reference.shape != (d, d) or gram_err >= 1e-10:
        raise ValueError(
            f"reference basis must be a complete orthonormal set (shape {reference.shape}, "
            f"max|V^dag V - I| = {gram_err:.3e})"
        )
    overlaps = np.abs(reference.conj().T @ np.asarray(states, dtype=complex)) ** 2
    return 1.0 / (d * np.sum(overlaps**2, axis=0))


def participation(psi, reference) -> float:
    """Normalized participation number ``(d * sum_i |<psi|ref_i>|^4)^-1``, in ``[1/d, 1]``."""
    if isinstance(reference, EigDecomposition):
        reference = reference.eigenvectors
    return float(participation_numbers(_as_vector(psi)[:, None], reference)[0])


@dataclass(frozen=True)
class FloquetSpectrum:
    """Eigenphases (ascending, in (-pi, pi]) and eigenstates (columns) of the Floquet operator.

    ``parity`` is the swap eigenvalue of each state and ``psi2_weight`` its weight on
    the subspace with all excitations in one cavity.
    """

    eigenphases: np.ndarray
    states: np.ndarray
    participation: np.ndarray
    parity: np.ndarray
    psi2_weight: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenphases)

    @property
    def mean_participation(self) -> float:
        return float(np.mean(self.participation))


def floquet_spectrum(
    u_f: np.ndarray,
    basis: SectorBasis,
    params: SystemParams,
    reference: EigDecomposition | None = None,
) -> FloquetSpectrum:
    """Diagonalize ``u_f`` and attach participation numbers.

    Since ``u_f`` commutes with the cavity swap, each parity block is diagonalized on
    its own; this keeps swap doublets resolved even when they are exactly degenerate.
    """
    u_f = check_unitary(u_f)
    swap = swap_matrix(basis)
    if reference is None:
        reference = h0_reference_basis(basis, params)
    if np.abs(u_f @ swap - swap @ u_f).max() < 1e-9:
        phases, vecs, parity = [], [], []
        for p, q in parity_subspaces(basis).items():
            if q.shape[1] == 0:
                continue
            lam, z = unitary_eig(q.conj().T @ u_f @ q)
            phases.append(lam)
            vecs.append(q @ z)
            parity.append(np.full(len(lam), p))
        lam, vecs, parity = _parity_ordered(
            np.concatenate(phases), np.hstack(vecs), np.concatenate(parity)
        )
    else:
        lam, vecs = unitary_eig(u_f)
        parity = np.real(np.einsum("ij,ij->j", vecs.conj(), swap @ vecs))
        order = np.argsort(lam, kind="stable")
        lam, vecs, parity = lam[order], vecs[:, order], parity[order]
    vecs = _fix_phase(vecs)
    proj = observable_matrix("proj_psi2", basis)
    weight = np.real(np.einsum("ij,ij->j", vecs.conj(), proj @ vecs))
    return FloquetSpectrum(
        eigenphases=lam,
        states=vecs,
        participation=participation_numbers(vecs, reference.eigenvectors),
        parity=np.asarray(parity, dtype=float),
        psi2_weight=weight,
    )


@dataclass(frozen=True)
class Evolution:
    """Expectation values sampled after each application of the Floquet operator (kicks 1..n)."""

    kicks: np.ndarray
    expectations: dict[str, np.ndarray]
    norm_residual: np.ndarray

    def long_time_average(self, name: str, burn_in: int = 100) -> float:
        values = self.expectations[name]
        if burn_in >= len(values):
            raise ValueError(f"burn_in {burn_in} leaves no samples out of {len(values)}")
        return float(np.mean(values[burn_in:]))


def evolve(psi0, u_f: np.ndarray, n_kicks: int, observables: Mapping[str, np.ndarray]) -> Evolution:
    """Apply ``u_f`` ``n_kicks`` times and record each observable's expectation value."""
    if n_kicks < 1:
        raise ValueError(f"n_kicks must be >= 1, got {n_kicks}")
    psi = _as_vector(psi0).copy()
    if abs(np.linalg.norm(psi) - 1.0) >= 1e-10:
        raise ValueError(f"initial state is not normalized: |psi| = {np.linalg.norm(psi):.15g}")
    u_f = np.asarray(u_f, dtype=complex)
    traj = np.empty((n_kicks, psi.size), dtype=complex)
    for n in range(n_kicks):
        psi = u_f @ psi
        traj[n] = psi
    expectations = {
        name: np.real(np.einsum("ni,ij,nj->n", traj.conj(), np.asarray(op, dtype=complex), traj))
        for name, op in observables.items()
    }
    norm_residual = np.abs(np.linalg.norm(traj, axis=1) - 1.0)
    return Evolution(np.arange(1, n_kicks + 1), expectations, norm_residual)


def random_state_mean(observable) -> float:
    """Exact mean of ``<psi|A|psi>`` over Haar-random states: ``Tr(A)/d``."""
    a = np.asarray(observable, dtype=complex)
    return float(np.trace(a).real / a.shape[0])


def random_state_mean_mc(observable, n_samples: int = 10_000, seed: int = 0) -> float:
    """Monte-Carlo estimate of :func:`random_state_mean` from normalized complex Gaussian vectors."""
    a = np.asarray(observable, dtype=complex)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n_samples, a.shape[0])) + 1j * rng.standard_normal((n_samples, a.shape[0]))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return float(np.mean(np.real(np.einsum("ni,ij,nj->n", z.conj(), a, z))))


@dataclass(frozen=True)
class TunnelingReport:
    """Splitting of the doublet localized on the all-in-one-cavity subspace.

    ``phi`` is the per-kick eigenphase separation; an equal superposition of the pair
    transfers completely to the other cavity after ``pi / phi`` kicks.
    """

    phi: float
    predicted_period_kicks: float
    subspace_weight: float
    pair: tuple[int, int]


def _circular_distance(a: float, b: float) -> float:
    d = abs(a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def tunneling_analysis(spectrum: FloquetSpectrum, min_weight: float = 0.5) -> TunnelingReport:
    """Locate the swap doublet living on the psi2 subspace and measure its splitting.

    Candidates are Floquet states with psi2 weight above ``min_weight``; each symmetric
    candidate is paired with the antisymmetric candidate closest in eigenphase, and the
    pair with the largest mean weight is reported.

    Raises:
        DelocalizedError: if no such pair exists.
    """
    cand = np.flatnonzero(spectrum.psi2_weight > min_weight)
    sym = [i for i in cand if spectrum.parity[i] > 0]
    anti = [j for j in cand if spectrum.parity[j] < 0]
    pairs = []
    for i in sym:
        if not anti:
            break
        j = min(anti, key=lambda j: _circular_distance(spectrum.eigenphases[i], spectrum.eigenphases[j]))
        weight = 0.5 * (spectrum.psi2_weight[i] + spectrum.psi2_weight[j])
        pairs.append((weight, -min(i, j), i, j))
    if not pairs:
        raise DelocalizedError(
            f"delocalized: no symmetric/antisymmetric Floquet pair with psi2 weight > {min_weight}"
        )
    weight, _, i, j = max(pairs)
    phi = _circular_distance(spectrum.eigenphases[i], spectrum.eigenphases[j])
    period = float(math.pi / phi) if phi > 0 else math.inf
    return TunnelingReport(phi=float(phi), predicted_period_kicks=period, subspace_weight=float(weight), pair=(int(i), int(j)))


RESONANCE_FAMILIES = {
    "sqrt2_over_2": lambda n: n * math.sqrt(2) / 2,
    "one_plus_sqrt2_over_2": lambda n: n * (1 + math.sqrt(2) / 2),
    "one_minus_sqrt2_over_2": lambda n: abs(n * (1 - math.sqrt(2) / 2)),
}


def resonance_table(n_max: int, scale: float = 2 * math.pi) -> list[tuple[str, int, float]]:
    """``(family, n, betaT)`` for every resonance family and ``n = 1..n_max``."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    return [(name, n, scale * f(n)) for name, f in RESONANCE_FAMILIES.items() for n in range(1, n_max + 1)]


def resonance_times(n_max: int, scale: float = 2 * math.pi) -> list[float]:
    """Sorted, de-duplicated resonant ``betaT`` values.

    At these periods the relative phase between the psi2 dressed levels and the mixed
    ``(1, 1)`` levels returns to a multiple of ``2 pi``. ``scale`` converts the tabulated
    ``T / 2 pi`` values to ``betaT``.
    """
    values = sorted(v for _, _, v in resonance_table(n_max, scale))
    out: list[float] = []
    for v in values:
        if not out or v - out[-1] > 1e-9:
            out.append(v)
    return out
