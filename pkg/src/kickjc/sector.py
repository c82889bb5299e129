"""Fixed-excitation sector of two coupled JC cavities: bare basis and operators."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from kickjc.jc import SystemParams, jc_block_hamiltonian


@dataclass(frozen=True, order=True)
class BareState:
    """``|atom1, photons1; atom2, photons2>`` with atoms labelled ``"g"`` or ``"e"``."""

    atom1: str
    photons1: int
    atom2: str
    photons2: int

    @property
    def l1(self) -> int:
        return self.photons1 + (self.atom1 == "e")

    @property
    def l2(self) -> int:
        return self.photons2 + (self.atom2 == "e")

    def swapped(self) -> BareState:
        return BareState(self.atom2, self.photons2, self.atom1, self.photons1)

    @property
    def label(self) -> str:
        return f"{self.atom1}{self.photons1};{self.atom2}{self.photons2}"

    def __str__(self):
        return f"|{self.label}>"


_LABEL_RE = re.compile(r"^\s*\|?\s*([ge])\s*,?\s*(\d+)\s*[;,]?\s*([ge])\s*,?\s*(\d+)\s*>?\s*$")


def parse_label(text: str) -> BareState:
    """Parse labels such as ``"g2;g0"``, ``"g2g0"`` or ``"|e1;g0>"``."""
    m = _LABEL_RE.match(text)
    if m is None:
        raise ValueError(f"cannot parse bare-state label {text!r} (expected e.g. 'g2;g0')")
    a1, p1, a2, p2 = m.groups()
    return BareState(a1, int(p1), a2, int(p2))


def cavity_states(l: int) -> list[tuple[str, int]]:
    """Bare single-cavity states with ``l`` excitations, ``|g,l>`` first."""
    return [("g", l)] if l == 0 else [("g", l), ("e", l - 1)]


@dataclass(frozen=True)
class SectorBasis:
    L: int
    states: tuple[BareState, ...]
    index: dict = field(compare=False, repr=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    def __len__(self):
        return len(self.states)

    def __getitem__(self, i) -> BareState:
        return self.states[i]

    def index_of(self, state: BareState | str) -> int:
        if isinstance(state, str):
            state = parse_label(state)
        try:
            return self.index[state]
        except KeyError:
            raise ValueError(f"{state} is not in the L={self.L} sector") from None

    def swap_permutation(self) -> np.ndarray:
        """``perm[i]`` is the index of the cavity-swapped partner of state ``i``."""
        return np.array([self.index[s.swapped()] for s in self.states])


def build_basis(L: int) -> SectorBasis:
    """Enumerate the bare states with ``L`` total excitations.

    Order: ``l1`` descending, then atom 1 ``g`` before ``e``, then atom 2 ``g`` before ``e``.
    """
    if L < 1:
        raise ValueError(f"total excitation number must be >= 1, got {L}")
    states = []
    for l1 in range(L, -1, -1):
        for a1, p1 in cavity_states(l1):
            for a2, p2 in cavity_states(L - l1):
                states.append(BareState(a1, p1, a2, p2))
    return SectorBasis(L, tuple(states), {s: i for i, s in enumerate(states)})


def swap_matrix(basis: SectorBasis) -> np.ndarray:
    d = basis.dim
    s = np.zeros((d, d), dtype=complex)
    s[basis.swap_permutation(), np.arange(d)] = 1.0
    return s


def build_H0(basis: SectorBasis, params: SystemParams) -> np.ndarray:
    """Uncoupled Hamiltonian ``H^JC_1 + H^JC_2`` on the sector."""
    d = basis.dim
    h = np.zeros((d, d), dtype=complex)
    for i, s in enumerate(basis.states):
        for j, t in enumerate(basis.states):
            # cavity 1 acts when cavity 2 is untouched, and vice versa
            if (s.atom2, s.photons2) == (t.atom2, t.photons2) and s.l1 == t.l1:
                states = cavity_states(s.l1)
                blk = jc_block_hamiltonian(s.l1, params)
                h[i, j] += blk[states.index((s.atom1, s.photons1)), states.index((t.atom1, t.photons1))]
            if (s.atom1, s.photons1) == (t.atom1, t.photons1) and s.l2 == t.l2:
                states = cavity_states(s.l2)
                blk = jc_block_hamiltonian(s.l2, params)
                h[i, j] += blk[states.index((s.atom2, s.photons2)), states.index((t.atom2, t.photons2))]
    return h


def build_K(basis: SectorBasis) -> np.ndarray:
    """Photon hopping ``a1^dag a2 + a2^dag a1`` (unit strength) on the sector."""
    d = basis.dim
    k = np.zeros((d, d), dtype=complex)
    for i, s in enumerate(basis.states):
        if s.photons2 > 0:
            # a1^dag a2 moves one photon from cavity 2 to cavity 1
            t = BareState(s.atom1, s.photons1 + 1, s.atom2, s.photons2 - 1)
            j = basis.index[t]
            amp = math.sqrt((s.photons1 + 1) * s.photons2)
            k[j, i] += amp
            k[i, j] += amp
    return k


OBSERVABLES = ("n1", "n2", "sz1_pop", "sz2_pop", "szsz", "exc1", "exc2", "proj_psi2")


def observable_matrix(name: str, basis: SectorBasis) -> np.ndarray:
    """Diagonal observables on the bare sector basis.

    ``n1``/``n2``: photon numbers; ``sz{1,2}_pop``: atomic population ``(sz + 1)/2``;
    ``szsz``: ``sz1 sz2``; ``exc{1,2}``: excitations held by one cavity;
    ``proj_psi2``: projector onto states with all excitations in a single cavity.
    """
    def sz(atom):
        return 1.0 if atom == "e" else -1.0

    getters = {
        "n1": lambda s: s.photons1,
        "n2": lambda s: s.photons2,
        "sz1_pop": lambda s: float(s.atom1 == "e"),
        "sz2_pop": lambda s: float(s.atom2 == "e"),
        "szsz": lambda s: sz(s.atom1) * sz(s.atom2),
        "exc1": lambda s: s.l1,
        "exc2": lambda s: s.l2,
        "proj_psi2": lambda s: float(s.l1 == basis.L or s.l2 == basis.L),
    }
    if name not in getters:
        raise ValueError(f"unknown observable {name!r}; choose from {', '.join(OBSERVABLES)}")
    return np.diag([getters[name](s) for s in basis.states]).astype(complex)


@dataclass(frozen=True)
class QuantumState:
    """Normalized amplitude vector over a sector basis."""

    basis: SectorBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.basis.dim,):
            raise ValueError(f"expected {self.basis.dim} amplitudes, got shape {amps.shape}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) >= 1e-10:
            raise ValueError(f"state is not normalized: |psi| = {norm:.15g}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def bare(cls, basis: SectorBasis, label: BareState | str) -> QuantumState:
        amps = np.zeros(basis.dim, dtype=complex)
        amps[basis.index_of(label)] = 1.0
        return cls(basis, amps)

    def expectation(self, op: np.ndarray) -> float:
        return float(np.vdot(self.amplitudes, op @ self.amplitudes).real)
