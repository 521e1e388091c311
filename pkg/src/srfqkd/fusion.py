"""Fusion-space signal bases for three-particle packets.

A classical symbol is encoded in the *internal charge* of a designated
pair inside a packet of three identical spins: the total spin of that
pair, which no collective rotation can touch.  For three spin-1/2
particles the two states of total spin 1/2 whose pair (1,2) carries
charge 0 or 1 form one qubit basis; choosing the pair (2,3) or (1,3)
instead gives two more bases over the same two-dimensional fusion space.
For three spin-1 particles the three fusion paths to total spin 1 encode
a qutrit in the same way.

Bases are constructed from Clebsch-Gordan coupling (pair first, then the
odd particle out) and, for the qubit case, cross-checked at build time
against hard-coded amplitude tables; a phase-convention bug anywhere in
the coupling machinery fails the build immediately.  Non-adjacent pairs
are handled by permuting tensor factors, coupling adjacently, and
permuting back.

Also provided: the mixed signal densities (uniform over the magnetic
quantum number), the pair-charge projector POVMs used for measurement,
inter-basis overlap tables, and the full coupled (isotypic) basis of the
three-particle space that the twirling channel diagonalizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .hilbert import (
    ATOL_ALGEBRA,
    DensityMatrix,
    Operator,
    PureState,
    identity,
    inner,
)
from .su2 import clebsch_gordan, spin_operators, twice


class BasisLabel(Enum):
    """Which pair of the three particles carries the encoded charge."""

    PAIR_12 = (1, 2)
    PAIR_23 = (2, 3)
    PAIR_13 = (1, 3)

    @property
    def pair(self) -> tuple[int, int]:
        return self.value

    @property
    def third(self) -> int:
        (a, b) = self.value
        return ({1, 2, 3} - {a, b}).pop()

    @property
    def wire(self) -> str:
        """Serialized form used in CSV logs and JSON reports ("12", "23", "13")."""
        return f"{self.value[0]}{self.value[1]}"

    @classmethod
    def from_wire(cls, wire: str) -> "BasisLabel":
        for label in cls:
            if label.wire == wire:
                return label
        raise ValueError(f"unknown basis label {wire!r}")


_SQ2 = 1.0 / math.sqrt(2.0)
_SQ6 = 1.0 / math.sqrt(6.0)

# Hard-coded amplitudes of the charge-0/charge-1, highest-m qubit basis
# states, keyed by product-basis occupation (0 = spin up).  The lower-m
# partner of each state is obtained by flipping all three spins.
_QUBIT_PLUS_AMPLITUDES: dict[tuple[BasisLabel, int], dict[tuple[int, int, int], float]] = {
    (BasisLabel.PAIR_12, 0): {(0, 1, 0): _SQ2, (1, 0, 0): -_SQ2},
    (BasisLabel.PAIR_12, 1): {(0, 1, 0): _SQ6, (1, 0, 0): _SQ6, (0, 0, 1): -2 * _SQ6},
    (BasisLabel.PAIR_23, 0): {(0, 0, 1): _SQ2, (0, 1, 0): -_SQ2},
    (BasisLabel.PAIR_23, 1): {(0, 0, 1): _SQ6, (0, 1, 0): _SQ6, (1, 0, 0): -2 * _SQ6},
    (BasisLabel.PAIR_13, 0): {(0, 0, 1): _SQ2, (1, 0, 0): -_SQ2},
    (BasisLabel.PAIR_13, 1): {(0, 0, 1): _SQ6, (1, 0, 0): _SQ6, (0, 1, 0): -2 * _SQ6},
}


def _table_vector(label: BasisLabel, charge: int) -> np.ndarray:
    vec = np.zeros(8, dtype=np.complex128)
    for (i1, i2, i3), amp in _QUBIT_PLUS_AMPLITUDES[(label, charge)].items():
        vec[(i1 * 2 + i2) * 2 + i3] = amp
    return vec


def _particle_axes(label: BasisLabel) -> tuple[int, ...]:
    """Transpose axes mapping (pair_a, pair_b, third) order to (1, 2, 3) order."""
    built_order = (*label.pair, label.third)
    return tuple(built_order.index(p) for p in (1, 2, 3))


def _m_range(two_j: int) -> list[int]:
    return list(range(two_j, -two_j - 1, -2))


def _coupled_pair_vector(
    j: float, label: BasisLabel, charge: int, total_j: float, total_m: float
) -> np.ndarray:
    """|total_j, charge_on_pair, total_m> as a flat amplitude vector.

    Couples the labeled pair to spin `charge` first, then that pair with
    the remaining particle (pair as the first Clebsch-Gordan factor) to
    `total_j`.  The pair occupies whatever tensor slots the label names.
    """
    two_j = twice(j)
    d = two_j + 1
    amp = np.zeros((d, d, d), dtype=np.complex128)
    two_k = 2 * charge
    two_jt = twice(total_j)
    two_mt = twice(total_m)
    for i1, two_m1 in enumerate(_m_range(two_j)):
        for i2, two_m2 in enumerate(_m_range(two_j)):
            two_mu = two_m1 + two_m2
            if abs(two_mu) > two_k:
                continue
            c_pair = clebsch_gordan(j, j, charge, two_m1 / 2, two_m2 / 2, two_mu / 2)
            if c_pair == 0.0:
                continue
            two_m3 = two_mt - two_mu
            if abs(two_m3) > two_j:
                continue
            c_tot = clebsch_gordan(charge, j, total_j, two_mu / 2, two_m3 / 2, two_mt / 2)
            if c_tot == 0.0:
                continue
            i3 = (two_j - two_m3) // 2
            amp[i1, i2, i3] += c_pair * c_tot
    return np.transpose(amp, _particle_axes(label)).reshape(-1)


def flip_all(state: PureState) -> PureState:
    """Flip every spin of a multi-qubit state (tensor power of the bit flip)."""
    if any(d != 2 for d in state.dims):
        raise ValueError("flip_all is defined on qubit registers only")
    flipped = state.tensor_view()[tuple(slice(None, None, -1) for _ in state.dims)]
    return PureState(state.dims, flipped.reshape(-1))


@dataclass(frozen=True)
class FusionBasis:
    """Orthonormal family |charge, m> for one choice of encoded pair.

    Every member is a simultaneous eigenstate of the total spin-squared
    operator (eigenvalue j_total(j_total+1)) and of the pair spin-squared
    operator (eigenvalue charge(charge+1)).
    """

    j: float
    total_j: float
    label: BasisLabel
    states: Mapping[tuple[int, float], PureState]

    @property
    def charges(self) -> tuple[int, ...]:
        return tuple(sorted({c for c, _ in self.states}))

    @property
    def m_values(self) -> tuple[float, ...]:
        return tuple(sorted({m for _, m in self.states}, reverse=True))

    def state(self, charge: int, m: float) -> PureState:
        return self.states[(charge, float(m))]

    def validate(self, atol: float = ATOL_ALGEBRA) -> None:
        keys = list(self.states)
        vecs = [self.states[k].amplitudes for k in keys]
        gram = np.array([[np.vdot(a, b) for b in vecs] for a in vecs])
        if np.max(np.abs(gram - np.eye(len(keys)))) > atol:
            raise ValueError(f"{self.label}: basis not orthonormal")
        dims = (twice(self.j) + 1,) * 3
        j_tot = spin_squared(self.j, dims_count=3).entries
        j_pair = spin_squared(self.j, dims_count=3, particles=self.label.pair).entries
        jt = self.total_j * (self.total_j + 1)
        for (charge, _m), vec in zip(keys, vecs):
            if np.linalg.norm(j_tot @ vec - jt * vec) > atol:
                raise ValueError(f"{self.label}: state {charge} not a total-spin eigenstate")
            ev = charge * (charge + 1)
            if np.linalg.norm(j_pair @ vec - ev * vec) > atol:
                raise ValueError(f"{self.label}: state {charge} not a pair-spin eigenstate")


@lru_cache(maxsize=None)
def spin_squared(j: float, dims_count: int = 3, particles: tuple[int, ...] | None = None) -> Operator:
    """(sum_k J_k)^2 restricted to the listed particles (1-based), as a dense operator."""
    two_j = twice(j)
    d = two_j + 1
    dims = (d,) * dims_count
    if particles is None:
        particles = tuple(range(1, dims_count + 1))
    side = d**dims_count
    components = []
    for op in spin_operators(j):
        total = np.zeros((side, side), dtype=np.complex128)
        for p in particles:
            mats = [op.entries if k == p else np.eye(d) for k in range(1, dims_count + 1)]
            emb = mats[0]
            for mat in mats[1:]:
                emb = np.kron(emb, mat)
            total += emb
        components.append(total)
    out = sum(comp @ comp for comp in components)
    return Operator(dims, out)


def _phase_aligned(cg_vec: np.ndarray, reference: np.ndarray, what: str) -> np.ndarray:
    overlap = complex(np.vdot(reference, cg_vec))
    if abs(abs(overlap) - 1.0) > ATOL_ALGEBRA:
        raise RuntimeError(
            f"coupling construction disagrees with amplitude table for {what} "
            f"(|overlap| = {abs(overlap):.12f})"
        )
    return cg_vec / overlap


@lru_cache(maxsize=None)
def build_qubit_basis(label: BasisLabel) -> FusionBasis:
    """The two-charge basis of the spin-1/2 triple for one encoded pair.

    States are built by Clebsch-Gordan coupling and then phase-locked to the
    explicit amplitude tables, so the returned highest-m vectors match the
    tabulated amplitudes exactly; the m = -1/2 partners are the all-spins
    flipped versions.
    """
    states: dict[tuple[int, float], PureState] = {}
    for charge in (0, 1):
        cg = _coupled_pair_vector(0.5, label, charge, 0.5, 0.5)
        plus = _phase_aligned(cg, _table_vector(label, charge), f"{label.wire}/charge {charge}")
        plus_state = PureState((2, 2, 2), plus)
        states[(charge, 0.5)] = plus_state
        states[(charge, -0.5)] = flip_all(plus_state)
    basis = FusionBasis(0.5, 0.5, label, MappingProxyType(states))
    basis.validate()
    return basis


@lru_cache(maxsize=None)
def build_qutrit_basis(label: BasisLabel) -> FusionBasis:
    """The three fusion paths of three spin-1 particles to total spin 1.

    The trit value is the charge (0, 1 or 2) of the labeled pair; each path
    carries a full m = -1, 0, +1 multiplet, for 9 orthonormal states inside
    the 27-dimensional product space.
    """
    states: dict[tuple[int, float], PureState] = {}
    for charge in (0, 1, 2):
        for m in (1.0, 0.0, -1.0):
            vec = _coupled_pair_vector(1.0, label, charge, 1.0, m)
            states[(charge, m)] = PureState((3, 3, 3), vec)
    basis = FusionBasis(1.0, 1.0, label, MappingProxyType(states))
    basis.validate()
    return basis


def fusion_basis(label: BasisLabel, j: float) -> FusionBasis:
    two_j = twice(j)
    if two_j == 1:
        return build_qubit_basis(label)
    if two_j == 2:
        return build_qutrit_basis(label)
    raise ValueError(f"no fusion basis implemented for spin {j}")


@dataclass(frozen=True)
class SignalState:
    """Mixed state seen on the wire when a symbol is sent in a given basis:
    the uniform mixture over the m multiplet of the charge eigenstates."""

    bit: int
    label: BasisLabel
    density: DensityMatrix


def signal_state(label: BasisLabel, bit: int, j: float = 0.5) -> SignalState:
    basis = fusion_basis(label, j)
    if bit not in basis.charges:
        raise ValueError(f"symbol {bit} not available in a spin-{j} basis")
    members = [basis.state(bit, m) for m in basis.m_values]
    density = DensityMatrix.mixture(
        [(1.0 / len(members), s.projector()) for s in members]
    )
    return SignalState(bit, label, density)


@dataclass(frozen=True)
class Povm:
    """Projective pair-charge measurement: one effect per charge value,
    acting on the full product space (identity on the odd particle)."""

    label: BasisLabel
    j: float
    effects: tuple[tuple[int, Operator], ...]

    def effect(self, outcome: int) -> Operator:
        for k, op in self.effects:
            if k == outcome:
                return op
        raise KeyError(outcome)

    def validate(self, atol: float = ATOL_ALGEBRA) -> None:
        total = np.zeros_like(self.effects[0][1].entries)
        for _, op in self.effects:
            if np.min(np.linalg.eigvalsh((op.entries + op.entries.conj().T) / 2)) < -atol:
                raise ValueError("effect not positive semidefinite")
            total = total + op.entries
        if np.max(np.abs(total - np.eye(total.shape[0]))) > atol:
            raise ValueError("effects do not sum to the identity")


def _pair_charge_projector(label: BasisLabel, j: float, charge: int) -> np.ndarray:
    """Projector onto pair spin `charge` of the labeled pair, tensor identity."""
    two_j = twice(j)
    d = two_j + 1
    pair_proj = np.zeros((d * d, d * d), dtype=np.complex128)
    for two_mu in range(2 * charge, -2 * charge - 1, -2):
        vec = np.zeros(d * d, dtype=np.complex128)
        for i1, two_m1 in enumerate(_m_range(two_j)):
            two_m2 = two_mu - two_m1
            if abs(two_m2) > two_j:
                continue
            c = clebsch_gordan(j, j, charge, two_m1 / 2, two_m2 / 2, two_mu / 2)
            vec[i1 * d + (two_j - two_m2) // 2] = c
        pair_proj += np.outer(vec, vec.conj())
    full = np.kron(pair_proj, np.eye(d))
    axes = _particle_axes(label)
    tensor = full.reshape((d,) * 6)
    tensor = np.transpose(tensor, axes + tuple(a + 3 for a in axes))
    return tensor.reshape(d**3, d**3)


@lru_cache(maxsize=None)
def povm(label: BasisLabel, j: float = 0.5) -> Povm:
    """Bob's measurement for one basis choice: project the labeled pair
    onto each of its possible total spins."""
    two_j = twice(j)
    d = two_j + 1
    dims = (d,) * 3
    effects = []
    for charge in range(2 * int(j) + 1) if two_j % 2 == 0 else range(two_j + 1):
        effects.append((charge, Operator(dims, _pair_charge_projector(label, j, charge))))
    out = Povm(label, j, tuple(effects))
    out.validate()
    return out


def overlap_table(a: BasisLabel, b: BasisLabel, j: float = 0.5) -> np.ndarray:
    """Absolute inner products |<a: charge i, m_top | b: charge k, m_top>|.

    Same-m states of two different encodings; by rotational covariance the
    table is independent of which m is used.  Requesting a == b is an error
    (use the orthonormality of a single basis instead).
    """
    if a == b:
        raise ValueError("overlap table needs two distinct bases")
    basis_a = fusion_basis(a, j)
    basis_b = fusion_basis(b, j)
    m_top = basis_a.m_values[0]
    charges = basis_a.charges
    table = np.zeros((len(charges), len(charges)))
    for row, ca in enumerate(charges):
        for col, cb in enumerate(charges):
            table[row, col] = abs(inner(basis_a.state(ca, m_top), basis_b.state(cb, m_top)))
    return table


# ---------------------------------------------------------------------------
# Full coupled (isotypic) basis of the three-particle space
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoupledSector:
    """All states of one total spin: multiplicity axis = fusion path (pair charge)."""

    total_j: float
    charges: tuple[int, ...]
    vectors: np.ndarray  # shape (dim, n_paths, 2*total_j + 1), orthonormal columns

    @property
    def multiplicity(self) -> int:
        return self.vectors.shape[1]


@lru_cache(maxsize=None)
def coupled_sectors(j: float, label: BasisLabel = BasisLabel.PAIR_12) -> tuple[CoupledSector, ...]:
    """Decompose (C^(2j+1))^3 into total-spin sectors along one coupling tree.

    Any tree gives the same sector decomposition; the multiplicity label is
    the intermediate pair charge of the chosen tree.
    """
    two_j = twice(j)
    d = two_j + 1
    by_total: dict[int, list[tuple[int, np.ndarray]]] = {}
    for charge in range(two_j + 1):
        two_k = 2 * charge
        for two_jt in range(abs(two_k - two_j), two_k + two_j + 1, 2):
            block = np.stack(
                [
                    _coupled_pair_vector(j, label, charge, two_jt / 2, two_m / 2)
                    for two_m in _m_range(two_jt)
                ],
                axis=1,
            )
            by_total.setdefault(two_jt, []).append((charge, block))
    sectors = []
    for two_jt in sorted(by_total):
        entries = by_total[two_jt]
        charges = tuple(c for c, _ in entries)
        vectors = np.stack([blk for _, blk in entries], axis=1)
        vectors.setflags(write=False)
        sectors.append(CoupledSector(two_jt / 2, charges, vectors))
    total = sum(s.vectors.shape[1] * s.vectors.shape[2] for s in sectors)
    if total != d**3:
        raise RuntimeError(f"coupled basis incomplete: {total} of {d ** 3} states")
    return tuple(sectors)


def fusion_multiplicities(j: float) -> dict[float, int]:
    """Multiplicity of each total spin in the three-particle decomposition."""
    return {s.total_j: s.multiplicity for s in coupled_sectors(j)}
