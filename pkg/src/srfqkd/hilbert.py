"""Dense complex linear algebra for small multi-particle Hilbert spaces.

Everything in this package lives on a product space of at most three
particles with per-particle dimension 2 or 3 (so total dimension <= 27).
Dense numpy arrays are used throughout; there is no sparsity machinery.

Conventions fixed here and relied on everywhere else:

* single-particle basis ordered by descending magnetic quantum number
  (index 0 is the highest-m state, e.g. |m=+1/2> for a qubit);
* composite index with particle 1 most significant, so the flat index of
  |i1, i2, i3> is (i1 * d + i2) * d + i3.

All constructed values are immutable (arrays are marked read-only) and
safe to share between threads.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence, Union

import numpy as np

# Centralized tolerances: exact-algebra assertions vs. construction checks.
ATOL_ALGEBRA = 1e-10
ATOL_STATE = 1e-12


def _as_dims(dims: Iterable[int]) -> tuple[int, ...]:
    out = tuple(int(d) for d in dims)
    if not out or any(d < 1 for d in out):
        raise ValueError(f"invalid dimension list {out!r}")
    return out


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class PureState:
    """Normalized complex amplitude vector over a labeled product basis."""

    __slots__ = ("dims", "amplitudes")

    def __init__(self, dims: Iterable[int], amplitudes: np.ndarray) -> None:
        dims = _as_dims(dims)
        amp = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        if amp.size != math.prod(dims):
            raise ValueError(
                f"amplitude vector of length {amp.size} does not match dims {dims}"
            )
        norm = float(np.linalg.norm(amp))
        if norm < ATOL_STATE:
            raise ValueError("cannot normalize a (near-)zero amplitude vector")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", _frozen(amp / norm))

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("PureState is immutable")

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def tensor_view(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per particle (read-only view)."""
        return self.amplitudes.reshape(self.dims)

    def projector(self) -> "DensityMatrix":
        return DensityMatrix(self.dims, np.outer(self.amplitudes, self.amplitudes.conj()))

    def __repr__(self) -> str:
        return f"PureState(dims={self.dims})"


class Operator:
    """Square complex matrix acting on a labeled product space."""

    __slots__ = ("dims", "entries")

    def __init__(self, dims: Iterable[int], entries: np.ndarray) -> None:
        dims = _as_dims(dims)
        mat = np.array(entries, dtype=np.complex128)
        side = math.prod(dims)
        if mat.shape != (side, side):
            raise ValueError(f"operator shape {mat.shape} does not match dims {dims}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "entries", _frozen(mat))

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Operator is immutable")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def adjoint(self) -> "Operator":
        return Operator(self.dims, self.entries.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def is_hermitian(self, atol: float = ATOL_ALGEBRA) -> bool:
        return bool(np.max(np.abs(self.entries - self.entries.conj().T)) <= atol)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dims={self.dims})"


class DensityMatrix(Operator):
    """Operator that is Hermitian, unit-trace and positive semidefinite.

    Validation tolerances: Hermiticity and trace within 1e-10 (max-abs),
    eigenvalues >= -1e-10.
    """

    __slots__ = ()

    def __init__(self, dims: Iterable[int], entries: np.ndarray) -> None:
        super().__init__(dims, entries)
        mat = self.entries
        herm_dev = float(np.max(np.abs(mat - mat.conj().T)))
        if herm_dev > ATOL_ALGEBRA:
            raise ValueError(f"not Hermitian (max deviation {herm_dev:.3e})")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > ATOL_ALGEBRA:
            raise ValueError(f"trace {tr} is not 1 within {ATOL_ALGEBRA}")
        lo = float(np.min(np.linalg.eigvalsh((mat + mat.conj().T) / 2.0)))
        if lo < -ATOL_ALGEBRA:
            raise ValueError(f"negative eigenvalue {lo:.3e}")

    @classmethod
    def from_pure(cls, state: PureState) -> "DensityMatrix":
        return state.projector()

    @classmethod
    def mixture(cls, pairs: Sequence[tuple[float, "DensityMatrix"]]) -> "DensityMatrix":
        """Convex combination sum_k w_k rho_k; weights must sum to 1."""
        if not pairs:
            raise ValueError("empty mixture")
        dims = pairs[0][1].dims
        acc = np.zeros((math.prod(dims),) * 2, dtype=np.complex128)
        for weight, rho in pairs:
            if rho.dims != dims:
                raise ValueError("mixture components live on different spaces")
            acc += float(weight) * rho.entries
        return cls(dims, acc)


KindT = Union[PureState, Operator]


def basis_state(dims: Iterable[int], indices: Sequence[int]) -> PureState:
    """Product basis ket |i1, i2, ...> in the descending-m index convention."""
    dims = _as_dims(dims)
    if len(indices) != len(dims):
        raise ValueError("one index per particle required")
    flat = 0
    for d, i in zip(dims, indices):
        if not 0 <= i < d:
            raise ValueError(f"index {i} out of range for dimension {d}")
        flat = flat * d + int(i)
    amp = np.zeros(math.prod(dims), dtype=np.complex128)
    amp[flat] = 1.0
    return PureState(dims, amp)


def identity(dims: Iterable[int]) -> Operator:
    dims = _as_dims(dims)
    return Operator(dims, np.eye(math.prod(dims), dtype=np.complex128))


def tensor(a: KindT, b: KindT) -> KindT:
    """Kronecker product of two states or two operators.

    The result's dims are the concatenation of the factors' dims, with the
    first factor most significant in the flat index.
    """
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(a.dims + b.dims, np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, Operator) and isinstance(b, Operator):
        kron = np.kron(a.entries, b.entries)
        if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
            return DensityMatrix(a.dims + b.dims, kron)
        return Operator(a.dims + b.dims, kron)
    raise TypeError("tensor requires two states or two operators")


def inner(a: PureState, b: PureState) -> complex:
    """Inner product <a|b>, conjugate-linear in the first argument."""
    if a.dims != b.dims:
        raise ValueError(f"dimension mismatch: {a.dims} vs {b.dims}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def trace_product(a: Operator, b: Operator) -> complex:
    """Tr(a b) without forming the full matrix product."""
    if a.dims != b.dims:
        raise ValueError(f"dimension mismatch: {a.dims} vs {b.dims}")
    return complex(np.sum(a.entries * b.entries.T))


def eig_hermitian(a: Operator) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian operator.

    Returns (eigenvalues ascending, eigenvector columns). Raises ValueError
    if the input is not Hermitian within 1e-10.
    """
    if not a.is_hermitian():
        raise ValueError("eig_hermitian requires a Hermitian operator")
    vals, vecs = np.linalg.eigh(a.entries)
    return vals, vecs


def trace_norm(entries: np.ndarray) -> float:
    """Sum of singular values ||A||_1 (trace norm, no 1/2 factor)."""
    return float(np.sum(np.linalg.svd(np.asarray(entries), compute_uv=False)))


def trace_distance(a: Operator, b: Operator) -> float:
    """||a - b||_1; the channel module reports distances in this norm."""
    if a.dims != b.dims:
        raise ValueError(f"dimension mismatch: {a.dims} vs {b.dims}")
    return trace_norm(a.entries - b.entries)
