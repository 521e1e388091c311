"""SU(2) representation machinery.

Rotations are stored as unit quaternions (w, x, y, z), i.e. elements of
SU(2) itself, so half-integer representations get the correct sign under
2*pi turns.  The quaternion q = (cos(t/2), sin(t/2) n) corresponds to the
spin-1/2 unitary

    U(q) = w I - i (x sx + y sy + z sz)

with sx, sy, sz the Pauli matrices, and the Hamilton product maps to the
matrix product in the same order.

Spin-j rotation matrices are obtained by conjugating the 2j-fold tensor
power of U(q) with the highest-weight coupling isometry, which keeps them
exactly consistent with the Clebsch-Gordan phase convention used to build
coupled bases elsewhere in the package.

Clebsch-Gordan coefficients use the Condon-Shortley convention and are
evaluated from the closed-form Racah sum with exact rational arithmetic,
so every coefficient is the (signed) square root of an exact fraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .hilbert import Operator

_QUATERNION_ATOL = 1e-12


def twice(j: float) -> int:
    """2*j as an exact integer; rejects values that are not half-integers."""
    v = 2.0 * float(j)
    t = round(v)
    if abs(v - t) > 1e-9:
        raise ValueError(f"{j} is not a half-integer spin")
    return int(t)


@dataclass(frozen=True)
class Rotation:
    """Unit quaternion; doubles as an SU(2) group element."""

    w: float
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        norm = math.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)
        if norm < _QUATERNION_ATOL:
            raise ValueError("zero quaternion does not define a rotation")
        if abs(norm - 1.0) > _QUATERNION_ATOL:
            object.__setattr__(self, "w", self.w / norm)
            object.__setattr__(self, "x", self.x / norm)
            object.__setattr__(self, "y", self.y / norm)
            object.__setattr__(self, "z", self.z / norm)

    @classmethod
    def identity(cls) -> "Rotation":
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_axis_angle(cls, axis: np.ndarray, angle: float) -> "Rotation":
        ax = np.asarray(axis, dtype=float)
        n = float(np.linalg.norm(ax))
        if n < _QUATERNION_ATOL:
            raise ValueError("rotation axis must be nonzero")
        ax = ax / n
        half = 0.5 * float(angle)
        s = math.sin(half)
        return cls(math.cos(half), s * ax[0], s * ax[1], s * ax[2])

    def axis_angle(self) -> tuple[np.ndarray, float]:
        """Axis and angle in [0, 2*pi); identity maps to the z axis, angle 0."""
        v = np.array([self.x, self.y, self.z])
        s = float(np.linalg.norm(v))
        angle = 2.0 * math.atan2(s, self.w)
        axis = v / s if s > _QUATERNION_ATOL else np.array([0.0, 0.0, 1.0])
        return axis, angle

    def __mul__(self, other: "Rotation") -> "Rotation":
        w1, x1, y1, z1 = self.w, self.x, self.y, self.z
        w2, x2, y2, z2 = other.w, other.x, other.y, other.z
        return Rotation(
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 + y1 * w2 + z1 * x2 - x1 * z2,
            w1 * z2 + z1 * w2 + x1 * y2 - y1 * x2,
        )

    def inverse(self) -> "Rotation":
        return Rotation(self.w, -self.x, -self.y, -self.z)

    def is_identity(self, atol: float = 1e-15) -> bool:
        return abs(abs(self.w) - 1.0) <= atol


def haar_sample(rng: np.random.Generator) -> Rotation:
    """Haar-uniform rotation: normalized 4-dimensional Gaussian quaternion."""
    while True:
        q = rng.standard_normal(4)
        if np.linalg.norm(q) > _QUATERNION_ATOL:
            return Rotation(*q)


@dataclass(frozen=True)
class MisalignmentModel:
    """Distribution of the frame rotation applied to each transmitted packet.

    Variants: "haar-uniform" (no knowledge at all), "fixed" (a single known
    rotation; identity means aligned frames), "small-angle" (axis uniform on
    the sphere, angle half-normal with parameter sigma, interpolating between
    perfect alignment at sigma=0 and near-uniform for large sigma).
    """

    kind: str
    rotation: Rotation | None = None
    sigma: float | None = None

    def __post_init__(self) -> None:
        if self.kind == "haar-uniform":
            if self.rotation is not None or self.sigma is not None:
                raise ValueError("haar-uniform takes no parameters")
        elif self.kind == "fixed":
            if self.rotation is None or self.sigma is not None:
                raise ValueError("fixed requires a rotation and no sigma")
        elif self.kind == "small-angle":
            if self.sigma is None or self.rotation is not None:
                raise ValueError("small-angle requires sigma only")
            if self.sigma < 0:
                raise ValueError("sigma must be >= 0")
        else:
            raise ValueError(f"unknown misalignment variant {self.kind!r}")

    @classmethod
    def haar(cls) -> "MisalignmentModel":
        return cls("haar-uniform")

    @classmethod
    def fixed(cls, rotation: Rotation) -> "MisalignmentModel":
        return cls("fixed", rotation=rotation)

    @classmethod
    def aligned(cls) -> "MisalignmentModel":
        return cls("fixed", rotation=Rotation.identity())

    @classmethod
    def small_angle(cls, sigma: float) -> "MisalignmentModel":
        return cls("small-angle", sigma=float(sigma))

    def sample(self, rng: np.random.Generator) -> Rotation:
        if self.kind == "haar-uniform":
            return haar_sample(rng)
        if self.kind == "fixed":
            assert self.rotation is not None
            return self.rotation
        assert self.sigma is not None
        if self.sigma == 0.0:
            return Rotation.identity()
        while True:
            axis = rng.standard_normal(3)
            if np.linalg.norm(axis) > _QUATERNION_ATOL:
                break
        angle = abs(rng.normal(0.0, self.sigma))
        return Rotation.from_axis_angle(axis, angle)

    def describe(self) -> str:
        """Flag-style description, e.g. "haar" or "fixed:0.5,0.5,0.5,0.5"."""
        if self.kind == "haar-uniform":
            return "haar"
        if self.kind == "small-angle":
            return f"small-angle:{self.sigma!r}"
        assert self.rotation is not None
        r = self.rotation
        if r.is_identity():
            return "none"
        return f"fixed:{r.w!r},{r.x!r},{r.y!r},{r.z!r}"


# ---------------------------------------------------------------------------
# Spin operators and rotation matrices
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _spin_matrices(two_j: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    j = two_j / 2.0
    dim = two_j + 1
    m = j - np.arange(dim)  # descending m, matching the basis ordering
    jz = np.diag(m).astype(np.complex128)
    # J+ |j m> = sqrt(j(j+1) - m(m+1)) |j m+1>; m+1 sits one row up.
    raise_amp = np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1))
    jp = np.zeros((dim, dim), dtype=np.complex128)
    jp[np.arange(dim - 1), np.arange(1, dim)] = raise_amp
    jm = jp.conj().T
    jx = (jp + jm) / 2.0
    jy = (jp - jm) / 2.0j
    for arr in (jx, jy, jz):
        arr.setflags(write=False)
    return jx, jy, jz


def spin_operators(j: float) -> tuple[Operator, Operator, Operator]:
    """Angular momentum components (Jx, Jy, Jz) for a single spin-j particle."""
    two_j = twice(j)
    if two_j < 0:
        raise ValueError("spin must be >= 0")
    jx, jy, jz = _spin_matrices(two_j)
    dims = (two_j + 1,)
    return Operator(dims, jx), Operator(dims, jy), Operator(dims, jz)


def _su2_matrix(r: Rotation) -> np.ndarray:
    return np.array(
        [
            [r.w - 1j * r.z, -r.y - 1j * r.x],
            [r.y - 1j * r.x, r.w + 1j * r.z],
        ],
        dtype=np.complex128,
    )


@lru_cache(maxsize=None)
def _highest_weight_isometry(two_j: int) -> np.ndarray:
    """Isometry from C^(2j+1) into the symmetric subspace of (C^2)^(2j).

    Columns are the stretch-coupled states |j m> (m descending) expressed in
    the 2^(2j)-dimensional product basis, built by repeatedly coupling one
    more spin-1/2 at maximal total spin with Clebsch-Gordan coefficients.
    """
    cols = np.eye(2, dtype=np.complex128)  # spin 1/2: |+>, |->
    two_s = 1
    while two_s < two_j:
        dim_in = cols.shape[0]
        new = np.zeros((dim_in * 2, two_s + 2), dtype=np.complex128)
        for col, two_m in enumerate(range(two_s + 1, -two_s - 3, -2)):
            for i, two_m1 in enumerate(range(two_s, -two_s - 1, -2)):
                for k, two_m2 in enumerate((1, -1)):
                    if two_m1 + two_m2 != two_m:
                        continue
                    c = clebsch_gordan(
                        two_s / 2, 0.5, (two_s + 1) / 2,
                        two_m1 / 2, two_m2 / 2, two_m / 2,
                    )
                    if c != 0.0:
                        block = np.zeros(2)
                        block[k] = 1.0
                        new[:, col] += c * np.kron(cols[:, i], block)
        cols = new
        two_s += 1
    cols.setflags(write=False)
    return cols


def rotation_matrix(j: float, r: Rotation) -> Operator:
    """Spin-j representation matrix of the rotation r (dimension 2j+1).

    Unitary, and a group homomorphism at the SU(2) level:
    rotation_matrix(j, r1 * r2) == rotation_matrix(j, r1) @ rotation_matrix(j, r2).
    """
    two_j = twice(j)
    if two_j < 1:
        raise ValueError(f"invalid spin {j}; need j in {{1/2, 1, 3/2, ...}}")
    u = _su2_matrix(r)
    if two_j == 1:
        return Operator((2,), u)
    big = u
    for _ in range(two_j - 1):
        big = np.kron(big, u)
    iso = _highest_weight_isometry(two_j)
    return Operator((two_j + 1,), iso.conj().T @ big @ iso)


# ---------------------------------------------------------------------------
# Clebsch-Gordan coefficients
# ---------------------------------------------------------------------------

def _twice_checked(value: float, name: str) -> int:
    v = 2.0 * float(value)
    t = round(v)
    if abs(v - t) > 1e-9:
        raise ValueError(f"{name}={value} is not a half-integer")
    return int(t)


def clebsch_gordan(j1: float, j2: float, j: float, m1: float, m2: float, m: float) -> float:
    """Coefficient <j1 m1; j2 m2 | j m> in the Condon-Shortley convention.

    Returns 0.0 for any combination violating the selection rules (triangle
    inequality, m = m1 + m2, |m_i| <= j_i, parity); raises only for inputs
    that are not half-integers at all.
    """
    t1 = _twice_checked(j1, "j1")
    t2 = _twice_checked(j2, "j2")
    t3 = _twice_checked(j, "j")
    u1 = _twice_checked(m1, "m1")
    u2 = _twice_checked(m2, "m2")
    u3 = _twice_checked(m, "m")

    if t1 < 0 or t2 < 0 or t3 < 0:
        return 0.0
    if u1 + u2 != u3:
        return 0.0
    if abs(u1) > t1 or abs(u2) > t2 or abs(u3) > t3:
        return 0.0
    # m must differ from j by an integer, and (j1, j2, j) must couple.
    if (t1 - u1) % 2 or (t2 - u2) % 2 or (t3 - u3) % 2:
        return 0.0
    if (t1 + t2 + t3) % 2:
        return 0.0
    if t3 < abs(t1 - t2) or t3 > t1 + t2:
        return 0.0

    f = math.factorial
    pre = Fraction(
        (t3 + 1)
        * f((t3 + t1 - t2) // 2)
        * f((t3 - t1 + t2) // 2)
        * f((t1 + t2 - t3) // 2),
        f((t1 + t2 + t3) // 2 + 1),
    )
    pre *= (
        f((t3 + u3) // 2)
        * f((t3 - u3) // 2)
        * f((t1 - u1) // 2)
        * f((t1 + u1) // 2)
        * f((t2 - u2) // 2)
        * f((t2 + u2) // 2)
    )

    k_min = max(0, (t2 - t3 - u1) // 2, (t1 - t3 + u2) // 2)
    k_max = min((t1 + t2 - t3) // 2, (t1 - u1) // 2, (t2 + u2) // 2)
    total = Fraction(0)
    for k in range(k_min, k_max + 1):
        denom = (
            f(k)
            * f((t1 + t2 - t3) // 2 - k)
            * f((t1 - u1) // 2 - k)
            * f((t2 + u2) // 2 - k)
            * f((t3 - t2 + u1) // 2 + k)
            * f((t3 - t1 - u2) // 2 + k)
        )
        total += Fraction(-1 if k % 2 else 1, denom)
    if total == 0:
        return 0.0
    magnitude_sq = pre * total * total
    sign = 1.0 if total > 0 else -1.0
    return sign * math.sqrt(magnitude_sq.numerator / magnitude_sq.denominator)
