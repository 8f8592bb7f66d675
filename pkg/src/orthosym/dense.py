"""Dense complex linear algebra over tensor-product Hilbert spaces.

Everything here works on explicit matrices: Kronecker products, partial
transposes and traces over arbitrary subsystem subsets, Hermitian eigenvalue
bounds, and seeded random orthogonal/unitary sampling.  All functions are
pure and all returned operators are immutable, so values can be shared
freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterable, Sequence

import numpy as np

#: Hard cap on the total Hilbert dimension of any dense construction.
MAX_DIM = 4096

#: Hermiticity tolerance, relative to the largest entry magnitude.
HERM_RTOL = 1e-12

#: Default tolerance for positive-semidefiniteness verdicts.
PSD_TOL = 1e-9


class CapacityError(ValueError):
    """The requested construction exceeds the supported dense dimension."""


class DomainError(ValueError):
    """An input violates a mathematical precondition of the operation."""


@dataclass(frozen=True, eq=False)
class ComplexOperator:
    """Square complex matrix on a tensor product of finite local spaces.

    ``shape`` lists the local dimensions in tensor order (leftmost factor
    first); their product must equal the matrix dimension.  The matrix is
    stored as a read-only complex128 array in row-major order.
    """

    matrix: np.ndarray
    shape: tuple[int, ...]

    def __post_init__(self) -> None:
        mat = np.array(self.matrix, dtype=np.complex128, order="C", copy=True)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"operator matrix must be square, got {mat.shape}")
        shape = tuple(int(s) for s in self.shape)
        if not shape or any(s < 1 for s in shape):
            raise ValueError(f"local dimensions must be positive, got {shape}")
        if prod(shape) != mat.shape[0]:
            raise ValueError(
                f"shape {shape} has product {prod(shape)}, "
                f"but the matrix dimension is {mat.shape[0]}"
            )
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "shape", shape)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def dagger(self) -> "ComplexOperator":
        return ComplexOperator(self.matrix.conj().T, self.shape)

    def to_json(self) -> dict:
        """Row-major JSON form ``{"dim", "shape", "re", "im"}``."""
        flat = self.matrix.reshape(-1)
        return {
            "dim": self.dim,
            "shape": list(self.shape),
            "re": [float(x) for x in flat.real],
            "im": [float(x) for x in flat.imag],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ComplexOperator":
        dim = int(data["dim"])
        re = np.asarray(data["re"], dtype=float).reshape(dim, dim)
        im = np.asarray(data["im"], dtype=float).reshape(dim, dim)
        return cls(re + 1j * im, tuple(int(s) for s in data["shape"]))


def identity(shape: Sequence[int]) -> ComplexOperator:
    """Identity operator with the given local dimensions."""
    return ComplexOperator(np.eye(prod(shape)), tuple(shape))


def pure_state_projector(vector: np.ndarray) -> ComplexOperator:
    """Rank-1 projector |v><v| onto a unit vector, as a single-factor operator."""
    v = np.asarray(vector, dtype=np.complex128).reshape(-1)
    return ComplexOperator(np.outer(v, v.conj()), (v.size,))


def _subsystems(op: ComplexOperator, subs: Iterable[int]) -> tuple[int, ...]:
    out = tuple(sorted(int(s) for s in subs))
    if len(set(out)) != len(out):
        raise IndexError(f"duplicate subsystem indices in {out}")
    if out and (out[0] < 0 or out[-1] >= len(op.shape)):
        raise IndexError(f"subsystem indices {out} out of range for shape {op.shape}")
    return out


def kron(a: ComplexOperator, b: ComplexOperator, *, max_dim: int = MAX_DIM) -> ComplexOperator:
    """Kronecker product; the factors of ``b`` are appended to those of ``a``.

    Row index convention is the standard one: i_a * b.dim + i_b.
    """
    if a.dim * b.dim > max_dim:
        raise CapacityError(f"kron dimension {a.dim * b.dim} exceeds the cap {max_dim}")
    return ComplexOperator(np.kron(a.matrix, b.matrix), a.shape + b.shape)


def partial_transpose(a: ComplexOperator, subs: Iterable[int]) -> ComplexOperator:
    """Transpose the selected tensor factors, leaving the rest untouched.

    Parameters
    ----------
    a : operator with a declared factorization
    subs : subsystem positions (0-based) whose row/column indices are swapped

    The map is a trace-preserving involution.
    """
    subs = _subsystems(a, subs)
    n = len(a.shape)
    tensor = a.matrix.reshape(a.shape + a.shape)
    axes = list(range(2 * n))
    for s in subs:
        axes[s], axes[n + s] = axes[n + s], axes[s]
    return ComplexOperator(tensor.transpose(axes).reshape(a.dim, a.dim), a.shape)


def partial_trace(a: ComplexOperator, subs: Iterable[int]) -> ComplexOperator:
    """Trace out the selected tensor factors.

    The result lives on the complementary factors and has the same trace as
    the input.  Tracing out every factor yields a 1x1 operator holding the
    full trace.
    """
    subs = _subsystems(a, subs)
    dims = list(a.shape)
    tensor = a.matrix.reshape(a.shape + a.shape)
    for s in sorted(subs, reverse=True):
        tensor = np.trace(tensor, axis1=s, axis2=s + len(dims))
        del dims[s]
    if not dims:
        dims = [1]
    d = prod(dims)
    return ComplexOperator(np.asarray(tensor).reshape(d, d), tuple(dims))


def min_eigenvalue(a: ComplexOperator, *, herm_rtol: float = HERM_RTOL) -> float:
    """Smallest eigenvalue of a Hermitian operator.

    Raises :class:`DomainError` when the matrix deviates from Hermiticity by
    more than ``herm_rtol`` relative to its largest entry magnitude.
    """
    m = a.matrix
    scale = float(np.abs(m).max())
    if scale > 0.0 and float(np.abs(m - m.conj().T).max()) > herm_rtol * scale:
        raise DomainError("matrix is not Hermitian within tolerance")
    herm = (m + m.conj().T) / 2.0
    return float(np.linalg.eigvalsh(herm)[0])


def is_psd(a: ComplexOperator, tol: float = PSD_TOL) -> bool:
    """True when the smallest eigenvalue is above ``-tol``."""
    return min_eigenvalue(a) >= -tol


def random_orthogonal(d: int, seed) -> ComplexOperator:
    """Haar-distributed real orthogonal matrix, deterministic per seed.

    A square matrix of independent standard normals is QR-orthogonalized and
    the column signs are fixed so the triangular factor has a positive
    diagonal, which makes the distribution exactly Haar on O(d).
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    q = q * np.where(np.diag(r) < 0.0, -1.0, 1.0)
    return ComplexOperator(q, (d,))


def random_unitary(d: int, seed) -> ComplexOperator:
    """Haar-distributed unitary matrix (complex Ginibre + QR phase fix)."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    rng = np.random.default_rng(seed)
    g = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(g)
    diag = np.diag(r).copy()
    diag[diag == 0] = 1.0
    q = q * (diag / np.abs(diag))
    return ComplexOperator(q, (d,))


def random_unit_vector(d: int, field: str, seed) -> np.ndarray:
    """Unit-norm random vector over the ``"real"`` or ``"complex"`` field."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    rng = np.random.default_rng(seed)
    if field == "real":
        v = rng.standard_normal(d)
    elif field == "complex":
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    else:
        raise ValueError(f"unknown field {field!r}")
    return v / np.linalg.norm(v)
