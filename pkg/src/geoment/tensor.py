"""Dense complex tensors in (C^n)^{⊗k}.

Layout is row-major: the multi-index ``(i_1, ..., i_k)`` lives at flat
position ``sum_j i_j * n**(k-j)``, which is exactly NumPy's C order for an
array of shape ``(n,) * k``. Every module relies on this convention.

The hermitian form is conjugate-linear in the second argument::

    <T, S> = sum_idx T[idx] * conj(S[idx])
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._rng import as_rng, complex_gaussian
from .exceptions import BudgetError, DimensionError

MAX_COEFFS = 2**24
UNIT_TOL = 1e-12


def _check_budget(n: int, k: int, max_coeffs: int) -> None:
    if n**k > max_coeffs:
        raise BudgetError(f"n**k = {n}**{k} exceeds the coefficient budget {max_coeffs}")


class DenseTensor:
    """Order-``k`` tensor over C^n stored as an ``(n,) * k`` complex array.

    The array is copied on construction and marked read-only. An order-0
    tensor (a scalar, produced by contracting every factor) keeps ``n`` so
    that it can still be compared with other tensors of the same family.
    """

    __slots__ = ("data", "n")

    def __init__(self, data, n: int | None = None, *, max_coeffs: int = MAX_COEFFS):
        arr = np.array(data, dtype=np.complex128)
        if arr.ndim == 0:
            if n is None:
                raise DimensionError("an order-0 tensor needs an explicit local dimension n")
        else:
            if len(set(arr.shape)) != 1:
                raise DimensionError(f"tensor must be hypercubic, got shape {arr.shape}")
            if n is not None and arr.shape[0] != n:
                raise DimensionError(f"local dimension {arr.shape[0]} does not match n={n}")
            n = arr.shape[0]
        if n < 1:
            raise DimensionError("local dimension must be >= 1")
        if arr.size > max_coeffs:
            raise BudgetError(f"{arr.size} coefficients exceed the budget {max_coeffs}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("tensor coefficients must be finite")
        arr.flags.writeable = False
        self.data = arr
        self.n = int(n)

    @classmethod
    def from_coeffs(cls, coeffs, n: int, k: int, **kw) -> "DenseTensor":
        flat = np.asarray(coeffs, dtype=np.complex128).ravel()
        if flat.size != n**k:
            raise DimensionError(f"expected {n**k} coefficients for n={n}, k={k}, got {flat.size}")
        return cls(flat.reshape((n,) * k), n=n, **kw)

    @classmethod
    def zeros(cls, n: int, k: int) -> "DenseTensor":
        return cls(np.zeros((n,) * k, dtype=np.complex128), n=n)

    @property
    def k(self) -> int:
        return self.data.ndim

    @property
    def coeffs(self) -> np.ndarray:
        return self.data.reshape(-1)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.k)

    def __repr__(self) -> str:
        return f"DenseTensor(n={self.n}, k={self.k})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, DenseTensor):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.data, other.data)

    __hash__ = None

    def scaled(self, factor: complex) -> "DenseTensor":
        return DenseTensor(self.data * factor, n=self.n)

    def normalized(self) -> "DenseTensor":
        nrm = norm(self)
        if nrm == 0:
            raise ValueError("cannot normalize the zero tensor")
        return self.scaled(1.0 / nrm)

    def is_unit(self, tol: float = 1e-10) -> bool:
        return abs(norm(self) - 1.0) <= tol


@dataclass(frozen=True)
class PureTensor:
    """A simple tensor ``v_1 ⊗ ... ⊗ v_k`` kept in factored form."""

    factors: tuple[np.ndarray, ...]

    def __init__(self, factors: Sequence):
        fs = tuple(np.array(f, dtype=np.complex128).reshape(-1) for f in factors)
        if not fs:
            raise DimensionError("a pure tensor needs at least one factor")
        n = fs[0].size
        if any(f.size != n for f in fs):
            raise DimensionError("all factors of a pure tensor must have the same length")
        for f in fs:
            f.flags.writeable = False
        object.__setattr__(self, "factors", fs)

    @property
    def n(self) -> int:
        return self.factors[0].size

    @property
    def k(self) -> int:
        return len(self.factors)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.k)

    def is_unit(self, tol: float = UNIT_TOL) -> bool:
        return all(abs(np.linalg.norm(f) - 1.0) <= tol for f in self.factors)

    def as_array(self) -> np.ndarray:
        return np.stack(self.factors)


def check_unit_vector(v, tol: float = UNIT_TOL) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    if abs(np.linalg.norm(v) - 1.0) > tol:
        raise ValueError(f"expected a unit vector, got norm {np.linalg.norm(v)!r}")
    return v


def _same_shape(T: DenseTensor, S) -> None:
    if T.shape != S.shape:
        raise DimensionError(f"shape mismatch: (n, k) = {T.shape} vs {S.shape}")


def inner(T: DenseTensor, S: DenseTensor) -> complex:
    _same_shape(T, S)
    return complex(np.vdot(S.data, T.data))


def norm(T: DenseTensor) -> float:
    return float(np.linalg.norm(T.coeffs))


def pure_to_dense(P: PureTensor, *, max_coeffs: int = MAX_COEFFS) -> DenseTensor:
    _check_budget(P.n, P.k, max_coeffs)
    out = P.factors[0]
    for f in P.factors[1:]:
        out = np.multiply.outer(out, f)
    return DenseTensor(out, n=P.n, max_coeffs=max_coeffs)


def _contract_last(arr: np.ndarray, v: np.ndarray) -> np.ndarray:
    # sum_i arr[..., i] * conj(v[i])
    return arr @ v.conj()


def eval_pure(T: DenseTensor, P: PureTensor) -> complex:
    """``<T, P>`` by successive contractions from the last factor inward."""
    _same_shape(T, P)
    arr = T.data
    for f in reversed(P.factors):
        arr = _contract_last(arr, f)
    return complex(arr)


def slice(T: DenseTensor, axis: int, i: int) -> DenseTensor:  # noqa: A001
    """The order-(k-1) tensor ``T_i`` with ``T = sum_i T_i ⊗ e_i`` along ``axis``."""
    if not 0 <= axis < T.k:
        raise IndexError(f"axis {axis} out of range for order {T.k}")
    if not 0 <= i < T.n:
        raise IndexError(f"index {i} out of range for local dimension {T.n}")
    return DenseTensor(np.take(T.data, i, axis=axis), n=T.n)


def reassemble(slices: Sequence[DenseTensor], axis: int) -> DenseTensor:
    """Inverse of taking every slice along ``axis``."""
    n = slices[0].n
    if len(slices) != n:
        raise DimensionError(f"need {n} slices, got {len(slices)}")
    return DenseTensor(np.stack([s.data for s in slices], axis=axis), n=n)


def contract_factor(T: DenseTensor, axis: int, v) -> DenseTensor:
    """Contract factor ``axis`` against ``conj(v)``.

    The result ``S`` satisfies ``<S, P> = <T, P with v inserted at axis>``.
    """
    if not 0 <= axis < T.k:
        raise IndexError(f"axis {axis} out of range for order {T.k}")
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    if v.size != T.n:
        raise DimensionError(f"vector length {v.size} does not match n={T.n}")
    out = np.tensordot(T.data, v.conj(), axes=([axis], [0]))
    return DenseTensor(out, n=T.n)


def random_unit_tensor(n: int, k: int, seed, *, max_coeffs: int = MAX_COEFFS) -> DenseTensor:
    """Uniform sample from the unit sphere of (C^n)^{⊗k}.

    ``seed`` is an int or an already derived ``numpy.random.Generator``.
    """
    if n < 1 or k < 1:
        raise ValueError("n and k must be >= 1")
    _check_budget(n, k, max_coeffs)
    z = complex_gaussian(as_rng(seed), n**k)
    z /= np.linalg.norm(z)
    return DenseTensor(z.reshape((n,) * k), n=n, max_coeffs=max_coeffs)


def basis_vector(n: int, i: int) -> np.ndarray:
    e = np.zeros(n, dtype=np.complex128)
    e[i] = 1.0
    return e
