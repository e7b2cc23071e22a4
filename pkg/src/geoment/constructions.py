"""Determinant tensors, their regrouping into qudits, and the pure witness.

``det_d`` puts ``sgn(pi)`` at position ``(pi(0), ..., pi(d-1))`` for every
permutation of ``range(d)``. Regrouping identifies C^{n^p} with (C^n)^{⊗p}
through base-``n`` digits, most significant first, which under the
row-major layout is a plain reshape.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import BudgetError, DimensionError
from .tensor import MAX_COEFFS, DenseTensor, PureTensor, basis_vector

MAX_FACTORS = 24


def permutation_sign(perm) -> int:
    """Sign of a permutation of ``range(len(perm))`` via cycle decomposition."""
    perm = list(perm)
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def det_tensor(d: int, signed: bool = True, normalize: bool = False, *, max_coeffs: int = MAX_COEFFS) -> DenseTensor:
    """The determinant tensor in (C^d)^{⊗d}; ``signed=False`` gives the permanent-type sum."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if d**d > max_coeffs:
        raise BudgetError(f"d**d = {d**d} coefficients exceed the budget {max_coeffs}")
    perms = np.array(list(itertools.permutations(range(d))), dtype=np.intp)
    vals = np.ones(len(perms))
    if signed:
        vals = np.array([permutation_sign(p) for p in perms], dtype=float)
    if normalize:
        vals = vals / math.sqrt(math.factorial(d))
    out = np.zeros((d,) * d, dtype=np.complex128)
    out[tuple(perms.T)] = vals
    return DenseTensor(out, n=d, max_coeffs=max_coeffs)


def regroup(T: DenseTensor, n: int, p: int) -> DenseTensor:
    """View a tensor over C^{n^p} of order m as one over C^n of order p*m."""
    if T.n != n**p:
        raise DimensionError(f"local dimension {T.n} is not {n}**{p}")
    return DenseTensor(T.data.reshape((n,) * (p * T.k)), n=n)


def _check_tnp_budget(n: int, p: int) -> None:
    d = n**p
    if p * d > MAX_FACTORS:
        raise BudgetError(f"T_(n,p) would have {p * d} factors; limit is {MAX_FACTORS}")
    if d**d > MAX_COEFFS:
        raise BudgetError(f"T_(n,p) would have {d**d} coefficients; limit is {MAX_COEFFS}")


def t_np(n: int, p: int) -> DenseTensor:
    """Unit tensor ``det_{n^p} / sqrt(n^p!)`` regrouped into ``p * n^p`` factors of C^n."""
    if n < 1 or p < 1:
        raise ValueError("n and p must be >= 1")
    _check_tnp_budget(n, p)
    return regroup(det_tensor(n**p, signed=True, normalize=True), n, p)


@dataclass(frozen=True)
class GroupingMap:
    """A bijection from ``{1..n^p}`` to digit tuples in ``{0..n-1}^p``.

    ``h[i-1]`` is the digit tuple assigned to ``i``.
    """

    n: int
    p: int
    h: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        h = tuple(tuple(int(x) for x in t) for t in self.h)
        object.__setattr__(self, "h", h)
        d = self.n**self.p
        if len(h) != d:
            raise ValueError(f"bijection needs {d} entries, got {len(h)}")
        if any(len(t) != self.p or not all(0 <= x < self.n for x in t) for t in h):
            raise ValueError(f"every entry must be {self.p} digits in range(0, {self.n})")
        if len(set(h)) != d:
            raise ValueError("grouping map is not a bijection: repeated digit tuples")

    @classmethod
    def default(cls, n: int, p: int) -> "GroupingMap":
        """Base-``n`` digits of ``i - 1``, most significant first."""
        return cls(n, p, tuple(itertools.product(range(n), repeat=p)))

    def big_index(self, i: int) -> int:
        """Position in C^{n^p} of the basis vector ``e_{h(i)}`` (``i`` is 1-based)."""
        return int(np.ravel_multi_index(self.h[i - 1], (self.n,) * self.p))


def witness_u(g: GroupingMap) -> PureTensor:
    """``u = ⊗_i e_{h(i)}``, expanded into ``p * n^p`` standard basis factors."""
    factors = [basis_vector(g.n, digit) for digits in g.h for digit in digits]
    return PureTensor(factors)


def witness_sign(g: GroupingMap) -> int:
    """``<det_{n^p}, u>`` for the unnormalized signed determinant; always +-1."""
    perm = [g.big_index(i) for i in range(1, g.n**g.p + 1)]
    return permutation_sign(perm)


def exact_E_tnp(n: int, p: int) -> float:
    """``log2((n^p)!)`` as a sum of logs."""
    return math.fsum(math.log2(j) for j in range(2, n**p + 1))
