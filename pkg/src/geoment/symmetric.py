"""Symmetric tensors S^m(C^n) in isometric monomial coordinates.

A symmetric tensor is stored as one coordinate per exponent vector
``alpha`` (``sum(alpha) == m``), listed in descending lexicographic order so
that ``x_1^m`` comes first. The coordinate of ``alpha`` equals the common
dense entry times ``sqrt(multinomial(m; alpha))``; with this scaling the
coordinate vector and the dense tensor have the same euclidean norm.

Plain polynomial coefficients ``a_alpha`` of ``sum a_alpha x^alpha`` convert via
``coords = a / sqrt(multinomial)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._rng import as_rng, complex_gaussian, derive_rng, random_unit_vectors
from .exceptions import BudgetError, DimensionError, NormalizationError
from .nets import EpsilonNet
from .spectral import SigmaInterval, canonical_phase, default_num_starts
from .tensor import MAX_COEFFS, DenseTensor, PureTensor

_MAX_RESTARTS = 20
_MIN_STEP = 2.0**-30
# plain power steps converge linearly in the ratio of the top two Takagi values,
# so near-degenerate inputs need more room than the general solver
SYM_MAX_ITERS = 2000


def d_nm(n: int, m: int) -> int:
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    return math.comb(m + n - 1, m)


@lru_cache(maxsize=64)
def exponents(n: int, m: int) -> np.ndarray:
    """All exponent vectors of degree ``m`` in ``n`` variables, descending lex order."""

    def rec(nv: int, deg: int):
        if nv == 1:
            yield (deg,)
            return
        for a in range(deg, -1, -1):
            for rest in rec(nv - 1, deg - a):
                yield (a,) + rest

    out = np.array(list(rec(n, m)), dtype=np.int64).reshape(-1, n)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=64)
def multinomials(n: int, m: int) -> np.ndarray:
    fm = math.factorial(m)
    vals = [fm // math.prod(math.factorial(int(a)) for a in row) for row in exponents(n, m)]
    out = np.array(vals, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class SymmetricTensor:
    n: int
    m: int
    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=np.complex128).reshape(-1)
        d = d_nm(self.n, self.m)
        if c.size != d:
            raise DimensionError(f"expected {d} coordinates for n={self.n}, m={self.m}, got {c.size}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coordinates must be finite")
        c.flags.writeable = False
        object.__setattr__(self, "coords", c)

    @classmethod
    def from_monomial(cls, n: int, m: int, coeffs) -> "SymmetricTensor":
        a = np.asarray(coeffs, dtype=np.complex128)
        return cls(n, m, a / np.sqrt(multinomials(n, m)))

    def to_monomial(self) -> np.ndarray:
        return self.coords * np.sqrt(multinomials(self.n, self.m))

    @property
    def d(self) -> int:
        return self.coords.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))


def sym_embed(S: SymmetricTensor, *, max_coeffs: int = MAX_COEFFS) -> DenseTensor:
    """The symmetric dense tensor in (C^n)^{⊗m} with the same euclidean norm."""
    n, m = S.n, S.m
    if n**m > max_coeffs:
        raise BudgetError(f"embedding needs {n**m} coefficients, budget is {max_coeffs}")
    if m == 0:
        return DenseTensor(S.coords[0], n=n)
    idx = np.indices((n,) * m).reshape(m, -1).T
    counts = np.zeros((idx.shape[0], n), dtype=np.int64)
    for col in range(m):
        counts[np.arange(idx.shape[0]), idx[:, col]] += 1
    base = (m + 1) ** np.arange(n - 1, -1, -1)
    keys = counts @ base
    # descending lex order of exponents is descending order of the base-(m+1) key
    table = exponents(n, m) @ base
    pos = np.searchsorted(-table, -keys)
    vals = S.coords / np.sqrt(multinomials(n, m))
    return DenseTensor(vals[pos].reshape((n,) * m), n=n, max_coeffs=max_coeffs)


def _monomials(S: SymmetricTensor, W: np.ndarray) -> np.ndarray:
    # W: (B, n) -> (B, d) with entries prod_j W_j^alpha_j
    A = exponents(S.n, S.m)
    return np.prod(W[:, None, :] ** A[None, :, :], axis=2)


def _weights(S: SymmetricTensor) -> np.ndarray:
    return S.coords * np.sqrt(multinomials(S.n, S.m))


def sym_eval_power_batch(S: SymmetricTensor, V: np.ndarray) -> np.ndarray:
    """``<S, v^{⊗m}>`` for each row ``v`` of ``V``."""
    V = np.atleast_2d(np.asarray(V, dtype=np.complex128))
    if V.shape[1] != S.n:
        raise DimensionError(f"vectors must have length {S.n}")
    return _monomials(S, V.conj()) @ _weights(S)


def sym_eval_power(S: SymmetricTensor, v) -> complex:
    return complex(sym_eval_power_batch(S, np.asarray(v)[None, :])[0])


def _power_gradient(S: SymmetricTensor, V: np.ndarray) -> np.ndarray:
    """Contraction of ``S`` against ``v`` on ``m - 1`` factors, one row per ``v``.

    With ``p(w) = sum_alpha weight_alpha w^alpha`` this is ``grad p(conj v) / m``.
    """
    A = exponents(S.n, S.m)
    W = V.conj()
    w8 = _weights(S)
    out = np.empty(V.shape, dtype=np.complex128)
    for j in range(S.n):
        Aj = A.copy()
        Aj[:, j] = np.maximum(Aj[:, j] - 1, 0)
        mono = np.prod(W[:, None, :] ** Aj[None, :, :], axis=2)
        out[:, j] = mono @ (w8 * A[:, j])
    return out / S.m


def banach_sigma(
    S: SymmetricTensor,
    num_starts: int | None = None,
    max_iters: int = SYM_MAX_ITERS,
    tol: float = 1e-12,
    seed: int = 0,
    *,
    return_trace: bool = False,
):
    """Spectral-norm lower bound restricted to symmetric witnesses ``v^{⊗m}``.

    Symmetric power iteration ``v <- g / ||g||`` where ``g`` contracts ``S``
    against ``v`` on ``m - 1`` factors. A step that would lower ``|<S, v^m>|``
    is replaced by a damped step (halving the mixing weight between the
    phase-aligned current point and the power direction) so the objective
    never decreases.
    """
    if S.m < 1:
        raise ValueError("degree must be >= 1")
    if abs(S.norm() - 1.0) > 1e-10:
        raise NormalizationError(f"expected a unit symmetric tensor, got norm {S.norm()!r}")
    n = S.n
    B = default_num_starts(S.m) if num_starts is None else int(num_starts)
    if B < 1 or max_iters < 1 or tol <= 0:
        raise ValueError("num_starts and max_iters must be >= 1 and tol > 0")

    restarts = np.zeros(B, dtype=int)

    def draw(s: int) -> np.ndarray:
        return random_unit_vectors(derive_rng(seed, s, int(restarts[s])), 1, n)[0]

    V = np.stack([draw(s) for s in range(B)])
    obj = np.abs(sym_eval_power_batch(S, V))
    trace = [obj.copy()]
    for _ in range(max_iters):
        g = _power_gradient(S, V)
        gn = np.linalg.norm(g, axis=1)
        degenerate = gn < 1e-150
        for s in np.flatnonzero(degenerate):
            restarts[s] += 1
            if restarts[s] > _MAX_RESTARTS:
                raise RuntimeError(f"start {s} degenerated {_MAX_RESTARTS} times")
            V[s] = draw(s)
        ghat = np.where(degenerate[:, None], V, g / np.where(degenerate, 1.0, gn)[:, None])

        cand = ghat.copy()
        cand_obj = np.abs(sym_eval_power_batch(S, cand))
        pending = ~degenerate & (cand_obj < obj)
        if np.any(pending):
            rho = np.einsum("bi,bi->b", ghat, V.conj())
            phase = np.where(np.abs(rho) > 0, rho / np.where(np.abs(rho) > 0, np.abs(rho), 1.0), 1.0)
            aligned = V * phase[:, None]
            t = 0.5
            while np.any(pending) and t >= _MIN_STEP:
                idx = np.flatnonzero(pending)
                trial = (1 - t) * aligned[idx] + t * ghat[idx]
                trial /= np.linalg.norm(trial, axis=1, keepdims=True)
                trial_obj = np.abs(sym_eval_power_batch(S, trial))
                better = trial_obj >= obj[idx]
                cand[idx[better]] = trial[better]
                cand_obj[idx[better]] = trial_obj[better]
                pending[idx[better]] = False
                t /= 2
            # no improving step: stay put
            cand[pending] = V[pending]
            cand_obj[pending] = obj[pending]

        new_obj = np.where(degenerate, np.abs(sym_eval_power_batch(S, V)), cand_obj)
        ok = ~degenerate
        if np.any(new_obj[ok] < obj[ok] - 1e-12 * np.maximum(1.0, obj[ok])):
            raise RuntimeError("symmetric power iteration decreased its objective")
        gain = np.where(ok, new_obj - obj, np.inf)
        V = np.where(degenerate[:, None], V, cand)
        obj = new_obj
        trace.append(obj.copy())
        if np.all(gain < tol):
            break

    best = int(np.argmax(obj))
    v = canonical_phase(V[best] / np.linalg.norm(V[best]))
    lower = min(abs(sym_eval_power(S, v)), 1.0)
    out = SigmaInterval(lower, 1.0, PureTensor([v] * S.m), "banach-power", "norm")
    if return_trace:
        return out, np.array(trace)
    return out


def sym_certified_upper(M: float, m: int, epsilon: float, scale: float = 1.0) -> float:
    """Upper bound on ``sigma(S)`` from ``M = max_I |<S, v_I^m>|`` over a covering net.

    The maximizer ``x = v^m`` has a centre with ``|<x, v_I^m>| >= c = (1 - eps)^(m/2)``.
    Splitting ``x`` along ``y = v_I^m`` gives ``sigma <= a b + sqrt(1-a^2) sqrt(1-b^2)``
    with ``a >= c`` and ``b <= M / ||S||``, i.e. the cosine of the angle gap.
    """
    if scale <= 0:
        return 0.0
    c = (1.0 - epsilon) ** (m / 2)
    gap = math.acos(min(M / scale, 1.0)) - math.acos(min(c, 1.0))
    return scale * (1.0 if gap <= 0 else math.cos(gap))


def sym_sigma_certified(S: SymmetricTensor, net: EpsilonNet) -> SigmaInterval:
    """Net certificate using only the ``N`` symmetric points ``v_I^{⊗m}``."""
    if net.n != S.n:
        raise DimensionError(f"net dimension {net.n} does not match n={S.n}")
    vals = np.abs(sym_eval_power_batch(S, net.centers))
    i = int(np.argmax(vals))
    M = float(vals[i])
    scale = S.norm()
    upper = min(sym_certified_upper(M, S.m, net.epsilon, scale), scale)
    return SigmaInterval(M, max(upper, M), PureTensor([net.centers[i]] * S.m), "net-points", "net-angle-certificate")


def random_symmetric_unit(n: int, m: int, seed) -> SymmetricTensor:
    z = complex_gaussian(as_rng(seed), d_nm(n, m))
    return SymmetricTensor(n, m, z / np.linalg.norm(z))


def upper_bound_E_sym(n: int, m: int) -> float:
    return math.log2(d_nm(n, m))
