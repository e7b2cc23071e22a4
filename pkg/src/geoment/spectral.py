"""Spectral-norm bounds and the entanglement measures E and F.

``sigma(T) = max |<T, u>|`` over unit pure tensors ``u``. Lower bounds come
from explicit witnesses (the higher-order power method, or a net grid
point); upper bounds from the trivial ``sigma <= ||T||`` or from an epsilon-net
certificate. E and F are always reported as intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rng import derive_rng, random_unit_vectors
from .exceptions import DimensionError, NormalizationError
from .nets import EpsilonNet, grid_point, product_grid_max
from .tensor import DenseTensor, PureTensor, eval_pure, norm, slice

UNIT_INPUT_TOL = 1e-10
_MAX_RESTARTS = 20


@dataclass(frozen=True)
class SigmaInterval:
    lower: float
    upper: float
    witness: PureTensor | None = None
    lower_method: str = ""
    upper_method: str = ""

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper + 1e-12):
            raise ValueError(f"invalid interval [{self.lower}, {self.upper}]")

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= value <= self.upper + tol

    def intersect(self, other: "SigmaInterval") -> "SigmaInterval":
        lo, hi = (self, other) if self.lower >= other.lower else (other, self)
        up = self if self.upper <= other.upper else other
        return SigmaInterval(lo.lower, up.upper, lo.witness, lo.lower_method, up.upper_method)


@dataclass(frozen=True)
class EntanglementReport:
    E_lower: float
    E_upper: float
    F_lower: float
    F_upper: float
    sigma: SigmaInterval
    nuclear_lower: float
    nuclear_upper: float


def _require_unit(T: DenseTensor) -> None:
    nrm = norm(T)
    if abs(nrm - 1.0) > UNIT_INPUT_TOL:
        raise NormalizationError(f"expected a unit tensor, got norm {nrm!r}; normalize first")


def canonical_phase(v: np.ndarray) -> np.ndarray:
    """Rotate ``v`` so that its first non-negligible entry is real and >= 0."""
    v = np.asarray(v, dtype=np.complex128)
    mag = np.abs(v)
    nz = np.flatnonzero(mag > 1e-12 * mag.max()) if mag.max() > 0 else []
    if len(nz) == 0:
        return v.copy()
    i = nz[0]
    out = v * (np.conj(v[i]) / mag[i])
    out[i] = mag[i]
    return out


HOPM_MAX_ITERS = 500


def default_num_starts(k: int) -> int:
    return 16 + 4 * k


def _right_partials(flat: np.ndarray, Uc: np.ndarray, n: int, k: int) -> list[np.ndarray]:
    # R[j]: T with axes j+1..k-1 contracted, shape (S or 1, n**(j+1))
    R = [None] * k
    R[k - 1] = flat[None, :]
    for j in range(k - 2, -1, -1):
        prev = R[j + 1]
        R[j] = (prev.reshape(prev.shape[0], n ** (j + 1), n) @ Uc[:, j + 1, :, None])[..., 0]
    return R


def _hopm_sweep(flat: np.ndarray, U: np.ndarray, n: int, k: int):
    """One alternating sweep over all axes for every start in the batch.

    ``U`` (shape ``(S, k, n)``) is updated in place. Returns the objective
    after the sweep and a mask of starts that hit a zero contraction.
    """
    S = U.shape[0]
    R = _right_partials(flat, U.conj(), n, k)
    left = np.ones((S, 1), dtype=np.complex128)
    degenerate = np.zeros(S, dtype=bool)
    gn = np.zeros(S)
    for j in range(k):
        Rj = np.broadcast_to(R[j], (S, R[j].shape[1])).reshape(S, n**j, n)
        g = (left[:, None, :] @ Rj)[:, 0, :]
        gn = np.linalg.norm(g, axis=1)
        bad = gn < 1e-150
        degenerate |= bad
        g[bad] = 1.0
        gn_safe = np.where(bad, math.sqrt(n), gn)
        U[:, j, :] = g / gn_safe[:, None]
        left = (left[:, :, None] * U[:, j, None, :].conj()).reshape(S, -1)
    return gn, degenerate


def hopm(
    T: DenseTensor,
    num_starts: int | None = None,
    max_iters: int = HOPM_MAX_ITERS,
    tol: float = 1e-12,
    seed: int = 0,
    *,
    return_trace: bool = False,
):
    """Multi-start higher-order power method for a spectral-norm lower bound.

    Each start cycles through the axes, replacing factor ``j`` by the unit
    vector that maximizes ``|<T, u>|`` with the other factors fixed. All
    starts run as one vectorized batch; start ``s`` draws its initial factors
    from the stream ``(seed, s, restart)``, so the result does not depend on
    how starts are scheduled. The best start wins, ties going to the lowest
    index.

    The returned interval has the trivial upper endpoint ``||T|| = 1``.
    """
    _require_unit(T)
    n, k = T.n, T.k
    S = default_num_starts(k) if num_starts is None else int(num_starts)
    if S < 1 or max_iters < 1 or tol <= 0:
        raise ValueError("num_starts and max_iters must be >= 1 and tol > 0")

    restarts = np.zeros(S, dtype=int)

    def draw(s: int) -> np.ndarray:
        return random_unit_vectors(derive_rng(seed, s, int(restarts[s])), k, n)

    U = np.stack([draw(s) for s in range(S)])
    flat = T.coeffs
    obj = _batched_objective(flat, U, n, k)
    trace = [obj.copy()]
    for _ in range(max_iters):
        new, degenerate = _hopm_sweep(flat, U, n, k)
        for s in np.flatnonzero(degenerate):
            restarts[s] += 1
            if restarts[s] > _MAX_RESTARTS:
                raise RuntimeError(f"start {s} degenerated {_MAX_RESTARTS} times")
            U[s] = draw(s)
            new[s] = _batched_objective(flat, U[s : s + 1], n, k)[0]
        ok = ~degenerate
        if np.any(new[ok] < obj[ok] - 1e-12 * np.maximum(1.0, obj[ok])):
            raise RuntimeError("power-method objective decreased; ascent invariant violated")
        gain = np.where(ok, new - obj, np.inf)
        obj = new
        trace.append(obj.copy())
        if np.all(gain < tol):
            break

    best = int(np.argmax(obj))
    witness = PureTensor([canonical_phase(f) for f in U[best]])
    lower = min(abs(eval_pure(T, witness)), 1.0)
    out = SigmaInterval(lower, 1.0, witness, "hopm", "norm")
    if return_trace:
        return out, np.array(trace)
    return out


def _batched_objective(flat: np.ndarray, U: np.ndarray, n: int, k: int) -> np.ndarray:
    """``|<T, u_s>|`` for every start ``s`` in ``U``."""
    R = _right_partials(flat, U.conj(), n, k)
    R0 = np.broadcast_to(R[0], (U.shape[0], n))
    return np.abs(np.einsum("sn,sn->s", R0, U[:, 0, :].conj()))


def sigma_matrix_oracle(T: DenseTensor) -> float:
    """Largest singular value of an order-2 tensor, by power iteration on the Gram matrix.

    The Gram matrix is repeatedly squared (and rescaled), which is power
    iteration with exponent ``2**j`` after ``j`` steps; even nearly degenerate
    top singular values separate. A Rayleigh quotient on the resulting
    dominant direction gives the eigenvalue.
    """
    if T.k != 2:
        raise DimensionError(f"matrix oracle needs order 2, got k={T.k}")
    A = T.data
    G = A.conj().T @ A
    scale = np.abs(G).max()
    if scale == 0:
        return 0.0
    P = G / scale
    for _ in range(64):
        P = P @ P
        m = np.abs(P).max()
        if m == 0:
            break
        P /= m
    x = P[:, int(np.argmax(np.linalg.norm(P, axis=0)))]
    for _ in range(200):
        y = G @ x
        ny = np.linalg.norm(y)
        if ny == 0:
            break
        lam_prev = np.vdot(x, y).real / np.vdot(x, x).real
        x = y / ny
        lam = np.vdot(x, G @ x).real
        if abs(lam - lam_prev) <= 1e-15 * lam:
            break
    lam = np.vdot(x, G @ x).real / np.vdot(x, x).real
    return math.sqrt(max(lam, 0.0))


def sigma_certified(T: DenseTensor, net: EpsilonNet, *, budget: int | None = None) -> SigmaInterval:
    """Two-sided bound from the maximum ``M`` over the net's product grid.

    Some grid point achieves at least ``sigma * (1 - eps)^(k/2)``, hence
    ``M <= sigma <= M / (1 - eps)^(k/2)``. Only valid when the net covers.
    """
    kw = {} if budget is None else {"budget": budget}
    M, arg = product_grid_max(T, net, **kw)
    upper = min(M / (1.0 - net.epsilon) ** (T.k / 2), norm(T))
    return SigmaInterval(M, max(upper, M), grid_point(net, arg), "net-grid", "net-certificate")


def entanglement_report(T: DenseTensor, sigma: SigmaInterval) -> EntanglementReport:
    _require_unit(T)

    def neg2log2(x: float) -> float:
        return math.inf if x <= 0 else -2.0 * math.log2(x)

    nuc_lo = 1.0 / sigma.upper if sigma.upper > 0 else math.inf
    nuc_hi = float(np.abs(T.coeffs).sum())
    return EntanglementReport(
        E_lower=max(neg2log2(sigma.upper), 0.0) + 0.0,
        E_upper=neg2log2(sigma.lower),
        F_lower=max(2.0 * math.log2(nuc_lo), 0.0),
        F_upper=2.0 * math.log2(nuc_hi),
        sigma=sigma,
        nuclear_lower=nuc_lo,
        nuclear_upper=nuc_hi,
    )


def upper_bound_E(n: int, k: int) -> float:
    if n < 1 or k < 1:
        raise ValueError("n and k must be >= 1")
    return (k - 1) * math.log2(n)


def sigma_estimate(T: DenseTensor, **hopm_kw) -> float:
    """Best available point value: exact for orders 1 and 2, HOPM otherwise."""
    if T.k == 1:
        return norm(T)
    if T.k == 2:
        return sigma_matrix_oracle(T)
    scale = norm(T)
    if scale == 0:
        return 0.0
    return scale * hopm(T.scaled(1.0 / scale), **hopm_kw).lower


def slice_sigma_dominance(T: DenseTensor, axis: int, tol: float = 1e-8, **hopm_kw) -> bool:
    """Check ``sigma(T) >= sigma(T_i)`` for every slice along ``axis``."""
    if T.k < 2:
        raise DimensionError("slices need order >= 2")
    s = sigma_estimate(T, **hopm_kw)
    return all(s + tol >= sigma_estimate(slice(T, axis, i), **hopm_kw) - tol for i in range(T.n))
