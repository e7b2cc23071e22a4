"""Epsilon-balls and epsilon-nets on the complex unit sphere.

The ball ``B(v, eps) = {w : |<v, w>|^2 >= 1 - eps}`` is phase invariant; it is
the Fubini-Study ball of radius ``arccos(sqrt(1 - eps))`` in projective space.
Nets are built as greedy randomized packings of ``eps/4``-balls, which cover
the sphere with ``eps``-balls once the packing is maximal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rng import derive_rng, random_unit_vectors
from .exceptions import BudgetError, DimensionError
from .tensor import DenseTensor, PureTensor, check_unit_vector

GRID_BUDGET = 2**24
_CANDIDATE_BATCH = 512
_PROBE_BATCH = 8192


def _check_domain(n: int, epsilon: float, *, open_right: bool = False) -> None:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    hi_ok = epsilon < 1 if open_right else epsilon <= 1
    if not (epsilon > 0 and hi_ok):
        rng = "(0, 1)" if open_right else "(0, 1]"
        raise ValueError(f"epsilon must lie in {rng}, got {epsilon}")


def ball_volume(n: int, epsilon: float) -> float:
    """Surface volume of ``B(v, epsilon)`` inside S^{2n-1}."""
    _check_domain(n, epsilon)
    return 2 * math.pi**n * epsilon ** (n - 1) / math.factorial(n - 1)


def sphere_volume(n: int) -> float:
    return ball_volume(n, 1.0)


def ball_fraction(n: int, epsilon: float) -> float:
    _check_domain(n, epsilon)
    return epsilon ** (n - 1)


def ball_contains(v, epsilon: float, w) -> bool:
    v = check_unit_vector(v)
    w = check_unit_vector(w)
    return bool(abs(np.vdot(w, v)) ** 2 >= 1 - epsilon)


def chain_bound_holds(v, z, w, epsilon: float) -> bool:
    """False only if ``(v, z, w)`` is a counterexample to the triangle-type bound.

    Hypotheses ``|<v,z>|^2 >= 1-eps`` and ``|<z,w>|^2 >= 1-eps`` must imply
    ``|<v,w>|^2 >= 1 - 4 eps``.
    """
    return bool(chain_bound_holds_batch(np.atleast_2d(v), np.atleast_2d(z), np.atleast_2d(w), epsilon)[0])


def chain_bound_holds_batch(v: np.ndarray, z: np.ndarray, w: np.ndarray, epsilon) -> np.ndarray:
    """Row-wise :func:`chain_bound_holds` over arrays of shape ``(m, n)``."""
    eps = np.asarray(epsilon, dtype=float)
    vz = np.abs(np.einsum("ij,ij->i", v.conj(), z)) ** 2
    zw = np.abs(np.einsum("ij,ij->i", z.conj(), w)) ** 2
    vw = np.abs(np.einsum("ij,ij->i", v.conj(), w)) ** 2
    hyp = (vz >= 1 - eps) & (zw >= 1 - eps)
    return ~hyp | (vw >= 1 - 4 * eps)


def packing_overlap_threshold(epsilon: float) -> float:
    """Two ``eps/4``-balls intersect iff ``|<u, v>| >= 1 - eps/2``.

    With ``r = arccos(sqrt(1 - eps/4))`` the balls are Fubini-Study balls of
    radius ``r``; in a geodesic metric they meet iff the centres are within
    ``2r``, and ``cos(2r) = 2(1 - eps/4) - 1 = 1 - eps/2``.
    """
    return 1.0 - epsilon / 2.0


def count_bound(n: int, epsilon: float) -> float:
    return (4.0 / epsilon) ** (n - 1)


@dataclass(frozen=True)
class EpsilonNet:
    n: int
    epsilon: float
    centers: np.ndarray
    construction_seed: int | None = None
    stop_streak: int | None = None

    def __post_init__(self):
        c = np.array(self.centers, dtype=np.complex128)
        if c.ndim != 2 or c.shape[1] != self.n or c.shape[0] < 1:
            raise DimensionError(f"centers must have shape (N, {self.n}), got {c.shape}")
        norms = np.linalg.norm(c, axis=1)
        if np.any(np.abs(norms - 1) > 1e-12):
            raise ValueError("net centers must be unit vectors")
        c.flags.writeable = False
        object.__setattr__(self, "centers", c)

    @property
    def packing_radius(self) -> float:
        return self.epsilon / 4

    def __len__(self) -> int:
        return self.centers.shape[0]

    def pairwise_overlap(self) -> np.ndarray:
        """``|<v_i, v_j>|`` for all pairs (diagonal included)."""
        return np.abs(self.centers.conj() @ self.centers.T)

    def is_packing(self) -> bool:
        g = self.pairwise_overlap()
        np.fill_diagonal(g, 0.0)
        return bool(np.all(g < packing_overlap_threshold(self.epsilon)))


def build_net(n: int, epsilon: float, seed: int = 0, stop_streak: int | None = None) -> EpsilonNet:
    """Greedy randomized maximal packing of ``epsilon/4``-balls.

    Uniform candidates are accepted when their ball is disjoint from every
    accepted ball; construction stops after ``stop_streak`` consecutive
    rejections (default ``1000 * ceil((4/epsilon)**(n-1))``).
    """
    _check_domain(n, epsilon, open_right=True)
    bound = count_bound(n, epsilon)
    if stop_streak is None:
        stop_streak = 1000 * math.ceil(bound)
    if stop_streak < 1:
        raise ValueError("stop_streak must be >= 1")
    thr = packing_overlap_threshold(epsilon)

    centers = [random_unit_vectors(derive_rng(seed, 0), 1, n)[0]]
    streak = 0
    batch_idx = 1
    while streak < stop_streak:
        cand = random_unit_vectors(derive_rng(seed, batch_idx), _CANDIDATE_BATCH, n)
        batch_idx += 1
        ok = np.all(np.abs(cand.conj() @ np.array(centers).T) < thr, axis=1)
        pos = 0
        while pos < len(cand):
            hits = np.flatnonzero(ok[pos:])
            if hits.size == 0:
                streak += len(cand) - pos
                break
            j = pos + hits[0]
            streak += j - pos
            if streak >= stop_streak:
                break
            centers.append(cand[j])
            assert len(centers) <= bound, (
                f"packing of {len(centers)} disjoint eps/4-balls exceeds the volume bound {bound}"
            )
            streak = 0
            ok &= np.abs(cand.conj() @ cand[j]) < thr
            pos = j + 1
    return EpsilonNet(n, float(epsilon), np.array(centers), construction_seed=seed, stop_streak=stop_streak)


def covered_mask(net: EpsilonNet, w: np.ndarray, epsilon: float | None = None) -> np.ndarray:
    eps = net.epsilon if epsilon is None else epsilon
    best = np.max(np.abs(w @ net.centers.conj().T) ** 2, axis=1)
    return best >= 1 - eps


def covering_rate(net: EpsilonNet, probes: int, seed: int = 0) -> float:
    """Monte Carlo fraction of the sphere covered by the net's epsilon-balls."""
    if probes < 1:
        raise ValueError("probes must be >= 1")
    hits = 0
    for b, start in enumerate(range(0, probes, _PROBE_BATCH)):
        m = min(_PROBE_BATCH, probes - start)
        w = random_unit_vectors(derive_rng(seed, b), m, net.n)
        hits += int(np.count_nonzero(covered_mask(net, w)))
    return hits / probes


def ball_fraction_mc(n: int, epsilon: float, probes: int, seed: int = 0) -> tuple[float, float]:
    """Monte Carlo estimate of ``vol(B)/vol(S)`` and its standard error."""
    _check_domain(n, epsilon)
    center = random_unit_vectors(derive_rng(seed, 0), 1, n)[0]
    net = EpsilonNet(n, epsilon, center[None, :])
    p = covering_rate(net, probes, seed=seed + 1)
    return p, math.sqrt(max(p * (1 - p), 0.0) / probes)


def product_grid_max(T: DenseTensor, net: EpsilonNet, *, budget: int = GRID_BUDGET):
    """Maximum of ``|<T, v_{i1} ⊗ ... ⊗ v_{ik}>|`` over the N^k product grid.

    Returns ``(M, argmax)`` where ``argmax`` is the lexicographically smallest
    maximizing index tuple. The outer index is looped over so that only an
    ``N^(k-1)`` block is held in memory at a time.
    """
    if net.n != T.n:
        raise DimensionError(f"net dimension {net.n} does not match tensor n={T.n}")
    N, k = len(net), T.k
    if N**k > budget:
        raise BudgetError(f"grid of {N}^{k} points exceeds the budget {budget}")
    vc = net.centers.conj()

    def grid_block(arr: np.ndarray) -> np.ndarray:
        # contract leading tensor axes one at a time; grid axes accumulate in front
        out = arr
        for depth in range(arr.ndim):
            out = np.tensordot(vc, out, axes=([1], [depth]))
            out = np.moveaxis(out, 0, depth)
        return out

    best, arg = -1.0, None
    for i0 in range(N):
        first = np.tensordot(T.data, vc[i0], axes=([0], [0]))
        vals = np.abs(grid_block(np.asarray(first)))
        j = int(np.argmax(vals))
        if vals.flat[j] > best:
            best = float(vals.flat[j])
            arg = (i0,) + np.unravel_index(j, vals.shape) if vals.ndim else (i0,)
    arg = tuple(int(a) for a in arg)
    return best, arg


def grid_point(net: EpsilonNet, indices) -> PureTensor:
    return PureTensor([net.centers[i] for i in indices])
