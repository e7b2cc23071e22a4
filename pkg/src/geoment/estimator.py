"""scikit-learn transformers mapping tensor coefficient rows to entanglement features.

Each row of ``X`` holds the row-major coefficients of one tensor. The output
has four columns: ``sigma_lower, sigma_upper, E_lower, E_upper``.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._rng import derive_seed
from .exceptions import DimensionError, NormalizationError
from .nets import build_net
from .spectral import hopm, sigma_certified
from .symmetric import SYM_MAX_ITERS, SymmetricTensor, banach_sigma, d_nm, sym_sigma_certified
from .tensor import DenseTensor

FEATURE_NAMES = ("sigma_lower", "sigma_upper", "E_lower", "E_upper")


def _as_complex_rows(X) -> np.ndarray:
    arr = np.asarray(X)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-d array of coefficient rows, got shape {arr.shape}")
    if not (np.issubdtype(arr.dtype, np.number) or arr.dtype == bool):
        raise ValueError(f"coefficients must be numeric, got dtype {arr.dtype}")
    arr = arr.astype(np.complex128)
    if not np.all(np.isfinite(arr)):
        raise ValueError("coefficients must be finite")
    return arr


def _prepare_rows(X, normalize: bool) -> np.ndarray:
    norms = np.linalg.norm(X, axis=1)
    if normalize:
        if np.any(norms == 0):
            raise NormalizationError("cannot normalize a zero row")
        return X / norms[:, None]
    bad = np.flatnonzero(np.abs(norms - 1.0) > 1e-10)
    if bad.size:
        raise NormalizationError(f"row {bad[0]} has norm {norms[bad[0]]!r}; pass normalize=True to rescale")
    return X


def _features(lower: float, upper: float) -> list[float]:
    E_lo = max(-2 * math.log2(upper), 0.0) if upper > 0 else math.inf
    E_hi = -2 * math.log2(lower) if lower > 0 else math.inf
    return [lower, upper, E_lo, E_hi]


class _SigmaTransformerBase(TransformerMixin, BaseEstimator):
    def _n_coeffs(self) -> int:  # pragma: no cover - abstract
        raise NotImplementedError

    def fit(self, X, y=None):
        X = _as_complex_rows(X)
        expected = self._n_coeffs()
        if X.shape[1] != expected:
            raise DimensionError(f"expected {expected} coefficients per row, got {X.shape[1]}")
        self.n_features_in_ = X.shape[1]
        self.net_ = build_net(self.n, self.epsilon, self.net_seed) if self.epsilon is not None else None
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = _as_complex_rows(X)
        if X.shape[1] != self.n_features_in_:
            raise DimensionError(f"expected {self.n_features_in_} coefficients per row, got {X.shape[1]}")
        X = _prepare_rows(X, self.normalize)
        return np.array([self._row(i, row) for i, row in enumerate(X)], dtype=float).reshape(-1, 4)

    def get_feature_names_out(self, input_features=None):
        return np.array(FEATURE_NAMES, dtype=object)


class SpectralNormTransformer(_SigmaTransformerBase):
    """Spectral-norm interval and geometric entanglement bounds of general tensors.

    Parameters
    ----------
    n, k : local dimension and order; rows must have ``n**k`` entries.
    epsilon : if set, ``fit`` builds an epsilon-net on ``C^n`` and the upper
        end of each interval comes from the net certificate.
    normalize : rescale rows to unit norm instead of rejecting non-unit rows.
    """

    def __init__(self, n=2, k=3, *, num_starts=None, max_iters=500, tol=1e-12, seed=0,
                 epsilon=None, net_seed=0, normalize=False):
        self.n = n
        self.k = k
        self.num_starts = num_starts
        self.max_iters = max_iters
        self.tol = tol
        self.seed = seed
        self.epsilon = epsilon
        self.net_seed = net_seed
        self.normalize = normalize

    def _n_coeffs(self) -> int:
        return self.n**self.k

    def _row(self, i, row):
        T = DenseTensor.from_coeffs(row, self.n, self.k)
        sig = hopm(T, self.num_starts, self.max_iters, self.tol, derive_seed(self.seed, i))
        if self.net_ is not None:
            sig = sig.intersect(sigma_certified(T, self.net_))
        return _features(sig.lower, sig.upper)


class SymmetricSpectralTransformer(_SigmaTransformerBase):
    """Same features for symmetric tensors given in isometric monomial coordinates."""

    def __init__(self, n=2, m=3, *, num_starts=None, max_iters=SYM_MAX_ITERS, tol=1e-12, seed=0,
                 epsilon=None, net_seed=0, normalize=False):
        self.n = n
        self.m = m
        self.num_starts = num_starts
        self.max_iters = max_iters
        self.tol = tol
        self.seed = seed
        self.epsilon = epsilon
        self.net_seed = net_seed
        self.normalize = normalize

    def _n_coeffs(self) -> int:
        return d_nm(self.n, self.m)

    def _row(self, i, row):
        S = SymmetricTensor(self.n, self.m, row)
        sig = banach_sigma(S, self.num_starts, self.max_iters, self.tol, derive_seed(self.seed, i))
        if self.net_ is not None:
            sig = sig.intersect(sym_sigma_certified(S, self.net_))
        return _features(sig.lower, sig.upper)
