"""Bounds on the geometric measure of entanglement of multipartite tensors."""

from .bounds import (
    ChainReport,
    cor_main_lower,
    fraction_threshold,
    sym_main_lower,
    sym_main_threshold,
    sym_qubit_lower,
    thm_main_c2_bound,
    thm_main_E_lower,
    thm_sym_c2_bound,
    verify_proof_chain,
)
from .census import CensusConfig, CensusReport, run_census
from .constructions import GroupingMap, det_tensor, exact_E_tnp, regroup, t_np, witness_sign, witness_u
from .estimator import SpectralNormTransformer, SymmetricSpectralTransformer
from .exceptions import BudgetError, DimensionError, NormalizationError
from .nets import EpsilonNet, build_net, count_bound, covering_rate, product_grid_max
from .spectral import (
    EntanglementReport,
    SigmaInterval,
    entanglement_report,
    hopm,
    sigma_certified,
    sigma_estimate,
    sigma_matrix_oracle,
    upper_bound_E,
)
from .symmetric import SymmetricTensor, banach_sigma, sym_embed, sym_sigma_certified
from .tensor import DenseTensor, PureTensor, eval_pure, inner, norm, pure_to_dense, random_unit_tensor

__version__ = "0.1.0"

import types as _types

__all__ = sorted(
    name for name, obj in globals().items() if not name.startswith("_") and not isinstance(obj, _types.ModuleType)
)
