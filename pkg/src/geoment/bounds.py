"""Closed-form entanglement bounds and numeric checks of their derivations.

Natural logs appear inside the bounds and base-2 logs wherever a quantity is
measured in bits; the two are never mixed silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .symmetric import d_nm, upper_bound_E_sym
from .spectral import upper_bound_E

# delta used to pick epsilon = delta / k for the general-tensor corollary
DELTA_COR_MAIN = 4 / math.e**3
IDENTITY_RTOL = 1e-9


def _check_eps(epsilon: float) -> None:
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")


def _log2_geometric_sum(n: int, k: int) -> float:
    """``log2((n^k - 1) / (n - 1))`` using exact integers."""
    return math.log2(sum(n**j for j in range(k)))


def thm_main_c2_bound(n: int, k: int, epsilon: float) -> float:
    """Upper bound on ``C^2``, the squared minimal spectral norm of unit tensors."""
    if n < 2 or k < 2:
        raise ValueError("need n, k >= 2")
    _check_eps(epsilon)
    try:
        denom = (n**k - 1) * (1 - epsilon) ** k
    except OverflowError:  # n^k beyond float range
        return 2.0 ** -thm_main_E_lower(n, k, epsilon)
    if denom == 0:  # (1 - eps)^k underflowed
        return math.inf
    return k * (n - 1) * math.log(4 / epsilon) / denom


def thm_main_E_lower(n: int, k: int, epsilon: float) -> float:
    """``-log2`` of :func:`thm_main_c2_bound`, computed without overflow."""
    if n < 2 or k < 2:
        raise ValueError("need n, k >= 2")
    _check_eps(epsilon)
    return (
        _log2_geometric_sum(n, k)
        - math.log2(k * math.log(4 / epsilon))
        + k * math.log2(1 - epsilon)
    )


def conc_meas_constant(n: int, k: int, epsilon: float = 0.5) -> float:
    """The O(1) term for fixed ``k``: ``E_max >= (k-1) log2(n) + constant``."""
    return thm_main_E_lower(n, k, epsilon) - (k - 1) * math.log2(n)


def cor_main_valid(k: int) -> bool:
    return k >= 21


def cor_main_lower(n: int, k: int) -> float:
    if k <= 1:
        raise ValueError("need k >= 2 so that ln(ln k) is defined")
    return (k - 1) * math.log2(n) - math.log2(k) - math.log2(math.log(k)) - 2


def fraction_valid(k: int) -> bool:
    return k >= 4


def fraction_threshold(k: int) -> float:
    if k <= 1:
        raise ValueError("need k >= 2 so that ln(ln k) is defined")
    return k - math.log2(k) - math.log2(math.log(k)) - 3


def thm_sym_c2_bound(n: int, m: int, epsilon: float) -> float:
    """Upper bound on ``C_s^2`` for unit symmetric tensors."""
    _check_eps(epsilon)
    d = d_nm(n, m)
    if n < 2 or d < 2:
        raise ValueError("need n >= 2 and m >= 1")
    return m**2 * epsilon**2 + (n - 1) * math.log(4 / epsilon) / (d - 1)


def sym_main_lower(n: int, m: int) -> float:
    d = d_nm(n, m)
    if d < 2 or math.log(d) <= 0:
        raise ValueError("need d_{n,m} >= 2")
    return math.log2(d) - math.log2(math.log(d)) - math.log2(n)


def sym_qubit_lower(m: int) -> float:
    if m < 1:
        raise ValueError("need m >= 1")
    return math.log2(m) - math.log2(1 + math.log(4 * m * math.sqrt(m)))


@dataclass
class ChainStep:
    name: str
    lhs: float
    rhs: float
    relation: str  # ">=", "<=", "==", "<", ">"
    holds: bool


@dataclass
class ChainReport:
    which: str
    params: dict
    steps: list[ChainStep] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.holds for s in self.steps)

    def failed(self) -> list[str]:
        return [s.name for s in self.steps if not s.holds]

    def add(self, name: str, lhs: float, relation: str, rhs: float) -> None:
        if relation == "==":
            holds = math.isclose(lhs, rhs, rel_tol=IDENTITY_RTOL, abs_tol=IDENTITY_RTOL)
        else:
            holds = {
                ">=": lhs >= rhs,
                "<=": lhs <= rhs,
                ">": lhs > rhs,
                "<": lhs < rhs,
            }[relation]
        self.steps.append(ChainStep(name, float(lhs), float(rhs), relation, bool(holds)))

    def as_dict(self) -> dict:
        return {
            "which": self.which,
            "params": self.params,
            "passed": self.passed,
            "steps": [vars(s) for s in self.steps],
        }


def _log_covering_product(k_log_N: float, x: float, dim_minus_one: int) -> float:
    """``ln(N^k (1 - x)^(dim - 1))``; ``-inf`` once ``x >= 1``."""
    if x >= 1:
        return -math.inf
    return k_log_N + dim_minus_one * math.log1p(-x)


def _chain_cor_main(n: int, k: int) -> ChainReport:
    rep = ChainReport("cor_main", {"n": n, "k": k})
    delta = DELTA_COR_MAIN
    eps = delta / k
    e_lower = thm_main_E_lower(n, k, eps)
    c2 = thm_main_c2_bound(n, k, eps)
    # the bound is sharp for the covering count: slightly above it the count inequality fails
    rep.add(
        "covering count fails above the C^2 bound",
        _log_covering_product(k * (n - 1) * math.log(4 / eps), c2 * (1 + 1e-9) * (1 - eps) ** k, n**k - 1),
        "<",
        0.0,
    )
    rep.add(
        "log form of the C^2 bound",
        e_lower,
        "==",
        _log2_geometric_sum(n, k) - math.log2(k) + k * math.log2(1 - eps) - math.log2(math.log(4 / eps)),
    )
    rep.add("geometric sum >= n^(k-1)", _log2_geometric_sum(n, k), ">=", (k - 1) * math.log2(n))
    rep.add("Bernoulli: (1-eps)^k >= 1 - k eps", (1 - eps) ** k, ">=", 1 - k * eps)
    rep.add("log2(1 - delta) >= -1", math.log2(1 - delta), ">=", -1.0)
    rep.add("ln(4/eps) = ln k + ln(4/delta)", math.log(4 / eps), "==", math.log(k) + math.log(4 / delta))
    rep.add("ln(4/delta) = 3", math.log(4 / delta), "==", 3.0)
    rep.add("ln k >= 3", math.log(k), ">=", 3.0)
    rep.add("log2(ln k + 3) <= log2(ln k) + 1", math.log2(math.log(k) + 3), "<=", math.log2(math.log(k)) + 1)
    rep.add("E_max lower bound >= corollary", e_lower, ">=", cor_main_lower(n, k))
    rep.add("corollary <= (k-1) log2 n", cor_main_lower(n, k), "<=", upper_bound_E(n, k))
    return rep


def _chain_fraction(k: int) -> ChainReport:
    # n = 2 throughout, so the net count is N <= (4/eps)^(n-1) = 4/eps
    rep = ChainReport("fraction", {"n": 2, "k": k})
    eps = 1 / (4 * k)
    N = 4 / eps
    D2 = (k * math.log(4 / eps) + k) / ((2**k - 1) * (1 - eps) ** k)
    neg2log2D = -math.log2(D2)
    rep.add(
        "covering mass drops below e^-k above the D^2 bound",
        _log_covering_product(k * math.log(N), D2 * (1 + 1e-9) * (1 - eps) ** k, 2**k - 1),
        "<",
        -k,
    )
    rep.add(
        "log form of the D^2 bound",
        neg2log2D,
        "==",
        math.log2(2**k - 1) + k * math.log2(1 - eps) - math.log2(k) - math.log2(math.log(4 / eps) + 1),
    )
    rep.add("log2(2^k - 1) >= k - 1/4", math.log2(2**k - 1), ">=", k - 0.25)
    rep.add("k log2(1-eps) >= log2(1 - k eps)", k * math.log2(1 - eps), ">=", math.log2(1 - k * eps))
    rep.add("log2(1 - k eps) = log2(3/4) > -3/4", math.log2(1 - k * eps), ">", -0.75)
    rep.add("ln(16k) + 1 <= 4 ln k", math.log(16 * k) + 1, "<=", 4 * math.log(k))
    rep.add(
        "log2(ln(16k) + 1) <= log2(ln k) + 2",
        math.log2(math.log(16 * k) + 1),
        "<=",
        math.log2(math.log(k)) + 2,
    )
    rep.add("-2 log2 D >= threshold", neg2log2D, ">=", fraction_threshold(k))
    rep.add("threshold < (k-1) log2 2", fraction_threshold(k), "<", upper_bound_E(2, k))
    return rep


def _chain_sym_main(n: int, m: int) -> ChainReport:
    rep = ChainReport("sym_main", {"n": n, "m": m})
    d = d_nm(n, m)
    delta = (d - 1) ** -0.5
    eps = delta / m
    rep.add("eps = 1/(m sqrt(d-1)) < 1", eps, "<", 1.0)
    if eps >= 1:
        return rep
    e_lower = -math.log2(thm_sym_c2_bound(n, m, eps))
    lhs_frac = (d - 1) / (1 + (n - 1) * math.log(4 * m * math.sqrt(d - 1)))
    rep.add("substituted bound", e_lower, "==", math.log2(lhs_frac))
    rep.add("(computation)", lhs_frac, ">=", d / (n * math.log(d)))
    a = 1 + (n - 1) * math.log(4 * m * math.sqrt(d - 1))
    b = 1 + (n - 1) * math.log(4 * m * math.sqrt(d))
    rep.add("d-1 -> d inside the log", a, "<=", b)
    rep.add("<= 0.99 n ln d", b, "<=", 0.99 * n * math.log(d))
    rep.add("0.99 <= 1 - 1/d", 0.99, "<=", 1 - 1 / d)
    rep.add("E^s_max lower bound >= corollary", e_lower, ">=", sym_main_lower(n, m))
    rep.add("corollary <= log2 d", sym_main_lower(n, m), "<=", upper_bound_E_sym(n, m))
    return rep


def _chain_sym_qubit(m: int) -> ChainReport:
    rep = ChainReport("sym_qubit", {"n": 2, "m": m})
    eps = m**-1.5
    rep.add("eps = m^(-3/2) < 1", eps, "<", 1.0)
    if eps >= 1:
        return rep
    e_lower = -math.log2(thm_sym_c2_bound(2, m, eps))
    rep.add("substituted bound", e_lower, "==", sym_qubit_lower(m))
    rep.add("corollary <= log2(m+1)", sym_qubit_lower(m), "<=", upper_bound_E_sym(2, m))
    return rep


def verify_proof_chain(which: str, **params) -> ChainReport:
    """Evaluate every displayed inequality of one derivation at the given parameters.

    ``which`` is one of ``cor_main`` (params ``n, k``), ``fraction`` (``k``),
    ``sym_main`` (``n, m``) or ``sym_qubit`` (``m``).
    """
    if which == "cor_main":
        return _chain_cor_main(int(params["n"]), int(params["k"]))
    if which == "fraction":
        return _chain_fraction(int(params["k"]))
    if which == "sym_main":
        return _chain_sym_main(int(params["n"]), int(params["m"]))
    if which == "sym_qubit":
        return _chain_sym_qubit(int(params["m"]))
    raise ValueError(f"unknown chain {which!r}")


def computation_holds(n: int, m: int) -> bool:
    d = d_nm(n, m)
    if d < 2:
        return False
    return (d - 1) / (1 + (n - 1) * math.log(4 * m * math.sqrt(d - 1))) >= d / (n * math.log(d))


def sym_main_threshold(n: int, m_max: int = 10**4) -> dict:
    """Operational meaning of "m sufficiently large" for the symmetric corollary.

    Returns the smallest ``m`` from which the key inequality holds throughout
    ``[m, m_max]`` and the smallest ``m`` from which every step of the chain
    holds throughout ``[m, m_max]`` (the two differ because the chain passes
    through a cruder sufficient condition). ``None`` means no such ``m``.
    """
    last_bad_comp = last_bad_chain = 0
    for m in range(1, m_max + 1):
        if not computation_holds(n, m):
            last_bad_comp = m
        if not _chain_sym_main(n, m).passed:
            last_bad_chain = m
    return {
        "n": n,
        "m_max": m_max,
        "m_star_computation": last_bad_comp + 1 if last_bad_comp < m_max else None,
        "m_star": last_bad_chain + 1 if last_bad_chain < m_max else None,
    }
