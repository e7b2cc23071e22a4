"""Monte Carlo experiments over random (symmetric) unit tensors and epsilon-nets.

Sample ``i`` draws everything from streams keyed by ``(seed, i, ...)``, so the
per-sample records and the summary depend only on the configuration, never
on the worker count or scheduling. Execution details (worker count, wall
clock) are kept under the summary's ``"execution"`` key.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np
from joblib import Parallel, delayed

from . import bounds
from ._rng import derive_rng, derive_seed, random_unit_vectors
from .nets import (
    GRID_BUDGET,
    EpsilonNet,
    ball_fraction,
    build_net,
    count_bound,
    covered_mask,
    covering_rate,
)
from .spectral import HOPM_MAX_ITERS, default_num_starts, hopm, sigma_certified, sigma_matrix_oracle, upper_bound_E
from .symmetric import (
    SYM_MAX_ITERS,
    banach_sigma,
    d_nm,
    random_symmetric_unit,
    sym_embed,
    sym_sigma_certified,
    upper_bound_E_sym,
)
from .tensor import random_unit_tensor

log = logging.getLogger(__name__)

MODES = ("general", "symmetric", "covering", "volume")
QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)
E_TOL = 1e-6
ORACLE_TOL = 1e-7
_CHUNK = 50
_VOLUME_BATCH = 10_000


@dataclass
class CensusConfig:
    mode: str
    n: int
    k: int | None = None
    m: int | None = None
    samples: int = 100
    seed: int = 0
    num_starts: int | None = None
    max_iters: int | None = None
    tol: float = 1e-12
    epsilon: float | None = None
    stop_streak: int | None = None
    probes: int = 10_000
    recheck_factor: int = 10
    workers: int = 1
    out: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.mode == "general" and (self.k is None or self.k < 1):
            raise ValueError("general mode needs k >= 1")
        if self.mode == "symmetric" and (self.m is None or self.m < 1):
            raise ValueError("symmetric mode needs m >= 1")
        if self.mode in ("covering", "volume") and self.epsilon is None:
            raise ValueError(f"{self.mode} mode needs epsilon")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @classmethod
    def from_json(cls, path) -> "CensusConfig":
        return cls(**json.loads(Path(path).read_text()))

    def deterministic_dict(self) -> dict:
        d = dataclasses.asdict(self)
        for key in ("workers", "out"):
            d.pop(key)
        return d


@dataclass
class CensusReport:
    config: CensusConfig
    records: list[dict]
    summary: dict = field(default_factory=dict)

    @property
    def invariants_ok(self) -> bool:
        return bool(self.summary.get("invariants_ok", True))


def _E(sigma: float) -> float:
    return math.inf if sigma <= 0 else -2.0 * math.log2(sigma)


def _stats(values) -> dict:
    a = np.asarray(values, dtype=float)
    return {
        "min": float(a.min()),
        "mean": float(a.mean()),
        "max": float(a.max()),
        "quantiles": {str(q): float(np.quantile(a, q)) for q in QUANTILES},
    }


def _census_net(cfg: CensusConfig, n: int) -> EpsilonNet | None:
    if cfg.epsilon is None:
        return None
    return build_net(n, cfg.epsilon, derive_seed(cfg.seed, 0), cfg.stop_streak)


def _general_sample(cfg: CensusConfig, i: int, net: EpsilonNet | None, threshold: float | None) -> dict:
    T = random_unit_tensor(cfg.n, cfg.k, derive_rng(cfg.seed, 1, i))
    hseed = derive_seed(cfg.seed, 2, i)
    starts = cfg.num_starts or default_num_starts(cfg.k)
    iters = cfg.max_iters or HOPM_MAX_ITERS
    sig = hopm(T, starts, iters, cfg.tol, hseed).lower
    rec = {"index": i, "hopm_seed": hseed, "sigma_lower": sig, "E_est": _E(sig)}
    if cfg.k == 2:
        rec["sigma_oracle"] = sigma_matrix_oracle(T)
    if net is not None and len(net) ** cfg.k <= GRID_BUDGET:
        cert = sigma_certified(T, net)
        rec["cert_sigma_lower"] = cert.lower
        rec["cert_sigma_upper"] = cert.upper
        rec["E_cert_lower"] = _E(cert.upper)
        rec["E_cert_upper"] = _E(max(cert.lower, sig))
    if threshold is not None:
        below = rec["E_est"] < threshold
        rec["below_threshold"] = below
        if below:
            rseed = derive_seed(cfg.seed, 3, i)
            resig = hopm(T, starts * cfg.recheck_factor, iters * cfg.recheck_factor, cfg.tol, rseed).lower
            rec["recheck_sigma_lower"] = resig
            rec["recheck_E_est"] = _E(max(resig, sig))
            rec["below_threshold"] = rec["recheck_E_est"] < threshold
    return rec


def _symmetric_sample(cfg: CensusConfig, i: int, net: EpsilonNet | None) -> dict:
    S = random_symmetric_unit(cfg.n, cfg.m, derive_rng(cfg.seed, 1, i))
    bseed = derive_seed(cfg.seed, 2, i)
    sig = banach_sigma(S, cfg.num_starts, cfg.max_iters or SYM_MAX_ITERS, cfg.tol, bseed).lower
    rec = {"index": i, "banach_seed": bseed, "sigma_lower": sig, "E_est": _E(sig)}
    if cfg.m == 2:
        rec["sigma_oracle"] = sigma_matrix_oracle(sym_embed(S))
    if net is not None:
        cert = sym_sigma_certified(S, net)
        rec["cert_sigma_lower"] = cert.lower
        rec["cert_sigma_upper"] = cert.upper
        rec["E_cert_lower"] = _E(cert.upper)
        rec["E_cert_upper"] = _E(max(cert.lower, sig))
    return rec


def _run_chunk(fn, cfg, indices, *args) -> list[dict]:
    return [fn(cfg, i, *args) for i in indices]


def _iter_records(fn, cfg: CensusConfig, *args) -> Iterator[dict]:
    chunks = [range(s, min(s + _CHUNK, cfg.samples)) for s in range(0, cfg.samples, _CHUNK)]
    if cfg.workers == 1:
        for ch in chunks:
            yield from _run_chunk(fn, cfg, ch, *args)
        return
    par = Parallel(n_jobs=cfg.workers, return_as="generator")
    for out in par(delayed(_run_chunk)(fn, cfg, ch, *args) for ch in chunks):
        yield from out


class _Sink:
    """Streams records to ``samples.jsonl`` while collecting them in memory."""

    def __init__(self, out: str | None):
        self.records: list[dict] = []
        self._fh = None
        if out is not None:
            Path(out).mkdir(parents=True, exist_ok=True)
            self._fh = open(Path(out) / "samples.jsonl", "w", encoding="utf-8")

    def add(self, rec: dict) -> None:
        self.records.append(rec)
        if self._fh is not None:
            self._fh.write(json.dumps(rec, sort_keys=True) + "\n")
            self._fh.flush()

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()


def _finish(cfg: CensusConfig, sink: _Sink, summary: dict, t0: float) -> CensusReport:
    sink.close()
    summary["config"] = cfg.deterministic_dict()
    summary["execution"] = {"workers": cfg.workers, "wall_clock_seconds": time.perf_counter() - t0}
    report = CensusReport(cfg, sink.records, summary)
    if cfg.out is not None:
        write_summary(report, cfg.out)
    return report


def run_general_census(cfg: CensusConfig) -> CensusReport:
    """Spectral-norm census of uniformly random unit tensors in (C^n)^{⊗k}."""
    if cfg.mode != "general":
        raise ValueError("run_general_census needs mode='general'")
    t0 = time.perf_counter()
    n, k = cfg.n, cfg.k
    net = _census_net(cfg, n)
    threshold = bounds.fraction_threshold(k) if n == 2 and k >= 2 else None
    sink = _Sink(cfg.out)
    for rec in _iter_records(_general_sample, cfg, net, threshold):
        sink.add(rec)
    recs = sink.records

    sig = [r["sigma_lower"] for r in recs]
    E = [r["E_est"] for r in recs]
    ub = upper_bound_E(n, k)
    s = {
        "mode": "general",
        "sample_count": len(recs),
        "sigma_lower": _stats(sig),
        "E_est": _stats(E),
        "E_est_note": "upper bound on E from a heuristic sigma lower bound; equals E when the heuristic is optimal",
        "upper_bound_E": ub,
        "C_emp": min(sig),
    }
    checks = {"E_est_le_upper_bound": max(E) <= ub + E_TOL}
    if k == 2:
        checks["sigma_le_oracle"] = all(r["sigma_lower"] <= r["sigma_oracle"] + ORACLE_TOL for r in recs)
        s["max_abs_oracle_gap"] = max(abs(r["sigma_lower"] - r["sigma_oracle"]) for r in recs)
    if n >= 2 and k >= 2:
        c2 = bounds.thm_main_c2_bound(n, k, 0.5)
        s["thm_main_c2_bound_eps_0.5"] = c2
        s["C_emp_sq_le_bound"] = min(sig) ** 2 <= c2
        s["conc_meas_constant_eps_0.5"] = bounds.conc_meas_constant(n, k, 0.5)
        s["cor_main_lower"] = bounds.cor_main_lower(n, k)
        s["cor_main_valid"] = bounds.cor_main_valid(k)
    if threshold is not None:
        below = [r for r in recs if r["below_threshold"]]
        s["fraction_threshold"] = threshold
        s["fraction_valid"] = bounds.fraction_valid(k)
        s["violations"] = len(below)
        s["fraction_below_threshold"] = len(below) / len(recs)
        s["fraction_bound_e^-k"] = math.exp(-k)
        s["rechecked"] = sum("recheck_sigma_lower" in r for r in recs)
    if net is not None:
        s["net_size"] = len(net)
        cert = [r for r in recs if "cert_sigma_upper" in r]
        if cert:
            s["certified_samples"] = len(cert)
            s["E_cert_lower"] = _stats([r["E_cert_lower"] for r in cert])
            checks["hopm_within_certificate"] = all(r["sigma_lower"] <= r["cert_sigma_upper"] + 1e-9 for r in cert)
    s["checks"] = checks
    s["invariants_ok"] = all(checks.values())
    return _finish(cfg, sink, s, t0)


def run_symmetric_census(cfg: CensusConfig) -> CensusReport:
    """Spectral-norm census of random unit symmetric tensors in S^m(C^n)."""
    if cfg.mode != "symmetric":
        raise ValueError("run_symmetric_census needs mode='symmetric'")
    t0 = time.perf_counter()
    n, m = cfg.n, cfg.m
    net = _census_net(cfg, n)
    sink = _Sink(cfg.out)
    for rec in _iter_records(_symmetric_sample, cfg, net):
        sink.add(rec)
    recs = sink.records

    sig = [r["sigma_lower"] for r in recs]
    E = [r["E_est"] for r in recs]
    d = d_nm(n, m)
    ub = upper_bound_E_sym(n, m)
    s = {
        "mode": "symmetric",
        "sample_count": len(recs),
        "d_nm": d,
        "sigma_lower": _stats(sig),
        "E_est": _stats(E),
        "upper_bound_E_sym": ub,
        "C_s_emp": min(sig),
    }
    checks = {"E_est_le_upper_bound": max(E) <= ub + E_TOL}
    if m == 2:
        checks["sigma_le_oracle"] = all(r["sigma_lower"] <= r["sigma_oracle"] + ORACLE_TOL for r in recs)
        s["max_abs_oracle_gap"] = max(abs(r["sigma_lower"] - r["sigma_oracle"]) for r in recs)
    if n >= 2 and d >= 2:
        eps = 1.0 / (m * math.sqrt(d - 1))
        if eps < 1:
            c2 = bounds.thm_sym_c2_bound(n, m, eps)
            s["proof_epsilon"] = eps
            s["thm_sym_c2_bound"] = c2
            s["C_s_emp_sq_le_bound"] = min(sig) ** 2 <= c2
        s["sym_main_lower"] = bounds.sym_main_lower(n, m)
        if n == 2:
            s["sym_qubit_lower"] = bounds.sym_qubit_lower(m)
    if net is not None:
        s["net_size"] = len(net)
        s["E_cert_lower"] = _stats([r["E_cert_lower"] for r in recs])
        checks["banach_within_certificate"] = all(r["sigma_lower"] <= r["cert_sigma_upper"] + 1e-9 for r in recs)
    s["checks"] = checks
    s["invariants_ok"] = all(checks.values())
    return _finish(cfg, sink, s, t0)


def run_covering_experiment(cfg: CensusConfig) -> CensusReport:
    """Build a net and measure its size, covering rate and single-ball fraction."""
    if cfg.mode != "covering":
        raise ValueError("run_covering_experiment needs mode='covering'")
    t0 = time.perf_counter()
    n, eps = cfg.n, cfg.epsilon
    net = build_net(n, eps, derive_seed(cfg.seed, 0), cfg.stop_streak)
    sink = _Sink(cfg.out)
    for i, c in enumerate(net.centers):
        sink.add({"index": i, "center": [[float(z.real), float(z.imag)] for z in c]})
    rate = covering_rate(net, cfg.probes, derive_seed(cfg.seed, 1))
    single = EpsilonNet(n, eps, net.centers[:1])
    frac = covering_rate(single, cfg.probes, derive_seed(cfg.seed, 2))
    se = math.sqrt(frac * (1 - frac) / cfg.probes)
    bound = count_bound(n, eps)
    s = {
        "mode": "covering",
        "net_size": len(net),
        "count_bound": bound,
        "stop_streak": net.stop_streak,
        "is_packing": net.is_packing(),
        "covering_rate": rate,
        "ball_fraction_mc": frac,
        "ball_fraction_se": se,
        "ball_fraction_expected": ball_fraction(n, eps),
    }
    checks = {"count_le_bound": len(net) <= bound, "is_packing": net.is_packing()}
    s["checks"] = checks
    s["invariants_ok"] = all(checks.values())
    return _finish(cfg, sink, s, t0)


def run_volume_experiment(cfg: CensusConfig) -> CensusReport:
    """Monte Carlo estimate of the epsilon-ball volume fraction with error bars."""
    if cfg.mode != "volume":
        raise ValueError("run_volume_experiment needs mode='volume'")
    t0 = time.perf_counter()
    n, eps = cfg.n, cfg.epsilon
    center = random_unit_vectors(derive_rng(cfg.seed, 0), 1, n)
    net = EpsilonNet(n, eps, center)
    sink = _Sink(cfg.out)
    hits = 0
    for b, start in enumerate(range(0, cfg.probes, _VOLUME_BATCH)):
        size = min(_VOLUME_BATCH, cfg.probes - start)
        w = random_unit_vectors(derive_rng(cfg.seed, 1, b), size, n)
        h = int(np.count_nonzero(covered_mask(net, w)))
        hits += h
        sink.add({"batch": b, "probes": size, "hits": h})
    p = hits / cfg.probes
    se = math.sqrt(p * (1 - p) / cfg.probes)
    expected = ball_fraction(n, eps)
    s = {
        "mode": "volume",
        "probes": cfg.probes,
        "fraction_mc": p,
        "standard_error": se,
        "fraction_expected": expected,
        "z_score": (p - expected) / se if se > 0 else 0.0,
        "within_3se": abs(p - expected) <= 3 * se,
        "checks": {},
        "invariants_ok": True,
    }
    return _finish(cfg, sink, s, t0)


RUNNERS = {
    "general": run_general_census,
    "symmetric": run_symmetric_census,
    "covering": run_covering_experiment,
    "volume": run_volume_experiment,
}


def run_census(cfg: CensusConfig) -> CensusReport:
    log.info("census mode=%s n=%s k=%s m=%s samples=%s", cfg.mode, cfg.n, cfg.k, cfg.m, cfg.samples)
    return RUNNERS[cfg.mode](cfg)


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for key, val in d.items():
        name = f"{prefix}{key}"
        if isinstance(val, dict):
            out.update(_flatten(val, name + "."))
        else:
            out[name] = val
    return out


def write_summary(report: CensusReport, out) -> None:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "summary.json").write_text(json.dumps(report.summary, indent=2, sort_keys=True) + "\n")
    flat = _flatten({k: v for k, v in report.summary.items() if k != "execution"})
    with open(out / "summary.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["key", "value"])
        for key in sorted(flat):
            w.writerow([key, flat[key]])
