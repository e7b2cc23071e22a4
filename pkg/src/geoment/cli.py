"""Command line interface: ``geoment <command> ...``; every command prints JSON."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

from . import bounds, io
from .census import CensusConfig, run_census
from .constructions import GroupingMap, det_tensor, exact_E_tnp, t_np, witness_sign, witness_u
from .exceptions import BudgetError, DimensionError, NormalizationError
from .nets import build_net, count_bound, covering_rate
from .spectral import HOPM_MAX_ITERS, entanglement_report, hopm, sigma_certified
from .symmetric import SYM_MAX_ITERS, banach_sigma, sym_sigma_certified, upper_bound_E_sym


def _emit(obj, out: str | None = None) -> None:
    if out:
        io.write_json(obj, out)
    else:
        json.dump(obj, sys.stdout, indent=2)
        sys.stdout.write("\n")


def _finite(x: float):
    return x if math.isfinite(x) else None


def cmd_net_build(a) -> int:
    net = build_net(a.n, a.epsilon, a.seed, a.stop_streak)
    _emit(io.net_to_dict(net), a.out)
    if a.out:
        _emit({"n": net.n, "epsilon": net.epsilon, "size": len(net), "count_bound": count_bound(net.n, net.epsilon)})
    return 0


def cmd_net_check(a) -> int:
    net = io.net_from_dict(io.read_json(a.net_file))
    rate = covering_rate(net, a.probes, a.seed)
    _emit(
        {
            "n": net.n,
            "epsilon": net.epsilon,
            "size": len(net),
            "count_bound": count_bound(net.n, net.epsilon),
            "is_packing": net.is_packing(),
            "covering_rate": rate,
            "probes": a.probes,
        }
    )
    return 0


def _interval_json(T, sig) -> dict:
    rep = entanglement_report(T, sig)
    return {
        "sigma_lower": sig.lower,
        "sigma_upper": sig.upper,
        "lower_method": sig.lower_method,
        "upper_method": sig.upper_method,
        "E_lower": _finite(rep.E_lower),
        "E_upper": _finite(rep.E_upper),
        "F_lower": _finite(rep.F_lower),
        "F_upper": _finite(rep.F_upper),
        "nuclear_lower": _finite(rep.nuclear_lower),
        "nuclear_upper": rep.nuclear_upper,
        "witness": io.pure_to_dict(sig.witness) if sig.witness is not None else None,
    }


def cmd_sigma(a) -> int:
    T = io.tensor_from_dict(io.read_json(a.tensor_file))
    if a.normalize:
        T = T.normalized()
    sig = hopm(T, a.starts, a.iters or HOPM_MAX_ITERS, a.tol, a.seed)
    if a.net_file:
        net = io.net_from_dict(io.read_json(a.net_file))
        sig = sig.intersect(sigma_certified(T, net))
    _emit(_interval_json(T, sig), a.out)
    return 0


def cmd_sym_sigma(a) -> int:
    S = io.symmetric_from_dict(io.read_json(a.file))
    sig = banach_sigma(S, a.starts, a.iters or SYM_MAX_ITERS, a.tol, a.seed)
    if a.net_file:
        net = io.net_from_dict(io.read_json(a.net_file))
        sig = sig.intersect(sym_sigma_certified(S, net))
    E_lo = -2 * math.log2(sig.upper) if sig.upper > 0 else None
    E_hi = -2 * math.log2(sig.lower) if sig.lower > 0 else None
    _emit(
        {
            "sigma_lower": sig.lower,
            "sigma_upper": sig.upper,
            "lower_method": sig.lower_method,
            "upper_method": sig.upper_method,
            "E_lower": max(E_lo, 0.0) if E_lo is not None else None,
            "E_upper": E_hi,
            "upper_bound_E_sym": upper_bound_E_sym(S.n, S.m),
            "witness_vector": io.encode_complex(sig.witness.factors[0]),
        },
        a.out,
    )
    return 0


def cmd_det_tensor(a) -> int:
    T = det_tensor(a.d, signed=not a.unsigned, normalize=a.normalize)
    _emit(io.tensor_to_dict(T), a.out)
    return 0


def cmd_tnp(a) -> int:
    T = t_np(a.n, a.p)
    _emit(io.tensor_to_dict(T), a.out)
    return 0


def cmd_witness(a) -> int:
    g = io.grouping_from_dict(io.read_json(a.h_file)) if a.h_file else GroupingMap.default(a.n, a.p)
    if (g.n, g.p) != (a.n, a.p):
        raise DimensionError(f"grouping map is for (n, p) = ({g.n}, {g.p}), not ({a.n}, {a.p})")
    u = witness_u(g)
    out = io.pure_to_dict(u)
    out["det_inner_product"] = witness_sign(g)
    out["sigma_lower_tnp"] = 1 / math.sqrt(math.factorial(a.n**a.p))
    out["E_tnp"] = exact_E_tnp(a.n, a.p)
    _emit(out, a.out)
    return 0


def _parse_params(items) -> dict:
    params = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise ValueError(f"expected key=value, got {item!r}")
        try:
            params[key] = int(val)
        except ValueError:
            try:
                params[key] = float(val)
            except ValueError:
                params[key] = val
    return params


def cmd_bounds(a) -> int:
    p = _parse_params(a.params)
    which = a.which
    if which == "thm-main":
        eps = p.get("epsilon", 0.5)
        out = {
            "C2_bound": bounds.thm_main_c2_bound(p["n"], p["k"], eps),
            "E_max_lower": bounds.thm_main_E_lower(p["n"], p["k"], eps),
            "conc_meas_constant": bounds.conc_meas_constant(p["n"], p["k"], eps),
        }
    elif which == "cor-main":
        out = {"E_max_lower": bounds.cor_main_lower(p["n"], p["k"]), "valid": bounds.cor_main_valid(p["k"])}
    elif which == "fraction":
        out = {
            "threshold": bounds.fraction_threshold(p["k"]),
            "fraction_bound": math.exp(-p["k"]),
            "valid": bounds.fraction_valid(p["k"]),
        }
    elif which == "thm-sym":
        out = {"C2_s_bound": bounds.thm_sym_c2_bound(p["n"], p["m"], p["epsilon"])}
    elif which == "sym-main":
        th = bounds.sym_main_threshold(p["n"], p.get("m_max", 10**4))
        out = {
            "E_s_max_lower": bounds.sym_main_lower(p["n"], p["m"]),
            "threshold": th,
            "valid": th["m_star"] is not None and p["m"] >= th["m_star"],
        }
    elif which == "sym-qubit":
        out = {"E_s_max_lower": bounds.sym_qubit_lower(p["m"]), "valid": True}
    elif which == "chains":
        chain = p.pop("chain")
        out = bounds.verify_proof_chain(chain, **p).as_dict()
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(which)
    out = {"which": which, "params": _parse_params(a.params), **out}
    _emit(out)
    return 0 if out.get("passed", True) else 1


def cmd_census(a) -> int:
    if a.config:
        cfg_dict = io.read_json(a.config)
    else:
        cfg_dict = {}
    overrides = {
        "mode": a.mode,
        "n": a.n,
        "k": a.k,
        "m": a.m,
        "samples": a.samples,
        "seed": a.seed,
        "num_starts": a.starts,
        "epsilon": a.epsilon,
        "stop_streak": a.net_stop_streak,
        "probes": a.probes,
        "workers": a.workers,
        "out": a.out,
    }
    cfg_dict.update({k: v for k, v in overrides.items() if v is not None})
    report = run_census(CensusConfig(**cfg_dict))
    _emit(report.summary)
    return 0 if report.invariants_ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="geoment", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    net = sub.add_parser("net", help="build or check epsilon-nets")
    nsub = net.add_subparsers(dest="net_command", required=True)
    b = nsub.add_parser("build")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--epsilon", type=float, required=True)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--stop-streak", type=int, default=None)
    b.add_argument("--out")
    b.set_defaults(func=cmd_net_build)
    c = nsub.add_parser("check")
    c.add_argument("--net-file", required=True)
    c.add_argument("--probes", type=int, default=10_000)
    c.add_argument("--seed", type=int, default=1)
    c.set_defaults(func=cmd_net_check)

    def hopm_args(p):
        p.add_argument("--net-file")
        p.add_argument("--starts", type=int, default=None)
        p.add_argument("--iters", type=int, default=None, help="iteration cap (solver default when omitted)")
        p.add_argument("--tol", type=float, default=1e-12)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out")

    s = sub.add_parser("sigma", help="spectral-norm interval and E/F bounds of a tensor file")
    s.add_argument("--tensor-file", required=True)
    s.add_argument("--normalize", action="store_true", help="rescale the tensor to unit norm first")
    hopm_args(s)
    s.set_defaults(func=cmd_sigma)

    sym = sub.add_parser("sym", help="symmetric tensors")
    ssub = sym.add_subparsers(dest="sym_command", required=True)
    ss = ssub.add_parser("sigma")
    ss.add_argument("--file", required=True)
    hopm_args(ss)
    ss.set_defaults(func=cmd_sym_sigma)

    d = sub.add_parser("det-tensor", help="determinant tensor in (C^d)^{⊗d}")
    d.add_argument("--d", type=int, required=True)
    d.add_argument("--unsigned", action="store_true")
    d.add_argument("--normalize", action="store_true")
    d.add_argument("--out")
    d.set_defaults(func=cmd_det_tensor)

    t = sub.add_parser("tnp", help="regrouped normalized determinant T_(n,p)")
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--p", type=int, required=True)
    t.add_argument("--out")
    t.set_defaults(func=cmd_tnp)

    w = sub.add_parser("witness", help="pure witness u for T_(n,p)")
    w.add_argument("--n", type=int, required=True)
    w.add_argument("--p", type=int, required=True)
    w.add_argument("--h-file")
    w.add_argument("--out")
    w.set_defaults(func=cmd_witness)

    bd = sub.add_parser("bounds", help="evaluate closed-form bounds or check a derivation")
    bd.add_argument(
        "--which",
        required=True,
        choices=["thm-main", "cor-main", "fraction", "thm-sym", "sym-main", "sym-qubit", "chains"],
    )
    bd.add_argument("--params", nargs="*", default=[], metavar="KEY=VALUE")
    bd.set_defaults(func=cmd_bounds)

    cs = sub.add_parser("census", help="Monte Carlo experiments")
    cs.add_argument("--config", help="JSON file with CensusConfig fields; flags override it")
    cs.add_argument("--mode", choices=["general", "symmetric", "covering", "volume"])
    cs.add_argument("--n", type=int)
    group = cs.add_mutually_exclusive_group()
    group.add_argument("--k", type=int)
    group.add_argument("--m", type=int)
    cs.add_argument("--samples", type=int)
    cs.add_argument("--seed", type=int)
    cs.add_argument("--starts", type=int)
    cs.add_argument("--epsilon", type=float)
    cs.add_argument("--net-stop-streak", type=int)
    cs.add_argument("--probes", type=int)
    cs.add_argument("--workers", type=int)
    cs.add_argument("--out")
    cs.set_defaults(func=cmd_census)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (BudgetError, DimensionError, NormalizationError, ValueError, KeyError) as exc:
        print(f"geoment: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
