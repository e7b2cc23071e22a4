import csv
import json
import math

import numpy as np
import pytest

from geoment.bounds import fraction_threshold, thm_sym_c2_bound
from geoment.census import CensusConfig, run_census, run_general_census, run_symmetric_census


def _load_jsonl(path):
    return [json.loads(line) for line in path.read_text().splitlines()]


class TestConfig:
    @pytest.mark.parametrize(
        "kw",
        [
            {"mode": "bogus", "n": 2},
            {"mode": "general", "n": 2},
            {"mode": "symmetric", "n": 2},
            {"mode": "covering", "n": 2},
            {"mode": "general", "n": 2, "k": 2, "samples": 0},
            {"mode": "general", "n": 2, "k": 2, "workers": 0},
        ],
    )
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            CensusConfig(**kw)

    def test_from_json(self, tmp_path):
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps({"mode": "general", "n": 2, "k": 3, "samples": 5}))
        cfg = CensusConfig.from_json(p)
        assert (cfg.n, cfg.k, cfg.samples) == (2, 3, 5)
        assert "workers" not in cfg.deterministic_dict()

    def test_runner_mode_check(self):
        with pytest.raises(ValueError):
            run_symmetric_census(CensusConfig(mode="general", n=2, k=2))


class TestGeneral:
    def test_vectors_are_pure(self):
        rep = run_census(CensusConfig(mode="general", n=2, k=1, samples=20))
        assert all(abs(r["E_est"]) <= 1e-12 for r in rep.records)
        assert rep.invariants_ok

    def test_matrices_match_oracle(self):
        rep = run_census(CensusConfig(mode="general", n=2, k=2, samples=500, seed=3))
        assert rep.summary["max_abs_oracle_gap"] <= 1e-7
        assert rep.summary["E_est"]["max"] <= 1 + 1e-6
        assert rep.summary["checks"] == {"E_est_le_upper_bound": True, "sigma_le_oracle": True}

    def test_summary_matches_records(self):
        rep = run_census(CensusConfig(mode="general", n=2, k=3, samples=40, seed=1))
        E = np.array([r["E_est"] for r in rep.records])
        s = rep.summary["E_est"]
        assert s["min"] <= s["mean"] <= s["max"]
        assert s["mean"] == pytest.approx(E.mean(), abs=0)
        assert s["quantiles"]["0.5"] == pytest.approx(np.quantile(E, 0.5), abs=0)
        below = sum(r["below_threshold"] for r in rep.records)
        assert rep.summary["fraction_below_threshold"] == below / 40
        assert 0 <= rep.summary["fraction_below_threshold"] <= 1
        assert rep.summary["fraction_threshold"] == fraction_threshold(3)
        assert rep.summary["C_emp"] == min(r["sigma_lower"] for r in rep.records)

    def test_certified_intervals(self):
        rep = run_census(CensusConfig(mode="general", n=2, k=2, samples=30, epsilon=0.3))
        for r in rep.records:
            assert r["cert_sigma_lower"] <= r["sigma_oracle"] + 1e-12 <= r["cert_sigma_upper"] + 2e-12
            assert r["E_cert_lower"] <= r["E_est"] + 1e-12
        assert rep.summary["checks"]["hopm_within_certificate"]

    def test_recheck_is_recorded(self):
        # a generous threshold forces every sample through the recheck path
        cfg = CensusConfig(mode="general", n=2, k=4, samples=3, num_starts=2, recheck_factor=2)
        rep = run_general_census(cfg)
        assert all(("recheck_sigma_lower" in r) == (r["E_est"] < fraction_threshold(4)) for r in rep.records)

    def test_outputs(self, tmp_path):
        out = tmp_path / "run"
        run_census(CensusConfig(mode="general", n=2, k=3, samples=12, out=str(out)))
        recs = _load_jsonl(out / "samples.jsonl")
        assert [r["index"] for r in recs] == list(range(12))
        summary = json.loads((out / "summary.json").read_text())
        assert summary["config"]["seed"] == 0
        assert "wall_clock_seconds" in summary["execution"]
        rows = list(csv.reader((out / "summary.csv").open()))
        assert rows[0] == ["key", "value"]
        assert any(r[0] == "E_est.max" for r in rows)
        assert not any(r[0].startswith("execution") for r in rows)


class TestSymmetric:
    def test_linear_forms_are_pure(self):
        rep = run_census(CensusConfig(mode="symmetric", n=3, m=1, samples=20))
        assert all(abs(r["E_est"]) <= 1e-12 for r in rep.records)

    def test_quadrics_match_oracle(self):
        rep = run_census(CensusConfig(mode="symmetric", n=2, m=2, samples=100, seed=2))
        assert rep.summary["max_abs_oracle_gap"] <= 1e-7
        assert rep.invariants_ok

    def test_sextics_respect_dimension_bound(self):
        rep = run_census(CensusConfig(mode="symmetric", n=2, m=6, samples=500, seed=5))
        assert rep.summary["E_est"]["max"] <= math.log2(7) + 1e-6
        assert rep.invariants_ok

    def test_c2_comparison_at_proof_epsilon(self):
        rep = run_census(CensusConfig(mode="symmetric", n=2, m=4, samples=500, seed=6))
        eps = 1 / (4 * math.sqrt(4))
        assert rep.summary["proof_epsilon"] == eps
        assert rep.summary["thm_sym_c2_bound"] == thm_sym_c2_bound(2, 4, eps)
        assert rep.summary["C_s_emp_sq_le_bound"]

    def test_certified(self):
        rep = run_census(CensusConfig(mode="symmetric", n=2, m=3, samples=20, epsilon=0.1))
        assert rep.summary["checks"]["banach_within_certificate"]


class TestCovering:
    def test_qubit_half(self):
        rep = run_census(CensusConfig(mode="covering", n=2, epsilon=0.5))
        s = rep.summary
        assert s["net_size"] <= 8 and s["covering_rate"] == 1.0 and s["is_packing"]
        assert rep.invariants_ok

    def test_n1(self):
        s = run_census(CensusConfig(mode="covering", n=1, epsilon=0.5)).summary
        assert s["net_size"] == 1 and s["covering_rate"] == 1.0

    def test_n3(self):
        s = run_census(CensusConfig(mode="covering", n=3, epsilon=0.5)).summary
        assert s["net_size"] <= 64


class TestVolume:
    @pytest.mark.parametrize("n,eps", [(2, 0.3), (3, 0.5)])
    def test_fraction(self, n, eps):
        s = run_census(CensusConfig(mode="volume", n=n, epsilon=eps, probes=100_000, seed=n)).summary
        assert s["within_3se"]
        assert abs(s["fraction_mc"] - eps ** (n - 1)) <= 3 * s["standard_error"]

    def test_whole_sphere(self):
        s = run_census(CensusConfig(mode="volume", n=3, epsilon=1.0, probes=5000)).summary
        assert s["fraction_mc"] == 1.0


class TestDeterminism:
    @pytest.mark.parametrize("mode_kw", [{"mode": "general", "k": 3}, {"mode": "symmetric", "m": 3}])
    def test_worker_count_does_not_matter(self, tmp_path, mode_kw):
        blobs = []
        for workers in (1, 2):
            out = tmp_path / f"w{workers}"
            cfg = CensusConfig(n=2, samples=120, seed=9, workers=workers, out=str(out), **mode_kw)
            run_census(cfg)
            summary = json.loads((out / "summary.json").read_text())
            summary.pop("execution")
            blobs.append(((out / "samples.jsonl").read_bytes(), json.dumps(summary, sort_keys=True)))
        assert blobs[0] == blobs[1]
