import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from geoment.exceptions import BudgetError, DimensionError
from geoment.nets import (
    EpsilonNet,
    ball_contains,
    ball_fraction,
    ball_fraction_mc,
    ball_volume,
    build_net,
    chain_bound_holds,
    chain_bound_holds_batch,
    count_bound,
    covering_rate,
    grid_point,
    packing_overlap_threshold,
    product_grid_max,
    sphere_volume,
)
from geoment.spectral import sigma_matrix_oracle
from geoment.tensor import DenseTensor, PureTensor, eval_pure, pure_to_dense, random_unit_tensor

from strategies import seeds, unit_vector


_NETS = {key: build_net(*key, seed=42) for key in [(2, 0.1), (2, 0.3), (2, 0.5), (3, 0.3), (3, 0.5)]}


class TestVolumes:
    def test_whole_sphere(self):
        assert ball_volume(2, 1) == pytest.approx(2 * math.pi**2, rel=1e-15)
        assert sphere_volume(2) == pytest.approx(2 * math.pi**2, rel=1e-15)

    def test_circle(self):
        assert ball_volume(1, 0.5) == pytest.approx(2 * math.pi, rel=1e-15)

    def test_hand_value(self):
        assert ball_volume(3, 0.5) == pytest.approx(math.pi**3 / 4, rel=1e-15)

    @pytest.mark.parametrize("n,eps,expected", [(4, 1.0, 1.0), (3, 0.5, 0.25), (2, 0.3, 0.3)])
    def test_fraction(self, n, eps, expected):
        assert ball_fraction(n, eps) == pytest.approx(expected, rel=1e-15)

    @given(st.integers(1, 6), st.floats(0.01, 1.0))
    def test_fraction_is_volume_ratio(self, n, eps):
        assert ball_fraction(n, eps) == pytest.approx(ball_volume(n, eps) / sphere_volume(n), rel=1e-12)

    @pytest.mark.parametrize("eps", [0.0, -0.1, 1.5])
    def test_domain(self, eps):
        with pytest.raises(ValueError):
            ball_volume(2, eps)


class TestBallContains:
    def test_self_and_phase(self):
        v = unit_vector(3, 3)
        assert ball_contains(v, 0.1, v)
        assert ball_contains(v, 0.1, np.exp(1.234j) * v)

    def test_orthogonal(self):
        assert not ball_contains([1, 0], 0.5, [0, 1])

    def test_exact_boundary(self):
        # |<v,w>|^2 = 0.5 exactly; the ball is closed
        w = np.array([1, 1]) / math.sqrt(2)
        assert ball_contains([1, 0], 0.5 + 1e-15, w)
        assert not ball_contains([1, 0], 0.4, w)

    def test_non_unit_rejected(self):
        with pytest.raises(ValueError):
            ball_contains([1, 1], 0.5, [1, 0])


def _chain_triples(rng, count, n, eps):
    """Triples satisfying both hypotheses of the chain bound by construction."""

    def near(base, eps_vec):
        # w = a*base + b*perp with |a|^2 uniform in [1 - eps, 1]
        z = rng.standard_normal(base.shape) + 1j * rng.standard_normal(base.shape)
        z -= np.einsum("ij,ij->i", base.conj(), z)[:, None] * base
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        a2 = 1 - eps_vec * rng.random(base.shape[0])
        phase = np.exp(2j * np.pi * rng.random(base.shape[0]))
        return (np.sqrt(a2) * phase)[:, None] * base + np.sqrt(1 - a2)[:, None] * z

    v = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    eps_vec = eps if np.ndim(eps) else np.full(count, eps)
    z = near(v, eps_vec)
    w = near(z, eps_vec)
    return v, z, w


class TestChainBound:
    def test_equal_vectors(self):
        v = unit_vector(1, 3)
        assert chain_bound_holds(v, v, v, 0.2)

    def test_vacuous(self):
        assert chain_bound_holds([1, 0], [0, 1], [1, 0], 0.1)

    def test_would_fail_with_smaller_factor(self):
        # with 2*eps instead of 4*eps the statement is false: the factor is needed
        t = math.acos(math.sqrt(1 - 0.1))
        v = np.array([1, 0])
        z = np.array([math.cos(t), math.sin(t)])
        w = np.array([math.cos(2 * t), math.sin(2 * t)])
        assert chain_bound_holds(v, z, w, 0.1)
        assert abs(np.vdot(v, w)) ** 2 < 1 - 2 * 0.1

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_random_hypothesis_triples(self, n):
        rng = np.random.default_rng(n)
        eps = rng.uniform(0.001, 0.25, 20_000)
        v, z, w = _chain_triples(rng, 20_000, n, eps)
        assert np.all(np.abs(np.einsum("ij,ij->i", v.conj(), z)) ** 2 >= 1 - eps - 1e-12)
        assert chain_bound_holds_batch(v, z, w, eps).all()


class TestBuildNet:
    def test_n1(self):
        net = build_net(1, 0.5, 3, 100)
        assert len(net) == 1
        assert covering_rate(net, 100, 0) == 1.0

    def test_n2_half(self):
        net = build_net(2, 0.5, 0, 10_000)
        assert 1 <= len(net) <= 8
        assert covering_rate(net, 10_000, 1) == 1.0

    def test_frozen_metadata(self):
        net = build_net(2, 0.3, seed=5)
        assert net.construction_seed == 5
        assert net.stop_streak == 1000 * math.ceil(count_bound(2, 0.3))
        assert net.packing_radius == pytest.approx(0.075)
        assert net.epsilon == 0.3

    def test_deterministic(self):
        a, b = build_net(3, 0.4, 9), build_net(3, 0.4, 9)
        assert np.array_equal(a.centers, b.centers)

    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("eps", [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
    def test_count_and_packing_sweep(self, n, eps):
        streak = 20_000 if (n, eps) == (3, 0.1) else None
        net = build_net(n, eps, seed=17, stop_streak=streak)
        assert len(net) <= count_bound(n, eps)
        assert net.is_packing()
        # the exact disjointness test implies the weaker overlap criterion
        g = net.pairwise_overlap() ** 2
        np.fill_diagonal(g, 0)
        assert np.all(g < 1 - eps / 4)

    def test_packing_threshold_is_geodesic(self):
        eps = 0.37
        r = math.acos(math.sqrt(1 - eps / 4))
        assert packing_overlap_threshold(eps) == pytest.approx(math.cos(2 * r), abs=1e-15)

    @pytest.mark.parametrize("eps", [0.0, 1.0, 1.2])
    def test_domain(self, eps):
        with pytest.raises(ValueError):
            build_net(2, eps)

    def test_bad_streak(self):
        with pytest.raises(ValueError):
            build_net(2, 0.5, 0, 0)

    def test_centers_must_be_unit(self):
        with pytest.raises(ValueError):
            EpsilonNet(2, 0.5, np.array([[1.0, 1.0]]))


class TestCovering:
    def test_single_center_eps_one(self):
        assert covering_rate(EpsilonNet(3, 1.0, np.array([[1, 0, 0]])), 1000, 2) == 1.0

    def test_single_center_fraction(self):
        p = covering_rate(EpsilonNet(2, 0.3, unit_vector(4, 2)[None, :]), 100_000, 3)
        se = math.sqrt(0.3 * 0.7 / 100_000)
        assert abs(p - 0.3) <= 3 * se

    @pytest.mark.parametrize("n,eps", [(2, 0.2), (2, 0.5), (3, 0.2), (3, 0.5)])
    def test_mc_fraction(self, n, eps):
        p, se = ball_fraction_mc(n, eps, 100_000, seed=n * 100 + int(eps * 10))
        assert abs(p - eps ** (n - 1)) <= 3 * se

    def test_probes_positive(self):
        with pytest.raises(ValueError):
            covering_rate(build_net(2, 0.5), 0)


class TestProductGrid:
    def test_pure_on_net(self):
        net = build_net(2, 0.3, 1)
        T = pure_to_dense(PureTensor([net.centers[2], net.centers[0], net.centers[1]]))
        M, arg = product_grid_max(T, net)
        assert M == pytest.approx(1.0, abs=1e-12)
        assert arg == (2, 0, 1)

    def test_bell_dense_net(self, bell):
        net = build_net(2, 0.01, 0, 20_000)
        M, _ = product_grid_max(bell, net)
        assert 0.7071 * (1 - 0.01) <= M <= 0.7072

    def test_argmax_reproduces_value(self):
        net = build_net(2, 0.4, 2)
        T = random_unit_tensor(2, 3, 4)
        M, arg = product_grid_max(T, net)
        assert abs(eval_pure(T, grid_point(net, arg))) == pytest.approx(M, abs=1e-12)

    def test_matches_brute_force(self):
        net = build_net(2, 0.5, 3)
        T = random_unit_tensor(2, 2, 8)
        M, _ = product_grid_max(T, net)
        brute = max(abs(eval_pure(T, grid_point(net, idx))) for idx in np.ndindex(len(net), len(net)))
        assert M == pytest.approx(brute, abs=1e-14)

    def test_lexicographic_tie_break(self):
        # centers e1 and i*e1 give exactly equal objective values
        net = EpsilonNet(2, 0.5, np.array([[1, 0], [1j, 0], [0, 1]]))
        assert product_grid_max(pure_to_dense(PureTensor([[1, 0], [1, 0]])), net)[1] == (0, 0)
        assert product_grid_max(pure_to_dense(PureTensor([[0, 1], [1, 0]])), net)[1] == (2, 0)

    def test_budget(self):
        net = build_net(2, 0.1, 0)
        with pytest.raises(BudgetError):
            product_grid_max(random_unit_tensor(2, 4, 0), net, budget=100)

    def test_dimension(self):
        with pytest.raises(DimensionError):
            product_grid_max(random_unit_tensor(3, 2, 0), build_net(2, 0.5))

    @given(seeds, st.sampled_from(sorted(_NETS)))
    def test_sandwich_against_oracle(self, seed, key):
        n, eps = key
        net = _NETS[key]
        T = random_unit_tensor(n, 2, seed)
        sigma = sigma_matrix_oracle(T)
        M, _ = product_grid_max(T, net)
        assert sigma * (1 - eps) - 1e-12 <= M <= sigma + 1e-12

