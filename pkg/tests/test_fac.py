import math

import numpy as np
import pytest

from wcl.fac import (
    FacStudyReport,
    HolderDiagnostic,
    IllConditionedDenominator,
    MCConfig,
    PolyFunctional,
    TailDiagnostic,
    bm_kl_second_moment,
    endpoint_hermite_bound,
    eval_poly,
    eval_poly_many,
    fac_ratio,
    holder_moment_diagnostic,
    kl_basis,
    l2_norm_mc,
    pairing_mc,
    random_poly,
    tail_moment_diagnostic,
    uniform_fac_study,
)
from wcl.functionals import EndpointKernel, LocalTime, OffsetLocalTime
from wcl.processes import BrownianMotion, TimeGrid, sample, sample_values

SQRT_2PI = math.sqrt(2.0 * math.pi)


class TestPolyFunctional:
    def test_constant(self):
        p = PolyFunctional.constant(2.5)
        path = sample(BrownianMotion(1), TimeGrid(8), 0)
        assert eval_poly(p, path) == 2.5

    def test_point_evaluation(self):
        grid = TimeGrid(8)
        path = sample(BrownianMotion(2), grid, 3)
        p = PolyFunctional((0.5,), (2,), (((1,), 1.0),))
        assert eval_poly(p, path) == pytest.approx(path.values[4, 1], rel=1e-14)

    def test_polynomial_combination(self):
        grid = TimeGrid(8)
        path = sample(BrownianMotion(1), grid, 3)
        x, y = path.values[2, 0], path.values[8, 0]
        # 3 x^2 y - y + 1
        p = PolyFunctional((0.25, 1.0), (1, 1),
                           (((2, 1), 3.0), ((0, 1), -1.0), ((0, 0), 1.0)))
        assert eval_poly(p, path) == pytest.approx(3.0 * x * x * y - y + 1.0, rel=1e-12)

    def test_degree_property(self):
        p = PolyFunctional((0.5,), (1,), (((3,), 1.0), ((1,), 2.0)))
        assert p.degree == 3

    def test_scaled(self):
        p = PolyFunctional((0.5,), (1,), (((1,), 2.0),))
        q = p.scaled(0.5)
        path = sample(BrownianMotion(1), TimeGrid(8), 1)
        assert eval_poly(q, path) == pytest.approx(0.5 * eval_poly(p, path), rel=1e-14)

    def test_validation(self):
        with pytest.raises(ValueError):
            PolyFunctional((0.5,), (), (((1,), 1.0),))
        with pytest.raises(ValueError):
            PolyFunctional((0.5,), (1,), (((9,), 1.0),))
        with pytest.raises(ValueError):
            PolyFunctional((0.5,), (1,), (((1,), 0.0),))
        with pytest.raises(ValueError):
            PolyFunctional(tuple([0.5] * 9), tuple([1] * 9), (((1,) * 9, 1.0),))

    def test_coordinate_out_of_range(self):
        grid = TimeGrid(8)
        values, _ = sample_values(BrownianMotion(1), grid, 0, n_paths=2)
        p = PolyFunctional((0.5,), (2,), (((1,), 1.0),))
        with pytest.raises(ValueError):
            eval_poly_many(p, values, grid)


class TestMCEstimators:
    def test_l2_norm_of_endpoint(self):
        # E w(1)^2 = 1, so ||P|| = 1 for P = w(1)
        grid = TimeGrid(64)
        p = PolyFunctional((1.0,), (1,), (((1,), 1.0),))
        norm, se = l2_norm_mc(BrownianMotion(1), p, MCConfig(20000, 5), grid)
        assert abs(norm - 1.0) <= 4.0 * se

    def test_pairing_with_constant_poly(self):
        # pairing with P = 1 is just E Phi
        grid = TimeGrid(256)
        eps = 0.5
        mean, se = pairing_mc(BrownianMotion(1), EndpointKernel(eps),
                              PolyFunctional.constant(1.0), MCConfig(20000, 5), grid)
        oracle = 1.0 / math.sqrt(2.0 * math.pi * (1.0 + eps))
        assert abs(mean - oracle) <= 4.0 * se

    def test_fac_ratio_closed_form(self):
        # EndpointKernel paired with H_2(w(1)): ratio
        # |H_2(0)| (1+eps)^{-3/2} / (sqrt(2) sqrt(2 pi))
        grid = TimeGrid(64)
        eps = 1.0
        p = PolyFunctional((1.0,), (1,), (((2,), 1.0), ((0,), -1.0)))
        ratio, se = fac_ratio(BrownianMotion(1), EndpointKernel(eps), p,
                              MCConfig(40000, 11), grid)
        oracle = (1.0 + eps) ** -1.5 / (math.sqrt(2.0) * SQRT_2PI)
        assert abs(ratio - oracle) <= 4.0 * se

    def test_ill_conditioned_denominator(self):
        # P = w(1)^8 over only 100 samples: the norm standard error
        # dwarfs the norm itself, so the ratio must refuse to divide
        grid = TimeGrid(32)
        p = PolyFunctional((1.0,), (1,), (((8,), 1.0),))
        with pytest.raises(IllConditionedDenominator):
            fac_ratio(BrownianMotion(1), EndpointKernel(1.0), p, MCConfig(100, 3), grid)

    def test_sample_count_guard(self):
        with pytest.raises(ValueError):
            MCConfig(50, 0)


class TestRandomPoly:
    def test_draws_are_valid_and_reproducible(self):
        grid = TimeGrid(64)
        rng1 = np.random.default_rng(9)
        rng2 = np.random.default_rng(9)
        a = random_poly(rng1, 4, grid, 2)
        b = random_poly(rng2, 4, grid, 2)
        assert a == b
        assert a.degree <= 4
        assert all(0.0 < t <= 1.0 for t in a.times)
        assert all(1 <= c <= 2 for c in a.coords)


class TestUniformStudy:
    def test_study_report_shape(self, tmp_path):
        grid = TimeGrid(64)
        family = lambda eps: OffsetLocalTime(eps, (0.5,))
        study = uniform_fac_study(BrownianMotion(1), family, [1.0, 0.5, 0.1],
                                  degree=2, n_random_polys=20,
                                  mc=MCConfig(500, 17), grid=grid)
        assert isinstance(study, FacStudyReport)
        assert len(study.max_ratios) == 3
        assert study.sup_ratio == max(study.max_ratios)
        assert study.n_samples == 500
        study.to_json(tmp_path / "study.json")
        study.to_csv(tmp_path / "study.csv")
        lines = (tmp_path / "study.csv").read_text().strip().splitlines()
        assert lines[0] == "eps,max_ratio,std_error"
        assert len(lines) == 4

    def test_grid_validation(self):
        grid = TimeGrid(64)
        family = lambda eps: OffsetLocalTime(eps, (0.5,))
        with pytest.raises(ValueError):
            uniform_fac_study(BrownianMotion(1), family, [1.0, 0.5], 2, 20,
                              MCConfig(500, 0), grid)
        with pytest.raises(ValueError):
            uniform_fac_study(BrownianMotion(1), family, [0.1, 0.5, 1.0], 2, 20,
                              MCConfig(500, 0), grid)
        with pytest.raises(ValueError):
            uniform_fac_study(BrownianMotion(1), family, [1.0, 0.5, 0.1], 2, 5,
                              MCConfig(500, 0), grid)


class TestKLDiagnostics:
    def test_basis_orthonormal(self):
        t = np.linspace(0.0, 1.0, 20001)
        for j in range(1, 4):
            for k in range(1, 4):
                inner = np.trapezoid(kl_basis(j, t) * kl_basis(k, t), t)
                assert inner == pytest.approx(1.0 if j == k else 0.0, abs=1e-6)

    def test_bm_second_moments(self):
        assert bm_kl_second_moment(1) == pytest.approx((0.5 * math.pi) ** -2, rel=1e-14)
        # eigenvalues sum to int_0^1 t dt = 1/2
        total = sum(bm_kl_second_moment(k) for k in range(1, 100000))
        assert total == pytest.approx(0.5, abs=1e-5)

    def test_unweighted_tails_match_oracle(self):
        grid = TimeGrid(512)
        family = lambda eps: LocalTime(eps)
        diag = tail_moment_diagnostic(BrownianMotion(1), family, [1.0, 0.5, 0.1],
                                      basis_size=6, mc=MCConfig(4000, 23), grid=grid)
        assert isinstance(diag, TailDiagnostic)
        for n in range(6):
            oracle = sum(bm_kl_second_moment(k) for k in range(n + 1, 7))
            est = diag.unweighted_tails[n]
            se = diag.unweighted_std_errors[n]
            assert abs(est - oracle) <= 4.0 * se
        # tails decrease in the cutoff
        assert all(a >= b for a, b in zip(diag.unweighted_tails,
                                          diag.unweighted_tails[1:]))

    def test_holder_exponent_of_bm(self):
        # E |w(t)-w(s)|^4 = 3 |t-s|^2: exponent 2 for m0 = 2
        grid = TimeGrid(512)
        family = lambda eps: LocalTime(eps)
        diag = holder_moment_diagnostic(
            BrownianMotion(1), family, [1.0, 0.5, 0.1], m0=2,
            time_pairs=[(0.125, 0.25), (0.25, 0.5), (0.5, 1.0)],
            mc=MCConfig(4000, 29), grid=grid)
        assert isinstance(diag, HolderDiagnostic)
        assert abs(diag.unweighted_exponent - 2.0) < 0.2
        with pytest.raises(ValueError):
            holder_moment_diagnostic(BrownianMotion(1), family, [1.0, 0.5, 0.1], m0=3,
                                     time_pairs=[(0.25, 0.5)], mc=MCConfig(400, 0),
                                     grid=grid)


class TestEndpointBound:
    def test_values(self):
        assert endpoint_hermite_bound(0) == pytest.approx(1.0 / SQRT_2PI, rel=1e-14)
        assert endpoint_hermite_bound(2) == pytest.approx(
            1.0 / (math.sqrt(2.0) * SQRT_2PI), rel=1e-14)
        assert endpoint_hermite_bound(1) == 0.0

    def test_is_eps_zero_limit_of_ratio_oracle(self):
        # the oracle ratio H_n(0)(1+eps)^{-(n+1)/2}/(sqrt(n!) sqrt(2 pi))
        # increases to the bound as eps decreases to 0
        from wcl.analytic import hermite_eval

        for n in (0, 2, 4):
            prev = 0.0
            for eps in (1.0, 0.1, 0.01, 1e-6):
                val = abs(hermite_eval(n, 0.0)) * (1.0 + eps) ** (-(n + 1) / 2.0) / (
                    math.sqrt(math.factorial(n)) * SQRT_2PI)
                assert val > prev
                prev = val
            assert endpoint_hermite_bound(n) == pytest.approx(prev, rel=1e-5)
