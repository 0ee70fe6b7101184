import math
import warnings

import numpy as np
import pytest

from wcl.functionals import (
    EndpointKernel,
    LocalTime,
    OffsetLocalTime,
    SelfIntersection,
    eval_functional,
    eval_functional_many,
    indicator_local_time,
    indicator_local_time_many,
    interval_weights,
    local_time_field,
    occupation_identity,
    triangle_rule,
)
from wcl.processes import BrownianMotion, Path, TimeGrid, sample

SQRT_2PI = math.sqrt(2.0 * math.pi)


def zero_path(n_steps=64, d=1):
    grid = TimeGrid(n_steps)
    return Path(grid, np.zeros((n_steps + 1, d)))


class TestWeights:
    def test_interval_weights_sum_to_one(self):
        for n in (2, 7, 256):
            assert np.sum(interval_weights(n)) == pytest.approx(1.0, rel=1e-14)

    def test_triangle_weights_sum_to_half(self):
        for n in (4, 33, 256):
            _, _, w, _ = triangle_rule(n)
            assert math.fsum(w) == pytest.approx(0.5, rel=1e-13)

    def test_triangle_tau_is_time_gap(self):
        i, j, _, tau = triangle_rule(8)
        assert np.allclose(tau, (j - i) / 8)
        assert np.all(i <= j)


class TestSpecValidation:
    def test_eps_must_be_positive(self):
        for cls in (LocalTime, EndpointKernel):
            with pytest.raises(ValueError):
                cls(0.0)
        for cls in (OffsetLocalTime, SelfIntersection):
            with pytest.raises(ValueError):
                cls(-1.0, (0.5,))

    def test_zero_offset_warns_for_d_above_one(self):
        with pytest.warns(UserWarning):
            SelfIntersection(0.1, (0.0, 0.0))
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            SelfIntersection(0.1, (0.0,))  # d = 1 is allowed silently

    def test_dimension_mismatch(self):
        p = zero_path(d=2)
        with pytest.raises(ValueError):
            eval_functional(LocalTime(0.1), p)
        with pytest.raises(ValueError):
            eval_functional(SelfIntersection(0.1, (0.5,)), p)


class TestClosedFormValues:
    def test_endpoint_kernel_zero_end(self):
        assert eval_functional(EndpointKernel(1.0), zero_path()) == pytest.approx(
            0.3989422804014327, rel=1e-12)

    def test_local_time_zero_path(self):
        for eps in (0.01, 0.5, 2.0):
            assert eval_functional(LocalTime(eps), zero_path()) == pytest.approx(
                1.0 / math.sqrt(2.0 * math.pi * eps), rel=1e-12)

    def test_self_intersection_zero_path(self):
        # constant integrand times the area of the triangle
        for d, u in ((1, (0.5,)), (2, (0.4, 0.3))):
            for eps in (0.1, 1.0):
                p = zero_path(d=d)
                sq = sum(x * x for x in u)
                expect = 0.5 * (2.0 * math.pi * eps) ** (-0.5 * d) * math.exp(
                    -sq / (2.0 * eps))
                got = eval_functional(SelfIntersection(eps, u), p)
                assert got == pytest.approx(expect, rel=1e-12)

    def test_offset_local_time_zero_path(self):
        u = (0.3, 0.4)
        eps = 0.5
        expect = (2.0 * math.pi * eps) ** -1 * math.exp(-0.25 / (2.0 * eps))
        assert eval_functional(OffsetLocalTime(eps, u), zero_path(d=2)) == pytest.approx(
            expect, rel=1e-12)

    def test_batch_matches_single(self):
        grid = TimeGrid(64)
        paths = [sample(BrownianMotion(2), grid, s) for s in range(5)]
        values = np.stack([p.values for p in paths])
        spec = SelfIntersection(0.1, (0.4, 0.3))
        batch = eval_functional_many(spec, values)
        singles = [eval_functional(spec, p) for p in paths]
        # the large-batch path may use reduced precision internally
        assert np.allclose(batch, singles, rtol=1e-4)

    def test_everything_non_negative(self):
        grid = TimeGrid(64)
        p = sample(BrownianMotion(1), grid, 17)
        for spec in (LocalTime(0.1), EndpointKernel(0.1),
                     OffsetLocalTime(0.1, (0.5,)), SelfIntersection(0.1, (0.5,))):
            assert eval_functional(spec, p) >= 0.0


class TestIndicatorLocalTime:
    def test_path_at_level(self):
        p = zero_path()
        assert indicator_local_time(p, 0.0, 0.25) == pytest.approx(2.0, rel=1e-12)

    def test_path_outside_band(self):
        p = zero_path()
        p.values[:] = 5.0
        assert indicator_local_time(p, 0.0, 0.25) == 0.0

    def test_eps_validation(self):
        with pytest.raises(ValueError):
            indicator_local_time(zero_path(), 0.0, 0.0)
        with pytest.raises(ValueError):
            indicator_local_time_many(np.zeros((2, 5, 1)), 0.0, -1.0)

    def test_batch_matches_single(self):
        grid = TimeGrid(128)
        paths = [sample(BrownianMotion(1), grid, s) for s in range(4)]
        values = np.stack([p.values for p in paths])
        batch = indicator_local_time_many(values, 0.0, 0.05)
        singles = [indicator_local_time(p, 0.0, 0.05) for p in paths]
        assert np.allclose(batch, singles, rtol=1e-12)


class TestLocalTimeField:
    def test_zero_path_peak(self):
        field = local_time_field(zero_path(), 0.04, [0.0])
        assert field[0] == pytest.approx(1.0 / math.sqrt(2.0 * math.pi * 0.04), rel=1e-12)

    def test_integrates_to_one(self):
        grid = TimeGrid(256)
        p = sample(BrownianMotion(1), grid, 23)
        xs = np.linspace(-6.0, 6.0, 2001)
        field = local_time_field(p, 0.05, xs)
        assert np.trapezoid(field, xs) == pytest.approx(1.0, abs=1e-6)

    def test_consistent_with_local_time(self):
        grid = TimeGrid(128)
        p = sample(BrownianMotion(1), grid, 29)
        field = local_time_field(p, 0.1, [0.0])
        assert field[0] == pytest.approx(eval_functional(LocalTime(0.1), p), rel=1e-12)

    def test_agrees_with_indicator_in_mc_mean(self):
        # both estimate the same local time ell(0); means within 10%
        grid = TimeGrid(2048)
        eps_field, eps_band = 1e-4, 0.02
        tot_f = tot_i = 0.0
        n = 200
        for s in range(n):
            p = sample(BrownianMotion(1), grid, s)
            tot_f += local_time_field(p, eps_field, [0.0])[0]
            tot_i += indicator_local_time(p, 0.0, eps_band)
        assert abs(tot_f - tot_i) / tot_i < 0.10


class TestOccupationIdentity:
    def test_constant_test_function(self):
        p = sample(BrownianMotion(1), TimeGrid(64), 31)
        lhs, rhs = occupation_identity(p, 0.01, [1.0])
        assert lhs == pytest.approx(1.0, rel=1e-12)
        assert rhs == pytest.approx(1.0, rel=1e-12)

    def test_odd_function_zero_path(self):
        lhs, rhs = occupation_identity(zero_path(), 0.5, [0.0, 1.0])
        assert lhs == 0.0
        assert rhs == 0.0

    def test_exact_on_random_paths(self):
        grid = TimeGrid(128)
        rng = np.random.default_rng(314)
        for s in range(100):
            p = sample(BrownianMotion(1), grid, s)
            coeffs = rng.standard_normal(5)
            lhs, rhs = occupation_identity(p, 0.01, coeffs)
            scale = max(abs(lhs), abs(rhs), 1e-30)
            assert abs(lhs - rhs) / scale < 1e-12

    def test_quadratic_closed_form(self):
        # f = x^2 on the zero path: both sides equal eps
        lhs, rhs = occupation_identity(zero_path(), 0.3, [0.0, 0.0, 1.0])
        assert lhs == pytest.approx(0.3, rel=1e-12)
        assert rhs == pytest.approx(0.3, rel=1e-12)

    def test_degree_guard(self):
        with pytest.raises(ValueError):
            occupation_identity(zero_path(), 0.1, [0.0] * 6)
        with pytest.raises(ValueError):
            occupation_identity(zero_path(), 0.0, [1.0])
