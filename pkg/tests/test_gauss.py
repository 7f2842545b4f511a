import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stochroute.gauss import (
    NormalVar,
    expected_delay,
    expected_earliness,
    std_cdf,
    std_pdf,
    waiting_moments,
)

from .oracles import quad_delay, quad_earliness, quad_wait_moments


class TestStdCdf:
    def test_symmetry_at_zero(self):
        assert std_cdf(0.0) == 0.5

    def test_95_quantile(self):
        # 1.6448536... located by bisection on quadrature of the density
        assert std_cdf(1.6448536) == pytest.approx(0.95, abs=1e-7)

    def test_deep_tail(self):
        # quadrature tail bound: Phi(-8) = 6.221e-16
        assert std_cdf(-8.0) < 1e-15
        assert std_cdf(-8.0) == pytest.approx(6.220960574271829e-16, rel=1e-9)

    def test_monotone_and_bounded(self):
        zs = [-40.0, -8.0, -3.0, -1.0, 0.0, 0.5, 2.0, 9.0, 40.0]
        vals = [std_cdf(z) for z in zs]
        assert all(0.0 <= v <= 1.0 for v in vals)
        assert all(a <= b for a, b in zip(vals, vals[1:]))

    def test_erf_identity(self):
        for z in (-5.5, -1.2, 0.0, 0.3, 2.4, 6.0):
            ref = 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))
            assert std_cdf(z) == pytest.approx(ref, abs=1e-12)


class TestExpectedEarliness:
    def test_at_the_bound(self):
        # quadrature oracle: E[(h-A)^+] at mu=h, sigma=1 is phi(0)
        val = expected_earliness(NormalVar(0.0, 1.0), 0.0)
        assert val == pytest.approx(0.3989422804014327, abs=1e-9)

    def test_deterministic_limit(self):
        assert expected_earliness(NormalVar(0.0, 0.0), 5.0) == 5.0
        assert expected_earliness(NormalVar(7.0, 0.0), 5.0) == 0.0

    def test_far_above_bound(self):
        # frozen from quadrature (MC at 1e7 samples gives 0.00077)
        val = expected_earliness(NormalVar(10.0, 4.0), 4.0)
        assert val == pytest.approx(0.0007643086340954472, abs=1e-9)


class TestExpectedDelay:
    def test_at_the_bound(self):
        val = expected_delay(NormalVar(0.0, 1.0), 0.0)
        assert val == pytest.approx(0.3989422804014327, abs=1e-9)

    def test_deterministic_limit(self):
        assert expected_delay(NormalVar(3.0, 0.0), 5.0) == 0.0
        assert expected_delay(NormalVar(8.0, 0.0), 5.0) == 3.0

    def test_identity_with_earliness(self):
        # E[(A-h)^+] - E[(h-A)^+] = mu - h, so delay here is 6 + 0.00076431
        a = NormalVar(10.0, 4.0)
        assert expected_delay(a, 4.0) == pytest.approx(6.0007643086340954, abs=1e-9)


class TestWaitingMoments:
    def test_deterministic_wait(self):
        w = waiting_moments(NormalVar(3.0, 0.0), 5.0)
        assert (w.mu, w.var) == (2.0, 0.0)

    def test_never_wait_tail(self):
        w = waiting_moments(NormalVar(10.0, 1.0), 0.0)
        assert w.mu < 1e-15
        assert w.var < 1e-15

    def test_symmetric_point(self):
        # frozen from quadrature of max(0, e-A); MC at 1e7 samples: 1.3642
        w = waiting_moments(NormalVar(5.0, 4.0), 5.0)
        assert w.mu == pytest.approx(0.7978845608028654, abs=1e-6)
        assert w.var == pytest.approx(1.363380227632419, abs=1e-3)

    def test_matches_quadrature_grid(self):
        rng = random.Random(20240811)
        for _ in range(200):
            mu = rng.uniform(-50.0, 50.0)
            sigma = 10.0 ** rng.uniform(-6, 2)
            e = mu + rng.uniform(-8.0, 8.0) * sigma
            w = waiting_moments(NormalVar(mu, sigma * sigma), e)
            m_ref, v_ref = quad_wait_moments(mu, sigma, e)
            assert w.mu == pytest.approx(m_ref, abs=1e-8)
            assert w.var == pytest.approx(v_ref, abs=1e-8)


def test_quadrature_agreement_grid():
    # shared grid for both censored expectations, absolute 1e-8
    rng = random.Random(99)
    for _ in range(200):
        mu = rng.uniform(-100.0, 100.0)
        sigma = 10.0 ** rng.uniform(-6, 3)
        h = mu + rng.uniform(-8.0, 8.0) * sigma
        a = NormalVar(mu, sigma * sigma)
        assert expected_earliness(a, h) == pytest.approx(quad_earliness(mu, sigma, h), abs=1e-8)
        assert expected_delay(a, h) == pytest.approx(quad_delay(mu, sigma, h), abs=1e-8)


def test_identity_grid():
    # E[(A-h)^+] - E[(h-A)^+] = mu - h on a 10^3 random grid
    rng = random.Random(7)
    for _ in range(1000):
        mu = rng.uniform(-200.0, 200.0)
        sigma = 10.0 ** rng.uniform(-6, 3)
        h = mu + rng.uniform(-6.0, 6.0) * sigma
        a = NormalVar(mu, sigma * sigma)
        gap = expected_delay(a, h) - expected_earliness(a, h)
        assert gap == pytest.approx(mu - h, abs=1e-9 * max(1.0, abs(mu - h)))


@given(
    mu=st.floats(-1e3, 1e3),
    sigma=st.floats(1e-6, 1e3),
    off=st.floats(-8.0, 8.0),
)
@settings(max_examples=300, deadline=None)
def test_properties(mu, sigma, off):
    h = mu + off * sigma
    a = NormalVar(mu, sigma * sigma)
    early = expected_earliness(a, h)
    late = expected_delay(a, h)
    assert early >= 0.0
    assert late >= 0.0
    # monotonicity in mu: earliness falls, delay rises
    b = NormalVar(mu + 0.5 * sigma, sigma * sigma)
    assert expected_earliness(b, h) <= early + 1e-12
    assert expected_delay(b, h) >= late - 1e-12
    # Jensen bound on the wait
    w = waiting_moments(a, h)
    assert w.mu >= max(0.0, h - mu) - 1e-9 * max(1.0, abs(h - mu))
    assert w.var >= 0.0


def test_wait_vanishes_for_early_window():
    a = NormalVar(100.0, 25.0)
    for e in (50.0, 0.0, -100.0, -1e6):
        w = waiting_moments(a, e)
        assert w.mu <= 1e-12
        assert w.var <= 1e-12


def test_normalvar_validation():
    with pytest.raises(ValueError):
        NormalVar(math.nan, 1.0)
    with pytest.raises(ValueError):
        NormalVar(0.0, -1.0)
    assert NormalVar(1.0, 2.0).plus(NormalVar(3.0, 4.0)) == NormalVar(4.0, 6.0)


def test_std_pdf_peak():
    assert std_pdf(0.0) == pytest.approx(0.3989422804014327, abs=1e-15)
