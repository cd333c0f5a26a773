import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from satdyn.distributions import t_pdf, t_quantile
from satdyn.errors import DomainError
from satdyn.pricing import (
    QuadratureSpec,
    adaptive_quad,
    call_integrand,
    critical_value_tics,
    divergence_scan,
    t_density_constant,
    truncated_call_integral,
)

CLOSED_SIGMA0 = math.sqrt(3) * math.pi / 4  # integral of (1 + x^2/3)^-2 over [0, inf)


def antiderivative_sigma0(x):
    # d/dx [ (sqrt3/2) (atan(x/sqrt3) + (x/sqrt3) / (1 + x^2/3)) ] = (1 + x^2/3)^-2
    u = x / math.sqrt(3)
    return math.sqrt(3) / 2 * (math.atan(u) + u / (1 + u * u))


def test_integrand_values():
    assert call_integrand(0.0, 0.157, 3.0) == 1.0
    assert call_integrand(0.0, 2.0, 7.0) == 1.0
    assert call_integrand(math.sqrt(3), 0.0, 3.0) == pytest.approx(0.25, rel=1e-15)
    xi = np.array([200.0, 400.0, 800.0])
    vals = call_integrand(xi, 0.157, 3.0)
    assert np.all(np.diff(vals) > 0) and vals[-1] > 1e40


def test_normalized_integrand_is_density_times_exp():
    xi = np.linspace(-20, 20, 41)
    np.testing.assert_allclose(call_integrand(xi, 0.0, 3.0, normalize=True), t_pdf(xi, 3.0), rtol=1e-13)
    assert t_density_constant(1.0) == pytest.approx(1 / math.pi, rel=1e-14)


@given(st.floats(-1e3, 1e3), st.floats(0, 1), st.floats(0.5, 30))
def test_integrand_positive(xi, sigma, nu):
    # zero only where the full log kernel underflows
    log_kernel = sigma * xi - (nu + 1) / 2 * math.log1p(xi * xi / nu)
    assert call_integrand(xi, sigma, nu) > 0 or log_kernel < -700


def test_quadrature_closed_form_sigma0():
    value = truncated_call_integral(QuadratureSpec(lower=0.0, upper=1e6, sigma=0.0, nu=3.0))
    assert abs(value - CLOSED_SIGMA0) < 1e-8
    for a, b in [(0.0, 2.0), (-5.0, 30.0), (1.0, 1e3)]:
        got = truncated_call_integral(QuadratureSpec(lower=a, upper=b, sigma=0.0))
        assert got == pytest.approx(antiderivative_sigma0(b) - antiderivative_sigma0(a), abs=1e-10)


def test_quadrature_matches_quadpack():
    for sigma, a, b in [(0.157, 0.0, 50.0), (0.157, -3.0, 103.3), (0.5, 0.0, 200.0)]:
        got = truncated_call_integral(QuadratureSpec(lower=a, upper=b, sigma=sigma))
        ref, _ = integrate.quad(lambda x: call_integrand(x, sigma, 3.0), a, b, epsabs=0, epsrel=1e-12, limit=500,
                                points=[p for p in (1, 10, 100) if a < p < b])
        assert got == pytest.approx(ref, rel=1e-8)


def test_adaptive_quad_generic():
    v, err = adaptive_quad(np.sin, 0.0, math.pi)
    assert v == pytest.approx(2.0, abs=1e-12) and err < 1e-8
    assert adaptive_quad(np.cos, 1.0, 1.0) == (0.0, 0.0)
    assert adaptive_quad(np.exp, 1.0, 0.0)[0] == pytest.approx(-(math.e - 1), rel=1e-12)


def test_empty_interval():
    assert truncated_call_integral(QuadratureSpec(lower=2.0, upper=2.0)) == 0.0


def test_confidence_truncation():
    spec = QuadratureSpec(confidence=0.999999, nu=3.0)
    assert spec.truncation_point() == pytest.approx(103.3, abs=0.01)
    direct = truncated_call_integral(QuadratureSpec(upper=t_quantile(0.999999, 3.0)))
    assert truncated_call_integral(spec) == direct


def test_truncated_integral_increases_with_quantile():
    values = [truncated_call_integral(QuadratureSpec(confidence=p, sigma=0.157)) for p in
              (0.99, 0.999, 0.9999, 0.99999, 0.999999)]
    assert all(a < b for a, b in zip(values, values[1:]))


@given(st.floats(-20, 50), st.floats(0.01, 60), st.floats(0.01, 60), st.floats(0, 0.3))
def test_monotone_in_bounds(lower, w1, w2, sigma):
    mid = truncated_call_integral(QuadratureSpec(lower=lower, upper=lower + w1, sigma=sigma))
    wider = truncated_call_integral(QuadratureSpec(lower=lower, upper=lower + w1 + w2, sigma=sigma))
    narrower = truncated_call_integral(QuadratureSpec(lower=lower + w1 / 2, upper=lower + w1, sigma=sigma))
    assert mid > 0
    assert wider >= mid * (1 - 1e-12)
    assert narrower <= mid * (1 + 1e-12)


@pytest.mark.parametrize("upper", [math.inf, math.nan])
def test_infinite_upper_refused(upper):
    with pytest.raises(DomainError, match="truncation"):
        truncated_call_integral(QuadratureSpec(upper=upper, sigma=0.157))


def test_spec_validation():
    with pytest.raises(DomainError):
        QuadratureSpec()
    with pytest.raises(DomainError):
        QuadratureSpec(upper=1.0, confidence=0.9)
    with pytest.raises(DomainError):
        QuadratureSpec(upper=1.0, abs_tol=0.0)
    with pytest.raises(DomainError):
        QuadratureSpec(lower=5.0, upper=1.0).truncation_point()


def test_divergence_scan_grows_for_positive_sigma():
    scan = divergence_scan(0.157, 3.0, 0.0, [10.0, 50.0, 100.0, 200.0])
    values = [v for _, v in scan]
    inc = np.diff([0.0] + values)
    # integrand minimum near xi ~ 4/sigma ~ 25; beyond it increments grow
    assert inc[2] < inc[3]
    assert np.all(np.diff(values) > 0)
    scan = divergence_scan(0.157, 3.0, 0.0, [10.0, 100.0, 1000.0])
    inc = np.diff([0.0] + [v for _, v in scan])
    assert inc[0] < inc[1] < inc[2] and inc[2] > 10 * inc[0]


def test_divergence_scan_converges_for_zero_sigma():
    grid = [10.0, 100.0, 1e3, 1e4, 1e5]
    values = [v for _, v in divergence_scan(0.0, 3.0, 0.0, grid)]
    inc = np.diff(values)
    assert np.all(inc > 0) and np.all(np.diff(inc) < 0)
    assert values[-1] - values[-2] < 1e-10
    assert values[-1] == pytest.approx(CLOSED_SIGMA0, abs=1e-9)


def test_divergence_scan_single_point():
    scan = divergence_scan(0.157, 3.0, 0.0, [10.0])
    assert scan == [(10.0, truncated_call_integral(QuadratureSpec(upper=10.0)))]
    with pytest.raises(DomainError):
        divergence_scan(0.157, 3.0, 0.0, [10.0, 5.0])


def test_critical_value_tics():
    assert critical_value_tics(3.0, [0.5]) == [0.0]
    assert critical_value_tics(3.0, [0.999999])[0] == pytest.approx(103.29946778041934, rel=1e-9)
    assert critical_value_tics(3.0, [0.99])[0] == pytest.approx(4.5407028585681336, rel=1e-9)
    assert len(critical_value_tics(3.0)) == 4
    with pytest.raises(DomainError):
        critical_value_tics(3.0, [])
