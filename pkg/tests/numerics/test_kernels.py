import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import integrate

from edgeforge.numerics.kernels import (
    KernelKind,
    KernelSpec,
    gaussian_cdf,
    gaussian_density,
    gaussian_sf,
    s_shifted,
    s_shifted_dt,
    t_kernel,
    t_shifted_closed,
    t_shifted_dt,
)


def _composed(t, x, y):
    value, _ = integrate.quad(
        lambda u: s_shifted(t, x, u) * s_shifted(t, u, y), 0.0, np.inf, epsabs=0, epsrel=1e-13
    )
    return value


def test_s_shifted_at_origin():
    assert s_shifted(0.0, 0.0, 0.0) == pytest.approx(1.0 / math.sqrt(math.pi))


def test_s_shifted_is_symmetric():
    x = np.linspace(0.0, 3.0, 7)

    np.testing.assert_allclose(
        s_shifted(-1.0, x[:, None], x[None, :]), s_shifted(-1.0, x[None, :], x[:, None])
    )


@pytest.mark.parametrize("t, x, y", [(0.0, 0.0, 0.0), (-2.0, 0.5, 1.5), (1.0, 0.3, 0.0), (-4.0, 2.0, 3.0)])
def test_t_shifted_is_the_square_of_s_shifted(t, x, y):
    assert t_shifted_closed(t, x, y) == pytest.approx(_composed(t, x, y), rel=1e-10)


@pytest.mark.parametrize("x, y", [(-3.0, -1.0), (-0.5, 2.0), (1.0, 1.0)])
def test_t_kernel_integral_representation_on_the_plane(x, y):
    expected, _ = integrate.quad(
        lambda u: math.exp(-((x + u) ** 2) - (y + u) ** 2) / math.pi, 0.0, np.inf, epsrel=1e-13
    )

    assert t_kernel(x, y) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize(
    "closed, derivative",
    [(s_shifted, s_shifted_dt), (t_shifted_closed, t_shifted_dt)],
)
def test_t_derivatives_match_central_differences(closed, derivative):
    t, x, y, h = -0.7, 0.4, 1.1, 1e-5
    difference = (closed(t + h, x, y) - closed(t - h, x, y)) / (2.0 * h)

    assert derivative(t, x, y) == pytest.approx(difference, rel=1e-7)


def test_gaussian_helpers():
    assert gaussian_cdf(0.0) == pytest.approx(0.5)
    assert gaussian_cdf(1.3) + gaussian_sf(1.3) == pytest.approx(1.0, rel=1e-15)
    h = 1e-6
    slope = (gaussian_cdf(0.4 + h) - gaussian_cdf(0.4 - h)) / (2.0 * h)
    assert slope == pytest.approx(gaussian_density(0.4), rel=1e-8)


def test_kernel_spec_matrices():
    spec = KernelSpec(kind=KernelKind.T_SHIFTED, t=0.5)
    nodes = np.array([0.1, 0.7, 2.0])

    matrix = spec.matrix(nodes)

    assert matrix.shape == (3, 3)
    np.testing.assert_allclose(matrix, matrix.T)
    assert matrix[1, 2] == pytest.approx(t_shifted_closed(0.5, 0.7, 2.0))
    assert spec.matrix_dt(nodes)[0, 0] == pytest.approx(t_shifted_dt(0.5, 0.1, 0.1))


def test_kernel_spec_rejects_non_finite_t():
    with pytest.raises(ValidationError, match="t is expected to be finite"):
        KernelSpec(kind=KernelKind.S_SHIFTED, t=math.inf)
