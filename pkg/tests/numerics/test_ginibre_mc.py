import math
from unittest.mock import patch

import numpy as np
import pytest
from scipy import stats

from edgeforge.numerics import edgelaw, ginibre_mc
from edgeforge.utils.constants import TABLE1_REFERENCE
from edgeforge.utils.errors import EigensolverError, ParameterError
from edgeforge.utils.models import McRun


def _uniform_cdf(t):
    return min(max(t, 0.0), 1.0)


def _run(maxima, empty=0, gamma=1.0):
    return McRun(
        n=10,
        gamma=gamma,
        num_samples=len(maxima) + empty,
        seed=0,
        maxima=maxima,
        empty_samples=empty,
        retained_counts=[1] * len(maxima) + [0] * empty,
    )


def test_sample_stream_is_reproducible_and_keyed_by_index():
    first = ginibre_mc.sample_stream(7, 3).standard_normal(5)
    again = ginibre_mc.sample_stream(7, 3).standard_normal(5)
    other = ginibre_mc.sample_stream(7, 4).standard_normal(5)
    thinning = ginibre_mc.sample_stream(7, 3, ginibre_mc.THINNING_STREAM).standard_normal(5)

    np.testing.assert_array_equal(first, again)
    assert not np.array_equal(first, other)
    assert not np.array_equal(first, thinning)


def test_sample_stream_rejects_negative_seed():
    with pytest.raises(ParameterError, match="seed is expected to be a 64-bit"):
        ginibre_mc.sample_stream(-1, 0)


def test_sample_matrix_is_reproducible():
    a = ginibre_mc.sample_matrix(4, ginibre_mc.sample_stream(1, 0))
    b = ginibre_mc.sample_matrix(4, ginibre_mc.sample_stream(1, 0))

    assert a.shape == (4, 4)
    np.testing.assert_array_equal(a, b)


def test_sample_matrix_entries_are_standard_normal():
    entries = ginibre_mc.sample_matrix(1000, ginibre_mc.sample_stream(11, 0)).ravel()

    assert abs(entries.mean()) < 4.0 / 1000.0
    assert entries.var() == pytest.approx(1.0, rel=0.01)


@pytest.mark.parametrize("n", [1, 1001])
def test_sample_matrix_rejects_sizes_out_of_range(n):
    with pytest.raises(ParameterError, match=r"n is expected to be in \[2, 1000\]"):
        ginibre_mc.sample_matrix(n, ginibre_mc.sample_stream(0, 0))


def test_real_eigenvalues_of_a_diagonal_matrix():
    values = ginibre_mc.real_eigenvalues(np.diag([3.0, 1.0, 2.0]))

    np.testing.assert_allclose(values, [1.0, 2.0, 3.0])


def test_real_eigenvalues_of_a_rotation_are_empty():
    assert ginibre_mc.real_eigenvalues(np.array([[0.0, -1.0], [1.0, 0.0]])).size == 0


def test_real_eigenvalues_of_a_companion_matrix():
    # (x - 1)(x^2 + 1) = x^3 - x^2 + x - 1
    companion = np.array([[1.0, -1.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])

    np.testing.assert_allclose(ginibre_mc.real_eigenvalues(companion), [1.0], rtol=1e-12)


def test_complex_eigenvalues_come_in_conjugate_pairs():
    matrix = ginibre_mc.sample_matrix(60, ginibre_mc.sample_stream(5, 0))
    eigenvalues = np.linalg.eigvals(matrix)
    imaginary = np.sort(eigenvalues.imag)

    np.testing.assert_allclose(imaginary, -imaginary[::-1], atol=1e-10 * np.max(np.abs(eigenvalues)))


def test_real_eigenvalues_maps_solver_failures():
    with patch.object(np.linalg, "eigvals", side_effect=np.linalg.LinAlgError("boom")):
        with pytest.raises(EigensolverError, match="did not converge"):
            ginibre_mc.real_eigenvalues(np.eye(3))


def test_thin_at_the_ends():
    values = np.array([0.5, -1.0, 2.0])

    np.testing.assert_array_equal(ginibre_mc.thin(values, 1.0, ginibre_mc.sample_stream(0, 0)), values)
    assert ginibre_mc.thin(values, 0.0, ginibre_mc.sample_stream(0, 0)).size == 0


def test_thin_keeps_the_requested_fraction():
    kept = ginibre_mc.thin(np.zeros(100_000), 0.6, ginibre_mc.sample_stream(2, 0))

    assert kept.size / 100_000 == pytest.approx(0.6, abs=0.01)


def test_thin_rejects_invalid_gamma():
    with pytest.raises(ParameterError):
        ginibre_mc.thin(np.zeros(3), 1.5, ginibre_mc.sample_stream(0, 0))


def test_run_without_thinning_keeps_nothing():
    run = ginibre_mc.run(8, 0.0, 20, seed=3)

    assert run.maxima == []
    assert run.empty_samples == 20
    assert ginibre_mc.empirical_cdf(run, -100.0) == 1.0
    assert ginibre_mc.ks_distance(run, lambda t: edgelaw.cdf(t, 0.0).cdf) == 0.0


def test_run_is_reproducible_for_any_worker_count():
    serial = ginibre_mc.run(12, 0.6, 40, seed=9)
    again = ginibre_mc.run(12, 0.6, 40, seed=9)
    parallel = ginibre_mc.run(12, 0.6, 40, seed=9, workers=3)

    assert serial.model_dump_json() == again.model_dump_json()
    assert serial.model_dump_json() == parallel.model_dump_json()


def test_run_records_shifted_maxima():
    run = ginibre_mc.run(10, 1.0, 5, seed=1)
    spectra = ginibre_mc.sample_real_spectra(10, 5, seed=1)

    assert run.empty_samples == sum(s.size == 0 for s in spectra)
    expected = [float(s.max()) - math.sqrt(10) for s in spectra if s.size]
    np.testing.assert_allclose(run.maxima, expected)
    assert run.retained_counts == [s.size for s in spectra]


def test_empirical_cdf_counts_empty_samples():
    run = _run([-1.0, 0.0, 2.0], empty=1)

    assert ginibre_mc.empirical_cdf(run, -5.0) == 0.25
    assert ginibre_mc.empirical_cdf(run, 0.0) == 0.75
    np.testing.assert_allclose(
        ginibre_mc.empirical_cdf(run, np.array([-1.0, 3.0])), [0.5, 1.0]
    )


def test_ks_distance_of_a_single_point():
    assert ginibre_mc.ks_distance(_run([0.5]), _uniform_cdf) == pytest.approx(0.5)


def test_ks_distance_of_uniform_samples():
    samples = ginibre_mc.sample_stream(123, 0).random(10_000)

    assert ginibre_mc.ks_distance(_run(list(samples)), _uniform_cdf) <= 0.03


def test_ks_distance_matches_scipy():
    samples = list(ginibre_mc.sample_stream(4, 0).random(500))
    expected = stats.kstest(samples, "uniform").statistic

    assert ginibre_mc.ks_distance(_run(samples), _uniform_cdf) == pytest.approx(expected, abs=1e-12)


def test_ks_distance_counts_mass_at_minus_infinity():
    run = _run([0.5], empty=1)

    assert ginibre_mc.ks_distance(run, _uniform_cdf, lower_mass=0.0) == pytest.approx(0.5)


def test_ks_distance_rejects_empty_run():
    run = McRun.model_construct(
        n=2, gamma=1.0, num_samples=0, seed=0, maxima=[], empty_samples=0, retained_counts=[]
    )

    with pytest.raises(ParameterError, match="empty run"):
        ginibre_mc.ks_distance(run, _uniform_cdf)


@pytest.mark.slow
@pytest.mark.parametrize("gamma", [0.6, 1.0])
def test_edge_law_against_sampled_matrices(gamma):
    run = ginibre_mc.run(100, gamma, 5000, seed=7, workers=4)

    distance = ginibre_mc.ks_distance(run, lambda t: edgelaw.cdf(t, gamma).cdf)

    assert distance <= 0.05
    if gamma == 1.0:
        assert np.mean(run.maxima) == pytest.approx(TABLE1_REFERENCE[1.0][0], abs=0.15)


@pytest.mark.slow
def test_thinning_commutes_with_sampling():
    spectra = ginibre_mc.sample_real_spectra(100, 5000, seed=21, workers=4)
    thinned = ginibre_mc.thinned_maxima(spectra, 100, 0.6, seed=21)
    direct = ginibre_mc.run(100, 0.6, 5000, seed=22, workers=4)

    assert stats.ks_2samp(thinned.maxima, direct.maxima).pvalue > 1e-3
