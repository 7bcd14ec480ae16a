"""Monte Carlo sampler for the thinned largest real eigenvalue of real Ginibre matrices.

Every sample owns a Philox stream keyed by (seed, sample index, purpose), so a
run is reproducible bit for bit regardless of the number of workers.
"""

import logging
import math
from collections.abc import Callable, Sequence
from functools import partial

import numpy as np

from edgeforge.utils.constants import DEFAULT_WORKERS, REAL_EIGENVALUE_TOL
from edgeforge.utils.errors import EigensolverError, ParameterError
from edgeforge.utils.helper import ordered_map
from edgeforge.utils.models import McRun

logger = logging.getLogger(__name__)

MIN_MATRIX_SIZE = 2
MAX_MATRIX_SIZE = 1000
MATRIX_STREAM = 0
THINNING_STREAM = 1


def sample_stream(seed: int, index: int, purpose: int = MATRIX_STREAM) -> np.random.Generator:
    """Counter-based generator for one sample; independent of every other (index, purpose)."""
    if not 0 <= seed < 2**64:
        raise ParameterError(f"seed is expected to be a 64-bit unsigned integer, but got {seed}")
    sequence = np.random.SeedSequence(seed, spawn_key=(index, purpose))
    return np.random.Generator(np.random.Philox(sequence))


def sample_matrix(n: int, stream: np.random.Generator) -> np.ndarray:
    if not MIN_MATRIX_SIZE <= n <= MAX_MATRIX_SIZE:
        raise ParameterError(
            f"n is expected to be in [{MIN_MATRIX_SIZE}, {MAX_MATRIX_SIZE}], but got {n}"
        )
    return stream.standard_normal((n, n))


def real_eigenvalues(matrix: np.ndarray, tol: float = REAL_EIGENVALUE_TOL) -> np.ndarray:
    """Ascending real eigenvalues; |Im| <= tol (1 + max |lambda|) counts as real."""
    if not tol > 0.0:
        raise ParameterError(f"tol is expected to be positive, but got {tol}")
    try:
        # LAPACK geev: Hessenberg reduction followed by shifted QR
        eigenvalues = np.linalg.eigvals(np.asarray(matrix, dtype=float))
    except np.linalg.LinAlgError as e:
        raise EigensolverError(f"eigenvalue iteration did not converge: {e}") from e
    if eigenvalues.size == 0:
        return np.empty(0)
    scale = 1.0 + float(np.max(np.abs(eigenvalues)))
    real = eigenvalues[np.abs(eigenvalues.imag) <= tol * scale].real
    return np.sort(real)


def thin(values: np.ndarray, gamma: float, stream: np.random.Generator) -> np.ndarray:
    """Keep each value independently with probability gamma."""
    if not 0.0 <= gamma <= 1.0:
        raise ParameterError(f"gamma is expected to be in [0, 1], but got {gamma}")
    values = np.asarray(values, dtype=float)
    draws = stream.random(values.size)
    return values[draws < gamma]


def _sample_spectrum(n: int, seed: int, tol: float, index: int) -> np.ndarray:
    return real_eigenvalues(sample_matrix(n, sample_stream(seed, index)), tol)


def sample_real_spectra(
    n: int,
    num_samples: int,
    seed: int,
    workers: int = DEFAULT_WORKERS,
    tol: float = REAL_EIGENVALUE_TOL,
) -> list[np.ndarray]:
    """Real spectra of num_samples independent n x n real Ginibre matrices, in sample order."""
    if num_samples < 1:
        raise ParameterError(f"num_samples is expected to be positive, but got {num_samples}")
    if not MIN_MATRIX_SIZE <= n <= MAX_MATRIX_SIZE:
        raise ParameterError(
            f"n is expected to be in [{MIN_MATRIX_SIZE}, {MAX_MATRIX_SIZE}], but got {n}"
        )
    logger.debug("sampling %d real Ginibre matrices of size %d (seed=%d)", num_samples, n, seed)
    return ordered_map(partial(_sample_spectrum, n, seed, tol), range(num_samples), workers)


def thinned_maxima(
    spectra: Sequence[np.ndarray], n: int, gamma: float, seed: int
) -> McRun:
    """Thin precomputed spectra at rate gamma and shift each retained maximum by sqrt(n)."""
    maxima: list[float] = []
    retained_counts: list[int] = []
    empty_samples = 0
    shift = math.sqrt(n)
    for index, spectrum in enumerate(spectra):
        kept = thin(spectrum, gamma, sample_stream(seed, index, THINNING_STREAM))
        retained_counts.append(int(kept.size))
        if kept.size == 0:
            empty_samples += 1
        else:
            maxima.append(float(np.max(kept)) - shift)

    logger.debug(
        "thinned %d spectra at gamma=%g: %d without a retained real eigenvalue",
        len(retained_counts),
        gamma,
        empty_samples,
    )
    return McRun(
        n=n,
        gamma=gamma,
        num_samples=len(retained_counts),
        seed=seed,
        maxima=maxima,
        empty_samples=empty_samples,
        retained_counts=retained_counts,
    )


def run(
    n: int,
    gamma: float,
    num_samples: int,
    seed: int,
    workers: int = DEFAULT_WORKERS,
    tol: float = REAL_EIGENVALUE_TOL,
) -> McRun:
    if not 0.0 <= gamma <= 1.0:
        raise ParameterError(f"gamma is expected to be in [0, 1], but got {gamma}")
    spectra = sample_real_spectra(n, num_samples, seed, workers, tol)
    return thinned_maxima(spectra, n, gamma, seed)


def empirical_cdf(run: McRun, t: float | np.ndarray) -> float | np.ndarray:
    """(samples without a retained eigenvalue + #{maxima <= t}) / num_samples."""
    ordered = np.sort(np.asarray(run.maxima, dtype=float))
    below = np.searchsorted(ordered, t, side="right")
    values = (run.empty_samples + below) / run.num_samples
    return float(values) if np.ndim(values) == 0 else values


def left_limit(gamma: float) -> float:
    """lim_{t -> -oo} P(t; gamma): only the empty process puts mass there."""
    return 1.0 if gamma == 0.0 else 0.0


def ks_distance(
    run: McRun, cdf: Callable[[float], float], lower_mass: float | None = None
) -> float:
    """sup_t |F_N(t) - cdf(t)| for a continuous cdf, including the t -> -oo end."""
    if not run.maxima and run.empty_samples == 0:
        raise ParameterError("cannot compute a KS distance for an empty run")
    floor = left_limit(run.gamma) if lower_mass is None else lower_mass
    count = run.num_samples

    points, multiplicity = np.unique(np.asarray(run.maxima, dtype=float), return_counts=True)
    after = (run.empty_samples + np.cumsum(multiplicity)) / count
    before = np.concatenate([[run.empty_samples / count], after[:-1]])
    exact = np.array([cdf(float(x)) for x in points])

    distance = abs(run.empty_samples / count - floor)
    if points.size:
        distance = max(
            distance,
            float(np.max(np.abs(after - exact))),
            float(np.max(np.abs(before - exact))),
        )
    return distance
