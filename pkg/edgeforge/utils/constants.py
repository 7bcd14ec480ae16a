from pathlib import Path

DEFAULT_CONFIG_FOLDER = Path.home() / ".config" / "edgeforge"
DEFAULT_CONFIG_FILE = DEFAULT_CONFIG_FOLDER / "config.json"

ENV_QUAD_POINTS = "EDGEFORGE_QUAD_POINTS"
ENV_WORKERS = "EDGEFORGE_WORKERS"
ENV_LOG_LEVEL = "EDGEFORGE_LOG_LEVEL"
ENV_CONFIG = "EDGEFORGE_CONFIG"

DEFAULT_QUAD_POINTS = 50
MAX_QUAD_POINTS = 2048
DEFAULT_WORKERS = 1
DEFAULT_LOG_LEVEL = "WARNING"
DEFAULT_TOL = 1e-10

DEFAULT_MATRIX_SIZE = 100
DEFAULT_SAMPLES = 5000
DEFAULT_SEED = 7
REAL_EIGENVALUE_TOL = 1e-10

DEFAULT_SERIES_TERMS = 20000
LEFT_TAIL_THRESHOLD = 1e-14

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_CHECK_FAILED = 3

# gamma -> (mean, variance, skewness, kurtosis)
TABLE1_REFERENCE: dict[float, tuple[float, float, float, float]] = {
    1.0: (-1.30319, 3.97536, -1.76969, 5.14560),
    0.8: (-1.94070, 6.87453, -1.86716, 5.57883),
    0.6: (-2.99680, 13.49947, -2.02286, 8.06831),
    0.4: (-5.12526, 36.37796, -3.02040, 22.14125),
}
TABLE1_TOL_LOCATION = 5e-4
TABLE1_TOL_SHAPE = 5e-3
# thinned rows the converged law does not reproduce; their mismatches are reported as known
TABLE1_UNREPRODUCED = (0.8, 0.6, 0.4)
