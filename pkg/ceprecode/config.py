"""
Configuration settings for the ceprecode package.
"""

from pathlib import Path

# Project paths
PROJECT_ROOT = Path(__file__).parent
DEFAULT_OUTPUT_DIR = Path.cwd() / "results"

# Numerical tolerances (double precision)
MEMBERSHIP_TOL = 1e-12  # unit column norm on the oblique manifold
TANGENCY_TOL = 1e-10  # diag(X^T U) entries of a tangent vector
CIRCLE_TOL = 1e-12  # modulus of complex-circle entries
CURVATURE_FLOOR = 1e-300  # lower bound on IR line-search curvature estimates

# RCG solver defaults
GRAD_TOL_FACTOR = 1e-6  # grad_tol = GRAD_TOL_FACTOR * sqrt(N)
MAX_ITERS = 500
EPSILON_FACTOR = 0.01  # epsilon = EPSILON_FACTOR * u * beta
CONTINUATION_DIVISOR = 4.0
ARMIJO_INITIAL = 1.0
ARMIJO_CONTRACTION = 0.5
ARMIJO_SLOPE = 1e-4
MAX_BACKTRACKS = 50

# Baseline defaults
CEO_ITERATIONS = 1000
CEO_SAMPLES = 500
CEO_QUANTILE = 0.05
CEO_SMOOTHING = 0.08
GD_IR_ITERATIONS = 50
RELAXED_ITERATIONS = 2000
RELAXED_INITIAL_STEP = 1.0

# Experiment defaults
DEFAULT_N = 64
DEFAULT_M = 20
DEFAULT_L = 4
DEFAULT_U = 1.0
DEFAULT_P_T = 1.0
DEFAULT_SNR_DB = 8.0
DEFAULT_SNR_RANGE = "0:2:12"
DEFAULT_M_RANGE = "12:2:24"
DEFAULT_N_SYMBOLS = 1000
DEFAULT_TRIALS = 10
DEFAULT_MASTER_SEED = 2024
DEFAULT_COHERENCE = 1
DEFAULT_CHANNEL = "random"

# Channel models: i.i.d. CN(0, 1) entries, or antenna m serving user m alone (N >= M)
CHANNEL_MODELS = ("random", "identity")

# Solver tags
SOLVER_TAGS = ("rcg-ci", "relaxed-ci", "ceo-ci", "rcg-ir", "gd-ir", "ceo-ir")
SOLVER_ALIASES = {"cvx-ci": "relaxed-ci"}
SOLVER_LABELS = {
    "rcg-ci": "RCG-CI",
    "relaxed-ci": "relaxed-CI (surrogate)",
    "ceo-ci": "CEO-CI",
    "rcg-ir": "RCG-IR",
    "gd-ir": "GD-IR",
    "ceo-ir": "CEO-IR",
}
CI_SOLVERS = ("rcg-ci", "relaxed-ci", "ceo-ci")
IR_SOLVERS = ("rcg-ir", "gd-ir", "ceo-ir")

# Output settings
CSV_SCHEMA_VERSION = 1
MANIFEST_NAME = "manifest.txt"
CSV_FLOAT_FORMAT = "%.10g"

# Command-line settings
SEED_ENV_VAR = "CEPRECODE_SEED"
EXIT_SUCCESS = 0
EXIT_CONFIG_ERROR = 1
EXIT_IO_ERROR = 2
EXIT_NUMERICAL_ERROR = 3

# Logging configuration
LOG_LEVEL = "INFO"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
