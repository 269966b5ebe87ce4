# CONSTANTS: Numerical tolerances, grid defaults and artifact formats
"""
Constants used throughout the weak Zygmund toolkit
"""

# Supported spatial dimensions for sampled experiments
SUPPORTED_DIMENSIONS = (1, 2)

# Smallest admissible number of grid points per axis
MIN_POINTS_PER_AXIS = 8

# Norm family names (as they appear on the command line and in CSVs)
FAMILY_FRAK = "frak"
FAMILY_ZYGMUND = "zygmund"
FAMILY_WEAK_ZYGMUND = "weak_zygmund"
FAMILY_DOUBLESTAR = "doublestar"
NORM_FAMILIES = [FAMILY_FRAK, FAMILY_ZYGMUND, FAMILY_WEAK_ZYGMUND, FAMILY_DOUBLESTAR]

# Supremum search over s > 0
GEOMETRIC_POINTS_PER_DECADE = 64
GOLDEN_SECTION_ITERATIONS = 60
GEOMETRIC_LOWER_FACTOR = 0.1
GEOMETRIC_UPPER_FACTOR = 10.0

# Gauss-Legendre order used for per-segment weighted integrals
GAUSS_LEGENDRE_ORDER = 32

# Tolerances
IDENTITY_RTOL = 1e-8
INEQUALITY_RTOL = 1e-8
QUAD_EPSABS = 1e-14
QUAD_EPSREL = 1e-12
QUAD_LIMIT = 400

# Acceptance of "bounded ratio" traces
TAIL_SLOPE_LIMIT = 0.1

# Kernel evaluation
WYNN_PANELS = 40
FOURIER_QUAD_LIMIT = 2000
# absolute target of the cosine-weighted transform; QAWF cannot reach 1e-14
FOURIER_EPSABS = 1e-12

# Solver
DEFAULT_MAX_SWEEPS = 15
DEFAULT_SWEEP_TOLERANCE = 1e-10
BLOWUP_FACTOR = 1e8
CONTRACTION_RATIO_LIMIT = 0.6
BRACKET_RATIO_TARGET = 1.5
MAX_BISECTIONS = 12

# Solver outcomes
STATUS_CONVERGED = "CONVERGED"
STATUS_MAX_SWEEPS = "MAX_SWEEPS"
STATUS_BLOWUP = "BLOWUP"

# Time grids
DEFAULT_T_POINTS = 40
DEFAULT_T_MIN = 1e-4

# CSV column layouts
REARRANGEMENT_COLUMNS = ["s_break", "level"]
NORM_COLUMNS = ["family", "q", "alpha", "rho", "value"]
KERNEL_COLUMNS = ["x", "t", "G", "h", "ratio"]
DECAY_COLUMNS = ["t", "measured", "envelope", "ratio"]
VERIFY_COLUMNS = ["check", "param_json", "t_or_s", "measured", "envelope", "ratio"]
METRIC_COLUMNS = ["t", "sup_norm", "m1", "m2", "m3"]
SWEEP_COLUMNS = ["sweep", "dx1", "dx2", "dx3"]
SCAN_COLUMNS = ["eps", "status", "sweeps", "t_event"]
APPENDIX_A2_COLUMNS = ["n", "frak_norm", "weak_zygmund_norm", "ratio"]
APPENDIX_A1_COLUMNS = ["s_min", "frak_norm", "weak_zygmund_norm", "zygmund_norm", "ratio"]
SUMMARY_COLUMNS = ["subcommand", "check", "params", "max_ratio", "pass", "wall_ms"]
STATUS_COLUMNS = ["status", "t_event"]
AUDIT_COLUMNS = ["eps", "status"]
CHAIN_COLUMNS = ["name", "weak_zygmund", "frak", "zygmund", "holds"]
PAIR_COLUMNS = ["name", "lhs", "rhs", "ratio"]

# CSV number format: 17 significant digits, '.' decimal separator
CSV_FLOAT_FORMAT = "%.17g"

# Process exit codes
EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3

# Run-level pass thresholds
COMPARABILITY_SPREAD_LIMIT = 50.0
MASS_RTOL = 1e-10
CLOSED_FORM_RTOL = 1e-9
A2_CLOSED_FORM_RTOL = 1e-6
A2_COLLAPSE_FACTOR = 3.0
A1_DIVERGENCE_FACTOR = 10.0
BRACKET_RATIO_LIMIT = 4.0
INITIAL_TRACE_FACTOR = 0.1
