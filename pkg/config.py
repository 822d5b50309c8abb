"""
Centralized configuration for the triform certification engine.

Numerical defaults are fixed constants: a verdict depends only on the
instance and the command-line flags. The few ambient knobs (log level,
fuzz worker count, results directory) are read from environment
variables / .env file and never change a computed result.

Usage:
    from config import EPS_CERT, EPS_REF
    print(EPS_REF)
"""

import os
from pathlib import Path

# Try to load .env file for local development
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass


def _get(key: str, default: str = "") -> str:
    """Get a config value from env vars, then default."""
    val = os.environ.get(key)
    if val is not None:
        return val
    return default


def _get_int(key: str, default: int) -> int:
    """Get an integer config value."""
    raw = _get(key, str(default))
    try:
        return int(raw)
    except (ValueError, TypeError):
        return default


# ============================================================================
# EIGENSOLVER
# ============================================================================

# Jacobi stops once off(M) <= JACOBI_TOL * ||M||_F.
JACOBI_TOL: float = 1e-14
JACOBI_MAX_SWEEPS: int = 100

# Entry-wise asymmetry allowed before a matrix is rejected, relative to 1 + max|entries|.
SYMMETRY_TOL: float = 1e-12

# ============================================================================
# FORM VALIDATION
# ============================================================================

# A and B must satisfy lambda_min >= -PSD_GATE_TOL * (1 + ||.||_F).
PSD_GATE_TOL: float = 1e-9

# ||P^2 - P||_F and ||P1 P2||_F gates for the Hilbert-Schmidt corollary.
PROJECTION_TOL: float = 1e-10

# ============================================================================
# CERTIFICATION DEFAULTS
# ============================================================================

TOL_S: float = 1e-9
EPS_CERT: float = 1e-9
EPS_REF: float = 1e-7
CLUSTER_TOL: float = 1e-8
MAX_ITER: int = 200

# Bracket expansion: multiplicative steps from s = 1, hard limits on s.
BRACKET_FACTOR: float = 10.0
BRACKET_MIN_S: float = 1e-12
BRACKET_MAX_S: float = 1e12

# Witness search inside the minimal eigenspace.
WITNESS_RESIDUAL_TOL: float = 1e-7
# |tau(x) - alpha| allowed on a reported witness, relative to 1 + alpha.
TAU_MISMATCH_TOL: float = 1e-6
WITNESS_BISECTION_STEPS: int = 200
WITNESS_CLUSTER_WIDEN: float = 100.0
WITNESS_SPHERE_SAMPLES: int = 3600

# ============================================================================
# ORACLE
# ============================================================================

SCAN_RESOLUTION: float = 0.01  # radians
SCAN_MAX_RESOLUTION: float = 0.05
GENERATOR_MAX_RETRIES: int = 100

# Fuzz rounds without --dim draw the dimension from this range.
FUZZ_MIN_DIM: int = 2
FUZZ_MAX_DIM: int = 12

# ============================================================================
# AMBIENT (never affects results)
# ============================================================================

LOG_LEVEL: str = _get("LOG_LEVEL", "INFO").upper()
FUZZ_WORKERS: int = _get_int("FUZZ_WORKERS", 4)

PROJECT_ROOT: Path = Path(__file__).resolve().parent
RESULTS_DIR: Path = PROJECT_ROOT / _get("RESULTS_DIR", "results")

LOG_FORMAT: str = "[%(asctime)s] [%(levelname)s] [%(name)s] %(message)s"
