"""
Configuration settings for goldpoison
"""
import os
from dotenv import load_dotenv

load_dotenv()

# Parameter box Theta = [delta, 1 - delta]^2
DELTA = float(os.getenv("GOLDPOISON_DELTA", "0.05"))

# Grid / quadrature
GRID_SIZE = int(os.getenv("GOLDPOISON_GRID_SIZE", "64"))

# Runtime
WORKERS = int(os.getenv("GOLDPOISON_WORKERS", "1"))
OUTPUT_DIR = os.getenv("GOLDPOISON_OUTPUT_DIR", "results")
LOG_LEVEL = os.getenv("GOLDPOISON_LOG_LEVEL", "INFO")
LOG_DIR = os.getenv("GOLDPOISON_LOG_DIR", "logs")

# Solvers
SOLVER_TOLERANCE = 1e-8
GRAM_DET_MIN = 1e-14
RADICAND_CLAMP = 1e-12
DENOMINATOR_MIN = 1e-12
FALLBACK_LATTICE = 3          # 3x3 multistart lattice for the d fallback
S_GRID_POINTS = 21            # 21x21 coarse scan for the sup contrast
S_POLISH_STARTS = 3
S_MAX_ITER = 200

# Monte Carlo defaults
DEFAULT_REPETITIONS = 100
COVARIANCE_REPETITIONS = 500
REFERENCE_FACTOR = 2          # N = 2n
PANEL_CURVES = 10
PANEL_NODES = 200
DEFAULT_SEED = 20240601

# Gold standard AR(1) noise used by every preset: (m0, v0) = (1, 1)
GOLD_NOISE = {"m0": 1.0, "v0": 1.0}

# Scenario presets: poisoning law is (m_factor * mu0, v_factor * sqrt(var0))
SCENARIO_PRESETS = [
    {"name": "S0strong", "alpha": 0.7, "beta": 0.8, "phi": 0.7, "m_factor": 2.5, "v_factor": 0.8,
     "description": "Strong observability, fast switching chain"},
    {"name": "S0weak", "alpha": 0.3, "beta": 0.2, "phi": 0.7, "m_factor": 2.5, "v_factor": 0.8,
     "description": "Strong observability, slow switching chain"},
    {"name": "S1", "alpha": 0.2, "beta": 0.4, "phi": 0.7, "m_factor": 1.5, "v_factor": 0.8,
     "description": "Weak source separation"},
    {"name": "S2", "alpha": 0.2, "beta": 0.4, "phi": 0.7, "m_factor": 2.0, "v_factor": 0.8,
     "description": "S1 with a larger expectation gap"},
    {"name": "S3", "alpha": 0.6, "beta": 0.3, "phi": 0.7, "m_factor": 1.5, "v_factor": 0.8,
     "description": "S1 observability, faster switching"},
    {"name": "S4", "alpha": 0.6, "beta": 0.3, "phi": 0.5, "m_factor": 2.0, "v_factor": 0.8,
     "description": "S3 switching with weaker AR(1) dependence"},
]

# Estimators
ESTIMATORS = [
    {"id": "d", "name": "Integral contrast", "description": "Closed-form quadratic minimizer of d_n"},
    {"id": "s", "name": "Sup contrast", "description": "Grid scan + bounded simplex polish of s_n"},
]
