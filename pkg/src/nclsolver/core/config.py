"""
NCL Solver - Configuration Management
"""

import os
from typing import Dict, Any
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

KKT_CHOICES = ("k2", "k2r", "k1s")


class Config:
    """Configuration class for the NCL solver"""

    # Linear algebra
    KKT_FORMULATION = os.getenv("NCL_KKT", "k2r").lower()
    PIVOT_EPS = float(os.getenv("NCL_PIVOT_EPS", "1e-10"))
    DUMP_DIR = os.getenv("NCL_DUMP_DIR", "")  # Matrix Market dumps of every KKT matrix when set

    # Tolerances and limits
    TOLERANCE = float(os.getenv("NCL_TOL", "1e-8"))
    MAX_OUTER = int(os.getenv("NCL_MAX_OUTER", "50"))
    MAX_INNER = int(os.getenv("NCL_MAX_INNER", "1000"))
    MAX_INNER_PER_SUBPROBLEM = int(os.getenv("NCL_MAX_INNER_PER_SUBPROBLEM", "200"))

    # Problem scaling
    SCALING = os.getenv("NCL_SCALING", "true").lower() == "true"

    # Benchmark runner
    BENCH_WORKERS = int(os.getenv("NCL_BENCH_WORKERS", "1"))

    # Logging Configuration
    LOG_LEVEL = os.getenv("LOG_LEVEL", "WARNING")
    LOG_FILE = os.getenv("LOG_FILE", "")

    @classmethod
    def validate_config(cls) -> Dict[str, Any]:
        """Validate configuration and return status"""
        issues = []

        if cls.KKT_FORMULATION not in KKT_CHOICES:
            issues.append(f"NCL_KKT must be one of {', '.join(KKT_CHOICES)}")

        if cls.TOLERANCE <= 0:
            issues.append("NCL_TOL must be positive")

        if cls.PIVOT_EPS < 0:
            issues.append("NCL_PIVOT_EPS must be nonnegative")

        if cls.MAX_OUTER < 1 or cls.MAX_INNER < 1 or cls.MAX_INNER_PER_SUBPROBLEM < 1:
            issues.append("Iteration limits must be at least 1")

        if cls.BENCH_WORKERS < 1:
            issues.append("NCL_BENCH_WORKERS must be at least 1")

        return {
            "valid": len(issues) == 0,
            "issues": issues,
            "config": {
                "kkt": cls.KKT_FORMULATION,
                "tolerance": cls.TOLERANCE,
                "pivot_eps": cls.PIVOT_EPS,
                "max_outer": cls.MAX_OUTER,
                "max_inner": cls.MAX_INNER,
                "max_inner_per_subproblem": cls.MAX_INNER_PER_SUBPROBLEM,
                "scaling": cls.SCALING,
                "dump_dir": cls.DUMP_DIR or None,
            },
        }


# Global configuration instance
config = Config()
