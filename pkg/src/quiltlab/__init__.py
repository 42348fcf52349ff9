"""Linear symplectic algebra, graded Lagrangian correspondences and generator-level quilt computations."""

from .jsonio import SCHEMA_VERSION
from .verify import run_suite, verify_all

__version__ = "0.1.0"

__all__ = ["SCHEMA_VERSION", "run_suite", "verify_all", "__version__"]
