import os
from pathlib import Path


def _flag(name: str, default: str) -> bool:
    return os.environ.get(name, default).strip().lower() in {"1", "true", "yes", "on"}


# Series precision N (coefficients at powers >= N are unknown)
DEFAULT_PRECISION = int(os.environ.get("DMODULE_PRECISION", 12))
# Decimal digits for big-float work (eigenvalues, irrational roots)
DEFAULT_DIGITS = int(os.environ.get("DMODULE_DIGITS", 50))
MAX_ITERATIONS = int(os.environ.get("DMODULE_MAX_ITERATIONS", 200))

ROOT_MAXSTEPS = int(os.environ.get("DMODULE_ROOT_MAXSTEPS", 100))
ROOT_EXTRAPREC = int(os.environ.get("DMODULE_ROOT_EXTRAPREC", 40))
ROOT_RETRIES = int(os.environ.get("DMODULE_ROOT_RETRIES", 4))
ROOT_GUARD_DIGITS = 10

FLOAT_TOLERANCE_DIGITS = int(os.environ.get("DMODULE_FLOAT_TOLERANCE_DIGITS", 25))
VERIFY_DIVISIONS = _flag("DMODULE_VERIFY_DIVISIONS", "1")

# Request policy ceilings
MAX_PRECISION = int(os.environ.get("DMODULE_MAX_PRECISION", 400))
MAX_DIGITS = int(os.environ.get("DMODULE_MAX_DIGITS", 500))
MAX_DIMENSION = int(os.environ.get("DMODULE_MAX_DIMENSION", 12))

FIXTURES_DIR = Path(os.environ.get("DMODULE_FIXTURES_DIR", str(Path(__file__).resolve().parent / "fixtures")))
JOURNAL_PATH = os.environ.get("DMODULE_JOURNAL") or None
