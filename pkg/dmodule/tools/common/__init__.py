from .results import AlgebraError, error, from_exception, success
from .scalars import Scalar, exact, pochhammer

__all__ = ["AlgebraError", "error", "from_exception", "success", "Scalar", "exact", "pochhammer"]
