"""Exact verification kernel for Frobenius-linear projective geometry.

Arithmetic in finite field towers, sparse multivariate polynomials, Moore
determinants, a purely inseparable Cremona-style map, 1-foliations, divisor
class ledgers, vanishing linear systems and point-counting cross-checks,
all over F_q with zero tolerance, plus a CLI that emits JSON check reports.
"""

__version__ = "0.1.0"

from .field import FieldElem, FieldTower, make_tower, tower_for_q
from .mpoly import MPoly
from .report import Budget, CheckReport, ResourceBudgetError

__all__ = [
    "__version__",
    "Budget",
    "CheckReport",
    "FieldElem",
    "FieldTower",
    "MPoly",
    "ResourceBudgetError",
    "make_tower",
    "tower_for_q",
]
