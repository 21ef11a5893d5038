"""witnessbench: computational content of classical arithmetic proofs.

Two engines extract witnesses from proofs:

* the epsilon substitution method (:mod:`~witnessbench.epsilon_core`,
  :mod:`~witnessbench.subst_engine`) with its ordinal bookkeeping
  (:mod:`~witnessbench.ordinals`) and bound functions (:mod:`~witnessbench.bounds`);
* a call/cc abstract machine (:mod:`~witnessbench.kam`) running proof terms
  typed in second-order arithmetic (:mod:`~witnessbench.sol2`), from which
  :mod:`~witnessbench.extract` reads off witnesses and game transcripts.
"""
from . import bounds, epsilon_core, extract, kam, ordinals, sol2, subst_engine
from .budget import Budget, BudgetExceeded, Budgeted

__version__ = "0.1.0"

__all__ = [
    "bounds", "epsilon_core", "extract", "kam", "ordinals", "sol2", "subst_engine",
    "Budget", "BudgetExceeded", "Budgeted", "__version__",
]
