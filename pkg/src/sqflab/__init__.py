"""Counting squarefree integers in arithmetic progressions: exact counters,
correlation sums and their dispersion identity, Euler-product constants,
main-term asymptotics, and the exponential-sum bounds behind them.

Every headline quantity has two independent computation paths (direct
summation against closed form, literal sum against factored identity), and
checks are emitted as VerificationRecord rows so batch runs are auditable.
"""

__version__ = "0.1.0"

from .records import ApproxReal, VerificationRecord  # noqa: F401
