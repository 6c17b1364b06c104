"""Growth-function models, evaluated as ln tau_H(n)."""
import math
from dataclasses import dataclass


@dataclass(frozen=True)
class SauerShelah:
    """Binary class of VC dimension ``d``: tau(n) <= (e n / d)^d for n >= d."""

    d: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"VC dimension must be a positive integer, got {self.d!r}")

    def log_growth(self, n):
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        if n < self.d:
            # every labelling of fewer than d points is realised
            return n * math.log(2.0)
        return self.d * math.log(math.e * n / self.d)


@dataclass(frozen=True)
class Constant:
    """Finite class of ``N`` hypotheses: tau(n) <= N for every n."""

    N: int

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"class size must be a positive integer, got {self.N!r}")

    def log_growth(self, n):
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        return math.log(self.N)


GrowthModel = SauerShelah | Constant


def log_growth(model, n):
    """ln tau_H(n) for ``model``; always >= 0 and nondecreasing in ``n``."""
    return model.log_growth(n)
