from fractions import Fraction

import numpy as np

from seqspace.matrices import RuleMatrix


def rational_band_triangle(rng: np.random.Generator, size: int, width: int,
                           name: str = "band") -> RuleMatrix:
    """A random lower-banded triangle with small rational entries and a
    nonzero diagonal, defined on the leading ``size`` rows."""
    entries = {}
    for n in range(1, size + 1):
        for k in range(max(1, n - width), n + 1):
            entries[(n, k)] = Fraction(int(rng.integers(-6, 7)),
                                       int(rng.integers(1, 5)))
        if entries[(n, n)] == 0:
            entries[(n, n)] = Fraction(1)

    def rule(n, k, table=entries):
        return table.get((n, k), 0)

    return RuleMatrix(rule, name=name, triangle=True,
                      row_span=lambda n: (max(1, n - width), n),
                      col_span=lambda k: (k, k + width))
