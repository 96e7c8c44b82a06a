"""Three-valued verdicts.

Every check in this package answers one of Satisfied / Violated / Inconclusive.
Inconclusive is an honest answer: a truncated computation that cannot decide does
not guess.  Conjunction semantics: Violated dominates, then Inconclusive.
"""

from __future__ import annotations

import enum
from typing import Iterable


class Verdict(enum.Enum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"
    INCONCLUSIVE = "inconclusive"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


def conjoin(verdicts: Iterable[Verdict]) -> Verdict:
    """Combine sub-verdicts: any Violated wins, else any Inconclusive, else Satisfied."""
    out = Verdict.SATISFIED
    for v in verdicts:
        if v is Verdict.VIOLATED:
            return Verdict.VIOLATED
        if v is Verdict.INCONCLUSIVE:
            out = Verdict.INCONCLUSIVE
    return out


#: Process exit codes used by the command line interface.
EXIT_CODES = {
    Verdict.SATISFIED: 0,
    Verdict.VIOLATED: 1,
    Verdict.INCONCLUSIVE: 2,
}
