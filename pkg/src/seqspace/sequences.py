"""Lazy real sequences, truncation, and trend-based limit detection.

The module provides:

* ``Sequence`` — an immutable 1-based rule ``k -> value`` with an optional
  finite-support hint,
* ``make_sequence`` — construction from a small JSON-style spec or an inline
  ``name:params`` shorthand,
* ``FiniteVector`` / ``truncate`` — finite prefixes with an overflow flag
  instead of stored NaN/inf,
* ``detect_limit`` — a three-outcome-plus-inconclusive limit heuristic on a
  finite trace,
* ``classify_classical`` — membership probes for the classical spaces
  c0, c, linf, bs and cs at a truncation.

Indexing is 1-based everywhere.  Scalars are real: exact values are carried as
``int``/``fractions.Fraction`` where the defining rule is rational, and float
otherwise.  Detection is honest about truncation: when a finite trace cannot
decide, the answer is Inconclusive rather than a guess.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Union

import numpy as np

from .errors import SpecError, TruncationError
from .verdicts import Verdict

Scalar = Union[int, float, Fraction]

#: Default tolerance for limit/membership checks (exact-decay sequences settle
#: well below this; probes of slowly decaying data should pass a looser value).
DEFAULT_TOL = 1e-9

# Calibration constants for the trend heuristics.  See the package README for
# the reasoning; in short: divergence requires monotone growth with a sustained
# slope against log n that moves away from zero, and oscillation requires a
# non-decaying amplitude.  Both rules exist so that a decisive verdict at a
# truncation is never decisively wrong.
DIVERGENCE_SLOPE = 1e-2
SLOPE_SUSTAIN = 0.97
OSC_SUSTAIN = 0.7
ALTERNATION_FRACTION = 0.8
CLEAR_MARGIN = 4.0
#: Slow (non-adjacent) swings count as oscillation only when the tail peaks
#: clearly outgrow the mid-trace peaks; a ratio this side of 1 keeps bounded
#: oscillations with slowly decaying envelopes inconclusive instead.
SWING_GROWTH = 1.1

CLASSICAL_TAGS = ("c0", "c", "linf", "bs", "cs")


def default_window(n: int) -> int:
    """Trailing-window size used when the caller does not pass one."""
    return max(16, n // 10)


def exact_number(value) -> Scalar:
    """Convert a user-facing parameter to an exact scalar when possible.

    Ints and Fractions pass through.  Strings are parsed as exact rationals
    ("1/2", "0.25").  Floats are converted through their shortest decimal repr,
    so 0.1 means one tenth, deterministically.
    """
    if isinstance(value, bool):
        raise SpecError(f"expected a number, got {value!r}")
    if isinstance(value, (int, Fraction)):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise SpecError(f"cannot parse number {value!r}") from exc
    if isinstance(value, float):
        if not math.isfinite(value):
            raise SpecError(f"non-finite parameter {value!r}")
        return Fraction(repr(value))
    raise SpecError(f"expected a number, got {type(value).__name__}")


# ---------------------------------------------------------------------------
# Sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Sequence:
    """A lazily evaluated 1-based sequence.

    ``rule`` must be pure and deterministic.  When ``support_hint`` is set the
    sequence is treated as identically zero beyond that index and the rule is
    never consulted there.
    """

    rule: Callable[[int], Scalar]
    support_hint: Optional[int] = None
    label: str = "sequence"

    def __call__(self, k: int) -> Scalar:
        if k < 1:
            raise IndexError(f"sequence index must be >= 1, got {k}")
        if self.support_hint is not None and k > self.support_hint:
            return 0
        return self.rule(k)


def _builtin_sequence(name: str, params: dict) -> Sequence:
    name = name.lower()
    if name in ("unit", "e"):
        k0 = int(params.get("k", 1))
        if k0 < 1:
            raise SpecError("unit sequence needs k >= 1")
        return Sequence(lambda k: 1 if k == k0 else 0, support_hint=k0, label=f"unit:{k0}")
    if name in ("constant", "const"):
        c = exact_number(params.get("c", 1))
        return Sequence(lambda k: c, label=f"const:{c}")
    if name == "power":
        p = params.get("p", 1)
        if isinstance(p, float) and not p.is_integer():
            pf = float(p)
            return Sequence(lambda k: float(k) ** pf, label=f"power:{pf}")
        p = int(p)
        if p >= 0:
            return Sequence(lambda k: k**p, label=f"power:{p}")
        return Sequence(lambda k: Fraction(1, k ** (-p)), label=f"power:{p}")
    if name in ("geometric", "geom"):
        r = exact_number(params.get("r", Fraction(1, 2)))
        return Sequence(lambda k: r**k, label=f"geometric:{r}")
    if name in ("alternating", "alt"):
        return Sequence(lambda k: (-1) ** k, label="alternating")
    if name == "harmonic":
        return Sequence(lambda k: Fraction(1, k), label="harmonic")
    raise SpecError(f"unknown builtin sequence {name!r}")


def sequence_from_values(values, label: str = "list") -> Sequence:
    """Wrap explicit leading values; the sequence is zero beyond them.

    Ints, Fractions, and parseable strings stay exact; floats stay floats
    (an explicit list is data, not a rule to re-interpret).
    """
    vals = []
    for v in values:
        if isinstance(v, np.generic):
            v = v.item()
        if isinstance(v, float):
            vals.append(v)
        else:
            vals.append(exact_number(v))
    vals = tuple(vals)
    return Sequence(lambda k: vals[k - 1], support_hint=len(vals), label=label)


def _parse_inline_sequence(text: str) -> Sequence:
    head, _, rest = text.partition(":")
    head = head.strip().lower()
    if head == "list":
        items = [s for s in rest.split(",") if s.strip()]
        if not items:
            raise SpecError("list shorthand needs at least one value")
        return sequence_from_values([exact_number(s.strip()) for s in items])
    params: dict = {}
    if rest:
        key = {"unit": "k", "e": "k", "constant": "c", "const": "c", "power": "p",
               "geometric": "r", "geom": "r"}.get(head)
        if key is None:
            raise SpecError(f"sequence {head!r} takes no parameter")
        if key in ("k", "p"):
            try:
                params[key] = int(rest)
            except ValueError as exc:
                raise SpecError(f"{head} expects an integer, got {rest!r}") from exc
        else:
            params[key] = exact_number(rest.strip())
    return _builtin_sequence(head, params)


def make_sequence(spec) -> Sequence:
    """Build a ``Sequence`` from a spec.

    Accepted forms:

    * a ``Sequence`` (returned unchanged),
    * an inline string such as ``"harmonic"``, ``"unit:3"``, ``"const:1"``,
      ``"power:-2"``, ``"geometric:0.5"``, ``"alternating"``, ``"list:1,2,3"``,
    * a mapping such as ``{"kind": "builtin", "name": "harmonic"}``,
      ``{"kind": "unit", "k": 3}``, ``{"kind": "power", "p": -2}``,
      ``{"kind": "geometric", "r": 0.5}``, ``{"kind": "constant", "c": 2}`` or
      ``{"kind": "list", "values": [...]}``.
    """
    if isinstance(spec, Sequence):
        return spec
    if isinstance(spec, str):
        return _parse_inline_sequence(spec)
    if isinstance(spec, FiniteVector):
        return sequence_from_values(spec.entries, label=spec.origin or "vector")
    if isinstance(spec, (list, tuple, np.ndarray)):
        return sequence_from_values(list(spec))
    if isinstance(spec, dict):
        kind = str(spec.get("kind", "")).lower()
        if kind == "builtin":
            params = {k: v for k, v in spec.items() if k not in ("kind", "name")}
            return _builtin_sequence(str(spec.get("name", "")), params)
        if kind == "list":
            values = spec.get("values")
            if not isinstance(values, (list, tuple)) or not values:
                raise SpecError("list spec needs a non-empty 'values' array")
            return sequence_from_values(values)
        if kind in ("unit", "power", "geometric", "geom", "constant", "const",
                    "alternating", "alt", "harmonic"):
            params = {k: v for k, v in spec.items() if k != "kind"}
            return _builtin_sequence(kind, params)
        raise SpecError(f"unknown sequence spec kind {spec.get('kind')!r}")
    raise SpecError(f"cannot build a sequence from {type(spec).__name__}")


# ---------------------------------------------------------------------------
# Finite vectors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteVector:
    """A finite prefix of a sequence.

    Entries are always finite numbers.  If evaluation produced a non-finite
    float, the entry is stored as 0.0 and the overflow flag records where;
    consumers treat flagged vectors as Inconclusive evidence.
    """

    entries: tuple
    origin: str = ""
    overflow: bool = False
    overflow_index: Optional[int] = None

    def __len__(self) -> int:
        return len(self.entries)

    def value(self, k: int) -> Scalar:
        """1-based accessor."""
        if not 1 <= k <= len(self.entries):
            raise IndexError(f"index {k} outside 1..{len(self.entries)}")
        return self.entries[k - 1]

    def as_floats(self) -> np.ndarray:
        return np.array([float(v) for v in self.entries], dtype=float)


def finite_vector(values, origin: str = "") -> FiniteVector:
    """Build a FiniteVector from raw values, recording overflow instead of NaN/inf."""
    out = []
    overflow = False
    first_bad = None
    for i, v in enumerate(values, start=1):
        if isinstance(v, float) and not math.isfinite(v):
            overflow = True
            if first_bad is None:
                first_bad = i
            out.append(0.0)
        else:
            out.append(v)
    return FiniteVector(tuple(out), origin=origin, overflow=overflow,
                        overflow_index=first_bad)


def truncate(x: Sequence, n: int) -> FiniteVector:
    """First ``n`` coordinates of ``x`` as a FiniteVector."""
    if n < 1:
        raise TruncationError(f"truncation length must be >= 1, got {n}")
    return finite_vector((x(k) for k in range(1, n + 1)), origin=x.label)


# ---------------------------------------------------------------------------
# Limit detection
# ---------------------------------------------------------------------------


class LimitKind(enum.Enum):
    CONVERGES = "converges"
    DIVERGES = "diverges"
    OSCILLATES = "oscillates"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class LimitVerdict:
    """Outcome of limit detection on a finite trace.

    ``kind`` is CONVERGES only when the trailing window's spread is within
    tolerance, and DIVERGES only when the trailing window is monotone with a
    sustained trend slope.  ``value`` is the trailing-window mean for a
    convergent verdict and None otherwise.
    """

    kind: LimitKind
    value: Optional[float]
    tail_spread: float
    trend_slope: float
    note: str = ""


def _fit_slope(log_idx: np.ndarray, vals: np.ndarray) -> float:
    """Least-squares slope of vals against log(index)."""
    if len(vals) < 2 or np.ptp(log_idx) == 0:
        return 0.0
    x = log_idx - log_idx.mean()
    denom = float(np.dot(x, x))
    if denom == 0.0:
        return 0.0
    return float(np.dot(x, vals - vals.mean()) / denom)


def analyze_limit(indices, values, tol: float, window: int) -> LimitVerdict:
    """Limit heuristic on a (possibly non-contiguous) trace.

    ``indices`` are the 1-based positions the ``values`` were observed at; the
    trailing ``window`` points are the evidence.  The decision order is
    converged (spread within tol), divergent (monotone, sustained slope vs
    log n, moving away from zero), oscillating (alternating differences with
    non-decaying amplitude), else inconclusive.
    """
    idx = np.asarray(indices, dtype=float)
    vals = np.asarray(values, dtype=float)
    if len(vals) != len(idx):
        raise TruncationError("indices and values must have equal length")
    if not (0 < window <= len(vals)):
        raise TruncationError(f"window must be in 1..{len(vals)}, got {window}")
    if tol <= 0:
        raise TruncationError(f"tolerance must be positive, got {tol}")
    if not np.all(np.isfinite(vals)):
        return LimitVerdict(LimitKind.INCONCLUSIVE, None, math.inf, 0.0,
                            note="non-finite values in trace")

    tail_i = idx[-window:]
    tail_v = vals[-window:]
    spread = float(tail_v.max() - tail_v.min())
    log_tail = np.log(tail_i)
    slope = _fit_slope(log_tail, tail_v)

    if spread <= tol:
        return LimitVerdict(LimitKind.CONVERGES, float(tail_v.mean()), spread, slope)

    diffs = np.diff(tail_v)
    half = max(2, window // 2)
    s_head = _fit_slope(log_tail[:half], tail_v[:half])
    s_tail = _fit_slope(log_tail[half:], tail_v[half:]) if window - half >= 2 else slope

    monotone_up = bool(np.all(diffs >= 0))
    monotone_down = bool(np.all(diffs <= 0))
    if monotone_up or monotone_down:
        sustained = abs(s_head) > 0 and abs(s_tail) >= SLOPE_SUSTAIN * abs(s_head)
        away = (s_tail > 0 and tail_v[-1] > tol) or (s_tail < 0 and tail_v[-1] < -tol)
        if sustained and abs(s_tail) >= DIVERGENCE_SLOPE and away:
            return LimitVerdict(LimitKind.DIVERGES, None, spread, slope,
                                note="monotone growth with sustained slope")

    nz = diffs[diffs != 0]
    if len(nz) >= 3:
        flips = np.sum(nz[1:] * nz[:-1] < 0)
        if flips >= ALTERNATION_FRACTION * (len(nz) - 1):
            mid = len(vals) // 2
            ref = vals[max(0, mid - window):mid] if mid >= 4 else tail_v
            amp_ref = float(ref.max() - ref.min()) if len(ref) >= 4 else spread
            if amp_ref <= tol or spread >= OSC_SUSTAIN * amp_ref:
                return LimitVerdict(LimitKind.OSCILLATES, None, spread, slope,
                                    note="alternating differences, amplitude not decaying")
            return LimitVerdict(LimitKind.INCONCLUSIVE, None, spread, slope,
                                note="alternating differences with decaying amplitude")

    # Slow swings: several direction changes across the trailing double
    # window, swing-dominated rather than drifting, with tail peaks clearly
    # above the mid-trace peaks.  A trace with a limit cannot keep doing this.
    span = vals[-min(2 * window, len(vals)):]
    span_d = np.diff(span)
    span_nz = span_d[span_d != 0]
    turns = int(np.sum(span_nz[1:] * span_nz[:-1] < 0)) if len(span_nz) >= 2 else 0
    mid = len(vals) // 2
    lo, hi = max(0, mid - window // 2), mid + window // 2
    if (turns >= 2 and hi <= len(vals) - 2 * window and hi - lo >= 4
            and spread > CLEAR_MARGIN * tol
            and spread >= abs(float(tail_v.mean()))):
        peak_tail = float(np.abs(span).max())
        peak_mid = float(np.abs(vals[lo:hi]).max())
        if peak_tail > CLEAR_MARGIN * tol and \
                peak_tail >= SWING_GROWTH * max(peak_mid, tol):
            return LimitVerdict(LimitKind.OSCILLATES, None, spread, slope,
                                note="sustained swings with growing peaks")

    return LimitVerdict(LimitKind.INCONCLUSIVE, None, spread, slope)


def detect_limit(v: FiniteVector, tol: float = DEFAULT_TOL,
                 window: Optional[int] = None) -> LimitVerdict:
    """Run limit detection on a FiniteVector.

    Args:
        v: the trace; must be longer than the window.
        tol: spread tolerance for a convergent verdict.
        window: trailing points examined; defaults to ``max(16, len(v)//10)``.
    """
    n = len(v)
    if window is None:
        window = min(default_window(n), max(1, n - 1)) if n > 1 else 1
    if not (0 < window < n):
        raise TruncationError(f"window must satisfy 0 < window < {n}, got {window}")
    if v.overflow:
        return LimitVerdict(LimitKind.INCONCLUSIVE, None, math.inf, 0.0,
                            note=f"overflow at index {v.overflow_index}")
    return analyze_limit(np.arange(1, n + 1), v.as_floats(), tol, window)


# ---------------------------------------------------------------------------
# Bounded-above analysis (running sup) and membership probes
# ---------------------------------------------------------------------------


def analyze_sup(indices, values, tol: float, window: int):
    """Decide whether a trace looks bounded: (verdict, info).

    Satisfied means the running sup has plateaued over the trailing *half* of
    the index range (a multiplicative span, so slow logarithmic growth is not
    mistaken for a plateau), or the running sup itself reads as convergent.
    Violated means the running sup shows a sustained monotone growth trend.
    The bound is observed at truncation, never proven.
    """
    idx = np.asarray(indices, dtype=float)
    vals = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(vals)):
        return Verdict.INCONCLUSIVE, {"note": "non-finite values in trace"}
    if not (0 < window <= len(vals)):
        raise TruncationError(f"window must be in 1..{len(vals)}, got {window}")
    running = np.maximum.accumulate(vals)
    sup = float(running[-1])
    half = np.searchsorted(idx, idx[-1] / 2.0, side="right") - 1
    half = max(0, min(half, len(vals) - 1))
    growth = float(running[-1] - running[half])
    info = {"sup_observed": sup, "half_span_growth": growth,
            "truncation_limited": True}
    if growth <= tol * max(1.0, abs(sup)):
        info["note"] = "running sup plateaued over the trailing half-span"
        return Verdict.SATISFIED, info
    lv = analyze_limit(idx, running, tol, window)
    info["trend_slope"] = lv.trend_slope
    if lv.kind is LimitKind.CONVERGES:
        info["note"] = "running sup reads as convergent"
        return Verdict.SATISFIED, info
    if lv.kind is LimitKind.DIVERGES and lv.trend_slope > 0:
        info["note"] = "running sup grows with sustained trend"
        return Verdict.VIOLATED, info
    info["note"] = "running sup still moving; cannot decide at this truncation"
    return Verdict.INCONCLUSIVE, info


def null_limit_verdict(lv: LimitVerdict, tol: float) -> Verdict:
    """Three-valued test of "the limit is zero" given a LimitVerdict."""
    if lv.kind is LimitKind.DIVERGES or lv.kind is LimitKind.OSCILLATES:
        return Verdict.VIOLATED
    if lv.kind is LimitKind.INCONCLUSIVE:
        return Verdict.INCONCLUSIVE
    v = abs(lv.value or 0.0)
    if v <= tol:
        return Verdict.SATISFIED
    if v > max(CLEAR_MARGIN * tol,
               CLEAR_MARGIN * (lv.tail_spread + abs(lv.trend_slope))):
        return Verdict.VIOLATED
    return Verdict.INCONCLUSIVE


def limit_exists_verdict(lv: LimitVerdict) -> Verdict:
    if lv.kind is LimitKind.CONVERGES:
        return Verdict.SATISFIED
    if lv.kind in (LimitKind.DIVERGES, LimitKind.OSCILLATES):
        return Verdict.VIOLATED
    return Verdict.INCONCLUSIVE


def classify_values(values: np.ndarray, tag: str, tol: float, window: int,
                    detail: bool = False):
    """Membership probe of a finite trace in a classical space."""
    tag = tag.lower()
    vals = np.asarray(values, dtype=float)
    idx = np.arange(1, len(vals) + 1)
    if tag == "c0":
        lv = analyze_limit(idx, vals, tol, window)
        verdict = null_limit_verdict(lv, tol)
        info = {"limit": lv}
    elif tag == "c":
        lv = analyze_limit(idx, vals, tol, window)
        verdict = limit_exists_verdict(lv)
        info = {"limit": lv}
    elif tag == "linf":
        verdict, info = analyze_sup(idx, np.abs(vals), tol, window)
    elif tag == "bs":
        verdict, info = analyze_sup(idx, np.abs(np.cumsum(vals)), tol, window)
        info["probe"] = "running sup of partial sums"
    elif tag == "cs":
        lv = analyze_limit(idx, np.cumsum(vals), tol, window)
        verdict = limit_exists_verdict(lv)
        info = {"limit": lv, "probe": "limit of partial sums"}
    else:
        raise SpecError(f"unknown classical space tag {tag!r}")
    return (verdict, info) if detail else verdict


# ---------------------------------------------------------------------------
# Space identifiers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpaceId:
    """A classical space tag, optionally wrapped by a triangle's domain.

    ``matrix`` is None for the classical spaces; a matrix-domain space carries
    the triangle object itself (its name/params identify it in reports).
    """

    tag: str
    matrix: object = None

    def __post_init__(self):
        if self.tag not in CLASSICAL_TAGS:
            raise SpecError(f"unknown space tag {self.tag!r}")
        if self.matrix is not None and self.tag not in ("c0", "c", "linf"):
            raise SpecError(f"matrix domains are built over c0/c/linf, not {self.tag!r}")

    @property
    def is_domain(self) -> bool:
        return self.matrix is not None

    def __str__(self) -> str:
        if self.matrix is None:
            return self.tag
        return f"{self.tag}({getattr(self.matrix, 'name', 'matrix')})"


def classify_classical(x, space, n: int, tol: float = DEFAULT_TOL,
                       window: Optional[int] = None) -> Verdict:
    """Probe membership of ``x`` in a classical space at truncation ``n``.

    ``space`` may be a tag string or a classical ``SpaceId``.  Matrix-domain
    spaces are handled by :func:`seqspace.domains.domain_membership`.
    """
    if isinstance(space, SpaceId):
        if space.is_domain:
            raise SpecError("classify_classical handles classical spaces only; "
                            "use domains.domain_membership for matrix domains")
        tag = space.tag
    else:
        tag = str(space).lower()
    if window is None:
        window = min(default_window(n), max(1, n - 1))
    if not (0 < window < n):
        raise TruncationError(f"window must satisfy 0 < window < {n}, got {window}")
    v = truncate(x, n) if isinstance(x, Sequence) else x
    if isinstance(v, FiniteVector):
        if v.overflow:
            return Verdict.INCONCLUSIVE
        vals = v.as_floats()[:n]
    else:
        vals = np.asarray(v, dtype=float)[:n]
    return classify_values(vals, tag, tol, window)
