"""Mapping-class verdicts for infinite matrices between sequence spaces.

Whether a matrix maps one sequence space into another is classically decided
by a small set of row/column conditions (bounded absolute row sums, convergent
columns, vanishing row differences, and so on).  This module evaluates those
conditions honestly on finite truncations — every verdict is three-valued
(satisfied / violated / inconclusive) and records what was actually observed —
and combines them per supported space pair.

Two independent routes are provided and never merged:

* the *conditions* route evaluates the characterizing conditions on the
  matrix (or on a transfer matrix, for domain pairs);
* the *oracle* route transforms a fixed battery of member sequences of the
  source space and probes their images against the target space.

Agreement between the routes is evidence; disagreement of two decisive
verdicts is a bug in one of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .domains import preimage_sequence, space_from_spec, space_membership
from .duality import dual_transfer_matrix
from .errors import SpecError, TruncationError, UnsupportedClassError
from .matrices import (
    DENSE_LIMIT,
    ComposedMatrix,
    InfiniteMatrix,
    apply,
    inverse_of,
    matrix_from_spec,
)
from .sequences import (
    LimitKind,
    Sequence,
    SpaceId,
    analyze_limit,
    analyze_sup,
    limit_exists_verdict,
    make_sequence,
    null_limit_verdict,
)
from .verdicts import Verdict, conjoin

# Engine defaults.  The truncation/tolerance/window triple was calibrated
# together: at n = 600 with a 60-point trailing window, a tolerance of 1.5e-3
# keeps exact plateaus and clean divergences decisive while leaving slow decays
# (1/n tails, 1/log n tails) inconclusive rather than wrongly decided.
DEFAULT_CLASS_N = 600
CLASS_TOL = 1.5e-3
#: Prefix-sum conditions need a full dense window; above this size they are
#: evaluated at this reduced truncation (with a note in the report).
PREFIX_TRUNCATION = 1200
#: Rows stacked for the equality conditions' column-limit estimates.
EQ_STACK_ROWS = 120

# ---------------------------------------------------------------------------
# The conditions and the pair table
# ---------------------------------------------------------------------------

CONDITION_DESCRIPTIONS = {
    "bounded-rows": "the absolute row sums stay bounded",
    "columns-converge": "every column has a limit",
    "row-sums-converge": "the row sums have a limit",
    "abs-rows-match-columns":
        "the absolute row sums converge to the total mass of the column limits",
    "null-columns": "every column tends to zero",
    "bounded-prefix-columns":
        "the absolute sums of column prefix sums stay bounded",
    "column-sums-converge": "every column is summable",
    "total-sum-converges": "the iterated sum over rows then columns converges",
    "null-tail-columns": "the absolute mass of the column tail sums vanishes",
    "null-rows": "each row tends to zero along the columns",
    "null-row-sums": "the row sums tend to zero",
    "null-abs-rows": "the absolute row sums tend to zero",
    "null-row-diffs": "the absolute sums of adjacent-column differences vanish",
    "bounded-row-diffs":
        "the absolute sums of adjacent-column differences stay bounded",
    "row-diffs-converge": "adjacent-column differences converge per column",
    "diff-rows-match-columns":
        "the difference row sums converge to the total mass of their column limits",
    "bounded-row-limits": "the along-row limits stay bounded over the rows",
}

#: Characterizing conditions per (source, target) pair of classical spaces.
PAIR_CONDITIONS = {
    ("c0", "linf"): ("bounded-rows",),
    ("c0", "c"): ("bounded-rows", "columns-converge"),
    ("c0", "bs"): ("bounded-prefix-columns",),
    ("c0", "cs"): ("bounded-prefix-columns", "column-sums-converge"),
    ("c", "linf"): ("bounded-rows",),
    ("c", "c"): ("bounded-rows", "columns-converge", "row-sums-converge"),
    ("c", "bs"): ("bounded-prefix-columns",),
    ("c", "cs"): ("bounded-prefix-columns", "column-sums-converge",
                  "total-sum-converges"),
    ("linf", "linf"): ("bounded-rows",),
    ("linf", "c"): ("columns-converge", "abs-rows-match-columns"),
    ("linf", "bs"): ("bounded-prefix-columns",),
    ("linf", "cs"): ("null-tail-columns",),
    ("linf", "c0"): ("null-abs-rows",),
    ("c", "c0"): ("bounded-rows", "null-columns", "null-row-sums"),
    ("bs", "c0"): ("null-rows", "null-row-diffs"),
    ("cs", "c0"): ("null-columns", "bounded-row-diffs"),
    ("bs", "c"): ("null-rows", "row-diffs-converge", "diff-rows-match-columns"),
    ("cs", "c"): ("bounded-row-diffs", "columns-converge"),
    ("bs", "linf"): ("null-rows", "bounded-row-diffs"),
    ("cs", "linf"): ("bounded-row-diffs", "bounded-row-limits"),
}


def supported_pairs() -> list:
    """Human-readable list of the supported classical pairs."""
    return [f"({f} : {t})" for f, t in sorted(PAIR_CONDITIONS)]


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConditionReport:
    condition: str
    verdict: Verdict
    observed: Optional[float]
    note: str
    truncation: int
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "condition": self.condition,
            "verdict": str(self.verdict),
            "note": self.note,
            "truncation": self.truncation,
        }
        if self.observed is not None:
            out["observed"] = float(self.observed)
        if self.extras:
            out["detail"] = _jsonable(self.extras)
        return out


@dataclass(frozen=True)
class SampleProbe:
    label: str
    verdict: Verdict
    note: str

    def to_dict(self) -> dict:
        return {"sample": self.label, "verdict": str(self.verdict),
                "note": self.note}


@dataclass(frozen=True)
class OracleReport:
    verdict: Verdict
    samples: tuple
    witnesses: tuple
    decisive: int
    agreement: float
    seed: int

    def to_dict(self) -> dict:
        return {
            "verdict": str(self.verdict),
            "decisive_samples": self.decisive,
            "agreement": self.agreement,
            "witnesses": list(self.witnesses),
            "samples": [p.to_dict() for p in self.samples],
            "seed": self.seed,
        }


@dataclass(frozen=True)
class ClassReport:
    matrix: dict
    from_space: str
    to_space: str
    conditions_required: tuple
    verdict: Verdict
    route: str
    n: int
    tol: float
    window: int
    condition_reports: tuple = ()
    conditions_verdict: Optional[Verdict] = None
    transfer: Optional[dict] = None
    row_pairing: Optional[dict] = None
    oracle: Optional[OracleReport] = None
    notes: tuple = ()

    def routes_agree(self) -> Optional[bool]:
        """True/False when both routes ran and both are decisive, else None."""
        if self.oracle is None or self.conditions_verdict is None:
            return None
        a, b = self.conditions_verdict, self.oracle.verdict
        if Verdict.INCONCLUSIVE in (a, b):
            return None
        return a is b

    def to_dict(self) -> dict:
        out = {
            "matrix": self.matrix,
            "from": self.from_space,
            "to": self.to_space,
            "verdict": str(self.verdict),
            "route": self.route,
            "n": self.n,
            "tol": self.tol,
            "window": self.window,
            "conditions_required": list(self.conditions_required),
        }
        if self.conditions_verdict is not None:
            out["conditions_verdict"] = str(self.conditions_verdict)
        if self.condition_reports:
            out["conditions"] = [r.to_dict() for r in self.condition_reports]
        if self.transfer is not None:
            out["transfer_matrix"] = self.transfer
        if self.row_pairing is not None:
            out["row_pairing"] = self.row_pairing
        if self.oracle is not None:
            out["oracle"] = self.oracle.to_dict()
            agree = self.routes_agree()
            out["routes_agree"] = agree
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Verdict):
        return str(value)
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


# ---------------------------------------------------------------------------
# Trace plumbing
# ---------------------------------------------------------------------------


def _class_window(n: int) -> int:
    return max(24, n // 10)


class _Engine:
    """Shared trace computations for one (matrix, truncation) pair."""

    def __init__(self, a: InfiniteMatrix, n: int, tol: float, window: int):
        if n < 8:
            raise TruncationError(f"class checks need a truncation >= 8, got {n}")
        if not (0 < window < n):
            raise TruncationError(f"window must satisfy 0 < window < {n}")
        self.a = a
        self.n = n
        self.tol = tol
        self.window = window
        self.dense = n <= DENSE_LIMIT
        self.row_tail_note = ""
        if a.row_end(n) is None:
            self.row_limit = self._complete_row_limit()
            if self.row_limit < n:
                self.row_tail_note = (
                    f"row traces restricted to rows 1..{self.row_limit}, whose "
                    f"tails are captured inside the {n}-column window")
        else:
            self.row_limit = n
        self._cache: dict = {}

    # -- helpers ---------------------------------------------------------

    def _complete_row_limit(self) -> int:
        cut = getattr(self.a, "row_cutoff", None)
        if cut is None:
            self.row_tail_note = ("rows have unbounded support with no tail "
                                  "cutoff; row traces use the leading window only")
            return self.n
        lo, hi = 1, self.n
        if cut(1) > self.n:
            return 0
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if cut(mid) <= self.n:
                lo = mid
            else:
                hi = mid - 1
        return lo

    def table(self) -> np.ndarray:
        t = self._cache.get("table")
        if t is None:
            if not self.dense:
                raise TruncationError(
                    f"dense table unavailable at truncation {self.n}")
            t = self.a.truncation_floats(self.n)
            self._cache["table"] = t
        return t

    def row_indices(self) -> np.ndarray:
        idx = self._cache.get("row_idx")
        if idx is None:
            if self.dense:
                idx = np.arange(1, self.row_limit + 1)
            else:
                top = self.row_limit
                head = np.unique(np.geomspace(
                    1, max(1, top - self.window), num=96).astype(int))
                tail = np.arange(max(1, top - self.window + 1), top + 1)
                idx = np.unique(np.concatenate([head, tail]))
            self._cache["row_idx"] = idx
        return idx

    def _row_feature(self, kind: str) -> np.ndarray:
        got = self._cache.get(kind)
        if got is not None:
            return got
        if self.dense:
            t = self.table()[:self.row_limit]
            if kind == "row_abs":
                vals = np.abs(t).sum(axis=1)
            elif kind == "row_sum":
                vals = t.sum(axis=1)
            else:  # row_diff_abs
                padded = np.hstack([t, np.zeros((t.shape[0], 1))])
                vals = np.abs(np.diff(padded, axis=1)).sum(axis=1)
        else:
            rows = self.row_indices()
            out = np.empty(len(rows))
            for i, nn in enumerate(rows):
                nn = int(nn)
                hi = self.a.row_end(nn)
                hi = self.n if hi is None else min(hi, self.n)
                if hi < 1:
                    out[i] = 0.0
                    continue
                row = self.a.row_floats(nn, hi)
                if kind == "row_abs":
                    out[i] = np.abs(row).sum()
                elif kind == "row_sum":
                    out[i] = row.sum()
                else:
                    out[i] = np.abs(np.diff(np.append(row, 0.0))).sum()
            vals = out
        self._cache[kind] = vals
        return vals

    def row_trace(self, kind: str):
        return self.row_indices(), self._row_feature(kind)

    def column_values(self, k: int) -> np.ndarray:
        if self.dense:
            return self.table()[:, k - 1]
        return self.a.col_floats(k, np.arange(1, self.n + 1))

    def column_sample(self) -> list:
        got = self._cache.get("cols")
        if got is None:
            # Columns too close to the truncation edge cannot have settled for
            # matrices whose mass travels with the row index, so the sample is
            # capped well inside the window.
            cap = min(self.n - 2 * self.window, self.n // 3)
            ks = list(range(1, 9)) + [12, 16, 24, 32, 48, 64, 96, 128, 192, 256]
            got = sorted({k for k in ks if 1 <= k <= cap})
            self._cache["cols"] = got
        return got

    def final_rows(self, diff: bool) -> np.ndarray:
        """Stacked trailing complete rows (for column-limit estimates)."""
        key = "final_diff" if diff else "final_rows"
        got = self._cache.get(key)
        if got is None:
            depth = min(EQ_STACK_ROWS, self.window, self.row_limit)
            if self.dense:
                block = self.table()[self.row_limit - depth:self.row_limit]
            else:
                rows = range(self.row_limit - depth + 1, self.row_limit + 1)
                block = np.vstack([self.a.row_floats(int(r), self.n)
                                   for r in rows])
            if diff:
                padded = np.hstack([block, np.zeros((block.shape[0], 1))])
                block = np.diff(padded, axis=1) * -1.0
            got = block
            self._cache[key] = got
        return got

    def prefix_table(self) -> np.ndarray:
        got = self._cache.get("prefix")
        if got is None:
            got = np.cumsum(self.table(), axis=0)
            self._cache["prefix"] = got
        return got


def _engine_for(a: InfiniteMatrix, n: int, tol: float, window: int) -> _Engine:
    store = getattr(a, "_engines", None)
    if store is None:
        store = {}
        setattr(a, "_engines", store)
    key = (n, repr(tol), window)
    eng = store.get(key)
    if eng is None:
        eng = _Engine(a, n, tol, window)
        store[key] = eng
    return eng


# ---------------------------------------------------------------------------
# Per-condition evaluators
# ---------------------------------------------------------------------------


def _report(cond, verdict, observed, note, n, **extras) -> ConditionReport:
    return ConditionReport(cond, verdict, observed, note, n, extras)


def _eval_bounded_rows(eng: _Engine) -> ConditionReport:
    idx, vals = eng.row_trace("row_abs")
    verdict, info = analyze_sup(idx, vals, eng.tol, eng.window)
    return _report("bounded-rows", verdict, info.get("sup_observed"),
                   info.get("note", ""), eng.n,
                   half_span_growth=info.get("half_span_growth"))


def _eval_null_abs_rows(eng: _Engine) -> ConditionReport:
    idx, vals = eng.row_trace("row_abs")
    lv = analyze_limit(idx, vals, eng.tol, eng.window)
    verdict = null_limit_verdict(lv, eng.tol)
    return _report("null-abs-rows", verdict, lv.value,
                   _limit_note(lv), eng.n, kind=lv.kind.value)


def _eval_row_sums_converge(eng: _Engine) -> ConditionReport:
    idx, vals = eng.row_trace("row_sum")
    lv = analyze_limit(idx, vals, eng.tol, eng.window)
    return _report("row-sums-converge", limit_exists_verdict(lv), lv.value,
                   _limit_note(lv), eng.n, kind=lv.kind.value)


def _eval_null_row_sums(eng: _Engine) -> ConditionReport:
    idx, vals = eng.row_trace("row_sum")
    lv = analyze_limit(idx, vals, eng.tol, eng.window)
    verdict = null_limit_verdict(lv, eng.tol)
    return _report("null-row-sums", verdict, lv.value,
                   _limit_note(lv), eng.n, kind=lv.kind.value)


def _eval_null_row_diffs(eng: _Engine) -> ConditionReport:
    idx, vals = eng.row_trace("row_diff_abs")
    lv = analyze_limit(idx, vals, eng.tol, eng.window)
    verdict = null_limit_verdict(lv, eng.tol)
    return _report("null-row-diffs", verdict, lv.value,
                   _limit_note(lv), eng.n, kind=lv.kind.value)


def _eval_bounded_row_diffs(eng: _Engine) -> ConditionReport:
    idx, vals = eng.row_trace("row_diff_abs")
    verdict, info = analyze_sup(idx, vals, eng.tol, eng.window)
    return _report("bounded-row-diffs", verdict, info.get("sup_observed"),
                   info.get("note", ""), eng.n,
                   half_span_growth=info.get("half_span_growth"))


def _per_column(eng: _Engine, cond: str, transform, judge) -> ConditionReport:
    """Conjoin a per-column judgement over the sampled columns."""
    cols = eng.column_sample()
    if not cols:
        return _report(cond, Verdict.INCONCLUSIVE, None,
                       "truncation too small to sample columns", eng.n)
    verdicts = {}
    for k in cols:
        trace = transform(k)
        lv = analyze_limit(np.arange(1, len(trace) + 1), trace,
                           eng.tol, eng.window)
        verdicts[k] = judge(lv)
    overall = conjoin(verdicts.values())
    bad = [k for k, v in verdicts.items() if v is Verdict.VIOLATED]
    open_ = [k for k, v in verdicts.items() if v is Verdict.INCONCLUSIVE]
    note = f"checked columns {cols[0]}..{cols[-1]} ({len(cols)} sampled)"
    extras = {"columns_checked": len(cols)}
    if bad:
        extras["violated_at"] = bad[:6]
    if open_:
        extras["inconclusive_at"] = open_[:6]
    return _report(cond, overall, None, note, eng.n, **extras)


def _eval_columns_converge(eng: _Engine) -> ConditionReport:
    return _per_column(eng, "columns-converge", eng.column_values,
                       limit_exists_verdict)


def _eval_null_columns(eng: _Engine) -> ConditionReport:
    return _per_column(eng, "null-columns", eng.column_values,
                       lambda lv: null_limit_verdict(lv, eng.tol))


def _eval_row_diffs_converge(eng: _Engine) -> ConditionReport:
    def diff_col(k):
        return eng.column_values(k) - eng.column_values(k + 1)
    return _per_column(eng, "row-diffs-converge", diff_col,
                       limit_exists_verdict)


def _eval_column_sums_converge(eng: _Engine) -> ConditionReport:
    def prefix_col(k):
        return np.cumsum(eng.column_values(k))
    return _per_column(eng, "column-sums-converge", prefix_col,
                       limit_exists_verdict)


def _equality_condition(eng: _Engine, cond: str, kind: str,
                        diff: bool) -> ConditionReport:
    """Shared logic for the two 'left limit equals column mass' conditions."""
    idx, vals = eng.row_trace(kind)
    lv = analyze_limit(idx, vals, eng.tol, eng.window)
    if lv.kind in (LimitKind.DIVERGES, LimitKind.OSCILLATES):
        return _report(cond, Verdict.VIOLATED, None,
                       f"left side has no limit ({lv.kind.value})", eng.n)
    if lv.kind is LimitKind.INCONCLUSIVE:
        return _report(cond, Verdict.INCONCLUSIVE, None,
                       "left side undecided at this truncation", eng.n)
    left = lv.value
    block = eng.final_rows(diff)
    depth = block.shape[0]
    top_row = eng.row_limit
    first_row = top_row - depth + 1
    rhs = 0.0
    uncertainty = lv.tail_spread
    for k in range(1, eng.n + 1):
        col = block[:, k - 1]
        below = col[max(0, k - first_row + 1):]  # rows strictly beyond column k
        if len(below) == 0:
            rhs += abs(float(col[-1]))
            uncertainty += abs(float(col[-1]))
        else:
            rhs += abs(float(below.mean()))
            uncertainty += float(np.ptp(below)) if len(below) > 1 else 0.0
    gap = abs(left - rhs)
    extras = {"left_limit": left, "column_mass": rhs,
              "uncertainty": uncertainty}
    if gap <= max(eng.tol, uncertainty) and uncertainty <= 4 * eng.tol:
        return _report(cond, Verdict.SATISFIED, left,
                       "left limit matches the column mass within tolerance",
                       eng.n, **extras)
    if gap > 4 * max(eng.tol, uncertainty):
        return _report(cond, Verdict.VIOLATED, left,
                       "left limit clearly differs from the column mass",
                       eng.n, **extras)
    return _report(cond, Verdict.INCONCLUSIVE, left,
                   "column-limit estimates too uncertain at this truncation",
                   eng.n, **extras)


def _eval_abs_rows_match_columns(eng: _Engine) -> ConditionReport:
    return _equality_condition(eng, "abs-rows-match-columns", "row_abs", False)


def _eval_diff_rows_match_columns(eng: _Engine) -> ConditionReport:
    return _equality_condition(eng, "diff-rows-match-columns",
                               "row_diff_abs", True)


def _eval_null_rows(eng: _Engine) -> ConditionReport:
    if eng.a.row_end(eng.n) is not None:
        return _report("null-rows", Verdict.SATISFIED, 0.0,
                       "rows have finite support, so each row ends in zeros",
                       eng.n)
    rows = [r for r in (2, 3, 5, 9, 17, 33) if r <= eng.row_limit]
    if not rows:
        return _report("null-rows", Verdict.INCONCLUSIVE, None,
                       "no complete rows inside the window", eng.n)
    verdicts = []
    for nn in rows:
        row = eng.a.row_floats(nn, eng.n)
        lv = analyze_limit(np.arange(1, eng.n + 1), row, eng.tol, eng.window)
        verdicts.append(null_limit_verdict(lv, eng.tol))
    return _report("null-rows", conjoin(verdicts), None,
                   f"checked rows {rows}", eng.n)


def _eval_bounded_row_limits(eng: _Engine) -> ConditionReport:
    if eng.a.row_end(eng.n) is not None:
        return _report("bounded-row-limits", Verdict.SATISFIED, 0.0,
                       "rows have finite support, so every row limit is zero",
                       eng.n)
    rows = [r for r in (2, 3, 5, 9, 17, 33) if r <= eng.row_limit]
    if not rows:
        return _report("bounded-row-limits", Verdict.INCONCLUSIVE, None,
                       "no complete rows inside the window", eng.n)
    limits = []
    verdicts = []
    for nn in rows:
        row = eng.a.row_floats(nn, eng.n)
        lv = analyze_limit(np.arange(1, eng.n + 1), row, eng.tol, eng.window)
        verdicts.append(limit_exists_verdict(lv))
        if lv.kind is LimitKind.CONVERGES:
            limits.append(abs(lv.value))
    overall = conjoin(verdicts)
    observed = max(limits) if limits else None
    return _report("bounded-row-limits", overall, observed,
                   f"row limits estimated on rows {rows}", eng.n)


def _eval_bounded_prefix_columns(eng: _Engine) -> ConditionReport:
    eng, note = _prefix_engine(eng)
    s = eng.prefix_table()
    vals = np.abs(s).sum(axis=1)
    idx = np.arange(1, eng.n + 1)
    verdict, info = analyze_sup(idx, vals, eng.tol, eng.window)
    return _report("bounded-prefix-columns", verdict,
                   info.get("sup_observed"),
                   (note + info.get("note", "")).strip(), eng.n,
                   half_span_growth=info.get("half_span_growth"))


def _eval_total_sum_converges(eng: _Engine) -> ConditionReport:
    eng, note = _prefix_engine(eng)
    idx = eng.row_indices()
    if eng.dense:
        vals = np.cumsum(eng._row_feature("row_sum"))
    else:  # pragma: no cover - prefix engine is always dense
        raise TruncationError("total-sum trace needs the dense path")
    lv = analyze_limit(idx, vals, eng.tol, eng.window)
    return _report("total-sum-converges", limit_exists_verdict(lv), lv.value,
                   (note + _limit_note(lv)).strip(), eng.n, kind=lv.kind.value)


def _eval_null_tail_columns(eng: _Engine) -> ConditionReport:
    eng, note = _prefix_engine(eng)
    s = eng.prefix_table()
    total = s[-1][None, :]
    shifted = np.vstack([np.zeros((1, s.shape[1])), s[:-1]])
    vals = np.abs(total - shifted).sum(axis=1)
    idx = np.arange(1, eng.n + 1)
    lv = analyze_limit(idx, vals, eng.tol, eng.window)
    verdict = null_limit_verdict(lv, eng.tol)
    return _report("null-tail-columns", verdict, lv.value,
                   (note + "tail sums cut at the window edge; "
                    + _limit_note(lv)).strip(), eng.n, kind=lv.kind.value)


def _prefix_engine(eng: _Engine):
    """Prefix-sum conditions need the dense table; shrink if necessary."""
    if eng.dense:
        return eng, ""
    reduced = min(eng.n, PREFIX_TRUNCATION)
    note = f"evaluated at reduced truncation {reduced}; "
    return _engine_for(eng.a, reduced, eng.tol, _class_window(reduced)), note


def _limit_note(lv) -> str:
    if lv.kind is LimitKind.CONVERGES:
        return f"trace settles near {lv.value:.6g}"
    if lv.note:
        return f"{lv.kind.value}: {lv.note}"
    return lv.kind.value


_EVALUATORS = {
    "bounded-rows": _eval_bounded_rows,
    "columns-converge": _eval_columns_converge,
    "row-sums-converge": _eval_row_sums_converge,
    "abs-rows-match-columns": _eval_abs_rows_match_columns,
    "null-columns": _eval_null_columns,
    "bounded-prefix-columns": _eval_bounded_prefix_columns,
    "column-sums-converge": _eval_column_sums_converge,
    "total-sum-converges": _eval_total_sum_converges,
    "null-tail-columns": _eval_null_tail_columns,
    "null-rows": _eval_null_rows,
    "null-row-sums": _eval_null_row_sums,
    "null-abs-rows": _eval_null_abs_rows,
    "null-row-diffs": _eval_null_row_diffs,
    "bounded-row-diffs": _eval_bounded_row_diffs,
    "row-diffs-converge": _eval_row_diffs_converge,
    "diff-rows-match-columns": _eval_diff_rows_match_columns,
    "bounded-row-limits": _eval_bounded_row_limits,
}


def condition_report(a, condition: str, n: int = DEFAULT_CLASS_N,
                     tol: float = CLASS_TOL,
                     window: Optional[int] = None) -> ConditionReport:
    """Evaluate one named condition on a matrix at a truncation.

    Results are memoized on the matrix instance per (condition, n, tol,
    window), so repeated class checks share the work.
    """
    a = matrix_from_spec(a)
    if condition not in _EVALUATORS:
        known = ", ".join(sorted(_EVALUATORS))
        raise SpecError(f"unknown condition {condition!r}; known: {known}")
    if window is None:
        window = _class_window(n)
    cache = getattr(a, "_condition_cache", None)
    if cache is None:
        cache = {}
        setattr(a, "_condition_cache", cache)
    key = (condition, n, repr(tol), window)
    got = cache.get(key)
    if got is None:
        eng = _engine_for(a, n, tol, window)
        got = _EVALUATORS[condition](eng)
        if eng.row_tail_note and "row" in condition:
            got = ConditionReport(got.condition, got.verdict, got.observed,
                                  (got.note + "; " + eng.row_tail_note).strip("; "),
                                  got.truncation, got.extras)
        cache[key] = got
    return got


def condition_trace(a, feature: str, n: int = DEFAULT_CLASS_N,
                    window: Optional[int] = None):
    """Raw (indices, values) trace of a row feature: one of "row-abs-sum",
    "row-sum", "row-diff-abs-sum".  Useful for inspection and tests."""
    kinds = {"row-abs-sum": "row_abs", "row-sum": "row_sum",
             "row-diff-abs-sum": "row_diff_abs"}
    if feature not in kinds:
        raise SpecError(f"unknown trace feature {feature!r}")
    a = matrix_from_spec(a)
    if window is None:
        window = _class_window(n)
    eng = _engine_for(a, n, CLASS_TOL, window)
    idx, vals = eng.row_trace(kinds[feature])
    return np.asarray(idx), np.asarray(vals)


# ---------------------------------------------------------------------------
# Domain transfer matrices
# ---------------------------------------------------------------------------


def source_transfer_matrix(a, domain_matrix) -> InfiniteMatrix:
    """The matrix acting on the transformed coordinates of a source domain:
    the composition ``A  (inverse of the domain triangle)``."""
    a = matrix_from_spec(a)
    b = matrix_from_spec(domain_matrix)
    cache = getattr(a, "_transfer_cache", None)
    if cache is None:
        cache = {}
        setattr(a, "_transfer_cache", cache)
    key = ("source", b.name)
    got = cache.get(key)
    if got is None:
        got = ComposedMatrix(a, inverse_of(b))
        cache[key] = got
    return got


def target_transfer_matrix(a, domain_matrix) -> InfiniteMatrix:
    """The matrix whose rows are the domain coordinates of the images:
    the composition ``(domain triangle)  A``."""
    a = matrix_from_spec(a)
    b = matrix_from_spec(domain_matrix)
    cache = getattr(a, "_transfer_cache", None)
    if cache is None:
        cache = {}
        setattr(a, "_transfer_cache", cache)
    key = ("target", b.name)
    got = cache.get(key)
    if got is None:
        got = ComposedMatrix(b, a)
        cache[key] = got
    return got


def _row_pairing_verdict(a: InfiniteMatrix, space: SpaceId, n: int, tol: float,
                         window: int, row_bound: int) -> dict:
    """Check that the leading rows of ``a`` pair summably with the source
    domain (each row must lie in the domain's beta dual)."""
    cache = getattr(a, "_row_pairing_cache", None)
    if cache is None:
        cache = {}
        setattr(a, "_row_pairing_cache", cache)
    key = (str(space), n, repr(tol), window, row_bound)
    got = cache.get(key)
    if got is not None:
        return got
    verdicts = {}
    for nn in range(1, row_bound + 1):
        hint = a.row_end(nn)
        row_seq = Sequence(lambda k, nn=nn: a.entry(nn, k),
                           support_hint=hint, label=f"row[{nn}]")
        transfer = dual_transfer_matrix(row_seq, space.matrix)
        rep = check_class(transfer, space.tag, "c", n=n, tol=tol, window=window)
        verdicts[nn] = rep.verdict
    overall = conjoin(verdicts.values())
    weakest = next((r for r, v in verdicts.items()
                    if v is not Verdict.SATISFIED), None)
    got = {"verdict": overall, "rows_checked": row_bound,
           "weakest_row": weakest}
    cache[key] = got
    return got


# ---------------------------------------------------------------------------
# The sampling oracle
# ---------------------------------------------------------------------------


def _sign_blocks() -> Sequence:
    return Sequence(lambda k: 1 if int(math.log2(k)) % 2 == 0 else -1,
                    label="sign-blocks")


def _alt_power(p: float, label: str) -> Sequence:
    return Sequence(lambda k: (-1) ** k * float(k) ** p, label=label)


def _base_samples(tag: str, seed: int) -> list:
    rng = np.random.default_rng(seed)
    random_vals = rng.uniform(-2.0, 2.0, size=25).tolist()
    c0 = [
        ("unit:1", make_sequence("unit:1")),
        ("unit:3", make_sequence("unit:3")),
        ("zero-sum", make_sequence("list:1,-1")),
        ("geometric:1/2", make_sequence("geometric:1/2")),
        ("geometric:-1/2", make_sequence("geometric:-1/2")),
        ("harmonic", make_sequence("harmonic")),
        ("power:-2", make_sequence("power:-2")),
        ("alt-sqrt", _alt_power(-0.5, "alt-sqrt")),
        ("alt-harmonic", _alt_power(-1.0, "alt-harmonic")),
        ("log-slow", Sequence(lambda k: 1.0 / math.log(k + 1), label="log-slow")),
        # A slowly-chirped null sequence.  Its domain preimages oscillate at
        # the resonant sweep that smoothing kernels pass, so it witnesses
        # unbounded transfers that every smooth sample slips through.  The
        # sweep rate 4 keeps successive image peaks closer together than the
        # detection window while losing only a constant factor to smoothing.
        ("chirp-slow", Sequence(lambda k: math.sin(4.0 * math.sqrt(k))
                                / math.log(k + 1), label="chirp-slow")),
        ("random-finite", make_sequence({"kind": "list", "values": random_vals})),
    ]
    c_extra = [
        ("const:1", make_sequence("const:1")),
        ("one-plus-power:-2",
         Sequence(lambda k: 1.0 + 1.0 / k ** 2, label="one-plus-power:-2")),
        ("one-plus-geometric",
         Sequence(lambda k: 1.0 + 0.5 ** k, label="one-plus-geometric")),
    ]
    linf_extra = [
        ("alternating", make_sequence("alternating")),
        ("sign-blocks", _sign_blocks()),
    ]
    if tag == "c0":
        return c0
    if tag == "c":
        return c0 + c_extra
    if tag == "linf":
        return c0 + c_extra + linf_extra
    if tag == "bs":
        return [
            ("unit:1", make_sequence("unit:1")),
            ("zero-sum", make_sequence("list:1,-1")),
            ("alternating", make_sequence("alternating")),
            ("alt-sqrt", _alt_power(-0.5, "alt-sqrt")),
            ("alt-harmonic", _alt_power(-1.0, "alt-harmonic")),
            ("geometric:1/2", make_sequence("geometric:1/2")),
            ("power:-2", make_sequence("power:-2")),
        ]
    if tag == "cs":
        return [
            ("unit:1", make_sequence("unit:1")),
            ("zero-sum", make_sequence("list:1,-1")),
            ("geometric:1/2", make_sequence("geometric:1/2")),
            ("alt-harmonic", _alt_power(-1.0, "alt-harmonic")),
            ("alt-sqrt", _alt_power(-0.5, "alt-sqrt")),
            ("power:-2", make_sequence("power:-2")),
        ]
    raise SpecError(f"no sample battery for space tag {tag!r}")


def oracle_samples(space, seed: int = 0) -> list:
    """Labelled member sequences of a space (domain members are built as
    preimages of the base space's battery under the domain triangle)."""
    space = space_from_spec(space)
    base = _base_samples(space.tag, seed)
    if not space.is_domain:
        return base
    out = []
    for label, x in base:
        out.append((f"{space.matrix.name}-preimage:{label}",
                    preimage_sequence(space.matrix, x)))
    return out


def _cached_image(a: InfiniteMatrix, label: str, x: Sequence, n: int):
    cache = getattr(a, "_image_cache", None)
    if cache is None:
        cache = {}
        setattr(a, "_image_cache", cache)
    key = (label, n)
    got = cache.get(key)
    if got is None:
        got = apply(a, x, n, mode="float")
        cache[key] = got
    return got


def _probe_note(info: dict) -> str:
    lv = info.get("limit")
    if lv is not None:
        core = _limit_note(lv)
    else:
        core = info.get("note", "")
    probe = info.get("probe")
    return f"{probe}: {core}" if probe else core


def oracle_check(a, from_space, to_space, n: int = DEFAULT_CLASS_N,
                 tol: float = CLASS_TOL, window: Optional[int] = None,
                 seed: int = 0) -> OracleReport:
    """Transform a battery of source-space members and probe the images.

    Verdict semantics: Violated as soon as any image decisively fails the
    target space (those samples are the witnesses); Satisfied when at least
    one image decisively belongs and none decisively fails; Inconclusive
    otherwise.  This is sampled evidence, not a proof — its role is to
    cross-check the conditions route.
    """
    a = matrix_from_spec(a)
    from_space = space_from_spec(from_space)
    to_space = space_from_spec(to_space)
    if window is None:
        window = _class_window(n)
    probes = []
    for label, x in oracle_samples(from_space, seed):
        img = _cached_image(a, label, x, n)
        if img.overflow:
            probes.append(SampleProbe(
                label, Verdict.INCONCLUSIVE,
                f"transform overflowed at index {img.overflow_index}"))
            continue
        verdict, info = space_membership(img, to_space, n, tol=tol,
                                         window=window, detail=True)
        probes.append(SampleProbe(label, verdict, _probe_note(info)))
    witnesses = tuple(p.label for p in probes if p.verdict is Verdict.VIOLATED)
    decisive = [p for p in probes if p.verdict is not Verdict.INCONCLUSIVE]
    members = [p for p in decisive if p.verdict is Verdict.SATISFIED]
    if witnesses:
        verdict = Verdict.VIOLATED
    elif members:
        verdict = Verdict.SATISFIED
    else:
        verdict = Verdict.INCONCLUSIVE
    agreement = (len(members) / len(decisive)) if decisive else 1.0
    return OracleReport(verdict=verdict, samples=tuple(probes),
                        witnesses=witnesses, decisive=len(decisive),
                        agreement=agreement, seed=seed)


# ---------------------------------------------------------------------------
# The class checker
# ---------------------------------------------------------------------------


def check_class(a, from_space, to_space, n: int = DEFAULT_CLASS_N,
                tol: float = CLASS_TOL, window: Optional[int] = None,
                route: str = "conditions", row_bound: int = 6,
                seed: int = 0) -> ClassReport:
    """Decide (at a truncation) whether a matrix maps one space into another.

    Supported pairs: the classical pairs listed by :func:`supported_pairs`,
    plus domain pairs with one side a matrix domain — a source domain over the
    omega/gamma triangles (conditions run on the source transfer matrix, and
    the leading rows are checked against the domain's beta dual), or a target
    domain over any triangle (conditions run on the target transfer matrix).

    ``route`` selects the evidence: "conditions" (default), "oracle", or
    "both".  With "both", the headline verdict is the conditions verdict and
    the oracle is attached for cross-checking.
    """
    a = matrix_from_spec(a)
    f = space_from_spec(from_space)
    t = space_from_spec(to_space)
    if window is None:
        window = _class_window(n)
    if route not in ("conditions", "oracle", "both"):
        raise SpecError(f"unknown route {route!r}")
    if f.is_domain and t.is_domain:
        raise UnsupportedClassError(
            "pairs with a matrix domain on both sides are not supported; "
            "supported: classical pairs "
            + ", ".join(supported_pairs())
            + ", domain sources over omega/gamma, and domain targets")
    base_pair = (f.tag, t.tag)
    conds = PAIR_CONDITIONS.get(base_pair)
    if conds is None:
        raise UnsupportedClassError(
            f"no characterization for ({f} : {t}); supported classical pairs: "
            + ", ".join(supported_pairs()))

    notes = []
    transfer_desc = None
    row_pairing = None
    target = a
    if f.is_domain:
        if f.matrix.name not in ("omega", "gamma"):
            raise UnsupportedClassError(
                "source domains are supported over the omega and gamma "
                f"triangles, not {f.matrix.name!r}")
        target = source_transfer_matrix(a, f.matrix)
        transfer_desc = target.describe()
        notes.append(
            "conditions evaluated on the source transfer matrix "
            f"{target.name}")
    elif t.is_domain:
        target = target_transfer_matrix(a, t.matrix)
        transfer_desc = target.describe()
        notes.append(
            "conditions evaluated on the target transfer matrix "
            f"{target.name}")

    reports = ()
    conditions_verdict = None
    if route in ("conditions", "both"):
        reports = tuple(condition_report(target, c, n, tol, window)
                        for c in conds)
        parts = [r.verdict for r in reports]
        if f.is_domain:
            row_pairing = _row_pairing_verdict(a, f, n, tol, window, row_bound)
            parts.append(row_pairing["verdict"])
        conditions_verdict = conjoin(parts)

    oracle = None
    if route in ("oracle", "both"):
        oracle = oracle_check(a, f, t, n=n, tol=tol, window=window, seed=seed)

    verdict = oracle.verdict if route == "oracle" else conditions_verdict
    return ClassReport(
        matrix=a.describe(),
        from_space=str(f),
        to_space=str(t),
        conditions_required=conds,
        verdict=verdict,
        route=route,
        n=n,
        tol=tol,
        window=window,
        condition_reports=reports,
        conditions_verdict=conditions_verdict,
        transfer=transfer_desc,
        row_pairing=_jsonable(row_pairing) if row_pairing else None,
        oracle=oracle,
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------------
# Regularity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegularityReport:
    """Limit-preservation probe: bounded rows, vanishing columns, and row sums
    tending to one.  A matrix satisfying all three maps convergent sequences
    to sequences converging to the same limit."""

    verdict: Verdict
    bounded_rows: ConditionReport
    null_columns: ConditionReport
    row_sum_verdict: Verdict
    row_sum_limit: Optional[float]
    n: int
    tol: float
    window: int

    def to_dict(self) -> dict:
        return {
            "verdict": str(self.verdict),
            "bounded_rows": self.bounded_rows.to_dict(),
            "null_columns": self.null_columns.to_dict(),
            "row_sums": {
                "verdict": str(self.row_sum_verdict),
                "limit": self.row_sum_limit,
                "target": 1.0,
            },
            "n": self.n,
            "tol": self.tol,
            "window": self.window,
        }


def regularity_report(a, n: int = 2000, tol: float = CLASS_TOL,
                      window: Optional[int] = None) -> RegularityReport:
    """Evaluate the limit-preservation triple at a truncation.

    Nothing is assumed: all three parts are measured, including for matrices
    whose regularity is textbook knowledge.
    """
    a = matrix_from_spec(a)
    if window is None:
        window = _class_window(n)
    c1 = condition_report(a, "bounded-rows", n, tol, window)
    c5 = condition_report(a, "null-columns", n, tol, window)
    idx, vals = condition_trace(a, "row-sum", n, window)
    lv = analyze_limit(idx, vals, tol, window)
    if lv.kind is LimitKind.CONVERGES:
        limit = float(lv.value)
        gap = abs(limit - 1.0)
        if gap <= max(tol, 4 * (lv.tail_spread + abs(lv.trend_slope))):
            if gap <= tol:
                rows_v = Verdict.SATISFIED
            else:
                rows_v = Verdict.INCONCLUSIVE
        else:
            rows_v = Verdict.VIOLATED
    elif lv.kind is LimitKind.INCONCLUSIVE:
        limit, rows_v = None, Verdict.INCONCLUSIVE
    else:
        limit, rows_v = None, Verdict.VIOLATED
    overall = conjoin([c1.verdict, c5.verdict, rows_v])
    return RegularityReport(
        verdict=overall, bounded_rows=c1, null_columns=c5,
        row_sum_verdict=rows_v, row_sum_limit=limit,
        n=n, tol=tol, window=window,
    )
