"""Infinite matrices acting on sequences, with lazy exact entries.

The package works with infinite real matrices ``A = (a_nk)`` (rows ``n`` and
columns ``k`` both 1-based).  A matrix here is a rule for entries plus support
hints (where a row/column can be nonzero), so transforms, compositions and
inversions only touch entries that matter.

Built-in families:

* ``identity``, ``zero``
* ``omega`` — running sums weighted by the index, ``a_nk = k`` for ``k <= n``
* ``gamma`` — running sums weighted by the reciprocal index, ``a_nk = 1/k``
* ``omega-inv`` / ``gamma-inv`` — their bidiagonal inverses
* ``cesaro`` — arithmetic means, ``a_nk = 1/n`` for ``k <= n``
* ``euler:r`` — binomial means of order ``r`` in (0, 1)
* ``riesz:<weights>`` — weighted means ``t_k / (t_1 + ... + t_n)``
* ``taylor:r`` — the row-infinite upper-triangular geometric means

Entries are exact (``int``/``Fraction``) whenever the defining parameters are
rational; float fast paths are available for large truncations.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import accumulate
from typing import Optional

import numpy as np

from .errors import (
    RowSeriesError,
    SpecError,
    TruncationError,
    ZeroDiagonalError,
)
from .sequences import (
    FiniteVector,
    Scalar,
    Sequence,
    exact_number,
    finite_vector,
    make_sequence,
)

#: Largest truncation kept as a dense cached float array.
DENSE_LIMIT = 2400


def _check_index(n: int, k: int) -> None:
    if n < 1 or k < 1:
        raise IndexError(f"matrix indices must be >= 1, got ({n}, {k})")


class InfiniteMatrix:
    """Base class: entry rule + support hints + cached float truncations."""

    def __init__(self, name: str, params: Optional[dict] = None,
                 triangle: bool = False):
        self.name = name
        self.params = dict(params or {})
        self.triangle = triangle
        self._float_cache: dict[int, np.ndarray] = {}

    # -- entry rule -------------------------------------------------------

    def entry(self, n: int, k: int) -> Scalar:
        raise NotImplementedError

    # -- support hints ----------------------------------------------------

    def row_start(self, n: int) -> int:
        return 1

    def row_end(self, n: int) -> Optional[int]:
        """Last column that can be nonzero in row n; None means unbounded."""
        return n if self.triangle else None

    def col_start(self, k: int) -> int:
        return k if self.triangle else 1

    def col_end(self, k: int) -> Optional[int]:
        return None

    # -- float paths ------------------------------------------------------

    def row_floats(self, n: int, m: int) -> np.ndarray:
        """Entries ``a_{n,1..m}`` as floats (zeros outside support)."""
        out = np.zeros(m)
        hi = self.row_end(n)
        hi = m if hi is None else min(hi, m)
        for k in range(self.row_start(n), hi + 1):
            out[k - 1] = float(self.entry(n, k))
        return out

    def col_floats(self, k: int, rows: np.ndarray) -> np.ndarray:
        """Entries ``a_{n,k}`` as floats for the given 1-based rows."""
        return np.array([float(self.entry(int(n), k)) for n in rows], dtype=float)

    def _build_truncation_floats(self, size: int) -> np.ndarray:
        return np.vstack([self.row_floats(n, size) for n in range(1, size + 1)])

    def truncation_floats(self, size: int) -> np.ndarray:
        """The leading size-by-size window as a cached float array."""
        if size < 1:
            raise TruncationError(f"truncation size must be >= 1, got {size}")
        if size > DENSE_LIMIT:
            raise TruncationError(
                f"dense float truncation capped at {DENSE_LIMIT}; "
                f"use row_floats/col_floats for size {size}")
        got = self._float_cache.get(size)
        if got is None:
            got = self._build_truncation_floats(size)
            got.setflags(write=False)
            self._float_cache[size] = got
        return got

    # -- optional fast transforms ------------------------------------------

    def _apply_floats(self, xf: np.ndarray) -> Optional[np.ndarray]:
        """(Ax)_{1..len(xf)} when a vectorized form exists, else None."""
        return None

    def _apply_exact(self, xs: list) -> Optional[list]:
        """Exact (Ax)_{1..len(xs)} when a linear-time form exists, else None."""
        return None

    # -- misc ---------------------------------------------------------------

    def describe(self) -> dict:
        out = {"name": self.name}
        if self.params:
            out["params"] = {key: str(val) for key, val in sorted(self.params.items())}
        return out

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"<{type(self).__name__} {self.name}{'(' + inner + ')' if inner else ''}>"


# ---------------------------------------------------------------------------
# Builtin families
# ---------------------------------------------------------------------------


class Identity(InfiniteMatrix):
    def __init__(self):
        super().__init__("identity", triangle=True)

    def entry(self, n, k):
        _check_index(n, k)
        return 1 if n == k else 0

    def row_start(self, n):
        return n

    def col_end(self, k):
        return k

    def row_floats(self, n, m):
        out = np.zeros(m)
        if n <= m:
            out[n - 1] = 1.0
        return out

    def col_floats(self, k, rows):
        return (np.asarray(rows) == k).astype(float)

    def _build_truncation_floats(self, size):
        return np.eye(size)

    def _apply_floats(self, xf):
        return xf.copy()

    def _apply_exact(self, xs):
        return list(xs)


class ZeroMatrix(InfiniteMatrix):
    def __init__(self):
        super().__init__("zero", triangle=False)

    def entry(self, n, k):
        _check_index(n, k)
        return 0

    def row_end(self, n):
        return 0

    def col_start(self, k):
        return 1

    def col_end(self, k):
        return 0

    def row_floats(self, n, m):
        return np.zeros(m)

    def col_floats(self, k, rows):
        return np.zeros(len(rows))

    def _build_truncation_floats(self, size):
        return np.zeros((size, size))

    def _apply_floats(self, xf):
        return np.zeros_like(xf)

    def _apply_exact(self, xs):
        return [0] * len(xs)


class WeightedSums(InfiniteMatrix):
    """Lower triangle ``a_nk = w_k`` for ``k <= n``: running weighted sums."""

    def __init__(self, weights: Sequence, name: str):
        super().__init__(name, triangle=True)
        self.weights = weights
        self._wf = np.empty(0)

    def _weights_floats(self, m: int) -> np.ndarray:
        if len(self._wf) < m:
            extra = [float(self.weights(k)) for k in range(len(self._wf) + 1, m + 1)]
            self._wf = np.concatenate([self._wf, np.array(extra, dtype=float)])
        return self._wf[:m]

    def entry(self, n, k):
        _check_index(n, k)
        return self.weights(k) if k <= n else 0

    def row_floats(self, n, m):
        w = self._weights_floats(m)
        if n >= m:
            return w.copy()
        out = np.zeros(m)
        out[:n] = w[:n]
        return out

    def col_floats(self, k, rows):
        wk = float(self.weights(k))
        return np.where(np.asarray(rows) >= k, wk, 0.0)

    def _build_truncation_floats(self, size):
        return np.tril(np.broadcast_to(self._weights_floats(size), (size, size)))

    def _apply_floats(self, xf):
        return np.cumsum(self._weights_floats(len(xf)) * xf)

    def _apply_exact(self, xs):
        return list(accumulate(self.weights(k + 1) * x for k, x in enumerate(xs)))


class Bidiagonal(InfiniteMatrix):
    """``a_nn = d(n)``, ``a_{n,n-1} = s(n)``, zero elsewhere."""

    def __init__(self, diag, sub, name: str):
        super().__init__(name, triangle=True)
        self.diag = diag
        self.sub = sub

    def entry(self, n, k):
        _check_index(n, k)
        if k == n:
            return self.diag(n)
        if k == n - 1:
            return self.sub(n)
        return 0

    def row_start(self, n):
        return max(1, n - 1)

    def col_end(self, k):
        return k + 1

    def row_floats(self, n, m):
        out = np.zeros(m)
        if n <= m:
            out[n - 1] = float(self.diag(n))
        if 2 <= n and n - 1 <= m:
            out[n - 2] = float(self.sub(n))
        return out

    def col_floats(self, k, rows):
        rows = np.asarray(rows)
        out = np.zeros(len(rows), dtype=float)
        out[rows == k] = float(self.diag(k))
        out[rows == k + 1] = float(self.sub(k + 1))
        return out

    def _build_truncation_floats(self, size):
        d = np.array([float(self.diag(n)) for n in range(1, size + 1)])
        out = np.diag(d)
        if size > 1:
            s = np.array([float(self.sub(n)) for n in range(2, size + 1)])
            out[np.arange(1, size), np.arange(size - 1)] = s
        return out

    def _apply_floats(self, xf):
        out = np.array([float(self.diag(n)) for n in range(1, len(xf) + 1)]) * xf
        if len(xf) > 1:
            subs = np.array([float(self.sub(n)) for n in range(2, len(xf) + 1)])
            out[1:] += subs * xf[:-1]
        return out

    def _apply_exact(self, xs):
        out = [self.diag(1) * xs[0]] if xs else []
        for n in range(2, len(xs) + 1):
            out.append(self.diag(n) * xs[n - 1] + self.sub(n) * xs[n - 2])
        return out


class CesaroMeans(InfiniteMatrix):
    """Arithmetic means: ``a_nk = 1/n`` for ``k <= n``."""

    def __init__(self):
        super().__init__("cesaro", triangle=True)

    def entry(self, n, k):
        _check_index(n, k)
        return Fraction(1, n) if k <= n else 0

    def row_floats(self, n, m):
        out = np.zeros(m)
        out[:min(n, m)] = 1.0 / n
        return out

    def col_floats(self, k, rows):
        rows = np.asarray(rows, dtype=float)
        return np.where(rows >= k, 1.0 / rows, 0.0)

    def _build_truncation_floats(self, size):
        inv_n = 1.0 / np.arange(1, size + 1)
        return np.tril(np.broadcast_to(inv_n[:, None], (size, size)))

    def _apply_floats(self, xf):
        return np.cumsum(xf) / np.arange(1, len(xf) + 1)

    def _apply_exact(self, xs):
        return [s / Fraction(n) if isinstance(s, (int, Fraction)) else s / n
                for n, s in enumerate(accumulate(xs), start=1)]


class RieszMeans(InfiniteMatrix):
    """Weighted means: ``a_nk = t_k / (t_1 + ... + t_n)`` for ``k <= n``.

    Weights must be positive.  With unit weights this coincides entrywise with
    the arithmetic-mean triangle (kept as a separate construction on purpose —
    the agreement is a test target, not an implementation shortcut).
    """

    def __init__(self, weights: Sequence, name: str = "riesz"):
        super().__init__(name, params={"weights": weights.label}, triangle=True)
        self.weights = weights
        self._t: list = []       # exact weights, 1-based via offset
        self._T: list = [0]      # exact partial sums, _T[n] = t_1 + ... + t_n

    def _ensure(self, n: int) -> None:
        while len(self._t) < n:
            k = len(self._t) + 1
            tk = self.weights(k)
            if not tk > 0:
                raise SpecError(f"riesz weights must be positive, got t_{k} = {tk}")
            self._t.append(tk)
            self._T.append(self._T[-1] + tk)

    def weight(self, k: int) -> Scalar:
        self._ensure(k)
        return self._t[k - 1]

    def partial_sum(self, n: int) -> Scalar:
        self._ensure(n)
        return self._T[n]

    def entry(self, n, k):
        _check_index(n, k)
        if k > n:
            return 0
        self._ensure(n)
        num, den = self._t[k - 1], self._T[n]
        if isinstance(num, (int, Fraction)) and isinstance(den, (int, Fraction)):
            return Fraction(num) / Fraction(den)
        return num / den

    def _tf(self, m: int):
        self._ensure(m)
        t = np.array([float(v) for v in self._t[:m]])
        big_t = np.array([float(v) for v in self._T[1:m + 1]])
        return t, big_t

    def row_floats(self, n, m):
        t, big_t = self._tf(max(n, m))
        out = np.zeros(m)
        out[:min(n, m)] = t[:min(n, m)] / big_t[n - 1]
        return out

    def col_floats(self, k, rows):
        rows = np.asarray(rows)
        t, big_t = self._tf(int(rows.max()))
        vals = t[k - 1] / big_t[rows - 1]
        return np.where(rows >= k, vals, 0.0)

    def _build_truncation_floats(self, size):
        t, big_t = self._tf(size)
        return np.tril(t[None, :] / big_t[:, None])

    def _apply_floats(self, xf):
        t, big_t = self._tf(len(xf))
        return np.cumsum(t * xf) / big_t

    def _apply_exact(self, xs):
        self._ensure(len(xs))
        sums = accumulate(self._t[i] * x for i, x in enumerate(xs))
        out = []
        for n, s in enumerate(sums, start=1):
            den = self._T[n]
            if isinstance(s, (int, Fraction)) and isinstance(den, (int, Fraction)):
                out.append(Fraction(s) / Fraction(den))
            else:
                out.append(s / den)
        return out


class EulerMeans(InfiniteMatrix):
    """Binomial means of order r in (0, 1):
    ``a_nk = C(n-1, k-1) (1-r)^(n-k) r^(k-1)`` for ``k <= n`` (rows sum to 1).
    """

    def __init__(self, r):
        r = exact_number(r)
        if not (0 < r < 1):
            raise SpecError(f"euler parameter must lie in (0, 1), got {r}")
        super().__init__("euler", params={"r": r}, triangle=True)
        self.r = r
        self._lf = np.zeros(1)  # log-factorials, _lf[i] = log(i!)

    def _logfact(self, m: int) -> np.ndarray:
        if len(self._lf) < m + 1:
            lo = len(self._lf)
            ext = np.log(np.arange(lo, m + 1, dtype=float))
            self._lf = np.concatenate([self._lf, self._lf[-1] + np.cumsum(ext)])
        return self._lf

    def entry(self, n, k):
        _check_index(n, k)
        if k > n:
            return 0
        r = self.r
        return math.comb(n - 1, k - 1) * (1 - r) ** (n - k) * r ** (k - 1)

    def row_floats(self, n, m):
        lf = self._logfact(n)
        lo = min(n, m)
        k = np.arange(1, lo + 1)
        logs = (lf[n - 1] - lf[k - 1] - lf[n - k]
                + (n - k) * math.log(1 - float(self.r))
                + (k - 1) * math.log(float(self.r)))
        out = np.zeros(m)
        out[:lo] = np.exp(logs)
        return out

    def col_floats(self, k, rows):
        rows = np.asarray(rows)
        lf = self._logfact(int(rows.max()))
        safe = rows >= k
        nn = np.where(safe, rows, k)
        logs = (lf[nn - 1] - lf[k - 1] - lf[nn - k]
                + (nn - k) * math.log(1 - float(self.r))
                + (k - 1) * math.log(float(self.r)))
        return np.where(safe, np.exp(logs), 0.0)

    def _build_truncation_floats(self, size):
        lf = self._logfact(size)
        n = np.arange(1, size + 1)[:, None].astype(int)
        k = np.arange(1, size + 1)[None, :].astype(int)
        mask = k <= n
        kk = np.where(mask, k, 1)
        logs = (lf[n - 1] - lf[kk - 1] - lf[np.where(mask, n - kk, 0)]
                + (n - kk) * math.log(1 - float(self.r))
                + (kk - 1) * math.log(float(self.r)))
        return np.exp(np.where(mask, logs, -np.inf))


class TaylorTransform(InfiniteMatrix):
    """Row-infinite upper triangle:
    ``a_nk = C(k-1, n-1) (1-r)^n r^(k-n)`` for ``k >= n``, with r in (0, 1).

    Each row is a probability mass over ``k >= n`` (rows sum to 1), so row
    evaluations use a mass-based cutoff.
    """

    def __init__(self, r):
        r = exact_number(r)
        if not (0 < r < 1):
            raise SpecError(f"taylor parameter must lie in (0, 1), got {r}")
        super().__init__("taylor", params={"r": r}, triangle=False)
        self.r = r

    def entry(self, n, k):
        _check_index(n, k)
        if k < n:
            return 0
        r = self.r
        return math.comb(k - 1, n - 1) * (1 - r) ** n * r ** (k - n)

    def row_start(self, n):
        return n

    def row_end(self, n):
        return None

    def col_start(self, k):
        return 1

    def col_end(self, k):
        return k

    def row_cutoff(self, n: int, tail_mass: float = 1e-16) -> int:
        """Smallest K with the row mass beyond K at most ``tail_mass``."""
        r = float(self.r)
        c = (1 - r) ** n        # coefficient at k = n
        cum = c
        k = n
        while 1.0 - cum > tail_mass and k < n + 200000:
            c *= r * k / (k - n + 1)
            k += 1
            cum += c
        return k

    def row_floats(self, n, m):
        out = np.zeros(m)
        if m >= n:
            r = float(self.r)
            c = (1 - r) ** n
            vals = [c]
            for k in range(n, m):
                c *= r * k / (k - n + 1)
                vals.append(c)
            out[n - 1:] = vals
        return out

    def col_floats(self, k, rows):
        rows = np.asarray(rows)
        vals = np.array([float(self.entry(int(n), k)) if n <= k else 0.0
                         for n in rows])
        return vals


# ---------------------------------------------------------------------------
# Wrappers: explicit rules, dense data, composition, inversion
# ---------------------------------------------------------------------------


class RuleMatrix(InfiniteMatrix):
    """Matrix from an explicit entry rule with declared support hints."""

    def __init__(self, rule, name: str = "rule", triangle: bool = False,
                 row_span=None, col_span=None):
        super().__init__(name, triangle=triangle)
        self._rule = rule
        self._row_span = row_span
        self._col_span = col_span

    def entry(self, n, k):
        _check_index(n, k)
        if self.triangle and k > n:
            return 0
        return self._rule(n, k)

    def row_start(self, n):
        return self._row_span(n)[0] if self._row_span else 1

    def row_end(self, n):
        if self._row_span:
            return self._row_span(n)[1]
        return n if self.triangle else None

    def col_start(self, k):
        if self._col_span:
            return self._col_span(k)[0]
        return k if self.triangle else 1

    def col_end(self, k):
        return self._col_span(k)[1] if self._col_span else None


class DenseMatrix(InfiniteMatrix):
    """A finite table of entries, zero outside it.  Mostly for tests."""

    def __init__(self, table, name: str = "dense"):
        rows = [list(r) for r in table]
        width = max((len(r) for r in rows), default=0)
        self._table = [r + [0] * (width - len(r)) for r in rows]
        self._width = width
        super().__init__(name, triangle=False)

    def entry(self, n, k):
        _check_index(n, k)
        if n <= len(self._table) and k <= self._width:
            return self._table[n - 1][k - 1]
        return 0

    def row_end(self, n):
        return self._width if n <= len(self._table) else 0

    def col_end(self, k):
        return len(self._table) if k <= self._width else 0


class ComposedMatrix(InfiniteMatrix):
    """Lazy product (AB)_nk = sum_j a_nj b_jk using support hints."""

    def __init__(self, left: InfiniteMatrix, right: InfiniteMatrix):
        super().__init__(f"{left.name}*{right.name}",
                         triangle=left.triangle and right.triangle)
        self.left = left
        self.right = right

    def entry(self, n, k):
        _check_index(n, k)
        lo = max(self.left.row_start(n), self.right.col_start(k))
        ends = [e for e in (self.left.row_end(n), self.right.col_end(k))
                if e is not None]
        if not ends:
            raise RowSeriesError(
                f"cannot compose {self.left.name} and {self.right.name}: "
                f"the inner sum at ({n}, {k}) has unbounded support")
        hi = min(ends)
        total = 0
        for j in range(lo, hi + 1):
            a = self.left.entry(n, j)
            if a == 0:
                continue
            b = self.right.entry(j, k)
            if b == 0:
                continue
            total += a * b
        return total

    def row_end(self, n):
        if self.triangle:
            return n
        le = self.left.row_end(n)
        if le is None:
            return None
        ends = [self.right.row_end(j) for j in range(self.left.row_start(n), le + 1)]
        if any(e is None for e in ends):
            return None
        return max(ends, default=0)

    def _build_truncation_floats(self, size):
        # Exact inside the window when the left factor is row-finite within it
        # (true for triangles); otherwise a leading-window approximation.
        return self.left.truncation_floats(size) @ self.right.truncation_floats(size)


def compose(left, right) -> ComposedMatrix:
    """The matrix product ``left @ right`` as a lazy matrix."""
    return ComposedMatrix(matrix_from_spec(left), matrix_from_spec(right))


class InverseTriangle(InfiniteMatrix):
    """Inverse of a lower triangle via forward substitution, memoized by column."""

    def __init__(self, base: InfiniteMatrix):
        if not base.triangle:
            raise SpecError(f"matrix {base.name!r} is not a lower triangle; "
                            "only triangles are inverted here")
        super().__init__(f"{base.name}-inverse", triangle=True)
        self.base = base
        self._cols: dict[int, list] = {}

    def _column(self, k: int, n: int) -> list:
        """Entries b_{k,k} .. b_{n,k} of column k (list index i -> row k+i)."""
        col = self._cols.get(k)
        if col is None:
            diag = self.base.entry(k, k)
            if diag == 0:
                raise ZeroDiagonalError(k)
            col = [_exact_div(1, diag)]
            self._cols[k] = col
        while len(col) < n - k + 1:
            m = k + len(col)            # next row to fill
            diag = self.base.entry(m, m)
            if diag == 0:
                raise ZeroDiagonalError(m)
            total = 0
            lo = max(self.base.row_start(m), k)
            for j in range(lo, m):
                a = self.base.entry(m, j)
                if a == 0 or j - k >= len(col):
                    continue
                total += a * col[j - k]
            col.append(_exact_div(-total, diag))
        return col

    def entry(self, n, k):
        _check_index(n, k)
        if k > n:
            return 0
        return self._column(k, n)[n - k]


def _exact_div(num, den):
    if isinstance(num, (int, Fraction)) and isinstance(den, (int, Fraction)):
        return Fraction(num, den) if isinstance(num, int) and isinstance(den, int) \
            else Fraction(num) / Fraction(den)
    return num / den


def invert_triangle(a) -> InfiniteMatrix:
    """Inverse of a lower triangle (forward substitution, lazily memoized)."""
    return InverseTriangle(matrix_from_spec(a))


# ---------------------------------------------------------------------------
# Builtin registry, known inverse pairs, spec parsing
# ---------------------------------------------------------------------------


def omega_matrix() -> WeightedSums:
    return WeightedSums(Sequence(lambda k: k, label="index"), "omega")


def gamma_matrix() -> WeightedSums:
    return WeightedSums(Sequence(lambda k: Fraction(1, k), label="1/index"), "gamma")


def omega_inverse_matrix() -> Bidiagonal:
    return Bidiagonal(lambda n: Fraction(1, n), lambda n: Fraction(-1, n), "omega-inv")


def gamma_inverse_matrix() -> Bidiagonal:
    return Bidiagonal(lambda n: n, lambda n: -n, "gamma-inv")


def cesaro_inverse_matrix() -> Bidiagonal:
    return Bidiagonal(lambda n: n, lambda n: -(n - 1), "cesaro-inv")


_PARAMETERLESS = {
    "identity": Identity,
    "zero": ZeroMatrix,
    "omega": omega_matrix,
    "gamma": gamma_matrix,
    "omega-inv": omega_inverse_matrix,
    "gamma-inv": gamma_inverse_matrix,
    "cesaro": CesaroMeans,
    "cesaro-inv": cesaro_inverse_matrix,
}

_SPEC_CACHE: dict[str, InfiniteMatrix] = {}


def matrix_from_spec(spec) -> InfiniteMatrix:
    """Resolve a matrix spec: an instance, a name string, or a dict.

    String forms: ``"omega"``, ``"gamma"``, ``"omega-inv"``, ``"gamma-inv"``,
    ``"identity"``, ``"zero"``, ``"cesaro"``, ``"euler:0.5"``,
    ``"taylor:0.5"``, ``"riesz:<sequence shorthand>"`` (e.g. ``riesz:const:1``).
    Dict forms use ``{"kind": name, ...params}``.  Parameterless names and
    string forms are cached, so repeated lookups share float caches.
    """
    if isinstance(spec, InfiniteMatrix):
        return spec
    if isinstance(spec, str):
        key = spec.strip().lower().replace("_", "-")
        got = _SPEC_CACHE.get(key)
        if got is not None:
            return got
        head, _, rest = key.partition(":")
        if head in _PARAMETERLESS:
            if rest:
                raise SpecError(f"matrix {head!r} takes no parameter")
            made = _PARAMETERLESS[head]()
        elif head == "euler":
            made = EulerMeans(exact_number(rest or "1/2"))
        elif head == "taylor":
            made = TaylorTransform(exact_number(rest or "1/2"))
        elif head == "riesz":
            made = RieszMeans(make_sequence(rest) if rest
                              else make_sequence("const:1"))
        else:
            raise SpecError(f"unknown matrix {spec!r}")
        _SPEC_CACHE[key] = made
        return made
    if isinstance(spec, dict):
        kind = str(spec.get("kind", "")).strip().lower().replace("_", "-")
        if kind in _PARAMETERLESS:
            return matrix_from_spec(kind)
        if kind == "euler":
            return EulerMeans(exact_number(spec.get("r", "1/2")))
        if kind == "taylor":
            return TaylorTransform(exact_number(spec.get("r", "1/2")))
        if kind == "riesz":
            return RieszMeans(make_sequence(spec.get("weights", "const:1")))
        raise SpecError(f"unknown matrix kind {spec.get('kind')!r}")
    raise SpecError(f"cannot build a matrix from {type(spec).__name__}")


_INVERSE_NAMES = {
    "omega": "omega-inv",
    "omega-inv": "omega",
    "gamma": "gamma-inv",
    "gamma-inv": "gamma",
    "identity": "identity",
    "cesaro": "cesaro-inv",
}


def inverse_of(a) -> InfiniteMatrix:
    """Inverse of a triangle, using the closed-form partner when one is known.

    Builtin pairs (omega/omega-inv, gamma/gamma-inv, cesaro, identity, riesz)
    resolve to explicit bidiagonal or weighted-sum matrices; anything else
    falls back to :func:`invert_triangle`.
    """
    a = matrix_from_spec(a)
    partner = _INVERSE_NAMES.get(a.name)
    if partner is not None:
        return matrix_from_spec(partner)
    if isinstance(a, RieszMeans):
        def diag(n, a=a):
            return _exact_div(a.partial_sum(n), a.weight(n))

        def sub(n, a=a):
            return _exact_div(-a.partial_sum(n - 1), a.weight(n))

        return Bidiagonal(diag, sub, f"{a.name}-inverse")
    return invert_triangle(a)


# ---------------------------------------------------------------------------
# Transforms and truncations
# ---------------------------------------------------------------------------


def apply(a, x, n: int, mode: str = "exact",
          tail_mass: float = 1e-16) -> FiniteVector:
    """First ``n`` coordinates of the transform ``Ax``.

    ``mode="exact"`` keeps rational arithmetic and requires row-finite support
    (any triangle qualifies).  ``mode="float"`` uses the vectorized fast paths.
    For row-infinite matrices with a mass cutoff (``taylor``), the float path
    extends each row until the dropped tail mass is below ``tail_mass``.
    """
    a = matrix_from_spec(a)
    x = make_sequence(x)
    if n < 1:
        raise TruncationError(f"transform length must be >= 1, got {n}")
    if mode not in ("exact", "float"):
        raise SpecError(f"unknown mode {mode!r}")

    row_infinite = a.row_end(n) is None
    if mode == "exact":
        if row_infinite:
            raise RowSeriesError(
                f"matrix {a.name!r} has rows with unbounded support; "
                "exact transforms are undefined at a finite cutoff — use float mode")
        fast = a._apply_exact([x(k) for k in range(1, n + 1)])
        if fast is not None:
            return finite_vector(fast, origin=f"{a.name}({x.label})")
        out = []
        for row in range(1, n + 1):
            hi = a.row_end(row)
            total = 0
            for k in range(a.row_start(row), hi + 1):
                coeff = a.entry(row, k)
                if coeff != 0:
                    total += coeff * x(k)
            out.append(total)
        return finite_vector(out, origin=f"{a.name}({x.label})")

    # float mode
    if row_infinite:
        cutoff_fn = getattr(a, "row_cutoff", None)
        if cutoff_fn is None:
            raise RowSeriesError(
                f"matrix {a.name!r} has rows with unbounded support and no "
                "tail cutoff; cannot transform")
        top = cutoff_fn(n, tail_mass)
        xf = np.array([float(x(k)) for k in range(1, top + 1)])
        out = np.empty(n)
        for row in range(1, n + 1):
            hi = cutoff_fn(row, tail_mass)
            coeffs = a.row_floats(row, hi)
            out[row - 1] = coeffs[:min(hi, top)] @ xf[:min(hi, top)]
        return finite_vector(out.tolist(), origin=f"{a.name}({x.label})")

    xf = np.array([float(x(k)) for k in range(1, n + 1)])
    fast = a._apply_floats(xf)
    if fast is not None:
        return finite_vector(fast.tolist(), origin=f"{a.name}({x.label})")
    if n <= DENSE_LIMIT:
        out = a.truncation_floats(n) @ xf
    else:
        out = np.empty(n)
        for row in range(1, n + 1):
            coeffs = a.row_floats(row, n)
            out[row - 1] = coeffs @ xf
    return finite_vector(out.tolist(), origin=f"{a.name}({x.label})")


def truncate_matrix(a, size: int, mode: str = "exact"):
    """Leading ``size``-by-``size`` window.

    ``mode="exact"`` returns nested lists of exact scalars; ``mode="float"``
    returns a (read-only, cached) numpy array.
    """
    a = matrix_from_spec(a)
    if size < 1:
        raise TruncationError(f"truncation size must be >= 1, got {size}")
    if mode == "float":
        return a.truncation_floats(size)
    if mode != "exact":
        raise SpecError(f"unknown mode {mode!r}")
    out = []
    for n in range(1, size + 1):
        hi = a.row_end(n)
        hi = size if hi is None else min(hi, size)
        row = [0] * size
        for k in range(a.row_start(n), hi + 1):
            row[k - 1] = a.entry(n, k)
        out.append(row)
    return out


def row_sum_floats(a: InfiniteMatrix, n: int, width: Optional[int] = None) -> float:
    """Signed row sum of row ``n`` over columns up to ``width`` (or row end)."""
    hi = a.row_end(n)
    if hi is None:
        hi = width if width is not None else _infinite_row_end(a, n)
    elif width is not None:
        hi = min(hi, width)
    if hi < a.row_start(n):
        return 0.0
    return float(a.row_floats(n, hi).sum())


def row_abs_sum_floats(a: InfiniteMatrix, n: int, width: Optional[int] = None) -> float:
    """Absolute row sum of row ``n`` over columns up to ``width`` (or row end)."""
    hi = a.row_end(n)
    if hi is None:
        hi = width if width is not None else _infinite_row_end(a, n)
    elif width is not None:
        hi = min(hi, width)
    if hi < a.row_start(n):
        return 0.0
    return float(np.abs(a.row_floats(n, hi)).sum())


def _infinite_row_end(a: InfiniteMatrix, n: int) -> int:
    cutoff_fn = getattr(a, "row_cutoff", None)
    if cutoff_fn is None:
        raise RowSeriesError(
            f"matrix {a.name!r} has rows with unbounded support and no tail cutoff")
    return cutoff_fn(n)
