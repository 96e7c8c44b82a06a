"""Matrix domains of classical sequence spaces.

For a lower triangle ``A`` and a classical space ``X`` (one of c0, c, linf),
the domain is the set of sequences ``x`` whose transform ``Ax`` lands in
``X``.  The natural norm is ``sup_n |(Ax)_n|``, the coordinate map is
``x <-> Ax``, and the canonical basis elements are the columns of the inverse
triangle.  Everything here is evaluated honestly at a finite truncation:
norms and membership verdicts carry the truncation they were computed at.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .errors import PreconditionError, SpecError
from .matrices import (
    InfiniteMatrix,
    apply,
    inverse_of,
    matrix_from_spec,
)
from .sequences import (
    FiniteVector,
    Scalar,
    Sequence,
    SpaceId,
    analyze_limit,
    analyze_sup,
    classify_values,
    default_window,
    make_sequence,
    null_limit_verdict,
)
from .verdicts import Verdict

CLASSICAL_SPACES = ("c0", "c", "linf", "bs", "cs")
DOMAIN_BASE_TAGS = ("c0", "c", "linf")


def space_from_spec(spec) -> SpaceId:
    """Resolve a space spec.

    String forms: ``"c0"``, ``"c"``, ``"linf"``, ``"bs"``, ``"cs"`` and
    domain forms like ``"c0(omega)"``, ``"c(gamma)"``, ``"linf(omega)"``.
    Dict form: ``{"tag": "c0", "matrix": <matrix spec>}``.
    """
    if isinstance(spec, SpaceId):
        return spec
    if isinstance(spec, str):
        text = spec.strip().lower()
        if "(" in text:
            if not text.endswith(")"):
                raise SpecError(f"malformed space spec {spec!r}")
            tag, inner = text[:-1].split("(", 1)
            tag = tag.strip()
            if tag not in DOMAIN_BASE_TAGS:
                raise SpecError(
                    f"matrix domains are built over {'/'.join(DOMAIN_BASE_TAGS)}, "
                    f"got {tag!r}")
            matrix = matrix_from_spec(inner.strip())
            if not matrix.triangle:
                raise SpecError(
                    f"domain spaces need a lower triangle, got {matrix.name!r}")
            return SpaceId(tag, matrix)
        if text not in CLASSICAL_SPACES:
            raise SpecError(f"unknown space {spec!r}")
        return SpaceId(text)
    if isinstance(spec, dict):
        tag = str(spec.get("tag", "")).strip().lower()
        if "matrix" in spec and spec["matrix"] is not None:
            matrix = matrix_from_spec(spec["matrix"])
            if not matrix.triangle:
                raise SpecError(
                    f"domain spaces need a lower triangle, got {matrix.name!r}")
            return SpaceId(tag, matrix)
        return SpaceId(tag)
    raise SpecError(f"cannot build a space from {type(spec).__name__}")


# ---------------------------------------------------------------------------
# Coordinates and norms
# ---------------------------------------------------------------------------


def domain_image(space_or_matrix, x, n: int, mode: str = "exact") -> FiniteVector:
    """Coordinates of ``x`` under the domain's triangle: the first ``n``
    entries of ``Ax``.  Accepts a domain space, a matrix, or their specs."""
    a = _resolve_triangle(space_or_matrix)
    return apply(a, x, n, mode=mode)


def domain_preimage(space_or_matrix, y, n: int, mode: str = "exact") -> FiniteVector:
    """First ``n`` entries of the unique ``x`` with ``Ax = y``."""
    a = _resolve_triangle(space_or_matrix)
    return apply(inverse_of(a), y, n, mode=mode)


def preimage_sequence(space_or_matrix, y) -> Sequence:
    """The preimage as a lazy sequence: ``x_k`` computed on demand."""
    a = _resolve_triangle(space_or_matrix)
    inv = inverse_of(a)
    y = make_sequence(y)

    def rule(k: int) -> Scalar:
        total = 0
        hi = inv.row_end(k)
        for j in range(inv.row_start(k), (k if hi is None else hi) + 1):
            coeff = inv.entry(k, j)
            if coeff != 0:
                total += coeff * y(j)
        return total

    return Sequence(rule, label=f"{a.name}-preimage({y.label})")


def geometric_domain_element(r="1/2") -> Sequence:
    """The element of the omega domain whose image is the geometric sequence
    ``(r^k)``: explicitly ``x_1 = r`` and ``x_k = -r^(k-1)(1-r)/k`` for k >= 2.
    """
    return preimage_sequence("omega", make_sequence(f"geometric:{r}"))


def space_norm(space, x, n: int, mode: str = "exact") -> Scalar:
    """The space's natural sup-norm evaluated on the first ``n`` coordinates.

    c0/c/linf use ``sup |x_k|``; bs/cs use ``sup |x_1 + ... + x_m|``; a domain
    space applies its triangle first.  The value is a lower bound for the true
    norm (the sup runs over the window only).
    """
    space = space_from_spec(space)
    if space.is_domain:
        coords = apply(space.matrix, x, n, mode=mode)
        values = coords.entries
    else:
        vec = x if isinstance(x, FiniteVector) else None
        if vec is None:
            seq = make_sequence(x)
            values = tuple(seq(k) for k in range(1, n + 1))
        else:
            values = vec.entries[:n]
        if space.tag in ("bs", "cs"):
            sums = []
            total = 0
            for v in values:
                total += v
                sums.append(total)
            values = tuple(sums)
    if not values:
        return 0
    return max(abs(v) for v in values)


def space_membership(x, space, n: int, tol: float = 1e-6,
                     window: Optional[int] = None, detail: bool = False):
    """Three-valued membership probe of ``x`` in ``space`` at truncation ``n``."""
    space = space_from_spec(space)
    if window is None:
        window = min(default_window(n), max(1, n - 1))
    if space.is_domain:
        coords = apply(space.matrix, x, n, mode="float")
        if coords.overflow:
            info = {"note": f"transform overflowed at index {coords.overflow_index}"}
            return (Verdict.INCONCLUSIVE, info) if detail else Verdict.INCONCLUSIVE
        return classify_values(coords.as_floats(), space.tag, tol, window,
                               detail=detail)
    seq = make_sequence(x) if not isinstance(x, FiniteVector) else None
    if seq is not None:
        vals = np.array([float(seq(k)) for k in range(1, n + 1)])
    else:
        if x.overflow:
            info = {"note": f"overflow at index {x.overflow_index}"}
            return (Verdict.INCONCLUSIVE, info) if detail else Verdict.INCONCLUSIVE
        vals = x.as_floats()[:n]
    return classify_values(vals, space.tag, tol, window, detail=detail)


def _resolve_triangle(space_or_matrix) -> InfiniteMatrix:
    if isinstance(space_or_matrix, InfiniteMatrix):
        a = space_or_matrix
    elif isinstance(space_or_matrix, SpaceId):
        if not space_or_matrix.is_domain:
            raise SpecError(f"space {space_or_matrix} carries no matrix")
        a = space_or_matrix.matrix
    elif isinstance(space_or_matrix, str) and "(" in space_or_matrix:
        a = space_from_spec(space_or_matrix).matrix
    else:
        a = matrix_from_spec(space_or_matrix)
    if not a.triangle:
        raise SpecError(f"domain constructions need a lower triangle, "
                        f"got {a.name!r}")
    return a


# ---------------------------------------------------------------------------
# Basis elements and expansions
# ---------------------------------------------------------------------------


def basis_element(space_or_matrix, k: int, upto: Optional[int] = None) -> dict:
    """The k-th canonical basis element of the domain: column k of the
    inverse triangle, as a sparse ``{index: value}`` dict of nonzero entries.

    For builtin triangles the inverse column has finite support and is
    returned whole; otherwise entries are reported for rows up to ``upto``.
    """
    if k < 1:
        raise IndexError(f"basis index must be >= 1, got {k}")
    a = _resolve_triangle(space_or_matrix)
    inv = inverse_of(a)
    top = inv.col_end(k)
    if top is None:
        if upto is None:
            raise PreconditionError(
                f"inverse of {a.name!r} has unbounded columns; pass upto=")
        top = upto
    elif upto is not None:
        top = min(top, upto)
    out = {}
    for n in range(inv.col_start(k), top + 1):
        v = inv.entry(n, k)
        if v != 0:
            out[n] = v
    return out


def expansion_coefficients(space_or_matrix, x, m: int,
                           mode: str = "exact") -> FiniteVector:
    """First ``m`` coefficients of ``x`` against the canonical basis (these
    are exactly the coordinates ``(Ax)_1..m``)."""
    return domain_image(space_or_matrix, x, m, mode=mode)


def expansion_partial_vector(space_or_matrix, x, n_terms: int, n: int) -> list:
    """The literal partial sum ``sum_{k<=n_terms} (Ax)_k b^(k)`` evaluated on
    rows 1..n, built from the basis columns themselves (exact arithmetic).

    This is the slow route; it exists so tests can cross-check the identity
    ``A(partial) = (y_1, ..., y_{n_terms}, 0, ...)`` instead of assuming it.
    """
    a = _resolve_triangle(space_or_matrix)
    coeffs = domain_image(a, x, n_terms, mode="exact").entries
    out = [0] * n
    for k in range(1, n_terms + 1):
        for row, val in basis_element(a, k, upto=n).items():
            if row <= n:
                out[row - 1] += coeffs[k - 1] * val
    return out


def expansion_residual(space_or_matrix, x, n_terms: int, n: int,
                       mode: str = "exact") -> Scalar:
    """Domain-norm distance between ``x`` and its ``n_terms``-term basis
    expansion, evaluated at truncation ``n``.

    Because ``A b^(k)`` is the k-th unit sequence, the difference's coordinates
    are ``(0, ..., 0, y_{n_terms+1}, ..., y_n)`` with ``y = Ax``, so the
    residual is the sup of ``|y_m|`` over ``n_terms < m <= n``.
    """
    if n_terms < 0:
        raise PreconditionError(f"n_terms must be >= 0, got {n_terms}")
    y = domain_image(space_or_matrix, x, n, mode=mode)
    tail = y.entries[n_terms:]
    if not tail:
        return 0
    return max(abs(v) for v in tail)


# ---------------------------------------------------------------------------
# Sections
# ---------------------------------------------------------------------------


def section_sequence(x, m: int) -> Sequence:
    """The m-th section of ``x``: equal to ``x`` up to index m, zero after."""
    x = make_sequence(x)
    if m < 0:
        raise PreconditionError(f"section index must be >= 0, got {m}")
    return Sequence(lambda k: x(k) if k <= m else 0, support_hint=m,
                    label=f"section[{m}]({x.label})")


def section_residual(space_or_matrix, x, m: int, n: int,
                     mode: str = "exact") -> Scalar:
    """Domain-norm distance between ``x`` and its m-th section at truncation n."""
    a = _resolve_triangle(space_or_matrix)
    y = apply(a, x, n, mode=mode)
    ysec = apply(a, section_sequence(x, m), n, mode=mode)
    return max(abs(u - v) for u, v in zip(y.entries, ysec.entries))


def _section_image_table(a: InfiniteMatrix, x, n: int) -> np.ndarray:
    """C[j-1, m-1] = (A x^[m])_j for 1 <= j, m <= n (floats)."""
    x = make_sequence(x)
    xf = np.array([float(x(k)) for k in range(1, n + 1)])
    t = a.truncation_floats(n) if n <= 2400 else None
    if t is None:
        raise PreconditionError("section tables are capped at truncation 2400")
    c = np.cumsum(t * xf[None, :], axis=1)
    # (A x^[m])_j equals the full row sum once m >= j; cumsum gives exactly that.
    return c


def section_norm_trace(space_or_matrix, x, n: int) -> np.ndarray:
    """Norms of the sections: entry m-1 is ``sup_j |(A x^[m])_j|`` over j <= n."""
    a = _resolve_triangle(space_or_matrix)
    c = np.abs(_section_image_table(a, x, n))
    running_diag_max = np.maximum.accumulate(np.diag(c))
    out = np.empty(n)
    for m in range(n, 0, -1):
        col_tail = c[m:, m - 1]
        tail_max = col_tail.max() if len(col_tail) else 0.0
        out[m - 1] = max(running_diag_max[m - 1], tail_max)
    return out


def sections_bounded_probe(space_or_matrix, x, n: int, tol: float = 1e-6,
                           window: Optional[int] = None):
    """Probe whether the section norms stay bounded (the classical AB
    property, along ``x``).  Returns ``(verdict, info)``."""
    trace = section_norm_trace(space_or_matrix, x, n)
    if window is None:
        window = min(default_window(n), max(1, n - 1))
    return analyze_sup(np.arange(1, n + 1), trace, tol, window)


def sections_converge_probe(space_or_matrix, x, n: int, tol: float = 1e-6,
                            window: Optional[int] = None):
    """Probe whether ``x`` is the domain-norm limit of its sections (the
    classical AK property, along ``x``).  Returns ``(verdict, info)``.

    The residual after the m-th section is ``sup_{j>m} |(Ax)_j - (A x^[m])_j|``;
    the probe checks that this trace decays to zero.
    """
    a = _resolve_triangle(space_or_matrix)
    c = _section_image_table(a, x, n)
    y = np.diag(c)  # (Ax)_j within the window
    diffs = np.abs(y[:, None] - c)  # rows j, columns m
    # the n-th section's residual is 0 within the window by construction, a
    # truncation artifact rather than data, so the trace stops at n - 1
    res = np.zeros(n - 1)
    for m in range(1, n):
        res[m - 1] = diffs[m:, m - 1].max()
    if len(res) < 2:
        return Verdict.INCONCLUSIVE, {"note": "truncation too short"}
    if window is None:
        window = min(default_window(n), max(1, len(res) - 1))
    lv = analyze_limit(np.arange(1, n), res, tol, window)
    verdict = null_limit_verdict(lv, tol)
    info = {"residual_trace_tail": float(res[-1]),
            "limit_kind": lv.kind.value}
    return verdict, info
