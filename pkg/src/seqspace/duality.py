"""Dual descriptions of matrix domains.

For the running-weighted-sum domains, a scalar sequence ``a`` pairs with the
domain through the series ``sum_k a_k x_k``.  Abel summation turns the partial
sums of that series into a triangle acting on the transformed coordinates
``y = Ax``:

* omega domains (weights ``k``):
  ``u_nk = a_k/k - a_{k+1}/(k+1)`` for ``k < n`` and ``u_nn = a_n/n``,
* gamma domains (weights ``1/k``):
  ``v_nk = k a_k - (k+1) a_{k+1}`` for ``k < n`` and ``v_nn = n a_n``,

so that the n-th partial sum of ``sum a_k x_k`` equals the n-th entry of the
triangle applied to ``y``.  The identity is exact at every truncation and is
what the tests check.  Membership of ``a`` in the generalized duals then
reduces to a mapping-class question for the triangle: rows summable against
the domain (the beta dual) ask the triangle to map the base space into ``c``;
bounded pairings (the gamma dual) ask for ``linf``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import SpecError
from .matrices import InfiniteMatrix, _exact_div
from .sequences import FiniteVector, Sequence, finite_vector, make_sequence
from .verdicts import Verdict

DUAL_KINDS = ("beta", "gamma")


class DualTriangle(InfiniteMatrix):
    """The Abel-summation triangle attached to a scalar sequence ``a``.

    ``weight_mode`` selects the domain family: "omega" divides by the index,
    "gamma" multiplies by it.
    """

    def __init__(self, a: Sequence, weight_mode: str):
        if weight_mode not in ("omega", "gamma"):
            raise SpecError(f"unknown weight mode {weight_mode!r}")
        super().__init__(f"dual[{weight_mode}]({a.label})", triangle=True)
        self.a = a
        self.weight_mode = weight_mode
        self._vals: dict[int, object] = {}
        self._sf = np.empty(0)

    def _scaled(self, k: int):
        """a_k / k for omega mode; k * a_k for gamma mode."""
        got = self._vals.get(k)
        if got is None:
            ak = self.a(k)
            got = _exact_div(ak, k) if self.weight_mode == "omega" else k * ak
            self._vals[k] = got
        return got

    def entry(self, n, k):
        if n < 1 or k < 1:
            raise IndexError(f"matrix indices must be >= 1, got ({n}, {k})")
        if k > n:
            return 0
        if k == n:
            return self._scaled(n)
        return self._scaled(k) - self._scaled(k + 1)

    def _scaled_floats(self, m: int) -> np.ndarray:
        if len(self._sf) < m:
            lo = len(self._sf)
            fresh = [float(self._scaled(k)) for k in range(lo + 1, m + 1)]
            self._sf = np.concatenate([self._sf, np.asarray(fresh)])
        return self._sf[:m]

    def row_floats(self, n, m):
        out = np.zeros(m)
        width = min(n, m)
        if width < 1:
            return out
        sf = self._scaled_floats(width + 1)
        out[:width] = sf[:width] - sf[1:width + 1]
        if m >= n:
            out[n - 1] = sf[n - 1]
        return out

    def col_floats(self, k, rows):
        rows = np.asarray(rows)
        sf = self._scaled_floats(k + 1)
        below = sf[k - 1] - sf[k]
        return np.where(rows < k, 0.0,
                        np.where(rows == k, sf[k - 1], below))


def dual_transfer_matrix(a, domain_matrix="omega") -> DualTriangle:
    """The triangle whose rows are the partial sums of ``sum a_k x_k`` in the
    transformed coordinates of the given domain ("omega" or "gamma")."""
    a = make_sequence(a)
    if isinstance(domain_matrix, InfiniteMatrix):
        mode = domain_matrix.name
    else:
        mode = str(domain_matrix).strip().lower()
    if mode not in ("omega", "gamma"):
        raise SpecError(
            "dual descriptions are available for the omega and gamma domains, "
            f"not {mode!r}")
    return DualTriangle(a, mode)


def weighted_partial_sums(a, x, n: int) -> FiniteVector:
    """Exact partial sums ``sum_{k<=m} a_k x_k`` for m = 1..n."""
    a = make_sequence(a)
    x = make_sequence(x)
    out = []
    total = 0
    for k in range(1, n + 1):
        total += a(k) * x(k)
        out.append(total)
    return finite_vector(out, origin=f"pairing({a.label},{x.label})")


@dataclass(frozen=True)
class DualReport:
    """Outcome of a dual-membership probe."""

    verdict: Verdict
    kind: str                  # "beta" or "gamma"
    space: str                 # the domain the dual belongs to
    target_pair: tuple         # mapping-class pair the triangle was tested on
    class_report: object       # ClassReport for the transfer triangle
    note: str = ""

    def to_dict(self) -> dict:
        out = {
            "verdict": str(self.verdict),
            "kind": self.kind,
            "space": self.space,
            "target_pair": list(self.target_pair),
            "class_report": self.class_report.to_dict(),
        }
        if self.note:
            out["note"] = self.note
        return out


def dual_membership(a, space, kind: str = "beta", n: Optional[int] = None,
                    tol: Optional[float] = None,
                    window: Optional[int] = None) -> DualReport:
    """Probe whether the scalar sequence ``a`` belongs to the generalized
    beta- or gamma-dual of a matrix domain.

    ``space`` must be a domain over the omega or gamma triangle (for example
    ``"c0(omega)"`` or ``"linf(gamma)"``).  The probe builds the dual triangle
    for ``a`` and runs the mapping-class conditions for (base space : c) for
    the beta dual, or (base space : linf) for the gamma dual.
    """
    from .conditions import check_class
    from .domains import space_from_spec

    if kind not in DUAL_KINDS:
        raise SpecError(f"dual kind must be one of {DUAL_KINDS}, got {kind!r}")
    space = space_from_spec(space)
    if not space.is_domain:
        raise SpecError(
            "dual criteria here cover matrix domains (e.g. 'c0(omega)'); "
            f"got the classical space {space}")
    transfer = dual_transfer_matrix(make_sequence(a), space.matrix)
    target = "c" if kind == "beta" else "linf"
    kwargs = {}
    if n is not None:
        kwargs["n"] = n
    if tol is not None:
        kwargs["tol"] = tol
    if window is not None:
        kwargs["window"] = window
    report = check_class(transfer, space.tag, target, **kwargs)
    return DualReport(
        verdict=report.verdict,
        kind=kind,
        space=str(space),
        target_pair=(space.tag, target),
        class_report=report,
        note=f"tested the dual triangle on ({space.tag} : {target})",
    )
