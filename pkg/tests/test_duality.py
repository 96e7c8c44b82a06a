from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from seqspace.domains import domain_image
from seqspace.duality import (
    DualTriangle,
    dual_membership,
    dual_transfer_matrix,
    weighted_partial_sums,
)
from seqspace.errors import SpecError
from seqspace.matrices import apply
from seqspace.sequences import make_sequence, sequence_from_values
from seqspace.verdicts import Verdict


def test_dual_triangle_entries():
    # a_k = k against the omega domain scales to the constant 1: the
    # telescoping differences vanish and the triangle is the identity
    t = dual_transfer_matrix("power:1", "omega")
    for n in range(1, 8):
        for k in range(1, n + 1):
            assert t.entry(n, k) == (1 if n == k else 0)
    # a_k = 1/k against the gamma domain is the identity for the same reason
    t2 = dual_transfer_matrix("harmonic", "gamma")
    for n in range(1, 8):
        for k in range(1, n + 1):
            assert t2.entry(n, k) == (1 if n == k else 0)
    # a_k = k^2 against omega: diagonal n, constant -1 strictly below
    t3 = dual_transfer_matrix("power:2", "omega")
    assert [t3.entry(4, k) for k in range(1, 5)] == [-1, -1, -1, 4]


def test_dual_triangle_mode_validation():
    with pytest.raises(SpecError):
        DualTriangle(make_sequence("power:1"), "cesaro")
    with pytest.raises(SpecError):
        dual_transfer_matrix("power:1", "cesaro")


def test_pairing_identity_exact():
    # the whole point of the triangle: partial sums of sum a_k x_k equal the
    # triangle applied to the transformed coordinates, exactly, row by row
    rng = np.random.default_rng(3)
    for mode in ("omega", "gamma"):
        for _ in range(5):
            a = sequence_from_values(
                [Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6)))
                 for _ in range(12)])
            x = sequence_from_values(
                [Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6)))
                 for _ in range(12)])
            direct = weighted_partial_sums(a, x, 12)
            y = domain_image(mode, x, 12)
            via = apply(dual_transfer_matrix(a, mode),
                        sequence_from_values(y.entries), 12)
            assert direct.entries == via.entries


def test_dual_triangle_float_paths():
    t = dual_transfer_matrix("power:2", "omega")
    for n in (1, 3, 9):
        slow = np.array([float(t.entry(n, k)) for k in range(1, 13)])
        assert np.allclose(t.row_floats(n, 12), slow, atol=1e-14)
    rows = np.array([1, 2, 5, 11])
    for k in (1, 4):
        slow = np.array([float(t.entry(int(n), k)) for n in rows])
        assert np.allclose(t.col_floats(k, rows), slow, atol=1e-14)


def test_dual_membership_verdicts():
    r = dual_membership("power:1", "c0(omega)")
    assert r.verdict is Verdict.SATISFIED
    assert r.kind == "beta" and r.target_pair == ("c0", "c")
    assert dual_membership("power:2", "c0(omega)").verdict is Verdict.VIOLATED
    assert dual_membership("power:-1", "c0(gamma)").verdict is Verdict.SATISFIED
    assert dual_membership("power:1", "c0(omega)",
                           kind="gamma").verdict is Verdict.SATISFIED
    assert dual_membership("harmonic", "c(gamma)").verdict is Verdict.SATISFIED


def test_dual_membership_validation():
    with pytest.raises(SpecError):
        dual_membership("power:1", "c0")
    with pytest.raises(SpecError):
        dual_membership("power:1", "c0(cesaro)")
    with pytest.raises(SpecError):
        dual_membership("power:1", "c0(omega)", kind="alpha")


def test_dual_report_to_dict():
    d = dual_membership("power:1", "c0(omega)").to_dict()
    assert d["verdict"] == "satisfied"
    assert d["target_pair"] == ["c0", "c"]
    assert d["class_report"]["verdict"] == "satisfied"


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(min_value=-9, max_value=9), min_size=3, max_size=10))
def test_pairing_identity_property(vals):
    a = sequence_from_values(vals)
    x = make_sequence("harmonic")
    n = len(vals)
    direct = weighted_partial_sums(a, x, n)
    y = domain_image("gamma", x, n)
    via = apply(dual_transfer_matrix(a, "gamma"),
                sequence_from_values(y.entries), n)
    assert direct.entries == via.entries
