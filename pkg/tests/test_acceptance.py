"""Acceptance gate: the contract this package is built against.

Each test is one criterion and prints a one-line summary; tolerances are
pinned here and nowhere else.  Run with ``pytest -v`` to get the per-criterion
pass/fail listing.
"""

import json
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np

from seqspace.conditions import check_class, condition_report, condition_trace, regularity_report
from seqspace.domains import (
    domain_image,
    domain_preimage,
    expansion_partial_vector,
    expansion_residual,
    geometric_domain_element,
)
from seqspace.duality import dual_membership, dual_transfer_matrix
from seqspace.errors import UnsupportedClassError
from seqspace.matrices import apply, compose, matrix_from_spec, truncate_matrix
from seqspace.sequences import Sequence, sequence_from_values, truncate
from seqspace.verdicts import Verdict

from conftest import rational_band_triangle

FLOAT_IDENTITY_TOL = 1e-12      # criteria 1 and 5
TRANSFER_IDENTITY_TOL = 1e-10   # criterion 4
ROW_SUM_LIMIT_TOL = 1e-9        # criterion 8
ROW_SUM_ONE_TOL = 1e-12         # criterion 9
INVERSE_RUNTIME_BUDGET = 1.0    # seconds, criterion 1
REGULARITY_RUNTIME_BUDGET = 5.0  # seconds, criterion 8

CURATED_MATRICES = ("identity", "omega", "gamma", "omega-inv", "gamma-inv",
                    "cesaro", "euler:1/2", "zero")
SPACES = ("c0", "c", "linf", "bs", "cs",
          "c0(omega)", "c(omega)", "linf(omega)",
          "c0(gamma)", "c(gamma)", "linf(gamma)")


def _random_fractions(rng, count, span=9, den=9):
    return [Fraction(int(rng.integers(-span, span + 1)),
                     int(rng.integers(1, den + 1))) for _ in range(count)]


def test_criterion_01_inverse_identity():
    start = time.perf_counter()
    eye = [[1 if i == j else 0 for j in range(200)] for i in range(200)]
    assert truncate_matrix(compose("omega", "omega-inv"), 200) == eye
    assert truncate_matrix(compose("gamma", "gamma-inv"), 200) == eye
    dev = 0.0
    for name in ("omega", "gamma"):
        window = compose(name, f"{name}-inv").truncation_floats(200)
        dev = max(dev, float(np.abs(window - np.eye(200)).max()))
    elapsed = time.perf_counter() - start
    assert dev <= FLOAT_IDENTITY_TOL
    assert elapsed < INVERSE_RUNTIME_BUDGET
    print(f"[criterion 1] PASS - exact identities at 200, float dev {dev:.3g}, "
          f"{elapsed:.2f}s")


def test_criterion_02_isomorphism_round_trip():
    rng = np.random.default_rng(20260821)
    n = 100
    for trial in range(100):
        name = "omega" if trial % 2 == 0 else "gamma"
        support = int(rng.integers(1, n + 1))
        x = sequence_from_values(_random_fractions(rng, support))
        y = domain_image(name, x, n)
        back = domain_preimage(name, sequence_from_values(y.entries), n)
        assert back.entries == truncate(x, n).entries, (name, trial)
    print("[criterion 2] PASS - 100 exact round trips through both triangles")


def test_criterion_03_basis_reconstruction():
    rng = np.random.default_rng(42)
    n = 100
    for trial in range(20):
        support = int(rng.integers(1, n + 1))
        x = sequence_from_values(_random_fractions(rng, support))
        assert expansion_residual("omega", x, n, n) == 0, trial
        rebuilt = expansion_partial_vector("omega", x, n, n)
        assert tuple(rebuilt) == truncate(x, n).entries, trial
    g = geometric_domain_element()
    resid = expansion_residual("omega", g, 20, 60)
    assert resid == Fraction(1, 2) ** 21
    assert resid <= 2 * Fraction(1, 2) ** 20
    print(f"[criterion 3] PASS - 20 exact reconstructions; geometric tail "
          f"residual {float(resid):.3g} <= 2*2^-20")


def test_criterion_04_source_transfer_identity():
    rng = np.random.default_rng(7)
    n = 100
    worst = 0.0
    for trial in range(50):
        width = int(rng.integers(1, 6))
        a = rational_band_triangle(rng, size=n, width=width, name=f"band{trial}")
        support = int(rng.integers(1, 41))
        y = sequence_from_values(_random_fractions(rng, support, span=5, den=5))
        transfer = compose(a, "omega-inv")
        lhs = apply(transfer, y, n, mode="float").as_floats()
        x = domain_preimage("omega", y, n)
        rhs = apply(a, sequence_from_values(x.entries), n, mode="float").as_floats()
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    assert worst <= TRANSFER_IDENTITY_TOL
    print(f"[criterion 4] PASS - 50 band-matrix trials, max deviation {worst:.3g}")


def test_criterion_05_target_transfer_identities():
    rng = np.random.default_rng(11)
    n = 100
    worst = Fraction(0)
    for trial in range(50):
        a = rational_band_triangle(rng, size=n, width=int(rng.integers(1, 5)),
                                   name=f"tband{trial}")
        z = sequence_from_values(_random_fractions(rng, 30, span=5, den=5))
        az = apply(a, z, n)
        for outer in ("omega", "gamma"):
            lhs = apply(compose(outer, a), z, n)
            rhs = apply(outer, sequence_from_values(az.entries), n)
            dev = max(abs(u - v) for u, v in zip(lhs.entries, rhs.entries))
            worst = max(worst, dev)
    assert worst == 0
    assert float(worst) <= FLOAT_IDENTITY_TOL
    print("[criterion 5] PASS - 50 exact trials, deviation exactly 0")


def test_criterion_06_table_fidelity_against_oracle():
    cells = 0
    decisive = 0
    disagreements = []
    for name in CURATED_MATRICES:
        for f in SPACES:
            for t in SPACES:
                try:
                    r = check_class(name, f, t, route="both")
                except UnsupportedClassError:
                    continue
                cells += 1
                if r.conditions_verdict is Verdict.INCONCLUSIVE:
                    continue
                decisive += 1
                if r.oracle.verdict is not r.conditions_verdict:
                    disagreements.append((name, f, t, r.conditions_verdict,
                                          r.oracle.verdict))
    assert cells == 608
    assert decisive == 564
    assert disagreements == []
    print(f"[criterion 6] PASS - {cells} cells, {decisive} decisive, "
          f"0 oracle disagreements")


def test_criterion_07_dual_showcase():
    r1 = dual_membership("power:1", "c0(omega)")
    assert r1.verdict is Verdict.SATISFIED
    u = dual_transfer_matrix("power:1", "omega")
    assert all(u.entry(n, k) == (1 if n == k else 0)
               for n in range(1, 13) for k in range(1, 13))

    r2 = dual_membership("power:2", "c0(omega)", n=2000)
    assert r2.verdict is Verdict.VIOLATED
    rows = {c.condition: c for c in r2.class_report.condition_reports}
    assert rows["bounded-rows"].verdict is Verdict.VIOLATED
    assert rows["bounded-rows"].observed >= 3900  # trace grows like 2n - 1

    r3 = dual_membership("power:-1", "c0(gamma)")
    assert r3.verdict is Verdict.SATISFIED
    v = dual_transfer_matrix("power:-1", "gamma")
    assert all(v.entry(n, k) == (1 if n == k else 0)
               for n in range(1, 13) for k in range(1, 13))
    print("[criterion 7] PASS - k accepted (identity transfer), k^2 rejected "
          "at 2000, 1/k accepted")


def test_criterion_08_regularity_reports():
    start = time.perf_counter()
    r = regularity_report("cesaro")
    assert r.verdict is Verdict.SATISFIED
    assert abs(r.bounded_rows.observed - 1.0) <= 1e-12
    assert abs(r.row_sum_limit - 1.0) <= ROW_SUM_LIMIT_TOL

    rep = condition_report("gamma", "bounded-rows", n=10000)
    assert rep.verdict is Verdict.VIOLATED
    assert rep.observed >= 9.5
    assert abs(rep.observed - 9.7876) <= 1e-3
    idx, vals = condition_trace("gamma", "row-abs-sum", n=10000)
    assert np.all(np.diff(vals) >= 0)
    elapsed = time.perf_counter() - start
    assert elapsed < REGULARITY_RUNTIME_BUDGET
    print(f"[criterion 8] PASS - cesaro satisfied (limit {r.row_sum_limit}), "
          f"gamma violated (sup {rep.observed:.4f}, monotone), {elapsed:.2f}s")


def test_criterion_09_euler_riesz_structure():
    euler = matrix_from_spec("euler:1/2")
    riesz = matrix_from_spec("riesz:const:1")
    cesaro = matrix_from_spec("cesaro")
    for n in range(1, 51):
        for a in (euler, riesz):
            s = sum(a.entry(n, k) for k in range(1, n + 1))
            assert s == 1, (a.name, n)
            assert abs(float(s) - 1.0) <= ROW_SUM_ONE_TOL
        for k in range(1, n + 1):
            assert riesz.entry(n, k) == cesaro.entry(n, k)
    print("[criterion 9] PASS - row sums exactly 1 for n <= 50; unit-weight "
          "means equal arithmetic means entrywise")


def test_criterion_10_cli_determinism():
    argv = [sys.executable, "-m", "seqspace", "check-class",
            "--matrix", "euler:1/2", "--from", "c0", "--to", "c",
            "--route", "both", "--seed", "7", "--json"]
    outputs = []
    for _ in range(3):
        proc = subprocess.run(argv, capture_output=True, check=False)
        assert proc.returncode == 0, proc.stderr.decode()
        outputs.append(proc.stdout)
    assert outputs[0] == outputs[1] == outputs[2]
    doc = json.loads(outputs[0])
    assert doc["verdict"] == "satisfied"
    print(f"[criterion 10] PASS - byte-identical JSON across 3 runs "
          f"({len(outputs[0])} bytes)")
