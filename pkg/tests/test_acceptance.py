"""Acceptance gate: every stated criterion at its stated tolerance.

Each test prints one pass/fail line (visible with pytest -s, and in the
failure report otherwise).  Desk scale: truncations <= 200, the whole
module runs in well under a few minutes.
"""

import time

import pytest

from podles.checks import (
    RunConfig,
    chern_suite,
    index_suite,
    projmod_suite,
    relations_suite,
    residues_mu_suite,
    residues_pi_suite,
    residues_q0_suite,
    series_f_suite,
    symbolic_suite,
)

Q_GRID = (0.3, 0.5, 0.7, 0.9)
BAD = ("fail", "inconclusive")


def _criterion(num: int, desc: str, reports, extra_ok: bool = True):
    bad = [r for r in reports if r.status in BAD]
    ok = not bad and extra_ok
    print(f"ACCEPTANCE {num:02d} {'PASS' if ok else 'FAIL'} - {desc}", flush=True)
    assert ok, f"criterion {num}: {[f'{r.check}: {r.detail}' for r in bad]}"


@pytest.fixture(scope="module")
def relations_runs():
    out = {}
    for q in Q_GRID:
        t0 = time.perf_counter()
        out[q] = relations_suite(q, truncation=100, tol=1e-10)
        out[q, "seconds"] = time.perf_counter() - t0
    return out


@pytest.fixture(scope="module")
def residues_runs():
    q0_reports, _ = residues_q0_suite(truncation=120)
    per_q = {}
    for q in Q_GRID:
        mu_r, _ = residues_mu_suite(q, truncation=120)
        pi_r, _ = residues_pi_suite(q, truncation=120)
        per_q[q] = mu_r + pi_r
    return q0_reports, per_q


@pytest.fixture(scope="module")
def index_runs():
    return {q: index_suite(q, truncation=100) for q in Q_GRID}


@pytest.fixture(scope="module")
def chern_runs():
    return {q: chern_suite(q, truncation=120, tol=1e-8) for q in Q_GRID}


def test_criterion_01_symbolic():
    reports = symbolic_suite()
    names = {r.check for r in reports}
    assert "symbolic/pprime-projector" in names
    assert "symbolic/confluence-200-words" in names
    _criterion(1, "exact p' projector identities and rewrite confluence on 200 words",
               reports)


def test_criterion_02_relations(relations_runs):
    reports = []
    slow = []
    for q in Q_GRID:
        reports += [r for r in relations_runs[q] if r.check.startswith("relations/")
                    and ("/mu" in r.check or "/pi" in r.check)]
        if relations_runs[q, "seconds"] >= 30.0:
            slow.append(q)
    rel_only = [r for r in reports if "/ba-q2ab" in r.check or "/a*a+b2-1" in r.check
                or "/q4aa*+b2-q4" in r.check]
    assert len(rel_only) == 4 * 4 * 3  # 4 q, 4 families, 3 relations
    assert all(r.tolerance <= 1e-10 for r in rel_only)
    _criterion(2, "defining relations <= 1e-10 in mu+-, pi+- at truncation 100, "
                  "< 30 s per q", rel_only, extra_ok=not slow)


def test_criterion_03_residues_q0(residues_runs):
    q0_reports, _ = residues_runs
    value_checks = [r for r in q0_reports if "/s1/" in r.check or "/s2/" in r.check]
    assert len(value_checks) == 10  # 5 elements x 2 triples
    assert all(r.tolerance <= 1e-6 for r in value_checks)
    _criterion(3, "q=0 residues: Res_{s=1} = symbol mean (N-disk) and "
                  "Res_{s=2} = 2x symbol mean (spinor) for 1, w+w*, ker-sigma samples",
               q0_reports)


def test_criterion_04_residues_mu(residues_runs):
    _, per_q = residues_runs
    reports = [r for q in Q_GRID for r in per_q[q] if r.check.startswith("residues/mu/")]
    key = [r for r in reports if r.check.endswith("s1-vs-symbol-trace")
           or r.check.endswith("no-s2-pole")]
    assert len(key) == 8 and all(r.tolerance <= 1e-6 for r in key)
    _criterion(4, "disk-pair triple: Res_{s=1} = matrix symbol trace on monomials "
                  "deg<=3, no pole at s=2", reports)


def test_criterion_05_residues_pi(residues_runs):
    _, per_q = residues_runs
    reports = [r for q in Q_GRID for r in per_q[q] if r.check.startswith("residues/pi/")]
    dual = [r for r in reports if r.check.endswith("zeta-b2-dual-report")]
    assert len(dual) == 4
    for r in dual:
        assert r.value is not None and "2q^4/(1-q^2)" in r.detail and "2q^4/(1-q^4)" in r.detail
    checked = [r for r in reports if not r.check.endswith("zeta-b2-dual-report")]
    _criterion(5, "spinor triple: poles confined to {1,2}, s=2 noncommutative "
                  "integral for {1,a,b,ab}, zeta_{b^2} logged against both closed forms",
               checked)


def test_criterion_06_index(index_runs):
    reports = []
    for q in Q_GRID:
        reports += [r for r in index_runs[q] if r.check in (
            "index/fredholm-pprime", "index/chern0-fundamental",
            "index/series-vs-trace-route", "index/pairing-pprime-mu",
            "index/pairing-pprime-pi")]
    fred = [r for r in reports if r.check == "index/fredholm-pprime"]
    assert len(fred) == 4
    assert all("gap ratio" in r.detail for r in fred)
    series_reports = [r for r in series_f_suite() if r.check.startswith("series-f/value")]
    assert len(series_reports) == 9 and all(r.tolerance <= 1e-10 for r in series_reports)
    _criterion(6, "index pairings: Fredholm p' = -1 (gap >= 10, N=100, all q), "
                  "chern0(fundamental) = 1, f(x) = 1 +- 1e-10, routes agree <= 1e-6",
               reports + series_reports)


def test_criterion_07_local_index_formula(chern_runs):
    reports = []
    for q in Q_GRID:
        reports += [r for r in chern_runs[q] if r.check.startswith("chern/coboundary")
                    or r.check.startswith("chern/phi2-vanishes")]
    assert len(reports) == 4 * 3
    assert all(r.tolerance <= 1e-8 for r in reports)
    _criterion(7, "|chern0 - phi0| <= 1e-8 on monomials in both triples; "
                  "|phi2| <= 1e-8 on 10 generator triples", reports)


def test_criterion_08_rapid_decay_bounds(relations_runs, residues_runs):
    _, per_q = residues_runs
    reports = []
    for q in Q_GRID:
        reports += [r for r in relations_runs[q]
                    if "rho-minus-decay-bound" in r.check
                    or "pi-minus-lambda-rate" in r.check]
        reports += [r for r in per_q[q] if "Qq-bound" in r.check]
    assert len(reports) == 4 * (2 + 2 + 2)
    _criterion(8, "rapid-decay bounds: |rho-| <= (1-q)^-2 q^{2l}, pi-lambda rate "
                  "<= q^2, ideal diagonals <= q^{l+m}", reports)


def test_criterion_09_projective_module():
    reports = []
    for q in Q_GRID:
        reports += projmod_suite(q, truncation=50, tol=1e-12)
    equiv = [r for r in reports if r.check == "projmod/equivalence-with-disk-pair"]
    assert len(equiv) == 4 and all(r.tolerance <= 1e-12 for r in equiv)
    _criterion(9, "module-to-disk-pair equivalence <= 1e-12 at N=50 for all grid q",
               reports)


def test_criterion_10_robustness(index_runs):
    reports = []
    for q in Q_GRID:
        reports += [r for r in index_runs[q] if r.check in (
            "index/invariance-F-perturbation", "index/invariance-truncation-doubling")]
    assert len(reports) == 8
    assert all(r.tolerance <= 1e-6 for r in reports)
    _criterion(10, "index invariant under finite-rank F perturbation and "
                   "truncation doubling (drift <= 1e-6)", reports)
