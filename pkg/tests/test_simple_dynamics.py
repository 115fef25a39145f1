import math

import numpy as np
import pytest

import blenderforge as bf
from blenderforge.simple_dynamics import (
    TruncationRanges,
    _distance_to_family,
    exclusion_elements,
)
from conftest import df_spec, random_rational_sf_spec, rng_for, sf_spec


def rational_setup(delta=5e-5, **kw):
    spec = sf_spec(theta=0.5, w_hat=0.25, gamma=2.0, delta=delta, **kw)
    moduli = bf.moduli_from_declarations(
        spec, bf.RationalClass(1, 2), bf.RationalClass(1, 4)
    )
    return spec, moduli


def test_exclusion_requires_rational_moduli(sf1_setup):
    spec, moduli = sf1_setup
    with pytest.raises(bf.NotRational):
        bf.exclusion_sets(spec, moduli)


def test_distance_agrees_with_full_enumeration():
    tr = TruncationRanges(s_max=10, ell_max=7, n_max=7)
    rng = rng_for(3)
    for _ in range(30):
        gamma = float(rng.uniform(1.3, 3.0)) * float(rng.choice([-1.0, 1.0]))
        lam = float(rng.uniform(0.1, 0.9))
        ratio = float(rng.uniform(0.2, 3.0))
        target = float(rng.uniform(-3.0, 3.0))
        qp = int(rng.integers(1, 4))
        brute = min(abs(target - v) for *_, v in exclusion_elements(gamma, lam, qp, ratio, tr))
        fast = _distance_to_family(target, gamma, lam, qp, ratio, tr)
        assert fast == pytest.approx(brute, abs=1e-13)


def test_enumeration_hits_each_triple_once():
    tr = TruncationRanges(s_max=3, ell_max=2, n_max=2)
    triples = [t[:3] for t in exclusion_elements(2.0, 0.5, 1, 1.3, tr)]
    assert len(triples) == len(set(triples))
    assert len(triples) == 7 * 3 * 3 + 1  # s in [-3..3], ell/n in {1, 2, inf}, plus 0


def test_membership_distance_zero_constructed():
    # place |a_r b| = |gamma|^(1/q') exactly for the residue r = 0
    q_prime = 2
    gamma = 2.0
    eta1 = 0.7
    A = gamma ** (1 / q_prime) / math.sin(eta1)
    spec = sf_spec(theta=1 / q_prime, w_hat=0.25, gamma=gamma, A=A, eta1=eta1,
                   eta2=1.4, delta=5e-5)
    moduli = bf.moduli_from_declarations(
        spec, bf.RationalClass(1, q_prime), bf.RationalClass(1, 4)
    )
    report = bf.exclusion_sets(spec, moduli)
    assert report.ab_memberships["0"] == pytest.approx(0.0, abs=1e-12)
    assert bf.simple_verdict(report) == "inconclusive"


def test_closure_limit_points_included():
    # ell = inf element: target = |gamma|^(s/q') * ratio / (1 - gamma^-n)
    tr = TruncationRanges(s_max=20, ell_max=5, n_max=5)
    gamma, lam, qp, ratio = 2.0, 0.5, 1, 1.37
    target = gamma ** 3 * ratio / (1 - gamma ** (-2.0))
    assert _distance_to_family(target, gamma, lam, qp, ratio, tr) < 1e-12


def test_eta_feasibility_flags():
    # eta2 placing a residue angle at a sine zero trips the flag
    spec, _ = rational_setup(eta2=math.pi / 2)  # r=1: angle pi/2 + eta2 = pi
    moduli = bf.moduli_from_declarations(
        spec, bf.RationalClass(1, 2), bf.RationalClass(1, 4)
    )
    report = bf.exclusion_sets(spec, moduli)
    assert not report.eta_ok["eta2"]


# ---------------------------------------------------------------------------
# brute scan
# ---------------------------------------------------------------------------

def constructed_on_spec(k1=6, m1=5, ell=4, n=3):
    gamma, q_prime, p_prime = 2.0, 2, 1
    lam = gamma ** (-p_prime / q_prime)
    q, p = 4, 1
    s = q_prime * m1 - p_prime * k1
    eta1, eta2 = 0.35, 1.05
    A, B, b = 1.1, 0.9, 0.8
    r = k1 % q
    omega = 2 * math.pi * p / q
    ax = B * math.sin(r * omega + eta2) / b
    u = ax * gamma ** (s / q_prime) * (1 - lam ** ell) / (1 - gamma ** (-n))
    spec = bf.CycleSpec("saddle_focus", lam, gamma, omega, A, B, b, u,
                        eta1, eta2, 4, 1, 2, delta=5e-5)
    moduli = bf.moduli_from_declarations(
        spec, bf.RationalClass(p_prime, q_prime), bf.RationalClass(p, q)
    )
    return spec, moduli, (k1, m1), (k1 + ell, m1 + n)


def test_scan_empty_ranges_vacuous():
    spec, moduli = rational_setup()
    result = bf.brute_scan(spec, moduli, ranges=(0, 0))
    assert result.verdict == "no_extra_pairs"
    assert result.n_solutions == 0


def test_scan_finds_constructed_witness():
    spec, moduli, pair1, pair2 = constructed_on_spec()
    report = bf.exclusion_sets(spec, moduli)
    assert report.min_ratio_distance == pytest.approx(0.0, abs=1e-12)
    result = bf.brute_scan(spec, moduli, ranges=(40, 40), grid=9, tol=1e-6)
    assert result.verdict == "violation"
    found = [s for s in result.solutions
             if {tuple(s["pair1"]), tuple(s["pair2"])} == {pair1, pair2}]
    assert found
    assert found[0]["residual"] <= 1e-6


def test_scan_generic_never_violates():
    # seeded specs filtered to clear the exclusion distances
    count = 0
    attempt = 0
    while count < 6 and attempt < 200:
        rng = rng_for(100 + attempt)
        attempt += 1
        spec, moduli = random_rational_sf_spec(rng)
        if not bf.validate_nondegeneracy(spec).overall:
            continue
        report = bf.exclusion_sets(spec, moduli)
        if not all(report.eta_ok.values()):
            continue
        if min(report.min_ratio_distance, report.min_ab_distance) <= 1e-3:
            continue
        result = bf.brute_scan(spec, moduli, ranges=(40, 40), grid=9, tol=1e-6)
        assert result.verdict in ("no_extra_pairs", "constrained"), (
            attempt, result.verdict, result.solutions[:2]
        )
        count += 1
    assert count == 6


def test_scan_antisymmetric_minimum():
    from blenderforge.simple_dynamics import _SfTables
    spec, moduli = rational_setup()
    tables = _SfTables(spec, 4, 1, 12, 12, "k_omega")
    grid = np.linspace(-1, 1, 5)
    r1, gp1 = tables.residual_min(grid, 2, 3, 5, 7)
    r2, gp2 = tables.residual_min(grid, 5, 7, 2, 3)
    assert r1 == pytest.approx(r2, rel=1e-12)


def test_scan_grid_refinement_monotone():
    spec, moduli, *_ = constructed_on_spec()
    coarse = bf.brute_scan(spec, moduli, ranges=(14, 12), grid=9, tol=1e-6)
    fine = bf.brute_scan(spec, moduli, ranges=(14, 12), grid=17, tol=1e-6)
    assert fine.min_residual <= coarse.min_residual + 1e-15


def test_df_scan_runs_and_classifies():
    spec = df_spec(theta=1.0, w1_hat=1 / 3, w2_hat=1 / 5, delta=5e-5)
    moduli = bf.moduli_from_declarations(
        spec, bf.RationalClass(1, 1), bf.RationalClass(1, 3), bf.RationalClass(1, 5)
    )
    report = bf.exclusion_sets(spec, moduli)
    assert report.ratio_memberships
    result = bf.brute_scan(spec, moduli, ranges=(25, 25), grid=5, tol=1e-6)
    assert result.verdict in ("no_extra_pairs", "constrained", "violation")


def test_simple_verdict_conjunction():
    spec, moduli = rational_setup()
    report = bf.exclusion_sets(spec, moduli)
    scan = bf.brute_scan(spec, moduli, ranges=(30, 30), grid=9, tol=1e-6)
    full = bf.ExclusionReport(
        eta_ok=report.eta_ok,
        ratio_memberships=report.ratio_memberships,
        ab_memberships=report.ab_memberships,
        trunc=report.trunc,
        scan=scan,
    )
    verdict = bf.simple_verdict(full)
    if all(report.eta_ok.values()) and report.min_ratio_distance > 1e-3 \
            and report.min_ab_distance > 1e-3 and scan.verdict != "violation":
        assert verdict == "simple_hyperbolic_expected"
    else:
        assert verdict == "inconclusive"
    # forcing a zero distance forces inconclusive
    doctored = bf.ExclusionReport(
        eta_ok=report.eta_ok,
        ratio_memberships={"0,0": 0.0},
        ab_memberships=report.ab_memberships,
        trunc=report.trunc,
        scan=scan,
    )
    assert bf.simple_verdict(doctored) == "inconclusive"
