import math

import numpy as np
import pytest

import blenderforge as bf
from blenderforge.arithmetic import PairSequence
from blenderforge.blender_certifier import chain_cover, union_covers
from conftest import sf_spec


def synthetic_sequence(a_values, b_values, case=bf.CaseTag.SF_1):
    n = len(a_values)
    pairs = tuple((i + 1, 1) for i in range(n))
    return PairSequence(
        pairs=pairs,
        target_values=tuple((0.0, 0.0, 0.0) for _ in range(n)),
        A_values=tuple(a_values),
        B_values=tuple(b_values),
        case=case,
    )


FIVE_B = (-0.04, -0.02, 0.0, 0.02, 0.04)


def test_five_map_example_certificate():
    spec = sf_spec(delta=0.1)
    seq = synthetic_sequence([0.5] * 5, FIVE_B)
    cert = bf.certify(spec, seq, overlap_min=0.005, c=0.5)
    assert cert.blender_kind == "cs"
    assert cert.index == spec.d1
    assert cert.interval_I == (-0.05, 0.05)
    # each image is [B - 0.025, B + 0.025]; their union covers [-0.065, 0.065]
    # and adjacent images overlap by 0.03 (interval-arithmetic oracle)
    images = [(b - 0.025, b + 0.025) for b in FIVE_B]
    assert union_covers(images, -0.065, 0.065)
    for (lo1, hi1), (lo2, hi2) in zip(images, images[1:]):
        assert hi1 - lo2 == pytest.approx(0.03, abs=1e-15)
    # the greedy witness is a minimal sub-chain of those images
    eff_a, eff_b = cert.effective_maps()
    for w in cert.witness:
        expect = (FIVE_B[w.n] - 0.025, FIVE_B[w.n] + 0.025)
        assert w.interval == pytest.approx(expect, abs=1e-15)
    assert cert.witness[0].interval[0] == pytest.approx(-0.065, abs=1e-15)
    assert cert.witness[-1].interval[1] == pytest.approx(0.065, abs=1e-15)
    for w in cert.witness[1:]:
        assert w.overlap is not None and w.overlap >= cert.overlap_min
    assert bf.recheck_witness(cert)


def test_single_contraction_cannot_cover():
    spec = sf_spec(delta=0.1)
    seq = synthetic_sequence([0.5], [0.0])
    with pytest.raises(bf.CoverageGap) as err:
        bf.certify(spec, seq, c=0.5)
    assert err.value.uncovered is not None


def test_expanding_band_certifies_via_inverse_maps():
    spec = sf_spec(delta=0.1)
    seq = synthetic_sequence([2.0] * 5, FIVE_B)
    cert = bf.certify(spec, seq)
    assert cert.blender_kind == "cu"
    assert cert.index == spec.d2
    assert cert.A_band[0] > 1.0
    assert bf.recheck_witness(cert)


def test_cs_cu_duality():
    # certifying (A, B) as cu equals certifying (1/A, -B/A) as cs
    spec = sf_spec(delta=0.1)
    a_vals = [2.0, 2.2, 1.9, 2.4, 2.1]
    b_vals = list(FIVE_B)
    cu = bf.certify(spec, synthetic_sequence(a_vals, b_vals))
    inv_a = [1 / a for a in a_vals]
    inv_b = [-b / a for a, b in zip(a_vals, b_vals)]
    cs = bf.certify(spec, synthetic_sequence(inv_a, inv_b), c=cu.c)
    assert cu.blender_kind == "cu" and cs.blender_kind == "cs"
    assert [w.n for w in cu.witness] == [w.n for w in cs.witness]
    for wu, wc in zip(cu.witness, cs.witness):
        assert wu.interval == pytest.approx(wc.interval, abs=1e-15)


def test_band_violation_straddles_one():
    spec = sf_spec(delta=0.1)
    with pytest.raises(bf.BandViolation):
        bf.certify(spec, synthetic_sequence([0.5, 2.0], [0.0, 0.01]))
    with pytest.raises(bf.BandViolation):
        bf.certify(spec, synthetic_sequence([0.5, 1.0 + 1e-12], [0.0, 0.01]))


def test_certify_monotone_in_pairs():
    spec = sf_spec(delta=0.1)
    base_a, base_b = [0.5] * 5, list(FIVE_B)
    cert = bf.certify(spec, synthetic_sequence(base_a, base_b), c=0.5)
    bigger = bf.certify(
        spec,
        synthetic_sequence(base_a + [0.55, 0.6], base_b + [0.01, -0.03]),
        c=0.5,
    )
    assert bigger.blender_kind == cert.blender_kind  # still succeeds


def test_auto_shrink_reports_feasible_c(sf1_setup):
    spec, moduli = sf1_setup
    seq = bf.search_pairs(spec, moduli, bf.CaseTag.SF_1, eps=1e-3)
    cert = bf.certify(spec, seq)
    assert 0 < cert.c < spec.c_frac
    assert bf.recheck_witness(cert)
    # the reported c is feasible and the next grid step up is not required
    again = bf.certify(spec, seq, c=cert.c)
    assert again.interval_I == pytest.approx(cert.interval_I, abs=1e-12)


def test_chain_cover_matches_reachability_oracle():
    # greedy-with-margin reaches at least as far as any chain (exhaustive BFS)
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(2, 10))
        images = []
        for _ in range(n):
            lo = float(rng.uniform(-1.0, 0.8))
            images.append((lo, lo + float(rng.uniform(0.05, 0.6))))
        left, right = -0.5, 0.5
        m = 0.02
        chain, _ = chain_cover(images, left, right, m)
        # BFS over the interval graph
        start = [i for i, (lo, hi) in enumerate(images) if lo <= left]
        seen = set(start)
        frontier = list(start)
        feasible = any(images[i][1] >= right for i in seen)
        while frontier and not feasible:
            nxt = []
            for i in frontier:
                for j, (lo, hi) in enumerate(images):
                    if j not in seen and lo <= images[i][1] - m and hi > images[i][1]:
                        seen.add(j)
                        nxt.append(j)
                        if hi >= right:
                            feasible = True
            frontier = nxt
        assert (chain is not None) == feasible


# ---------------------------------------------------------------------------
# covering simulation
# ---------------------------------------------------------------------------

def test_simulation_five_map_example():
    spec = sf_spec(delta=0.1)
    cert = bf.certify(spec, synthetic_sequence([0.5] * 5, FIVE_B), c=0.5)
    report = bf.simulate_covering(spec, cert, n_discs=100, seed=3, depth=30)
    assert report.all_ok
    assert report.step_factor_min == pytest.approx(0.5, abs=1e-12)
    assert report.step_factor_max == pytest.approx(0.5, abs=1e-12)


def test_simulation_depth_zero_vacuous():
    spec = sf_spec(delta=0.1)
    cert = bf.certify(spec, synthetic_sequence([0.5] * 5, FIVE_B), c=0.5)
    report = bf.simulate_covering(spec, cert, n_discs=5, seed=0, depth=0)
    assert report.all_ok
    assert report.survivors == 5


def test_simulation_adversarial_wide_disc():
    from blenderforge.blender_certifier import _simulate_disc
    spec = sf_spec(delta=0.1)
    cert = bf.certify(spec, synthetic_sequence([0.5] * 5, FIVE_B), c=0.5)
    rec = _simulate_disc(cert, 0, seed=1, depth=5, x_center=0.0,
                         x_extent=3.0 * cert.c * cert.delta)
    assert not rec.ok
    assert rec.fail_step == 1
    assert "margin" in rec.note


def test_simulation_worker_invariance():
    spec = sf_spec(delta=0.1)
    cert = bf.certify(spec, synthetic_sequence([0.5] * 5, FIVE_B), c=0.5)
    r1 = bf.simulate_covering(spec, cert, n_discs=24, seed=9, depth=12, workers=1)
    r4 = bf.simulate_covering(spec, cert, n_discs=24, seed=9, depth=12, workers=4)
    assert r1.to_json_dict() == r4.to_json_dict()


def test_simulation_raise_on_failure_flag():
    from blenderforge.blender_certifier import BlenderCertificate
    spec = sf_spec(delta=0.1)
    cert = bf.certify(spec, synthetic_sequence([0.5] * 5, FIVE_B), c=0.5)
    # widen the sampled extent beyond the overlap guarantee via a doctored copy
    doc = cert.to_json_dict()
    doc["overlap_min"] = 0.5  # discs sampled at overlap_min/2 = 0.25 wide
    bad = BlenderCertificate.from_json_dict(doc)
    with pytest.raises(bf.SimulationFailure):
        bf.simulate_covering(spec, bad, n_discs=3, seed=0, depth=3,
                             raise_on_failure=True)


def test_certificate_json_round_trip():
    from blenderforge.blender_certifier import BlenderCertificate
    spec = sf_spec(delta=0.1)
    cert = bf.certify(spec, synthetic_sequence([0.5] * 5, FIVE_B), c=0.5)
    clone = BlenderCertificate.from_json_dict(cert.to_json_dict())
    assert clone == cert


# ---------------------------------------------------------------------------
# activation
# ---------------------------------------------------------------------------

def dense_bs(lo, hi, n):
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def test_mutual_activation_same_cube():
    spec = sf_spec(delta=0.1)
    cs = bf.certify(spec, synthetic_sequence([0.5] * 9, dense_bs(-0.04, 0.04, 9)), c=0.5)
    cu = bf.certify(
        spec, synthetic_sequence([2.0] * 17, dense_bs(-0.1, 0.1, 17)), c=0.5
    )
    report = bf.check_activation(cs, cu, spec, n_discs=30, seed=2, depth=10)
    assert report.mutual
    assert report.a_to_b_survivors >= 1
    assert report.b_to_a_survivors >= 1


def test_activation_kind_mismatch():
    spec = sf_spec(delta=0.1)
    cs = bf.certify(spec, synthetic_sequence([0.5] * 9, dense_bs(-0.04, 0.04, 9)), c=0.5)
    with pytest.raises(bf.KindMismatch):
        bf.check_activation(cs, cs, spec)


def test_activation_disjoint_cubes_false():
    spec = sf_spec(delta=0.1)
    cs = bf.certify(spec, synthetic_sequence([0.5] * 9, dense_bs(-0.04, 0.04, 9)), c=0.5)
    # fixed point -B/(A-1) must sit at the shifted center
    far = [-5.0 + b for b in dense_bs(-0.1, 0.1, 17)]
    cu = bf.certify(
        spec, synthetic_sequence([2.0] * 17, far), c=0.5, center=5.0,
    )
    report = bf.check_activation(cs, cu, spec, n_discs=20, seed=2, depth=6)
    assert not report.a_activates_b
    assert report.diagnostic
