import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import blenderforge as bf
from blenderforge.return_map import CrossMapModel, ReturnCoeffs, power_term
from conftest import df_spec, sf_spec


def hand_sf_spec():
    # lam=1/2, gamma=2, A=B=b=u=1, eta1=0, eta2=pi/2, omega=pi/2
    return bf.CycleSpec("saddle_focus", 0.5, 2.0, math.pi / 2,
                        1.0, 1.0, 1.0, 1.0, 0.0, math.pi / 2, 4, 1, 2)


def test_coeffs_sf_hand_example():
    rc = bf.coeffs(hand_sf_spec(), 1, 1)
    assert rc.A_km == pytest.approx(1.0, abs=1e-12)
    assert rc.B_km == pytest.approx(-1.0, abs=1e-12)


def test_coeffs_sine_zero_kills_A():
    # k*omega + eta1 = pi at k=2
    rc = bf.coeffs(hand_sf_spec(), 2, 1)
    assert rc.A_km == pytest.approx(0.0, abs=1e-12)


def test_coeffs_df_hand_example():
    # A(m*omega2) = 1/(cos pi + sin pi) = -1; A_km = 1 * (-1) * sin(pi/2) = -1
    spec = bf.CycleSpec("double_focus", 0.5, 2.0, math.pi / 2,
                        1.0, 1.0, 1.0, (1.0, 0.0), 0.0, math.pi / 2,
                        4, 1, 2, omega2=math.pi, eta3=0.0)
    rc = bf.coeffs(spec, 1, 1)
    assert rc.A_km == pytest.approx(-1.0, abs=1e-12)


def test_coeffs_requires_positive_indices():
    with pytest.raises(bf.DomainError):
        bf.coeffs(hand_sf_spec(), 0, 1)


@given(k=st.integers(1, 200), m=st.integers(1, 200))
def test_coeffs_scaling_identity(k, m):
    # stepping m -> m+1 multiplies the power by gamma, hence A_km and
    # (B_km + b*u-) exactly (saddle focus: the angles depend only on k);
    # reconstructing B_km + bu re-adds the offset, so the comparison floor
    # is the cancellation noise ~ulp(bu)
    spec = sf_spec(theta=1.3, w_hat=0.3, gamma=1.7)
    rc0 = bf.coeffs(spec, k, m)
    rc1 = bf.coeffs(spec, k, m + 1)
    bu = spec.b_coef * spec.u_scalar
    assert rc1.A_km == pytest.approx(spec.gamma * rc0.A_km, rel=1e-12, abs=1e-300)
    assert rc1.B_km + bu == pytest.approx(
        spec.gamma * (rc0.B_km + bu), rel=1e-12, abs=8.0 * 2.3e-16 * abs(bu)
    )


@given(k=st.integers(1, 1000), m=st.integers(1, 500))
def test_power_identity_through_logs(k, m):
    # for even m and lam > 0: lam^k gamma^m = |gamma|^(m - theta k)
    spec = sf_spec(theta=math.sqrt(2), gamma=-2.0)
    m = 2 * m
    theta = bf.compute_theta(spec)
    route_a = power_term(spec, k, m)
    route_b = math.exp((m - theta * k) * math.log(abs(spec.gamma)))
    assert route_a == pytest.approx(route_b, rel=1e-12)


def test_df_admissibility_follows_denominator_margins():
    spec = df_spec()
    cutoff = math.sqrt(spec.delta)
    for m in range(1, 6):
        rc = bf.coeffs(spec, 7, m)
        from blenderforge.return_map import quant_margin
        expected = quant_margin(spec, m * spec.omega2) > cutoff
        assert rc.admissible == expected


def test_sf_admissibility_is_entry_bound():
    spec, k, m = sf_spec(), 4, 6
    rc = bf.coeffs(spec, k, m)
    assert rc.admissible == (abs(rc.B_km) < spec.delta / 2)


# ---------------------------------------------------------------------------
# model map
# ---------------------------------------------------------------------------

def synthetic_model(a=0.5, b=0.01, delta=0.1, y_dim=1, z_dim=2,
                    phi_bound=0.0, phi_seed=0):
    rc = ReturnCoeffs(k=1, m=1, A_km=a, B_km=b, admissible=True)
    return CrossMapModel(coeffs=rc, y_dim=y_dim, z_dim=z_dim, delta=delta,
                         phi_bound=phi_bound, phi_seed=phi_seed)


def test_forward_affine_example():
    model = synthetic_model(a=0.5, b=0.01)
    pt = bf.PointInCube(0.02, (0.0,), (0.0, 0.0))
    assert model.apply_cross_forward(pt).x == pytest.approx(0.02, abs=1e-15)


def test_forward_linear_fixed_point():
    model = synthetic_model(a=0.7, b=0.0)
    pt = bf.PointInCube(0.0, (0.0,), (0.0, 0.0))
    assert model.apply_cross_forward(pt).x == 0.0


def test_phi_bound_propagation():
    base = synthetic_model(a=0.5, b=0.01)
    pert = synthetic_model(a=0.5, b=0.01, phi_bound=1e-3, phi_seed=11)
    pt = bf.PointInCube(0.02, (0.001,), (0.03, -0.05))
    affine = base.coeffs.A_km * pt.x + base.coeffs.B_km
    assert abs(pert.apply_cross_forward(pt).x - affine) <= 1e-3


@pytest.mark.parametrize("phi_bound,seed", [(0.0, 0), (1e-4, 3), (1e-4, 9)])
def test_round_trip_identity(phi_bound, seed):
    model = synthetic_model(a=0.6, b=0.002, phi_bound=phi_bound, phi_seed=seed)
    rng = np.random.default_rng(5)
    y_half = model.y_rate * model.delta * 0.8
    for _ in range(25):
        pt = bf.PointInCube(
            float(rng.uniform(-0.05, 0.05)),
            (float(rng.uniform(-y_half, y_half)),),
            tuple(rng.uniform(-0.09, 0.09, 2)),
        )
        try:
            img = model.apply_cross_forward(pt)
        except bf.NoImageInCube:
            continue
        back = model.apply_cross_backward(img)
        assert abs(back.x - pt.x) < 1e-12
        assert max(abs(a - b) for a, b in zip(back.y, pt.y)) < 1e-12
        assert max(abs(a - b) for a, b in zip(back.z, pt.z)) < 1e-12


def test_image_outside_cube_raises():
    model = synthetic_model(a=0.5, b=0.2, delta=0.1)
    with pytest.raises(bf.NoImageInCube):
        model.apply_cross_forward(bf.PointInCube(0.09, (0.0,), (0.0, 0.0)))


def test_jacobian_matches_finite_differences():
    model = synthetic_model(a=0.6, b=0.002, phi_bound=1e-4, phi_seed=21)
    pt = bf.PointInCube(0.01, (1e-4,), (0.02, -0.03))
    jac = model.jacobian(pt)
    h = 1e-7
    vec = pt.as_array()
    num = np.zeros_like(jac)
    for j in range(len(vec)):
        vp = vec.copy(); vp[j] += h
        vm = vec.copy(); vm[j] -= h
        fp = model.apply_cross_forward(bf.PointInCube(vp[0], tuple(vp[1:2]), tuple(vp[2:])))
        fm = model.apply_cross_forward(bf.PointInCube(vm[0], tuple(vm[1:2]), tuple(vm[2:])))
        num[:, j] = (fp.as_array() - fm.as_array()) / (2 * h)
    assert np.max(np.abs(jac - num)) < 1e-5


# ---------------------------------------------------------------------------
# cone verification
# ---------------------------------------------------------------------------

def test_cones_contracting_band():
    model = synthetic_model(a=0.5, b=0.0)
    rep = bf.verify_cones(model, K=0.1, n_samples=25, seed=2)
    assert rep.forward_cu_ok and rep.forward_uu_ok
    assert rep.backward_cs_ok and rep.backward_ss_ok
    assert rep.min_expansion_uu > 1.0
    assert rep.max_contraction_ss < 1.0
    assert rep.center_contraction_claimed and rep.center_contraction_ok
    # expansion of the center cone is NOT claimed when |A| < 1
    assert not rep.center_expansion_claimed
    assert rep.center_expansion_ok is None


def test_cones_expanding_band():
    model = synthetic_model(a=2.0, b=0.0)
    rep = bf.verify_cones(model, K=0.1, n_samples=25, seed=2)
    assert rep.center_expansion_claimed and rep.center_expansion_ok
    assert rep.forward_cu_ok and rep.backward_cs_ok


def test_cones_degenerate_K_zero():
    model = synthetic_model(a=0.5, b=0.0)
    rep = bf.verify_cones(model, K=0.0, n_samples=10, seed=4)
    assert rep.forward_cu_ok and rep.forward_uu_ok
    assert rep.backward_cs_ok and rep.backward_ss_ok


def test_cones_pass_on_searched_pairs(sf1_setup):
    spec, moduli = sf1_setup
    seq = bf.search_pairs(spec, moduli, bf.CaseTag.SF_1, eps=1e-3)
    for (k, m) in seq.pairs[:5]:
        model = bf.build_model(spec, k, m)
        rep = bf.verify_cones(model, K=0.1, n_samples=15, seed=1)
        assert rep.forward_cu_ok and rep.forward_uu_ok
        assert rep.backward_cs_ok and rep.backward_ss_ok
        assert rep.min_margin > 0


def test_insufficient_samples():
    model = synthetic_model(a=0.5, b=0.0)
    # shrink the admissible Y slab to nothing
    model.phi_bound = model.y_rate * model.delta  # type: ignore[misc]
    with pytest.raises(bf.InsufficientSamples):
        bf.verify_cones(model, K=0.1, n_samples=10, seed=0)
