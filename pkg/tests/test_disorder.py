import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dtckit import disorder
from dtckit.disorder import (CapacityError, DisorderRealization, EnsembleParams, angular_factor,
                             coupling_matrix, dipolar_coupling, jbar_distribution, make_realization,
                             mean_coupling_at_r0, nearest_neighbor_distances, sample_onsite_fields,
                             sample_positions)

TWO_PI = 2 * np.pi


@pytest.mark.parametrize("kwargs", [
    dict(n_spins=0), dict(n_spins=5, r_min=8.0), dict(n_spins=5, r_min=-1.0),
    dict(n_spins=5, W=-1.0), dict(n_spins=5, angular="quadrupolar"), dict(n_spins=5, J0=np.inf),
])
def test_params_rejected(kwargs):
    with pytest.raises(ValueError):
        EnsembleParams(**kwargs)


def test_single_point():
    pts = sample_positions(EnsembleParams(1))
    assert pts.shape == (1, 3)
    r = make_realization(EnsembleParams(1))
    assert r.jbar.tolist() == [0.0]
    assert jbar_distribution([r]).values.tolist() == [0.0]


def test_hard_core_1000():
    pts = sample_positions(EnsembleParams(1000, seed=3))
    d = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
    iu = np.triu_indices(1000, 1)
    assert len(d[iu]) == 499500
    assert d[iu].min() >= 3.0


def test_positions_inside_box():
    p = EnsembleParams(200, seed=1)
    pts = sample_positions(p)
    assert pts.min() >= 0 and pts.max() <= p.box_side


def test_nearest_neighbour_distance_bulk():
    # open faces inflate the NN distance of surface spins; the bulk follows
    # the Poisson law the box side is built on
    means = []
    for seed in range(20):
        p = EnsembleParams(1000, seed=seed)
        pts = sample_positions(p)
        nn = nearest_neighbor_distances(pts)
        inner = np.all((pts > 2 * p.r0) & (pts < p.box_side - 2 * p.r0), axis=1)
        means.append(nn[inner].mean())
    assert abs(np.mean(means) / 8.0 - 1) < 0.05


def test_capacity_error(monkeypatch):
    # r_min < r0 keeps the packing far below jamming, so shrink the budget
    monkeypatch.setattr(disorder, "MAX_PLACEMENT_ATTEMPTS", 1)
    with pytest.raises(CapacityError, match="could not place"):
        sample_positions(EnsembleParams(1000, r_min=7.9))


def test_parallel_pair():
    J0 = 7.0
    assert dipolar_coupling([0, 0, 0], [0, 0, 2], J0) == pytest.approx(-J0 / 4, rel=1e-14)


def test_magic_angle():
    c = 1 / np.sqrt(3)
    v = np.array([np.sqrt(1 - c**2), 0, c])
    assert abs(dipolar_coupling([0, 0, 0], 3 * v, 5.0)) < 1e-14


def test_coincident_rejected():
    with pytest.raises(ValueError):
        dipolar_coupling([1, 2, 3], [1, 2, 3], 1.0)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=6, max_size=6), st.floats(-100, 100))
def test_coupling_matches_geometry(xyz, J0):
    a, b = np.array(xyz[:3]), np.array(xyz[3:])
    r = np.linalg.norm(b - a)
    if r < 1e-3:
        return
    cos = (b - a)[2] / r
    expect = J0 * (1 - 3 * cos**2) / r**3
    got = dipolar_coupling(a, b, J0)
    assert got == pytest.approx(expect, rel=1e-12, abs=1e-12)
    assert dipolar_coupling(b, a, J0) == pytest.approx(got, rel=1e-12, abs=1e-12)


def test_coupling_matrix_reproducible():
    r = make_realization(EnsembleParams(40, seed=2))
    C = r.couplings
    assert np.array_equal(C, C.T)
    assert np.all(np.diag(C) == 0)
    for i, j in [(0, 1), (3, 17), (20, 39)]:
        ref = dipolar_coupling(r.positions[i], r.positions[j], r.params.J0)
        assert C[i, j] == pytest.approx(ref, rel=1e-12)
    assert np.allclose(r.jbar, C.sum(axis=1), rtol=0, atol=1e-14)


def test_isotropic_mode_signs():
    pos = sample_positions(EnsembleParams(30, seed=4))
    C = coupling_matrix(pos, 2.0, angular="isotropic", sign_seed=4)
    r = np.linalg.norm(pos[:, None] - pos[None], axis=-1)
    np.fill_diagonal(r, 1.0)
    iu = np.triu_indices(30, 1)
    assert np.allclose(np.abs(C[iu]) * r[iu] ** 3, 2.0)
    assert np.array_equal(C, C.T)


def test_angular_factor_averages_to_zero():
    rng = np.random.default_rng(0)
    v = rng.normal(size=(10**6, 3))
    assert abs(angular_factor(v, (0, 0, 1)).mean()) < 0.01


@pytest.mark.parametrize("W", [0.0, TWO_PI * 4.0])
def test_onsite_fields(W):
    x = sample_onsite_fields(10**5, W, seed=9)
    if W == 0:
        assert np.all(x == 0)
    else:
        assert abs(x.std() / W - 1) < 0.01
    assert np.array_equal(x, sample_onsite_fields(10**5, W, seed=9))


def test_realization_deterministic():
    a = make_realization(EnsembleParams(50, seed=11))
    b = make_realization(EnsembleParams(50, seed=11))
    for f in ("positions", "couplings", "onsite_fields", "jbar", "z3_fields"):
        assert np.array_equal(getattr(a, f), getattr(b, f))
    c = make_realization(EnsembleParams(50, seed=12))
    assert not np.array_equal(a.positions, c.positions)


def test_two_spin_jbar():
    pos = np.array([[0.0, 0.0, 0.0], [3.0, 1.0, 2.0]])
    J = dipolar_coupling(pos[0], pos[1], 4.0)
    C = coupling_matrix(pos, 4.0)
    r = DisorderRealization.from_couplings(C, positions=pos)
    assert r.jbar == pytest.approx([J, J], rel=1e-14)


def test_jbar_regression():
    r = make_realization(EnsembleParams(1000, seed=0))
    med = jbar_distribution([r]).median_abs
    assert 0.66 / 3 < med < 0.66 * 3
    assert med == pytest.approx(0.484464626868921, rel=1e-9)
    assert mean_coupling_at_r0(r, 8.0) == pytest.approx(0.4947420843403619, rel=1e-9)


def test_jbar_distribution_pools():
    rs = [make_realization(EnsembleParams(20, seed=s)) for s in range(3)]
    d = jbar_distribution(rs)
    assert len(d.values) == 60
    assert d.quantiles[0.5] == pytest.approx(np.quantile(d.values, 0.5))
    with pytest.raises(ValueError):
        jbar_distribution([])


def test_from_couplings_validates():
    with pytest.raises(ValueError):
        DisorderRealization.from_couplings([[0, 1], [2, 0]])
    with pytest.raises(ValueError):
        DisorderRealization.from_couplings([[1, 0], [0, 0]])


def test_scaled():
    r = make_realization(EnsembleParams(10, seed=1))
    s = r.scaled(0.0)
    assert np.all(s.couplings == 0) and np.all(s.jbar == 0)
    assert np.array_equal(s.onsite_fields, r.onsite_fields)
