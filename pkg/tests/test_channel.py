import numpy as np
import pytest
import scipy.linalg

from doflab import CsitProfile, build_scheme, null_basis, realize_precoders, sample_channels
from doflab.channel import (KernelDimensionError, LINKS, power_class_scales, random_unit_frame,
                            received_columns, trial_seeds)
from doflab.core import GENERIC, NULL_12, NULL_21


def projector(basis):
    return basis @ basis.conj().T


def test_same_seed_same_channels():
    a = sample_channels((3, 4, 1, 3), CsitProfile(0.5), 1e6, seed=7)
    b = sample_channels((3, 4, 1, 3), CsitProfile(0.5), 1e6, seed=7)
    c = sample_channels((3, 4, 1, 3), CsitProfile(0.5), 1e6, seed=8)
    for link in LINKS:
        assert np.array_equal(a.estimate[link], b.estimate[link])
        assert np.array_equal(a.true(*link), b.true(*link))
    assert not np.array_equal(a.estimate[(1, 2)], c.estimate[(1, 2)])


def test_zero_beta_error_at_full_strength():
    ch = sample_channels((2, 2, 2, 2), CsitProfile(0, 1), 1e6, seed=1)
    assert np.array_equal(ch.true(1, 2), ch.estimate[(1, 2)] + ch.error[(1, 2)])
    assert np.allclose(ch.true(2, 1) - ch.estimate[(2, 1)], 1e-3 * ch.error[(2, 1)])


def test_error_energy_scales_with_power():
    # E||H - Ĥ||^2 = N M P^-beta for beta = 1
    vals = []
    for seed in range(400):
        ch = sample_channels((4, 4, 1, 3), CsitProfile(1), 1e6, seed)
        vals.append(np.linalg.norm(ch.true(1, 2) - ch.estimate[(1, 2)]) ** 2)
    assert np.mean(vals) == pytest.approx(4e-6, rel=0.1)


def test_entries_are_unit_variance_circular():
    ch = sample_channels((6, 6, 6, 6), None, 10.0, seed=3)
    z = np.concatenate([ch.estimate[l].ravel() for l in LINKS] + [ch.error[l].ravel() for l in LINKS])
    assert np.mean(np.abs(z) ** 2) == pytest.approx(1, rel=0.1)
    assert abs(np.mean(z * z)) < 0.15


def test_power_must_exceed_one():
    with pytest.raises(ValueError):
        sample_channels((1, 1, 1, 1), None, 1.0, seed=0)


def test_null_basis_coordinate_kernel():
    basis = null_basis(np.array([[1, 0, 0, 0]]), 3)
    expected = np.eye(4)[:, 1:]
    assert np.allclose(projector(basis), projector(expected), atol=1e-12)


def test_null_basis_random_matrix():
    rng = np.random.default_rng(0)
    h = rng.standard_normal((1, 4)) + 1j * rng.standard_normal((1, 4))
    basis = null_basis(h, 3)
    assert np.max(np.linalg.norm(h @ basis, axis=0)) <= 1e-10
    assert np.allclose(basis.conj().T @ basis, np.eye(3), atol=1e-12)
    ref = scipy.linalg.null_space(h)
    assert np.allclose(projector(basis), projector(ref), atol=1e-10)


def test_null_basis_too_many_vectors():
    rng = np.random.default_rng(1)
    with pytest.raises(KernelDimensionError):
        null_basis(rng.standard_normal((1, 4)), 4)
    with pytest.raises(KernelDimensionError):
        null_basis(np.array([[1.0, 1.0], [1.0, 1.0 + 1e-14]]), 2)
    assert null_basis(np.eye(3), 0).shape == (3, 0)


def test_random_unit_frame_is_orthonormal():
    f = random_unit_frame(np.random.default_rng(2), 4, 3)
    assert np.allclose(f.conj().T @ f, np.eye(3), atol=1e-12)
    with pytest.raises(ValueError):
        random_unit_frame(np.random.default_rng(2), 2, 3)


def test_precoders_for_case3():
    sch = build_scheme((3, 4, 1, 3), CsitProfile(2 / 3))
    ch = sample_channels(sch.config, sch.csit, 1e8, seed=4)
    pre = realize_precoders(sch, ch, seed=5)
    private = [i for i, s in enumerate(sch.streams) if s.precoder == NULL_12]
    assert len(private) == 3
    v = np.stack([pre.vectors[i] for i in private], axis=1)
    assert np.max(np.linalg.norm(ch.estimate[(1, 2)] @ v, axis=0)) <= 1e-10
    assert np.allclose(v.conj().T @ v, np.eye(3), atol=1e-12)
    for vec in pre.vectors:
        assert np.linalg.norm(vec) == pytest.approx(1, abs=1e-12)


def test_precoder_seeds():
    sch = build_scheme((4, 4, 1, 3), CsitProfile(5 / 6, 0.5))
    ch = sample_channels(sch.config, sch.csit, 1e8, seed=0)
    a = realize_precoders(sch, ch, seed=1)
    b = realize_precoders(sch, ch, seed=2)
    generic = [i for i, s in enumerate(sch.streams) if s.precoder == GENERIC]
    assert any(not np.allclose(a.vectors[i], b.vectors[i]) for i in generic)
    for kind in (NULL_12, NULL_21):
        ids = [i for i, s in enumerate(sch.streams) if s.precoder == kind]
        pa = projector(np.stack([a.vectors[i] for i in ids], axis=1))
        pb = projector(np.stack([b.vectors[i] for i in ids], axis=1))
        assert np.allclose(pa, pb, atol=1e-10)
    again = realize_precoders(sch, ch, seed=1)
    assert all(np.array_equal(x, y) for x, y in zip(a.vectors, again.vectors))


def test_user_without_streams():
    sch = build_scheme((2, 2, 2, 3), CsitProfile(0.3))
    assert sch.owned_by(2) == []
    pre = realize_precoders(sch, sample_channels(sch.config, sch.csit, 1e6, 0), 0)
    assert pre.for_owner(sch, 2) == []


def test_power_class_scaling_meets_power_budget():
    sch = build_scheme((4, 4, 1, 3), CsitProfile(5 / 6, 0.5))
    scales = power_class_scales(sch)
    for owner in (1, 2):
        # each class contributes c^2 * size = 1/2 at most
        assert sum(scales[i] ** 2 for i in sch.owned_by(owner)) <= 1.0 + 1e-12


def test_received_columns_scale_with_power():
    sch = build_scheme((1, 4, 1, 3), CsitProfile(0.5))
    ch = sample_channels(sch.config, sch.csit, 1e6, 0)
    pre = realize_precoders(sch, ch, 0)
    lo = received_columns(sch, ch, pre, 2)
    hi = received_columns(sch, ch.at_power(1e8), pre, 2)
    # common stream at P: amplitude grows by 10 between 1e6 and 1e8
    assert np.linalg.norm(hi[:, 0]) / np.linalg.norm(lo[:, 0]) == pytest.approx(10, rel=1e-9)


def test_trial_seeds_are_distinct():
    a = trial_seeds(0, 0)
    b = trial_seeds(0, 1)
    draw = [np.random.default_rng(s).random() for s in (*a, *b)]
    assert len(set(draw)) == 4
