import numpy as np
import pytest

from gaussbounds.bounds import (
    SingularModelError,
    chain_violations,
    hcrb_upper,
    incompatibility_r,
    rld_crb,
    sld_crb,
    trace_norm,
    validate_weight,
    weight_sqrt,
)
from gaussbounds.derivatives import information_bundle
from gaussbounds.models import disp_squeeze_single_model, phase_loss_model

from conftest import random_jet


class TestWeightValidation:
    def test_identity_passes(self):
        assert np.allclose(validate_weight(np.eye(3)), np.eye(3))

    def test_asymmetric_rejected(self):
        with pytest.raises(ValueError):
            validate_weight(np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_indefinite_rejected(self):
        with pytest.raises(ValueError):
            validate_weight(np.diag([1.0, -0.1]))

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            validate_weight(np.eye(2), p=3)

    def test_sqrt(self, rng):
        a = rng.normal(size=(3, 3))
        w = a @ a.T + np.eye(3)
        root = weight_sqrt(w)
        assert np.allclose(root @ root, w)


class TestSldCrb:
    def test_trace_of_inverse(self):
        assert sld_crb(4.0 * np.eye(2), np.eye(2)) == pytest.approx(0.5)

    def test_phase_loss_coherent(self):
        jet = phase_loss_model(0.3, 0.0, 0.0).jet([0.0, 0.5]).regularized(1e-6)
        js = information_bundle(jet).js
        assert sld_crb(js, np.eye(2)) == pytest.approx(1.0 / 0.09, rel=1e-5)

    def test_disp_squeeze_value(self):
        jet = disp_squeeze_single_model(0.5).jet([0.0, 0.0, 0.0])
        js = information_bundle(jet).js
        assert sld_crb(js, np.eye(3)) == pytest.approx(1.3125, rel=1e-12)

    def test_singular_matrix_names_direction(self):
        with pytest.raises(SingularModelError, match="direction"):
            sld_crb(np.diag([1.0, 0.0]), np.eye(2))

    def test_weight_linearity(self, rng):
        jet = random_jet(rng, m=1, p=2)
        js = information_bundle(jet).js
        base = sld_crb(js, np.eye(2))
        assert sld_crb(js, 3.0 * np.eye(2)) == pytest.approx(3.0 * base, rel=1e-12)


class TestRldCrb:
    def test_real_inverse_reduction(self, rng):
        # purely real Fisher matrix: the trace-norm term vanishes
        a = rng.normal(size=(2, 2))
        jr = a @ a.T + 2.0 * np.eye(2)
        expected = np.trace(np.linalg.inv(jr))
        assert rld_crb(jr.astype(complex), np.eye(2)) == pytest.approx(expected)

    def test_phase_loss_coherent(self):
        jet = phase_loss_model(0.3, 0.0, 0.0).jet([0.0, 0.5]).regularized(1e-7)
        jr = information_bundle(jet).jr
        assert rld_crb(jr, np.eye(2)) == pytest.approx(2.0 / 0.09, rel=1e-5)

    def test_exceeds_real_part_term(self, rng):
        jet = random_jet(rng, m=1, p=2)
        jr = information_bundle(jet).jr
        inv = np.linalg.inv(jr)
        assert rld_crb(jr, np.eye(2)) >= np.trace(inv.real).real - 1e-12

    def test_weight_linearity(self, rng):
        jet = random_jet(rng, m=2, p=2)
        jr = information_bundle(jet).jr
        base = rld_crb(jr, np.eye(2))
        assert rld_crb(jr, 0.7 * np.eye(2)) == pytest.approx(0.7 * base, rel=1e-12)


class TestHcrbUpper:
    def test_zero_curvature_reduces_to_sld(self, rng):
        jet = random_jet(rng, m=1, p=2)
        js = information_bundle(jet).js
        w = np.eye(2)
        assert hcrb_upper(js, np.zeros((2, 2)), w) == pytest.approx(sld_crb(js, w))

    def test_disp_squeeze_offset_half(self):
        for n in (0.5, 2.0):
            for r in (0.0, 0.8):
                jet = disp_squeeze_single_model(n).jet([0.2, 0.1, r])
                info = information_bundle(jet)
                w = np.eye(3)
                upper = hcrb_upper(info.js, info.uhlmann, w)
                assert upper == pytest.approx(sld_crb(info.js, w) + 0.5, rel=1e-10)

    def test_weight_linearity(self, rng):
        jet = random_jet(rng, m=1, p=3)
        info = information_bundle(jet)
        base = hcrb_upper(info.js, info.uhlmann, np.eye(3))
        scaled = hcrb_upper(info.js, info.uhlmann, 2.5 * np.eye(3))
        assert scaled == pytest.approx(2.5 * base, rel=1e-12)


class TestIncompatibility:
    def test_zero_curvature(self):
        assert incompatibility_r(np.eye(2), np.zeros((2, 2))) == 0.0

    def test_maximal_displacement_model(self):
        js = 4.0 * np.eye(2)
        curv = np.array([[0.0, 4.0], [-4.0, 0.0]])
        assert incompatibility_r(js, curv) == pytest.approx(1.0)

    def test_bounded_by_one_on_random_jets(self, rng):
        for _ in range(20):
            jet = random_jet(rng)
            info = information_bundle(jet)
            r = incompatibility_r(info.js, info.uhlmann)
            assert 0.0 <= r <= 1.0

    def test_anisotropic_fisher_stays_bounded(self):
        # whitened definition: spectral radius, not the raw singular value
        jet = phase_loss_model(0.3, 0.0, 0.2).jet([0.0, 0.1])
        info = information_bundle(jet)
        r = incompatibility_r(info.js, info.uhlmann)
        assert 0.0 <= r <= 1.0
        raw = np.max(np.linalg.svd(np.linalg.inv(info.js) @ info.uhlmann)[1])
        assert raw > 1.0  # the unwhitened reading would violate the bound

    def test_upper_bound_chain(self, rng):
        for _ in range(10):
            jet = random_jet(rng, p=2)
            info = information_bundle(jet)
            w = np.eye(2)
            upper = hcrb_upper(info.js, info.uhlmann, w)
            cs = sld_crb(info.js, w)
            r = incompatibility_r(info.js, info.uhlmann)
            assert upper <= (1.0 + r) * cs + 1e-6 * cs
            assert (1.0 + r) * cs <= 2.0 * cs + 1e-6 * cs


class TestChainViolations:
    def test_clean_chain(self):
        assert chain_violations(1.0, 0.8, 1.2, 1.5, 0.6) == ()

    def test_detects_ch_above_upper(self):
        out = chain_violations(1.0, 0.8, 1.9, 1.5, 0.6)
        assert any("CHbar" in msg for msg in out)

    def test_detects_lower_violation(self):
        out = chain_violations(1.0, 1.4, 1.2, 1.5, 0.6)
        assert any("max(CS, CR)" in msg for msg in out)

    def test_none_ch_skips_sdp_rows(self):
        assert chain_violations(1.0, 0.8, None, 1.5, 0.6) == ()

    def test_trace_norm(self, rng):
        mat = rng.normal(size=(3, 3))
        assert trace_norm(mat) == pytest.approx(np.sum(np.linalg.svd(mat)[1]))
