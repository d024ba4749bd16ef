"""Tests for model specs, construction and forward passes."""

import numpy as np
import pytest

from sparsehead_lab.autodiff import Tensor, gradcheck
from sparsehead_lab.errors import DimensionError, SpecError, UnsupportedError
from sparsehead_lab.models import EncoderSpec, HeadKind, HeadSpec, encode, init_model, project, regularized_matrix
from sparsehead_lab.objectives import ContrastiveBatch, infonce


class TestSpecs:
    def test_encoder_layer_dims(self):
        spec = EncoderSpec(input_dim=8, hidden=(16, 12), output_dim=4)
        assert spec.layer_dims == [(8, 16), (16, 12), (12, 4)]

    def test_encoder_rejects_zero_width(self):
        with pytest.raises(SpecError):
            EncoderSpec(input_dim=8, hidden=(0,), output_dim=4)

    def test_identity_head_dims(self):
        with pytest.raises(SpecError):
            HeadSpec(HeadKind.IDENTITY, input_dim=4, output_dim=3)

    def test_unknown_head_kind(self):
        with pytest.raises(SpecError):
            HeadSpec("conv", input_dim=4, output_dim=4)

    def test_standardize_only_nonlinear(self):
        with pytest.raises(SpecError):
            HeadSpec(HeadKind.LINEAR, input_dim=4, output_dim=4, standardize=True)

    def test_hidden_defaults_to_input(self):
        assert HeadSpec(HeadKind.NONLINEAR, input_dim=6, output_dim=2).hidden_width == 6

    def test_dict_round_trip(self):
        spec = HeadSpec(HeadKind.NONLINEAR, input_dim=6, output_dim=2, hidden=9, standardize=True)
        assert HeadSpec.from_dict(spec.to_dict()) == spec


class TestInitModel:
    def test_deterministic(self):
        enc = EncoderSpec(input_dim=8, hidden=(16,), output_dim=4)
        head = HeadSpec(HeadKind.LINEAR, input_dim=4, output_dim=3)
        a = init_model(enc, head, seed=7)
        b = init_model(enc, head, seed=7)
        c = init_model(enc, head, seed=8)
        assert a.checksum() == b.checksum()
        assert a.checksum() != c.checksum()

    def test_parameter_names(self, linear_model, nonlinear_model, identity_model):
        assert set(linear_model.named_parameters()) == {
            "encoder.0.weight", "encoder.0.bias", "encoder.1.weight", "encoder.1.bias", "head.0.weight",
        }
        assert "head.1.bias" in nonlinear_model.named_parameters()
        assert not any(k.startswith("head.") for k in identity_model.named_parameters())

    def test_parameter_count(self, linear_model):
        assert linear_model.parameter_count == (8 * 16 + 16) + (16 * 4 + 4) + 4 * 3
        assert linear_model.encoder_parameter_count == (8 * 16 + 16) + (16 * 4 + 4)

    def test_glorot_bounds(self, linear_model):
        w = linear_model.encoder[0].weight.data
        assert np.abs(w).max() <= np.sqrt(6.0 / (8 + 16))
        assert np.all(linear_model.encoder[0].bias.data == 0.0)

    def test_mismatched_head(self):
        with pytest.raises(SpecError):
            init_model(
                EncoderSpec(input_dim=8, output_dim=4),
                HeadSpec(HeadKind.LINEAR, input_dim=5, output_dim=3),
                seed=0,
            )


class TestForward:
    def test_shapes(self, linear_model, nonlinear_model, rng):
        x = rng.standard_normal((10, 8))
        r = encode(linear_model, x)
        assert r.shape == (10, 4)
        assert project(linear_model, r).shape == (10, 3)
        assert project(nonlinear_model, encode(nonlinear_model, x)).shape == (10, 3)

    def test_wrong_input_dim(self, linear_model, rng):
        with pytest.raises(DimensionError):
            encode(linear_model, rng.standard_normal((10, 7)))
        with pytest.raises(DimensionError):
            project(linear_model, Tensor(rng.standard_normal((10, 5))))

    def test_identity_head_is_exact(self, identity_model, rng):
        r = encode(identity_model, rng.standard_normal((5, 8)))
        assert project(identity_model, r) is r

    def test_linear_head_is_matrix_product(self, linear_model, rng):
        r = encode(linear_model, rng.standard_normal((5, 8)))
        w = regularized_matrix(linear_model).data
        assert np.allclose(project(linear_model, r).data, r.data @ w.T)

    def test_deterministic(self, nonlinear_model, rng):
        x = rng.standard_normal((5, 8))
        a = project(nonlinear_model, encode(nonlinear_model, x)).data
        b = project(nonlinear_model, encode(nonlinear_model, x)).data
        assert np.array_equal(a, b)

    def test_running_stats_update_only_in_training(self, nonlinear_model, rng):
        x = rng.standard_normal((12, 8))
        stats = nonlinear_model.head_stats
        before = stats.mean.copy()
        project(nonlinear_model, encode(nonlinear_model, x))
        assert np.array_equal(stats.mean, before)
        project(nonlinear_model, encode(nonlinear_model, x), training=True)
        assert not np.array_equal(stats.mean, before)

    def test_gradcheck_through_model(self, linear_model, rng):
        x = rng.standard_normal((6, 8))
        params = list(linear_model.named_parameters().values())

        def fn():
            return infonce(ContrastiveBatch(project(linear_model, encode(linear_model, x))))

        result = gradcheck(fn, params, coords=30, seed=1)
        assert result.passed(1e-4)


class TestRegularizedMatrix:
    def test_linear(self, linear_model):
        w = regularized_matrix(linear_model)
        assert w is linear_model.head[0].weight
        assert w.shape == (3, 4)
        assert linear_model.regularized_name() == "head.0.weight"

    def test_nonlinear_last_layer(self, nonlinear_model):
        w = regularized_matrix(nonlinear_model)
        assert w is nonlinear_model.head[1].weight
        assert w.shape == (3, 5)
        assert nonlinear_model.regularized_name() == "head.1.weight"

    def test_identity(self, identity_model):
        with pytest.raises(UnsupportedError):
            regularized_matrix(identity_model)
        with pytest.raises(UnsupportedError):
            identity_model.regularized_name()

    def test_view_tracks_updates(self, linear_model):
        w = regularized_matrix(linear_model)
        linear_model.head[0].weight.data[0, 0] = 42.0
        assert w.data[0, 0] == 42.0


class TestSnapshot:
    def test_independent_copy(self, nonlinear_model):
        snap = nonlinear_model.snapshot()
        assert snap.checksum() == nonlinear_model.checksum()
        snap.encoder[0].weight.data[0, 0] += 1.0
        snap.head_stats.mean[0] += 1.0
        assert snap.checksum() != nonlinear_model.checksum()
        assert nonlinear_model.head_stats.mean[0] == 0.0

    def test_encoder_checksum_ignores_head(self, linear_model):
        before = linear_model.checksum(encoder_only=True)
        linear_model.head[0].weight.data += 1.0
        assert linear_model.checksum(encoder_only=True) == before
