"""Tests for TDS files and raw image-batch import."""

import struct

import numpy as np
import pytest

from sparsehead_lab.datagen import Dataset, decode_tds, encode_tds, import_raw_images, load_tds, write_tds
from sparsehead_lab.errors import FormatError


@pytest.fixture
def labeled():
    return Dataset(features=np.arange(6.0).reshape(3, 2), labels=np.array([0, 1, 1]), n_classes=2)


def _raw_record(label_bytes, pixel):
    return bytes(label_bytes) + bytes([pixel]) * 3072


class TestTds:
    def test_header(self, labeled):
        payload = encode_tds(labeled)
        assert payload[:4] == b"TDS1"
        assert struct.unpack("<III", payload[4:16]) == (3, 2, 2)
        assert len(payload) == 16 + 3 * 2 * 8 + 3 * 2

    def test_file_round_trip(self, tmp_path, labeled):
        path = tmp_path / "data.tds"
        write_tds(labeled, path)
        loaded = load_tds(path)
        assert np.array_equal(loaded.features, labeled.features)
        assert np.array_equal(loaded.labels, labeled.labels)
        assert loaded.n_classes == 2

    def test_unlabeled(self):
        loaded = decode_tds(encode_tds(Dataset(features=np.ones((2, 3)))))
        assert loaded.labels is None
        assert loaded.n_classes == 0

    def test_bad_magic(self, labeled):
        with pytest.raises(FormatError, match="magic"):
            decode_tds(b"XXXX" + encode_tds(labeled)[4:])

    def test_truncated(self, labeled):
        with pytest.raises(FormatError, match="truncated"):
            decode_tds(encode_tds(labeled)[:-1])
        with pytest.raises(FormatError, match="truncated"):
            decode_tds(b"TDS1")

    def test_trailing(self, labeled):
        with pytest.raises(FormatError, match="trailing"):
            decode_tds(encode_tds(labeled) + b"\x00")

    def test_label_out_of_range(self, labeled):
        payload = encode_tds(labeled)[:-2] + struct.pack("<H", 5)
        with pytest.raises(FormatError, match="out of range"):
            decode_tds(payload)

    def test_image_shape_attached(self):
        data = Dataset(features=np.zeros((1, 12)))
        assert decode_tds(encode_tds(data), image_shape=(3, 2, 2)).image_shape == (3, 2, 2)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_tds(tmp_path / "missing.tds")


class TestImportRaw:
    def test_cifar10(self, tmp_path):
        path = tmp_path / "batch.bin"
        path.write_bytes(_raw_record([3], 255) + _raw_record([7], 0))
        data = import_raw_images(path)
        assert data.features.shape == (2, 3072)
        assert data.labels.tolist() == [3, 7]
        assert data.n_classes == 10
        assert data.image_shape == (3, 32, 32)
        assert data.features[0].min() == 1.0 and data.features[1].max() == 0.0

    def test_cifar100_uses_fine_label(self, tmp_path):
        path = tmp_path / "train.bin"
        path.write_bytes(_raw_record([4, 42], 128))
        data = import_raw_images([path], layout="cifar100")
        assert data.labels.tolist() == [42]
        assert data.n_classes == 100
        assert data.features[0, 0] == pytest.approx(128 / 255)

    def test_multiple_files(self, tmp_path):
        paths = []
        for i in range(2):
            p = tmp_path / f"b{i}.bin"
            p.write_bytes(_raw_record([i], 10))
            paths.append(p)
        assert import_raw_images(paths).labels.tolist() == [0, 1]

    def test_bad_size(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"\x00" * 100)
        with pytest.raises(FormatError, match="multiple"):
            import_raw_images(path)

    def test_label_out_of_range(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(_raw_record([12], 0))
        with pytest.raises(FormatError):
            import_raw_images(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            import_raw_images(tmp_path / "none.bin")
