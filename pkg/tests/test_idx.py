import struct

import numpy as np
import pytest

from adasample.errors import DataError, IdxFormatError
from adasample.idx import load_idx, load_idx_images, load_idx_labels


class TestLoadIdx:
    def test_handcrafted_single_image(self, fixtures_dir):
        pool = load_idx(fixtures_dir / "mini_images.idx", fixtures_dir / "mini_labels.idx")
        assert pool.images.shape == (1, 2, 2)
        np.testing.assert_allclose(
            pool.images[0].ravel(), [0.0, 85 / 255, 170 / 255, 255 / 255]
        )
        np.testing.assert_allclose(pool.images[0].ravel(), [0.0, 1 / 3, 2 / 3, 1.0])
        assert pool.labels.tolist() == [7]
        assert pool.by_class[7].tolist() == [0]

    def test_wrong_magic_reports_offset_zero(self, fixtures_dir):
        with pytest.raises(IdxFormatError) as err:
            load_idx_images(fixtures_dir / "wrong_magic.idx")
        assert err.value.offset == 0
        assert "0x00000801" in str(err.value)

    def test_truncated_payload_reports_offset(self, fixtures_dir):
        with pytest.raises(IdxFormatError) as err:
            load_idx_images(fixtures_dir / "truncated_images.idx")
        assert err.value.offset == 16

    def test_truncated_header(self, tmp_path):
        short = tmp_path / "short.idx"
        short.write_bytes(b"\x00\x00\x08\x03\x00")
        with pytest.raises(IdxFormatError) as err:
            load_idx_images(short)
        assert err.value.offset == 0

    def test_count_mismatch(self, fixtures_dir):
        with pytest.raises(DataError, match="count mismatch"):
            load_idx(fixtures_dir / "mini_images.idx", fixtures_dir / "two_labels.idx")

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="not found"):
            load_idx_images(tmp_path / "nope.idx")

    def test_label_magic_checked(self, fixtures_dir):
        with pytest.raises(IdxFormatError) as err:
            load_idx_labels(fixtures_dir / "mini_images.idx")
        assert err.value.offset == 0

    def test_label_out_of_class_range(self, tmp_path):
        img = tmp_path / "img.idx"
        lbl = tmp_path / "lbl.idx"
        img.write_bytes(struct.pack(">IIII", 0x00000803, 1, 1, 1) + bytes([5]))
        lbl.write_bytes(struct.pack(">II", 0x00000801, 1) + bytes([11]))
        with pytest.raises(DataError, match="label"):
            load_idx(img, lbl)

    def test_round_trip_synthetic_file(self, tmp_path):
        rng = np.random.default_rng(3)
        pixels = rng.integers(0, 256, size=(5, 4, 3), dtype=np.uint8)
        labels = np.array([0, 1, 2, 1, 0], dtype=np.uint8)
        img = tmp_path / "img.idx"
        lbl = tmp_path / "lbl.idx"
        img.write_bytes(struct.pack(">IIII", 0x00000803, 5, 4, 3) + pixels.tobytes())
        lbl.write_bytes(struct.pack(">II", 0x00000801, 5) + labels.tobytes())
        pool = load_idx(img, lbl, n_classes=3)
        np.testing.assert_allclose(pool.images, pixels / 255.0)
        assert pool.labels.tolist() == labels.tolist()
        assert pool.by_class[1].tolist() == [1, 3]


class TestImagePool:
    def test_select_is_uniform_partition_of_selector(self, fixtures_dir):
        pool = load_idx(fixtures_dir / "mini_images.idx", fixtures_dir / "mini_labels.idx")
        img = pool.select(7, 0.0)
        np.testing.assert_allclose(img, pool.images[0])
        # selector just below 1.0 must still pick a valid member
        np.testing.assert_allclose(pool.select(7, 0.999999), pool.images[0])

    def test_select_missing_class(self, fixtures_dir):
        pool = load_idx(fixtures_dir / "mini_images.idx", fixtures_dir / "mini_labels.idx")
        with pytest.raises(DataError, match="class 3"):
            pool.select(3, 0.5)
