import numpy as np
import pytest

from dynbgs.frame_io import (
    DecodeError,
    EmptySequenceError,
    GeometryMismatchError,
    LabelError,
    MissingDirectoryError,
    SequenceSpec,
    TemporalRoiError,
    decode_pnm,
    encode_pnm,
    load_cdnet_sequence,
    load_sequence,
    mask_filename,
    parse_temporal_roi,
    prefetch,
    read_gt,
    read_image,
    read_mask,
    write_image,
    write_mask,
)


def _write_frames(d, shapes, rs):
    d.mkdir(parents=True, exist_ok=True)
    for i, shape in enumerate(shapes, start=1):
        write_image(rs.integers(0, 256, shape, dtype=np.uint8), d / f"in{i:06d}.ppm")


def test_loads_in_order(tmp_path, rs):
    _write_frames(tmp_path, [(240, 320, 3)] * 3, rs)
    frames = list(load_sequence(SequenceSpec(tmp_path)))
    assert len(frames) == 3
    assert all(f.shape == (240, 320, 3) for f in frames)
    np.testing.assert_array_equal(frames[1], read_image(tmp_path / "in000002.ppm"))


def test_geometry_mismatch(tmp_path, rs):
    _write_frames(tmp_path, [(480, 640, 3), (240, 320, 3)], rs)
    with pytest.raises(GeometryMismatchError):
        list(load_sequence(SequenceSpec(tmp_path)))


def test_empty_and_missing(tmp_path):
    with pytest.raises(EmptySequenceError):
        load_sequence(SequenceSpec(tmp_path))
    with pytest.raises(MissingDirectoryError):
        load_sequence(SequenceSpec(tmp_path / "nope"))


def test_tiny_frames_rejected(tmp_path, rs):
    _write_frames(tmp_path, [(4, 9, 3)], rs)
    with pytest.raises(GeometryMismatchError):
        list(load_sequence(SequenceSpec(tmp_path)))


def test_pnm_roundtrip_and_comments(rs):
    img = rs.integers(0, 256, (7, 5, 3), dtype=np.uint8)
    np.testing.assert_array_equal(decode_pnm(encode_pnm(img)), img)
    gray = b"P5\n# a comment\n2 1\n255\n\x01\x02"
    assert decode_pnm(gray)[:, :, 0].tolist() == [[1, 2]]


def test_pnm_truncated():
    with pytest.raises(DecodeError):
        decode_pnm(b"P6\n4 4\n255\n\x00\x01")


def test_cdnet_minimal(tmp_path, rs):
    _write_frames(tmp_path / "input", [(8, 8, 3)], rs)
    spec = load_cdnet_sequence(tmp_path)
    assert spec.gt_dir is None and spec.roi_mask is None and spec.temporal_roi is None


def test_temporal_roi(tmp_path, rs):
    _write_frames(tmp_path / "input", [(8, 8, 3)], rs)
    (tmp_path / "temporalROI.txt").write_text("470 1700\n")
    spec = load_cdnet_sequence(tmp_path)
    assert spec.temporal_roi == (470, 1700)
    assert not spec.in_window(469) and spec.in_window(470) and spec.in_window(1700)
    (tmp_path / "temporalROI.txt").write_text("x y")
    with pytest.raises(TemporalRoiError):
        load_cdnet_sequence(tmp_path)
    with pytest.raises(TemporalRoiError):
        parse_temporal_roi("9 3")


def test_roi_file(tmp_path, rs):
    _write_frames(tmp_path / "input", [(8, 8, 3)], rs)
    roi = np.zeros((8, 8), np.uint8)
    roi[2:5, 2:5] = 255
    write_image(roi, tmp_path / "ROI.pgm")
    spec = load_cdnet_sequence(tmp_path)
    np.testing.assert_array_equal(spec.roi_mask, roi)


@pytest.mark.parametrize("ext", [".pgm", ".png"])
def test_mask_roundtrip(tmp_path, ext):
    zero = np.zeros((4, 4), np.uint8)
    write_mask(zero, tmp_path / f"a{ext}")
    np.testing.assert_array_equal(read_mask(tmp_path / f"a{ext}"), zero)
    checker = (np.indices((6, 6)).sum(axis=0) % 2 * 255).astype(np.uint8)
    write_mask(checker, tmp_path / f"b{ext}")
    np.testing.assert_array_equal(read_mask(tmp_path / f"b{ext}"), checker)


def test_mask_to_missing_dir(tmp_path):
    with pytest.raises(OSError):
        write_mask(np.zeros((4, 4), np.uint8), tmp_path / "nope" / "m.pgm")


def test_mask_values_checked(tmp_path):
    with pytest.raises(ValueError):
        write_mask(np.full((2, 2), 7, np.uint8), tmp_path / "m.pgm")


def test_gt_labels_checked(tmp_path):
    write_image(np.array([[0, 50], [85, 171]], np.uint8), tmp_path / "gt.pgm")
    with pytest.raises(LabelError):
        read_gt(tmp_path / "gt.pgm")


def test_mask_filename():
    assert mask_filename(12, ".png") == "bin000012.png"


def test_prefetch_propagates_errors():
    def gen():
        yield 1
        raise DecodeError("boom")

    it = prefetch(gen())
    assert next(it) == 1
    with pytest.raises(DecodeError):
        next(it)
