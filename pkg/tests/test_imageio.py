import numpy as np
import pytest

from spectral_ggm import imageio
from spectral_ggm.errors import ImageFormatError, InvalidConfig, NonSquareImage


def test_fixtures_load(camera_path, astronaut_path):
    cam = imageio.read_image(camera_path)
    assert cam.size == 128 and cam.maxval == 255 and cam.fmt == "pgm"
    assert [name for name, _ in cam.channels] == ["gray"]
    rgb = imageio.read_image(astronaut_path)
    assert [name for name, _ in rgb.channels] == ["R", "G", "B"]
    assert rgb.channels[1][1].shape == (128, 128)


@pytest.mark.parametrize("maxval", [255, 65535])
def test_pgm_round_trip(tmp_path, rng, maxval):
    x = rng.integers(0, maxval + 1, size=(9, 9)).astype(float)
    p = tmp_path / "a.pgm"
    imageio.write_pgm(p, x, maxval)
    back, mv = imageio.read_pgm(p)
    assert mv == maxval
    np.testing.assert_array_equal(back, x)


def test_pgm_16bit_is_big_endian(tmp_path):
    p = tmp_path / "b.pgm"
    imageio.write_pgm(p, np.array([[258.0]]), 65535)
    assert p.read_bytes().endswith(b"\x01\x02")


def test_pgm_clamps_and_rounds(tmp_path):
    p = tmp_path / "c.pgm"
    imageio.write_pgm(p, np.array([[-5.0, 2.5], [3.49, 300.0]]), 255)
    back, _ = imageio.read_pgm(p)
    np.testing.assert_array_equal(back, [[0, 2], [3, 255]])


def test_pgm_header_comments(tmp_path):
    p = tmp_path / "d.pgm"
    p.write_bytes(b"P5\n# made by hand\n2 2\n# depth\n255\n\x00\x01\x02\x03")
    back, _ = imageio.read_pgm(p)
    np.testing.assert_array_equal(back, [[0, 1], [2, 3]])


def test_corrupted_header_reports_offset(tmp_path):
    p = tmp_path / "e.pgm"
    p.write_bytes(b"P5\n2 x2\n255\n\x00\x01\x02\x03")
    with pytest.raises(ImageFormatError, match="byte offset 5"):
        imageio.read_image(p)


def test_bad_magic_and_truncation(tmp_path):
    p = tmp_path / "f.pgm"
    p.write_bytes(b"P2\n2 2\n255\n0 1 2 3")
    with pytest.raises(ImageFormatError, match="byte offset 0"):
        imageio.read_pgm(p)
    p.write_bytes(b"P5\n2 2\n255\n\x00")
    with pytest.raises(ImageFormatError, match="truncated"):
        imageio.read_pgm(p)
    p.write_bytes(b"P5\n2 2")
    with pytest.raises(ImageFormatError, match="maxval"):
        imageio.read_pgm(p)


def test_non_square_rejected(tmp_path):
    p = tmp_path / "g.pgm"
    imageio.write_pgm(p, np.zeros((64, 32)), 255)
    with pytest.raises(NonSquareImage):
        imageio.read_image(p)


def test_png_round_trip(tmp_path, rng):
    x = rng.integers(0, 256, size=(8, 8, 3)).astype(float)
    p = tmp_path / "h.png"
    imageio.write_image(p, x)
    np.testing.assert_array_equal(imageio.read_image(p).data, x)


def test_npy_round_trip_exact(tmp_path, rng):
    x = rng.standard_normal((5, 5))
    p = tmp_path / "i.npy"
    imageio.write_image(p, x)
    loaded = imageio.read_image(p)
    assert loaded.maxval is None
    np.testing.assert_array_equal(loaded.data, x)


def test_missing_file_and_bad_extension(tmp_path):
    with pytest.raises(FileNotFoundError):
        imageio.read_image(tmp_path / "nope.pgm")
    with pytest.raises(FileNotFoundError):
        imageio.read_image(tmp_path / "nope.png")
    with pytest.raises(ImageFormatError):
        imageio.read_image(tmp_path / "x.bmp")
    with pytest.raises(InvalidConfig):
        imageio.write_image(tmp_path / "x.bmp", np.zeros((2, 2)))
    with pytest.raises(InvalidConfig):
        imageio.write_pgm(tmp_path / "x.pgm", np.zeros((2, 2, 3)))


def test_garbage_png(tmp_path):
    p = tmp_path / "j.png"
    p.write_bytes(b"not a png")
    with pytest.raises(ImageFormatError):
        imageio.read_image(p)


def test_digest_is_stable(tmp_path):
    p = tmp_path / "k.bin"
    p.write_bytes(b"abc")
    assert imageio.file_digest(p) == (
        "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad")
