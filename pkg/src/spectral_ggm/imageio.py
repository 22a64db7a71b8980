"""
Image files: binary PGM (P5), PNG and raw ``.npy`` arrays.

Intensities are returned as float arrays on their stored scale (0-255 or
0-65535); nothing is normalized. Clamping and rounding happen only when
writing an integer format.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .errors import ImageFormatError, InvalidConfig, NonSquareImage

__all__ = ["LoadedImage", "read_image", "write_image", "read_pgm", "write_pgm",
           "file_digest", "CHANNEL_NAMES"]

CHANNEL_NAMES = ("R", "G", "B")
_WHITESPACE = b" \t\n\r\v\f"


@dataclass(frozen=True, eq=False)
class LoadedImage:
    data: np.ndarray  # (N, N) or (N, N, 3), float
    maxval: int | None
    fmt: str

    @property
    def channels(self):
        """``[(name, N x N field), ...]``; a single ``gray`` channel or R, G, B."""
        if self.data.ndim == 2:
            return [("gray", self.data)]
        return [(CHANNEL_NAMES[i], self.data[:, :, i]) for i in range(self.data.shape[2])]

    @property
    def size(self):
        return self.data.shape[0]


def file_digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return "sha256:" + h.hexdigest()


def _header_token(buf, pos, what):
    """Return (token, position after it), skipping whitespace and comments."""
    n = len(buf)
    while pos < n:
        ch = buf[pos]
        if ch == ord("#"):
            while pos < n and buf[pos] not in b"\n\r":
                pos += 1
        elif ch in _WHITESPACE:
            pos += 1
        else:
            break
    start = pos
    while pos < n and buf[pos] not in _WHITESPACE and buf[pos] != ord("#"):
        pos += 1
    if start == pos:
        raise ImageFormatError(f"PGM header truncated at byte offset {start}: expected {what}")
    tok = buf[start:pos]
    if not tok.isdigit():
        raise ImageFormatError(
            f"PGM header corrupt at byte offset {start}: expected {what}, got {tok[:16]!r}"
        )
    return int(tok), pos


def read_pgm(path):
    """Read a binary (P5) PGM; 16-bit samples are big-endian."""
    with open(path, "rb") as fh:
        buf = fh.read()
    if buf[:2] != b"P5":
        raise ImageFormatError(
            f"{path}: not a binary PGM, bad magic number at byte offset 0: {buf[:2]!r}"
        )
    pos = 2
    width, pos = _header_token(buf, pos, "width")
    height, pos = _header_token(buf, pos, "height")
    maxval, pos = _header_token(buf, pos, "maxval")
    if not 0 < maxval < 65536:
        raise ImageFormatError(f"{path}: maxval {maxval} out of range before byte offset {pos}")
    if pos >= len(buf) or buf[pos] not in _WHITESPACE:
        raise ImageFormatError(f"{path}: missing whitespace after header at byte offset {pos}")
    pos += 1
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    need = width * height * dtype.itemsize
    if len(buf) - pos < need:
        raise ImageFormatError(
            f"{path}: pixel data truncated: {len(buf) - pos} bytes from offset {pos}, need {need}"
        )
    data = np.frombuffer(buf, dtype=dtype, count=width * height, offset=pos)
    return data.reshape(height, width).astype(float), maxval


def write_pgm(path, values, maxval=65535):
    """Write a P5 PGM, rounding and clamping ``values`` to ``[0, maxval]``."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise InvalidConfig("PGM output holds a single channel; use .png or .npy for RGB")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    q = np.clip(np.rint(values), 0, maxval).astype(dtype)
    header = b"P5\n%d %d\n%d\n" % (values.shape[1], values.shape[0], maxval)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(q.tobytes())


def _read_png(path):
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode in ("L", "RGB"):
                arr = np.asarray(im)
            elif im.mode in ("P", "RGBA", "LA"):
                arr = np.asarray(im.convert("RGB" if im.mode != "LA" else "L"))
            else:
                raise ImageFormatError(f"{path}: unsupported PNG mode {im.mode!r}")
    except FileNotFoundError:
        raise
    except (OSError, SyntaxError) as exc:
        if isinstance(exc, ImageFormatError):
            raise
        raise ImageFormatError(f"{path}: cannot decode PNG: {exc}") from exc
    return arr.astype(float), 255


def read_image(path) -> LoadedImage:
    """
    Load a square image as float intensities.

    Raises
    ------
    FileNotFoundError, ImageFormatError
        Unreadable or malformed file.
    NonSquareImage
        Height and width differ.
    """
    ext = os.path.splitext(str(path))[1].lower()
    if ext == ".pgm":
        data, maxval = read_pgm(path)
        fmt = "pgm"
    elif ext == ".png":
        data, maxval = _read_png(path)
        fmt = "png"
    elif ext == ".npy":
        try:
            data = np.load(path, allow_pickle=False).astype(float)
        except ValueError as exc:
            raise ImageFormatError(f"{path}: cannot read array: {exc}") from exc
        maxval, fmt = None, "npy"
    else:
        raise ImageFormatError(f"{path}: unsupported image extension {ext!r}")
    if data.ndim not in (2, 3) or (data.ndim == 3 and data.shape[2] != 3):
        raise ImageFormatError(f"{path}: expected a grayscale or RGB image, got shape {data.shape}")
    if data.shape[0] != data.shape[1]:
        raise NonSquareImage(
            f"{path}: image is {data.shape[1]}x{data.shape[0]}; the torus model needs N x N"
        )
    return LoadedImage(data, maxval, fmt)


def write_image(path, data, maxval=255):
    """Write by extension: ``.pgm`` (``maxval`` bits), ``.png`` (8-bit) or ``.npy`` (exact)."""
    ext = os.path.splitext(str(path))[1].lower()
    data = np.asarray(data, dtype=float)
    if ext == ".pgm":
        write_pgm(path, data, maxval)
    elif ext == ".png":
        q = np.clip(np.rint(data), 0, 255).astype(np.uint8)
        Image.fromarray(q).save(path, format="PNG")
    elif ext == ".npy":
        with open(path, "wb") as fh:
            np.save(fh, data, allow_pickle=False)
    else:
        raise InvalidConfig(f"unsupported output extension {ext!r} (use .pgm, .png or .npy)")
