"""Image and depth-map file I/O.

Images live on disk as 8-bit RGB PNG, mapped linearly from the [0, 1]
float range used everywhere in memory.  Depth maps are single-channel
PFM (Portable FloatMap) files, little-endian (scale -1.0), which keeps
depth values lossless across a round trip.
"""

from __future__ import annotations

import os

import numpy as np
from PIL import Image

from .errors import InvalidInputError


def save_png(path: str | os.PathLike, image: np.ndarray) -> None:
    """Write an (h, w, 3) float image in [0, 1] as 8-bit RGB PNG."""
    arr = np.asarray(image)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise InvalidInputError(f"expected (h, w, 3) image, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise InvalidInputError("image contains non-finite values")
    quantized = np.round(np.clip(arr, 0.0, 1.0) * 255.0).astype(np.uint8)
    Image.fromarray(quantized, mode="RGB").save(path, format="PNG")


def load_png(path: str | os.PathLike) -> np.ndarray:
    """Read a PNG into an (h, w, 3) float32 array in [0, 1]."""
    with Image.open(path) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.float32)
    return arr / 255.0


def save_pfm(path: str | os.PathLike, values: np.ndarray) -> None:
    """Write a 2-D float array as a grayscale little-endian PFM file.

    PFM stores scanlines bottom-to-top; a negative scale marks
    little-endian data.  We always write scale -1.0.
    """
    arr = np.asarray(values, dtype=np.float32)
    if arr.ndim != 2:
        raise InvalidInputError(f"expected 2-D depth map, got shape {arr.shape}")
    h, w = arr.shape
    with open(path, "wb") as f:
        f.write(b"Pf\n")
        f.write(f"{w} {h}\n".encode("ascii"))
        f.write(b"-1.0\n")
        f.write(arr[::-1].astype("<f4").tobytes())


def load_pfm(path: str | os.PathLike) -> np.ndarray:
    """Read a grayscale PFM file into an (h, w) float32 array."""
    with open(path, "rb") as f:
        header = f.readline().strip()
        if header != b"Pf":
            raise InvalidInputError(f"{path}: not a grayscale PFM file (header {header!r})")
        dims = f.readline().split()
        if len(dims) != 2:
            raise InvalidInputError(f"{path}: malformed PFM dimension line")
        w, h = int(dims[0]), int(dims[1])
        scale = float(f.readline().strip())
        dtype = "<f4" if scale < 0 else ">f4"
        data = np.frombuffer(f.read(4 * w * h), dtype=dtype)
    if data.size != w * h:
        raise InvalidInputError(f"{path}: truncated PFM payload")
    return data.reshape(h, w)[::-1].astype(np.float32)
