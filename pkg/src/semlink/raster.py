"""Raw RGB image container with PNG ingestion at the corpus boundary."""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image


@dataclass(frozen=True)
class ImageRaster:
    """Row-major RGB image, 8 bits per channel, held as raw bytes.

    Holding decoded pixels (not an encoded file) keeps every downstream
    operation bit-exact and independent of image codec libraries.
    """

    width: int
    height: int
    pixels: bytes

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be at least 1x1")
        expected = self.width * self.height * 3
        if len(self.pixels) != expected:
            raise ValueError(
                f"pixel buffer holds {len(self.pixels)} bytes, expected {expected}"
            )

    @classmethod
    def from_array(cls, arr) -> "ImageRaster":
        a = np.asarray(arr, dtype=np.uint8)
        if a.ndim != 3 or a.shape[2] != 3:
            raise ValueError("expected an array of shape (height, width, 3)")
        return cls(width=a.shape[1], height=a.shape[0], pixels=a.tobytes())

    def to_array(self) -> np.ndarray:
        return np.frombuffer(self.pixels, dtype=np.uint8).reshape(
            self.height, self.width, 3
        )

    @classmethod
    def from_png_bytes(cls, data: bytes) -> "ImageRaster":
        img = Image.open(io.BytesIO(data)).convert("RGB")
        return cls(width=img.width, height=img.height, pixels=img.tobytes())

    @classmethod
    def from_png_file(cls, path) -> "ImageRaster":
        with open(path, "rb") as fh:
            return cls.from_png_bytes(fh.read())

    def to_png_bytes(self) -> bytes:
        img = Image.frombytes("RGB", (self.width, self.height), self.pixels)
        buf = io.BytesIO()
        img.save(buf, format="PNG")
        return buf.getvalue()

    def resized(self, width: int, height: int) -> "ImageRaster":
        """Bilinear resize; used to compare generated images against originals."""
        if (width, height) == (self.width, self.height):
            return self
        img = Image.frombytes("RGB", (self.width, self.height), self.pixels)
        img = img.resize((width, height), Image.BILINEAR)
        return ImageRaster(width=width, height=height, pixels=img.tobytes())
