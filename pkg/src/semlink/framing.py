"""Bit framing for caption text and raw image payloads.

Frames are sized exactly to the link's information capacity and tolerate
arbitrary payload corruption on the receive side: corrupted text decodes
to a corrupted-but-printable string, corrupted image chunks decode to
noisy pixels.  There is deliberately no checksum, so damaged content
reaches the semantic decoder instead of being discarded.

Bit order is MSB-first within every byte, asserted by golden vectors.
"""

from __future__ import annotations

import codecs
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .codec import TextKnowledge
from .raster import ImageRaster

LENGTH_FIELD_BITS = 16
KIND_FIELD_BITS = 8
HEADER_BITS = LENGTH_FIELD_BITS + KIND_FIELD_BITS
CHUNK_INDEX_BITS = 16
MAX_IMAGE_CHUNKS = 1 << CHUNK_INDEX_BITS


class PayloadKind(Enum):
    TEXT = 0x01
    IMAGE_CHUNK = 0x02


@dataclass(frozen=True)
class BitFrame:
    bits: np.ndarray  # uint8 values in {0, 1}, length == frame capacity
    payload_kind: PayloadKind
    payload_bits: int

    def __post_init__(self) -> None:
        bits = np.asarray(self.bits, dtype=np.uint8)
        object.__setattr__(self, "bits", bits)
        if bits.ndim != 1:
            raise ValueError("frame bits must be a flat sequence")
        if np.any(bits > 1):
            raise ValueError("frame bits must be 0 or 1")
        header = HEADER_BITS + (
            CHUNK_INDEX_BITS if self.payload_kind is PayloadKind.IMAGE_CHUNK else 0
        )
        if self.payload_bits > bits.size - header:
            raise ValueError("payload_bits exceeds frame capacity minus header")


def bytes_to_bits(data: bytes) -> np.ndarray:
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8))


def bits_to_bytes(bits: np.ndarray) -> bytes:
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes()


def _uint_to_bits(value: int, width: int) -> np.ndarray:
    if not 0 <= value < (1 << width):
        raise ValueError(f"value {value} does not fit in {width} bits")
    return np.array([(value >> (width - 1 - i)) & 1 for i in range(width)], dtype=np.uint8)


def _bits_to_uint(bits: np.ndarray) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return value


def _qmark_per_byte(err: UnicodeDecodeError):
    return "?" * (err.end - err.start), err.end


codecs.register_error("semlink_qmark", _qmark_per_byte)


def frame_text(text: TextKnowledge, capacity_bits: int) -> BitFrame:
    """Pack a caption into one frame: 24-bit header, UTF-8 bytes, zero pad."""
    if not text.text:
        raise ValueError("cannot frame empty text")
    data = text.text.encode("utf-8")
    required = HEADER_BITS + 8 * len(data)
    if required > capacity_bits:
        raise ValueError(
            f"text needs {required} bits but the frame capacity is {capacity_bits}"
        )
    bits = np.zeros(capacity_bits, dtype=np.uint8)
    bits[:LENGTH_FIELD_BITS] = _uint_to_bits(len(data), LENGTH_FIELD_BITS)
    bits[LENGTH_FIELD_BITS:HEADER_BITS] = _uint_to_bits(
        PayloadKind.TEXT.value, KIND_FIELD_BITS
    )
    bits[HEADER_BITS : HEADER_BITS + 8 * len(data)] = bytes_to_bits(data)
    return BitFrame(bits=bits, payload_kind=PayloadKind.TEXT, payload_bits=8 * len(data))


def deframe_text(frame: BitFrame) -> TextKnowledge:
    """Recover text from a frame, never failing on payload corruption.

    The length field is clamped to the bits actually present, and byte
    sequences that are not valid UTF-8 decode to one '?' per bad byte.
    """
    bits = frame.bits
    if bits.size < HEADER_BITS:
        raise ValueError(f"frame of {bits.size} bits is smaller than the header")
    length = _bits_to_uint(bits[:LENGTH_FIELD_BITS])
    available = (bits.size - HEADER_BITS) // 8
    length = min(length, available)
    data = bits_to_bytes(bits[HEADER_BITS : HEADER_BITS + 8 * length])
    return TextKnowledge(text=data.decode("utf-8", errors="semlink_qmark"))


def frame_image(image: ImageRaster, capacity_bits: int) -> list[BitFrame]:
    """Split raw RGB bytes into indexed chunk frames of fixed capacity."""
    chunk_bytes = (capacity_bits - HEADER_BITS - CHUNK_INDEX_BITS) // 8
    if chunk_bytes < 1:
        raise ValueError(
            f"capacity of {capacity_bits} bits leaves no room after the header"
        )
    data = image.pixels
    num_chunks = math.ceil(len(data) / chunk_bytes)
    if num_chunks > MAX_IMAGE_CHUNKS:
        raise ValueError(
            f"image needs {num_chunks} chunks, above the {MAX_IMAGE_CHUNKS} limit"
        )
    frames = []
    for index in range(num_chunks):
        chunk = data[index * chunk_bytes : (index + 1) * chunk_bytes]
        bits = np.zeros(capacity_bits, dtype=np.uint8)
        bits[:LENGTH_FIELD_BITS] = _uint_to_bits(len(chunk), LENGTH_FIELD_BITS)
        bits[LENGTH_FIELD_BITS:HEADER_BITS] = _uint_to_bits(
            PayloadKind.IMAGE_CHUNK.value, KIND_FIELD_BITS
        )
        start = HEADER_BITS + CHUNK_INDEX_BITS
        bits[HEADER_BITS:start] = _uint_to_bits(index, CHUNK_INDEX_BITS)
        bits[start : start + 8 * len(chunk)] = bytes_to_bits(chunk)
        frames.append(
            BitFrame(
                bits=bits,
                payload_kind=PayloadKind.IMAGE_CHUNK,
                payload_bits=8 * len(chunk),
            )
        )
    return frames


def reassemble_image(frames: list[BitFrame], width: int, height: int) -> ImageRaster:
    """Concatenate chunk payloads back into a raster, tolerating corruption.

    With a complete frame list the chunks are taken positionally, so bit
    errors map to pixel noise even when they land in the index field.  If
    frames are missing, the per-frame chunk index places what arrived and
    absent chunks stay zero-filled.
    """
    if not frames:
        raise ValueError("no frames to reassemble")
    total_bytes = width * height * 3
    capacity_bits = frames[0].bits.size
    chunk_bytes = (capacity_bits - HEADER_BITS - CHUNK_INDEX_BITS) // 8
    if chunk_bytes < 1:
        raise ValueError("frame capacity too small for image chunks")
    expected = math.ceil(total_bytes / chunk_bytes)

    buf = bytearray(expected * chunk_bytes)
    payload_start = HEADER_BITS + CHUNK_INDEX_BITS

    def chunk_payload(frame: BitFrame) -> bytes:
        return bits_to_bytes(frame.bits[payload_start : payload_start + 8 * chunk_bytes])

    if len(frames) >= expected:
        for slot in range(expected):
            buf[slot * chunk_bytes : (slot + 1) * chunk_bytes] = chunk_payload(
                frames[slot]
            )
    else:
        for frame in frames:
            slot = _bits_to_uint(frame.bits[HEADER_BITS:payload_start]) % expected
            buf[slot * chunk_bytes : (slot + 1) * chunk_bytes] = chunk_payload(frame)

    return ImageRaster(width=width, height=height, pixels=bytes(buf[:total_bytes]))
