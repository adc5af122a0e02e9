#!/usr/bin/env python3
"""Regenerate the committed fixture corpus under fixtures/.

Every image is drawn procedurally from fixed arithmetic plus a seeded RNG,
so the corpus is reproducible byte-for-byte at the pixel level.  The bird
image is 500x493 so its raw RGB payload is exactly 5,916,000 bits.
"""

from pathlib import Path

import numpy as np
from PIL import Image

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "fixtures"


def _canvas(width, height, top, bottom):
    """Vertical gradient between two RGB colors."""
    t = np.linspace(0.0, 1.0, height)[:, None, None]
    top = np.asarray(top, dtype=float)
    bottom = np.asarray(bottom, dtype=float)
    return (top * (1 - t) + bottom * t) * np.ones((height, width, 3))


def _disk(img, cx, cy, r, color, squeeze=1.0):
    h, w, _ = img.shape
    yy, xx = np.mgrid[0:h, 0:w]
    mask = ((xx - cx) / squeeze) ** 2 + (yy - cy) ** 2 <= r * r
    img[mask] = color


def _rect(img, x0, y0, x1, y1, color):
    img[y0:y1, x0:x1] = color


def bird(rng):
    w, h = 500, 493
    img = _canvas(w, h, (150, 200, 235), (210, 230, 245))
    # ground
    _rect(img, 0, 420, w, h, (120, 140, 90))
    # wooden post with grain
    _rect(img, 220, 240, 280, 440, (120, 82, 45))
    for x in range(226, 276, 10):
        _rect(img, x, 245, x + 2, 435, (96, 64, 34))
    # bird: brown back, white belly
    _disk(img, 250, 190, 52, (139, 94, 60), squeeze=1.3)   # body
    _disk(img, 252, 205, 38, (235, 230, 220), squeeze=1.2)  # belly
    _disk(img, 296, 150, 26, (139, 94, 60))                 # head
    _disk(img, 305, 144, 4, (25, 20, 18))                   # eye
    # beak
    for i in range(18):
        _rect(img, 318 + i, 148 + i // 3, 320 + i, 152 - i // 6, (220, 170, 60))
    # tail feathers
    for i in range(40):
        _rect(img, 186 - i, 168 + i // 2, 206 - i, 174 + i // 2, (110, 72, 44))
    # speckle texture on the back
    ys = rng.integers(140, 185, 160)
    xs = rng.integers(215, 295, 160)
    img[ys, xs] = (110, 72, 44)
    return img


def boat(rng):
    w, h = 160, 120
    img = _canvas(w, h, (135, 190, 230), (90, 150, 205))
    _rect(img, 0, 78, w, h, (40, 90, 160))  # sea
    for y in range(80, 118, 6):             # wave highlights
        xs = rng.integers(0, w - 12, 6)
        for x in xs:
            _rect(img, int(x), y, int(x) + 10, y + 1, (160, 200, 230))
    _disk(img, 132, 22, 11, (250, 230, 120))  # sun
    _rect(img, 52, 72, 112, 84, (180, 40, 40))  # red hull
    for i in range(12):
        _rect(img, 52 - i, 72 + i, 54 - i, 84, (150, 30, 30))
    _rect(img, 80, 20, 83, 72, (90, 60, 40))  # mast
    for i in range(46):                        # white sail
        _rect(img, 83, 22 + i, 83 + i // 2 + 2, 24 + i, (245, 245, 240))
    return img


def apples(rng):
    w, h = 160, 120
    img = _canvas(w, h, (225, 215, 195), (205, 190, 165))
    for y in range(60, h, 12):  # table planks
        _rect(img, 0, y, w, y + 10, (150, 105, 60))
        _rect(img, 0, y + 10, w, y + 12, (120, 82, 45))
    for cx in (58, 108):
        _disk(img, cx, 62, 22, (90, 160, 60))
        _disk(img, cx - 7, 54, 6, (170, 215, 130))       # highlight
        _rect(img, cx - 1, 36, cx + 1, 44, (90, 60, 35))  # stem
    return img


def cat(rng):
    w, h = 96, 64
    img = _canvas(w, h, (200, 70, 70), (160, 45, 45))
    _rect(img, 0, 44, w, h, (120, 30, 30))        # sofa seat shadow
    _rect(img, 0, 0, 8, h, (150, 40, 40))         # armrests
    _rect(img, w - 8, 0, w, h, (150, 40, 40))
    _disk(img, 46, 40, 17, (130, 130, 135), squeeze=1.6)  # sleeping body
    _disk(img, 66, 34, 9, (120, 120, 125))                # head
    _rect(img, 60, 26, 63, 30, (120, 120, 125))           # ears
    _rect(img, 69, 26, 72, 30, (120, 120, 125))
    for i in range(16):                                    # curled tail
        _rect(img, 26 + i, 46 + (i % 4 == 0), 28 + i, 49, (110, 110, 115))
    return img


FIXTURES = {
    "bird": (bird, "A brown and white bird perched on a wooden post."),
    "boat": (boat, "A red sailboat on a calm blue sea."),
    "apples": (apples, "Two green apples on a wooden table."),
    "cat": (cat, "A gray cat sleeping on a red sofa."),
}


def main():
    OUT.mkdir(exist_ok=True)
    for name, (draw, caption) in FIXTURES.items():
        rng = np.random.default_rng([sum(name.encode()), 0xF1C5])
        arr = np.clip(draw(rng), 0, 255).astype(np.uint8)
        Image.fromarray(arr, "RGB").save(OUT / f"{name}.png", format="PNG")
        (OUT / f"{name}.txt").write_text(caption + "\n", encoding="utf-8")
        print(f"wrote {name}: {arr.shape[1]}x{arr.shape[0]}, caption {caption!r}")


if __name__ == "__main__":
    main()
