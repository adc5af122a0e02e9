"""Semantic encoder/decoder boundary.

Two interchangeable implementations live behind the same two calls:

* :class:`MockCodec` is a deterministic, fixture-backed stand-in.  Encoding
  looks the image up by content hash and returns its stored caption;
  decoding returns the corpus image whose caption best matches the
  received text.
* :class:`RemoteCodec` speaks the HTTP/JSON gateway protocol and defers
  captioning and generation to a hosted model service.
"""

from __future__ import annotations

import base64
import hashlib
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Protocol

import requests

from .raster import ImageRaster


class CodecError(Exception):
    """Base class for codec failures."""


class UnknownFixtureError(CodecError):
    """The image is not a known corpus fixture."""


class GatewayTransportError(CodecError):
    """The gateway could not be reached or timed out."""


class GatewayProtocolError(CodecError):
    """The gateway answered outside its wire contract."""


@dataclass(frozen=True)
class TextKnowledge:
    """The semantic payload: a caption, optionally with guidance text."""

    text: str
    prompt: Optional[str] = None


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    caption: str
    image: ImageRaster
    content_hash: str


def content_hash(image: ImageRaster) -> str:
    """Hash of the decoded pixel content, stable across PNG re-encodings."""
    h = hashlib.sha256()
    h.update(f"{image.width}x{image.height}:".encode("ascii"))
    h.update(image.pixels)
    return h.hexdigest()


class FixtureCorpus:
    """Directory of ``<name>.png`` + ``<name>.txt`` caption pairs."""

    def __init__(self, entries: list[CorpusEntry]):
        if not entries:
            raise ValueError("fixture corpus is empty")
        self.entries = sorted(entries, key=lambda e: e.name)
        self._by_hash = {}
        for entry in self.entries:
            if not entry.caption:
                raise ValueError(f"fixture {entry.name!r} has an empty caption")
            if entry.content_hash in self._by_hash:
                raise ValueError(
                    f"fixtures {self._by_hash[entry.content_hash].name!r} and "
                    f"{entry.name!r} have identical image content"
                )
            self._by_hash[entry.content_hash] = entry

    @classmethod
    def load(cls, path) -> "FixtureCorpus":
        root = Path(path)
        if not root.is_dir():
            raise FileNotFoundError(f"corpus directory {root} does not exist")
        entries = []
        for png in sorted(root.glob("*.png")):
            caption_file = png.with_suffix(".txt")
            if not caption_file.exists():
                raise FileNotFoundError(f"missing caption file for {png.name}")
            caption = caption_file.read_text(encoding="utf-8").rstrip("\n")
            image = ImageRaster.from_png_file(png)
            entries.append(
                CorpusEntry(
                    name=png.stem,
                    caption=caption,
                    image=image,
                    content_hash=content_hash(image),
                )
            )
        return cls(entries)

    def by_hash(self, digest: str) -> Optional[CorpusEntry]:
        return self._by_hash.get(digest)

    def by_name(self, name: str) -> CorpusEntry:
        for entry in self.entries:
            if entry.name == name:
                return entry
        raise KeyError(f"no fixture named {name!r}")


class SemanticCodec(Protocol):
    def encode(self, image: ImageRaster, prompt: Optional[str] = None) -> TextKnowledge: ...

    def decode(self, text: TextKnowledge, seed: int) -> ImageRaster: ...


def _token_f1(candidate: list[str], reference: list[str]) -> float:
    if not candidate or not reference:
        return 0.0
    overlap = sum((Counter(candidate) & Counter(reference)).values())
    if overlap == 0:
        return 0.0
    precision = overlap / len(candidate)
    recall = overlap / len(reference)
    return 2 * precision * recall / (precision + recall)


class MockCodec:
    """Deterministic fixture-backed codec.

    Decoding scores every stored caption by token-level F1 overlap with the
    received text and returns the best entry's image; ties resolve to the
    lexicographically smallest fixture name.  The generation seed is
    accepted for interface parity but has no effect.
    """

    def __init__(self, corpus: FixtureCorpus):
        self.corpus = corpus

    def encode(self, image: ImageRaster, prompt: Optional[str] = None) -> TextKnowledge:
        entry = self.corpus.by_hash(content_hash(image))
        if entry is None:
            raise UnknownFixtureError("unknown fixture")
        return TextKnowledge(text=entry.caption, prompt=prompt)

    def decode(self, text: TextKnowledge, seed: int = 0) -> ImageRaster:
        if not text.text:
            raise CodecError("cannot decode empty text")
        received = text.text.lower().split()
        best = None
        best_score = -1.0
        for entry in self.corpus.entries:  # sorted by name: ties keep the first
            score = _token_f1(received, entry.caption.lower().split())
            if score > best_score:
                best_score = score
                best = entry
        return best.image


class RemoteCodec:
    """Client for the HTTP model gateway."""

    def __init__(
        self,
        base_url: str,
        timeout_s: float = 120.0,
        generate_steps: int = 30,
        session: Optional[requests.Session] = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.timeout_s = timeout_s
        self.generate_steps = generate_steps
        self._session = session or requests.Session()

    def _post(self, path: str, payload: dict) -> dict:
        url = f"{self.base_url}{path}"
        try:
            resp = self._session.post(url, json=payload, timeout=self.timeout_s)
        except requests.RequestException as exc:
            raise GatewayTransportError(f"gateway unreachable at {url}: {exc}") from exc
        if resp.status_code != 200:
            raise GatewayProtocolError(
                f"gateway returned {resp.status_code} for {path}: {resp.text[:200]}"
            )
        try:
            return resp.json()
        except ValueError as exc:
            raise GatewayProtocolError(f"gateway sent non-JSON body for {path}") from exc

    def encode(self, image: ImageRaster, prompt: Optional[str] = None) -> TextKnowledge:
        body = {
            "image_b64": base64.b64encode(image.to_png_bytes()).decode("ascii"),
            "prompt": prompt,
        }
        data = self._post("/v1/caption", body)
        text = data.get("text")
        if not isinstance(text, str) or not text:
            raise GatewayProtocolError("caption response missing non-empty 'text'")
        return TextKnowledge(text=text, prompt=prompt)

    def decode(self, text: TextKnowledge, seed: int = 0) -> ImageRaster:
        if not text.text:
            raise CodecError("cannot decode empty text")
        body = {"prompt": text.text, "seed": int(seed), "steps": self.generate_steps}
        data = self._post("/v1/generate", body)
        image_b64 = data.get("image_b64")
        if not isinstance(image_b64, str):
            raise GatewayProtocolError("generate response missing 'image_b64'")
        try:
            png = base64.b64decode(image_b64, validate=True)
            return ImageRaster.from_png_bytes(png)
        except Exception as exc:
            raise GatewayProtocolError(f"generate response is not a decodable PNG: {exc}") from exc


def codec_roundtrip_similarity(codec: SemanticCodec, image: ImageRaster, seed: int = 0) -> float:
    """SSIM between an image and its encode-then-decode regeneration."""
    from .metrics import ssim

    text = codec.encode(image)
    regenerated = codec.decode(text, seed)
    return ssim(image, regenerated)
