"""Link and content quality metrics: BER, BLEU, SSIM, effective data rate.

Conventions fixed here (results depend on them):

* BLEU tokenizes by lowercasing and splitting on whitespace, uses uniform
  weights over n-gram orders 1..4, replaces zero precisions with 1e-9, and
  applies the standard brevity penalty.  Orders longer than either sentence
  are skipped so that identical texts always score exactly 1.
* SSIM runs on Rec.601 luma with an 11x11 Gaussian window (sigma 1.5),
  K1=0.01, K2=0.03, L=255, averaged over the fully-covered interior.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.ndimage import gaussian_filter

from .raster import ImageRaster

BLEU_EPSILON = 1e-9

SSIM_SIGMA = 1.5
SSIM_TRUNCATE = 3.5  # sigma 1.5 with truncate 3.5 gives an 11x11 kernel
SSIM_K1 = 0.01
SSIM_K2 = 0.03
SSIM_DYNAMIC_RANGE = 255.0


def ber(tx_bits: Sequence[int], rx_bits: Sequence[int]) -> float:
    """Fraction of positions where the two bit sequences disagree."""
    tx = np.asarray(tx_bits, dtype=np.uint8)
    rx = np.asarray(rx_bits, dtype=np.uint8)
    if tx.shape != rx.shape:
        raise ValueError(f"bit length mismatch: {tx.shape} vs {rx.shape}")
    if tx.size == 0:
        raise ValueError("cannot compute a bit error rate over zero bits")
    return float(np.count_nonzero(tx != rx) / tx.size)


def _tokens(text: str) -> list[str]:
    return text.lower().split()


def _ngram_counts(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(reference: str, candidate: str, max_n: int = 4) -> float:
    """Geometric mean of modified n-gram precisions times the brevity penalty.

    The reference plays the role of the transmitted caption, the candidate
    the received one.  Empty candidates score 0 rather than raising.
    """
    ref = _tokens(reference)
    if not ref:
        raise ValueError("reference text must be non-empty")
    cand = _tokens(candidate)
    if not cand:
        return 0.0

    order = max(1, min(max_n, len(cand), len(ref)))
    log_sum = 0.0
    for n in range(1, order + 1):
        cand_ngrams = _ngram_counts(cand, n)
        ref_ngrams = _ngram_counts(ref, n)
        clipped = sum(min(c, ref_ngrams[g]) for g, c in cand_ngrams.items())
        total = sum(cand_ngrams.values())
        precision = clipped / total
        if precision == 0.0:
            precision = BLEU_EPSILON
        log_sum += math.log(precision) / order

    c, r = len(cand), len(ref)
    brevity = 1.0 if c > r else math.exp(1.0 - r / c)
    return brevity * math.exp(log_sum)


def _luma(img: ImageRaster) -> np.ndarray:
    a = img.to_array().astype(np.float64)
    return 0.299 * a[:, :, 0] + 0.587 * a[:, :, 1] + 0.114 * a[:, :, 2]


def ssim(a: ImageRaster, b: ImageRaster) -> float:
    """Structural similarity between two equal-size images, in [-1, 1]."""
    if (a.width, a.height) != (b.width, b.height):
        raise ValueError(
            f"image dimensions differ: {a.width}x{a.height} vs {b.width}x{b.height}"
        )
    x = _luma(a)
    y = _luma(b)
    pad = int(SSIM_TRUNCATE * SSIM_SIGMA + 0.5)
    if min(x.shape) < 2 * pad + 1:
        raise ValueError(
            f"images must be at least {2 * pad + 1} pixels on each side for SSIM"
        )

    def smooth(img: np.ndarray) -> np.ndarray:
        return gaussian_filter(img, SSIM_SIGMA, truncate=SSIM_TRUNCATE)

    mu_x = smooth(x)
    mu_y = smooth(y)
    var_x = smooth(x * x) - mu_x * mu_x
    var_y = smooth(y * y) - mu_y * mu_y
    cov_xy = smooth(x * y) - mu_x * mu_y

    c1 = (SSIM_K1 * SSIM_DYNAMIC_RANGE) ** 2
    c2 = (SSIM_K2 * SSIM_DYNAMIC_RANGE) ** 2
    num = (2 * mu_x * mu_y + c1) * (2 * cov_xy + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
    ssim_map = num / den
    return float(ssim_map[pad:-pad, pad:-pad].mean())


def effective_data_rate(
    bits_total: float,
    bits_success: float,
    num_ofdm_symbols: int,
    subcarrier_spacing_hz: float,
) -> float:
    """Throughput discounted by delivery success.

    The OFDM symbol time is the reciprocal of the subcarrier spacing, the
    raw data rate is total bits over total air time, and the result scales
    that rate by the fraction of bits delivered intact.
    """
    if bits_total <= 0:
        raise ValueError("bits_total must be positive")
    if num_ofdm_symbols <= 0:
        raise ValueError("num_ofdm_symbols must be positive (zero air time)")
    if subcarrier_spacing_hz <= 0:
        raise ValueError("subcarrier_spacing_hz must be positive")
    if not 0 <= bits_success <= bits_total:
        raise ValueError("bits_success must lie in [0, bits_total]")
    symbol_time_s = 1.0 / subcarrier_spacing_hz
    total_time_s = num_ofdm_symbols * symbol_time_s
    data_rate = bits_total / total_time_s
    success_rate = bits_success / bits_total
    return data_rate * success_rate


def compression_ratio(conventional_bits: float, semantic_bits: float) -> float:
    """How many times smaller the semantic payload is than the raw one."""
    if semantic_bits <= 0:
        raise ValueError("semantic_bits must be positive")
    return conventional_bits / semantic_bits


@dataclass(frozen=True)
class TrialReport:
    """Per-trial outcome of one end-to-end transmission."""

    mode: str  # "semantic" or "conventional"
    snr_db: float
    seed: int
    bits_total: int
    bits_success: int
    num_ofdm_symbols: int
    total_time_s: float
    ber: float
    effective_rate_bps: float
    bleu: Optional[float] = None
    ssim: Optional[float] = None

    def __post_init__(self) -> None:
        if self.mode not in ("semantic", "conventional"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not 0 <= self.bits_success <= self.bits_total:
            raise ValueError("bits_success must lie in [0, bits_total]")
        if self.total_time_s <= 0:
            raise ValueError("total_time_s must be positive")
        if not 0.0 <= self.ber <= 1.0:
            raise ValueError("ber must lie in [0, 1]")
        if self.effective_rate_bps < 0:
            raise ValueError("effective_rate_bps must be non-negative")
        if self.bleu is not None and not (
            0.0 <= self.bleu <= 1.0 or math.isnan(self.bleu)
        ):
            raise ValueError("bleu must lie in [0, 1]")
        if self.ssim is not None and not (
            -1.0 <= self.ssim <= 1.0 or math.isnan(self.ssim)
        ):
            raise ValueError("ssim must lie in [-1, 1]")
