"""Channel models: AWGN and a Doppler-fading tapped-delay-line for 1 Tx -> N Rx.

The fading model approximates an urban macro-cell with a TDL: taps on an
exponential power-delay profile whose decay constant is the configured
delay spread, truncated so the longest tap stays inside the cyclic prefix,
with per-tap complex gains evolving across OFDM symbols via a
sum-of-sinusoids Doppler spectrum.  The channel is applied multiplicatively
on the frequency grid per OFDM symbol (block fading within a symbol),
which is valid exactly because the CP exceeds the maximum tap delay.

SNR here is Es/N0 per receive antenna for unit-energy transmit symbols and
unit average channel power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .phy import PhyConfig

SPEED_OF_LIGHT_M_S = 2.998e8

# Fraction of the cyclic prefix the longest tap may occupy, and the span of
# the truncated exponential profile in units of the decay constant.
CP_SAFETY = 0.92
PROFILE_SPAN = 1.6

NUM_SINUSOIDS = 32


class ChannelKind(Enum):
    AWGN = "awgn"
    TDL_FADING = "tdl"


@dataclass(frozen=True)
class ChannelConfig:
    kind: ChannelKind = ChannelKind.TDL_FADING
    snr_db: float = 10.0
    speed_kmh: float = 90.0
    carrier_hz: float = 28e9
    delay_spread_ns: float = 300.0
    num_taps: int = 8
    num_rx_antennas: int = 2
    seed: int = 0

    def __post_init__(self) -> None:
        if not math.isfinite(self.snr_db) and self.snr_db != math.inf:
            raise ValueError("snr_db must be finite or +inf")
        if self.speed_kmh < 0:
            raise ValueError("speed must be non-negative")
        if self.delay_spread_ns <= 0:
            raise ValueError("delay spread must be positive")
        if self.num_taps < 1:
            raise ValueError("at least one tap is required")
        if self.num_rx_antennas < 1:
            raise ValueError("at least one receive antenna is required")


@dataclass(frozen=True)
class ChannelRealization:
    freq_response: np.ndarray  # complex, (antennas, symbols, subcarriers)
    tap_gains: np.ndarray  # complex, (antennas, taps, symbols)
    tap_delays_s: np.ndarray  # (taps,)
    max_doppler_hz: float


def max_doppler(speed_kmh: float, carrier_hz: float) -> float:
    """Maximum Doppler shift v * fc / c for the given mobile speed."""
    if speed_kmh < 0 or carrier_hz < 0:
        raise ValueError("speed and carrier frequency must be non-negative")
    return (speed_kmh / 3.6) * carrier_hz / SPEED_OF_LIGHT_M_S


def _tap_profile(cfg: ChannelConfig, phy: PhyConfig) -> tuple[np.ndarray, np.ndarray]:
    """Tap delays and normalized powers of the truncated exponential PDP."""
    decay_s = cfg.delay_spread_ns * 1e-9
    cp_duration = phy.cp_length / phy.sample_rate_hz
    span = min(PROFILE_SPAN * decay_s, CP_SAFETY * cp_duration) if phy.cp_length else 0.0
    if cfg.num_taps == 1:
        delays = np.array([0.0])
    else:
        delays = np.linspace(0.0, span, cfg.num_taps)
    powers = np.exp(-delays / decay_s)
    powers /= powers.sum()
    return delays, powers


def _sum_of_sinusoids(
    rng: np.random.Generator, fd_hz: float, times_s: np.ndarray
) -> np.ndarray:
    """One unit-power Rayleigh fading process sampled at the given times."""
    m_idx = np.arange(1, NUM_SINUSOIDS + 1)
    theta = rng.uniform(-np.pi, np.pi)
    alignment = (2 * np.pi * m_idx - np.pi + theta) / (4 * NUM_SINUSOIDS)
    phi = rng.uniform(-np.pi, np.pi, size=NUM_SINUSOIDS)
    psi = rng.uniform(-np.pi, np.pi, size=NUM_SINUSOIDS)
    arg = 2 * np.pi * fd_hz * times_s[:, None]
    in_phase = np.cos(arg * np.cos(alignment)[None, :] + phi[None, :]).sum(axis=1)
    quadrature = np.cos(arg * np.sin(alignment)[None, :] + psi[None, :]).sum(axis=1)
    return (in_phase + 1j * quadrature) / np.sqrt(NUM_SINUSOIDS)


def realize_channel(cfg: ChannelConfig, phy: PhyConfig | None = None) -> ChannelRealization:
    """One deterministic frame-length realization for the configured channel."""
    phy = phy or PhyConfig()
    if cfg.kind is ChannelKind.AWGN:
        shape = (cfg.num_rx_antennas, phy.num_symbols, phy.num_subcarriers)
        return ChannelRealization(
            freq_response=np.ones(shape, dtype=np.complex128),
            tap_gains=np.ones((cfg.num_rx_antennas, 1, phy.num_symbols), dtype=np.complex128),
            tap_delays_s=np.zeros(1),
            max_doppler_hz=0.0,
        )
    return realize_tdl(cfg, phy)


def realize_tdl(cfg: ChannelConfig, phy: PhyConfig | None = None) -> ChannelRealization:
    """Tapped-delay-line realization with Doppler evolution across symbols."""
    if cfg.kind is not ChannelKind.TDL_FADING:
        raise ValueError("realize_tdl requires a TDL fading configuration")
    phy = phy or PhyConfig()
    delays, powers = _tap_profile(cfg, phy)
    fd = max_doppler(cfg.speed_kmh, cfg.carrier_hz)
    times = np.arange(phy.num_symbols) * phy.symbol_duration_s

    rng = np.random.default_rng([int(cfg.seed), 0x7D1])
    gains = np.empty(
        (cfg.num_rx_antennas, cfg.num_taps, phy.num_symbols), dtype=np.complex128
    )
    for ant in range(cfg.num_rx_antennas):
        for tap in range(cfg.num_taps):
            gains[ant, tap] = np.sqrt(powers[tap]) * _sum_of_sinusoids(rng, fd, times)

    # Frequency response: DFT of the (fractionally delayed) taps per symbol.
    subcarriers = np.arange(phy.num_subcarriers)
    phase = np.exp(
        -2j * np.pi * subcarriers[None, :] * phy.subcarrier_spacing_hz * delays[:, None]
    )  # (taps, subcarriers)
    freq = np.einsum("atn,tk->ank", gains, phase)
    return ChannelRealization(
        freq_response=freq,
        tap_gains=gains,
        tap_delays_s=delays,
        max_doppler_hz=fd,
    )


def apply_channel(
    tx_grid: np.ndarray,
    realization: ChannelRealization,
    snr_db: float,
    seed: int,
) -> np.ndarray:
    """Per-cell y = h*x + n on the frequency grid, per receive antenna.

    Noise power is set so that Es/N0 per receive antenna equals snr_db for
    unit-energy symbols and unit average channel power; +inf SNR means no
    noise at all.  Deterministic in the seed.
    """
    x = np.asarray(tx_grid, dtype=np.complex128)
    h = realization.freq_response
    if x.shape != h.shape[1:]:
        raise ValueError(f"grid shape {x.shape} does not match realization {h.shape}")
    noise_var = 0.0 if snr_db == math.inf else 10.0 ** (-snr_db / 10.0)
    rng = np.random.default_rng([int(seed), 0x401E])
    rx = h * x[None, :, :]
    if noise_var > 0:
        scale = np.sqrt(noise_var / 2.0)
        noise = scale * (
            rng.standard_normal(h.shape) + 1j * rng.standard_normal(h.shape)
        )
        rx = rx + noise
    return rx


def noise_variance_from_snr_db(snr_db: float) -> float:
    return 0.0 if snr_db == math.inf else 10.0 ** (-snr_db / 10.0)


def realization_to_csv(realization: ChannelRealization) -> str:
    """Dump the frequency response for external spectral analysis."""
    lines = ["antenna,symbol,subcarrier,re,im"]
    antennas, symbols, subcarriers = realization.freq_response.shape
    for a in range(antennas):
        for t in range(symbols):
            for k in range(subcarriers):
                cell = realization.freq_response[a, t, k]
                lines.append(f"{a},{t},{k},{cell.real:.12g},{cell.imag:.12g}")
    return "\n".join(lines) + "\n"
