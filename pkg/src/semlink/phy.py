"""OFDM physical layer: 4-QAM mapping, resource grid with Kronecker pilots,
channel estimation, SIMO combining, and soft demapping.

Grid geometry defaults follow the link parameters this simulator targets:
128 subcarriers at 240 kHz spacing, 14 OFDM symbols per frame, two of them
full-pilot rows (the Kronecker layout: a time mask across all subcarriers),
one transmit and two receive antennas at a 28 GHz carrier.  The DFTs use
orthonormal scaling so grid-domain and time-domain energies match.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class PhyConfig:
    num_subcarriers: int = 128
    num_symbols: int = 14
    subcarrier_spacing_hz: float = 240e3
    pilot_symbol_indices: tuple[int, ...] = (2, 11)
    num_rx_antennas: int = 2
    num_tx_antennas: int = 1
    carrier_frequency_hz: float = 28e9
    cp_length: int = 16
    pilot_seed: int = 0

    def __post_init__(self) -> None:
        if self.num_subcarriers < 1 or self.num_symbols < 1:
            raise ValueError("grid dimensions must be positive")
        if self.num_rx_antennas < 1 or self.num_tx_antennas < 1:
            raise ValueError("antenna counts must be positive")
        if self.cp_length < 0:
            raise ValueError("cp_length must be non-negative")
        pilots = tuple(sorted(self.pilot_symbol_indices))
        object.__setattr__(self, "pilot_symbol_indices", pilots)
        if len(set(pilots)) != len(pilots):
            raise ValueError("pilot symbol indices must be unique")
        if pilots and (pilots[0] < 0 or pilots[-1] >= self.num_symbols):
            raise ValueError("pilot symbol indices must lie inside the frame")

    @property
    def data_symbol_indices(self) -> tuple[int, ...]:
        pilots = set(self.pilot_symbol_indices)
        return tuple(i for i in range(self.num_symbols) if i not in pilots)

    @property
    def coded_bits_per_frame(self) -> int:
        return 2 * self.num_subcarriers * len(self.data_symbol_indices)

    @property
    def info_bits_per_frame(self) -> int:
        return self.coded_bits_per_frame // 2  # rate-1/2 outer code

    @property
    def sample_rate_hz(self) -> float:
        return self.num_subcarriers * self.subcarrier_spacing_hz

    @property
    def samples_per_symbol(self) -> int:
        return self.num_subcarriers + self.cp_length

    @property
    def symbol_duration_s(self) -> float:
        return self.samples_per_symbol / self.sample_rate_hz


@dataclass(frozen=True)
class ResourceGrid:
    symbols: np.ndarray  # complex, (num_symbols, num_subcarriers)
    pilot_mask: np.ndarray  # bool, same shape, true on pilot rows
    pilot_seed: int


@dataclass(frozen=True)
class ChannelEstimate:
    gains: np.ndarray  # complex, (num_rx_antennas, num_symbols, num_subcarriers)
    noise_variance: float

    def __post_init__(self) -> None:
        if not np.all(np.isfinite(self.gains)):
            raise ValueError("channel estimate has non-finite entries")
        if self.noise_variance <= 0:
            raise ValueError("noise_variance must be positive")


def qam_map(bits: np.ndarray) -> np.ndarray:
    """Gray-mapped 4-QAM with unit average energy.

    Bit pair (b0, b1) maps to ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2), with
    b0 on the real axis.
    """
    b = np.asarray(bits, dtype=np.int8)
    if b.size % 2 != 0:
        raise ValueError("bit count must be even for 2 bits per symbol")
    b0 = b[0::2]
    b1 = b[1::2]
    return ((1 - 2 * b0) + 1j * (1 - 2 * b1)) / _SQRT2


def qam_demap_llr(symbols: np.ndarray, noise_variance) -> np.ndarray:
    """Per-bit max-log LLRs, exact per axis for Gray 4-QAM.

    LLR(b0) = 2*sqrt(2)*Re(y)/sigma^2 and LLR(b1) uses the imaginary part;
    positive means bit 0.  ``noise_variance`` may be a scalar or per-symbol
    array.
    """
    y = np.asarray(symbols, dtype=np.complex128)
    if not np.all(np.isfinite(y)):
        raise ValueError("symbols must be finite")
    sigma2 = np.asarray(noise_variance, dtype=np.float64)
    if np.any(sigma2 <= 0):
        raise ValueError("noise variance must be positive")
    scale = 2.0 * _SQRT2 / sigma2
    llr = np.empty(y.size * 2, dtype=np.float64)
    llr[0::2] = (scale * y.real).reshape(-1)
    llr[1::2] = (scale * y.imag).reshape(-1)
    return llr


def pilot_values(cfg: PhyConfig) -> np.ndarray:
    """Seeded unit-modulus QPSK pilot rows, known to both link ends."""
    rng = np.random.default_rng([cfg.pilot_seed, 0x9170])
    shape = (len(cfg.pilot_symbol_indices), cfg.num_subcarriers)
    bits = rng.integers(0, 2, size=(2,) + shape)
    return ((1 - 2 * bits[0]) + 1j * (1 - 2 * bits[1])) / _SQRT2


def build_grid(coded_bits: np.ndarray, cfg: PhyConfig) -> ResourceGrid:
    """Fill a frame: pilots on the pilot rows, data cells row-major."""
    bits = np.asarray(coded_bits, dtype=np.uint8)
    if bits.size != cfg.coded_bits_per_frame:
        raise ValueError(
            f"expected {cfg.coded_bits_per_frame} coded bits, got {bits.size}"
        )
    symbols = np.zeros((cfg.num_symbols, cfg.num_subcarriers), dtype=np.complex128)
    mask = np.zeros_like(symbols, dtype=bool)
    pilots = pilot_values(cfg)
    pilot_rows = list(cfg.pilot_symbol_indices)
    symbols[pilot_rows, :] = pilots
    mask[pilot_rows, :] = True
    data = qam_map(bits).reshape(len(cfg.data_symbol_indices), cfg.num_subcarriers)
    symbols[list(cfg.data_symbol_indices), :] = data
    return ResourceGrid(symbols=symbols, pilot_mask=mask, pilot_seed=cfg.pilot_seed)


def extract_data_cells(grid_symbols: np.ndarray, cfg: PhyConfig) -> np.ndarray:
    """Data cells in the same row-major order used by build_grid."""
    return grid_symbols[list(cfg.data_symbol_indices), :].reshape(-1)


def ofdm_modulate(grid: ResourceGrid, cfg: PhyConfig) -> np.ndarray:
    """Orthonormal per-symbol inverse DFT with a cyclic prefix."""
    time_symbols = np.fft.ifft(grid.symbols, axis=1, norm="ortho")
    if cfg.cp_length > 0:
        cp = time_symbols[:, -cfg.cp_length :]
        time_symbols = np.concatenate([cp, time_symbols], axis=1)
    return time_symbols.reshape(-1)


def ofdm_demodulate(samples: np.ndarray, cfg: PhyConfig) -> np.ndarray:
    """CP removal and forward DFT; returns a grid-shaped complex matrix."""
    x = np.asarray(samples, dtype=np.complex128)
    expected = cfg.num_symbols * cfg.samples_per_symbol
    if x.size != expected:
        raise ValueError(f"expected {expected} samples, got {x.size}")
    frames = x.reshape(cfg.num_symbols, cfg.samples_per_symbol)[:, cfg.cp_length :]
    return np.fft.fft(frames, axis=1, norm="ortho")


def _interp_weights(cfg: PhyConfig) -> np.ndarray:
    """Per-symbol weights over pilot rows: linear between, held at edges."""
    pilot_rows = np.array(cfg.pilot_symbol_indices, dtype=float)
    weights = np.zeros((cfg.num_symbols, len(pilot_rows)))
    for t in range(cfg.num_symbols):
        if t <= pilot_rows[0]:
            weights[t, 0] = 1.0
        elif t >= pilot_rows[-1]:
            weights[t, -1] = 1.0
        else:
            right = int(np.searchsorted(pilot_rows, t))
            left = right - 1
            gap = pilot_rows[right] - pilot_rows[left]
            alpha = (pilot_rows[right] - t) / gap
            weights[t, left] = alpha
            weights[t, right] = 1.0 - alpha
    return weights


def estimate_channel(
    rx_grids: np.ndarray,
    cfg: PhyConfig,
    pilots: np.ndarray | None = None,
) -> ChannelEstimate:
    """Pilot-based least-squares estimate with linear time interpolation.

    Per antenna and subcarrier, the LS estimates at the pilot rows are
    interpolated linearly across the OFDM-symbol index and held constant
    beyond the outermost pilots.  Noise variance comes from differences
    between successive pilot-row estimates, floored to keep it positive.
    """
    rx = np.asarray(rx_grids, dtype=np.complex128)
    if rx.ndim != 3 or rx.shape[1:] != (cfg.num_symbols, cfg.num_subcarriers):
        raise ValueError(f"rx grids have shape {rx.shape}, expected "
                         f"(antennas, {cfg.num_symbols}, {cfg.num_subcarriers})")
    if not cfg.pilot_symbol_indices:
        raise ValueError("at least one pilot row is required")
    if pilots is None:
        pilots = pilot_values(cfg)
    if np.any(pilots == 0):
        raise ValueError("pilot symbols must be non-zero")

    pilot_rows = list(cfg.pilot_symbol_indices)
    ls = rx[:, pilot_rows, :] / pilots[None, :, :]  # (ant, pilot_row, subcarrier)

    weights = _interp_weights(cfg)  # (symbols, pilot_rows)
    gains = np.einsum("tp,apk->atk", weights, ls)

    if len(pilot_rows) >= 2:
        diffs = ls[:, 1:, :] - ls[:, :-1, :]
        noise_var = float(np.mean(np.abs(diffs) ** 2) / 2.0)
    else:
        # Single pilot row: fall back on frequency differences, which also
        # pick up channel selectivity; acceptable as an upper bound.
        diffs = ls[:, :, 1:] - ls[:, :, :-1]
        noise_var = float(np.mean(np.abs(diffs) ** 2) / 2.0)
    noise_var = max(noise_var, 1e-12)
    return ChannelEstimate(gains=gains, noise_variance=noise_var)


def equalize_combine(
    rx_grids: np.ndarray, est: ChannelEstimate
) -> tuple[np.ndarray, np.ndarray]:
    """Per-cell MMSE combining across receive antennas.

    Returns the combined symbols and the per-cell post-combining SNR.
    Cells with an all-zero channel estimate come out as erasures (symbol 0,
    SNR 0) rather than raising.
    """
    rx = np.asarray(rx_grids, dtype=np.complex128)
    if rx.shape != est.gains.shape:
        raise ValueError(
            f"rx grids {rx.shape} do not match the channel estimate {est.gains.shape}"
        )
    h = est.gains
    num = (np.conj(h) * rx).sum(axis=0)
    power = (np.abs(h) ** 2).sum(axis=0)
    denom = power + est.noise_variance
    combined = np.where(denom > 0, num / denom, 0.0)
    post_snr = power / est.noise_variance
    return combined, post_snr


def demap_noise_variance(post_snr: np.ndarray) -> np.ndarray:
    """Equivalent noise variance of the MMSE-combined symbols.

    Feeding these into qam_demap_llr makes the soft outputs exactly the
    max-log LLRs of maximum-ratio combining; erasure cells (SNR 0) get
    variance 1 and a zero symbol, hence zero LLRs.
    """
    return 1.0 / (1.0 + np.asarray(post_snr, dtype=np.float64))


def perfect_estimate(
    freq_response: np.ndarray, noise_variance: float
) -> ChannelEstimate:
    """Channel estimate built from the true realization (genie CSI)."""
    return ChannelEstimate(
        gains=np.asarray(freq_response, dtype=np.complex128),
        noise_variance=max(float(noise_variance), 1e-12),
    )


def grid_to_csv(grid: ResourceGrid) -> str:
    """Debug dump of a resource grid, one cell per line."""
    lines = ["symbol,subcarrier,re,im,is_pilot"]
    rows, cols = grid.symbols.shape
    for t in range(rows):
        for k in range(cols):
            cell = grid.symbols[t, k]
            lines.append(
                f"{t},{k},{cell.real:.12g},{cell.imag:.12g},{int(grid.pilot_mask[t, k])}"
            )
    return "\n".join(lines) + "\n"
