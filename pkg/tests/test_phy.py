import dataclasses
import math

import numpy as np
import pytest

from semlink import fec
from semlink.phy import (
    ChannelEstimate,
    PhyConfig,
    build_grid,
    demap_noise_variance,
    equalize_combine,
    estimate_channel,
    extract_data_cells,
    ofdm_demodulate,
    ofdm_modulate,
    perfect_estimate,
    pilot_values,
    qam_demap_llr,
    qam_map,
)

SQRT_HALF = 1 / math.sqrt(2)


# ------------------------------------------------------------------- 4-QAM


def test_qam_map_corners():
    assert qam_map([0, 0])[0] == pytest.approx(SQRT_HALF + 1j * SQRT_HALF)
    assert qam_map([1, 1])[0] == pytest.approx(-SQRT_HALF - 1j * SQRT_HALF)
    assert qam_map([0, 1])[0] == pytest.approx(SQRT_HALF - 1j * SQRT_HALF)


def test_qam_unit_average_energy(rng):
    bits = rng.integers(0, 2, size=200_000).astype(np.uint8)
    symbols = qam_map(bits)
    assert np.mean(np.abs(symbols) ** 2) == pytest.approx(1.0, abs=1e-12)


def test_qam_rejects_odd_length():
    with pytest.raises(ValueError):
        qam_map([0, 1, 0])


def test_demap_closed_form_at_mapped_point():
    # 2*sqrt(2)*Re(y)/sigma^2 evaluated at Re(y)=1/sqrt(2), sigma^2=1 is 2.0
    y = qam_map([0, 0])
    llrs = qam_demap_llr(y, 1.0)
    assert llrs == pytest.approx([2.0, 2.0], abs=1e-12)


def test_demap_zero_symbol_is_agnostic():
    assert qam_demap_llr(np.array([0.0 + 0.0j]), 0.5) == pytest.approx([0.0, 0.0])


def test_demap_hard_decisions_recover_all_points():
    for bits in ([0, 0], [0, 1], [1, 0], [1, 1]):
        y = qam_map(bits)
        llrs = qam_demap_llr(y, 1.0)
        assert [int(l < 0) for l in llrs] == bits


def test_demap_accepts_per_symbol_noise(rng):
    y = qam_map(rng.integers(0, 2, 8).astype(np.uint8))
    sigma2 = np.array([0.5, 1.0, 2.0, 4.0])
    llrs = qam_demap_llr(y, sigma2)
    manual0 = 2 * math.sqrt(2) * y[2].real / sigma2[2]
    assert llrs[4] == pytest.approx(manual0)


def test_demap_rejects_bad_input():
    with pytest.raises(ValueError):
        qam_demap_llr(np.array([np.nan + 0j]), 1.0)
    with pytest.raises(ValueError):
        qam_demap_llr(np.array([1.0 + 0j]), 0.0)


# ----------------------------------------------------------- resource grid


def test_grid_cell_budget(phy_cfg, rng):
    bits = rng.integers(0, 2, phy_cfg.coded_bits_per_frame).astype(np.uint8)
    grid = build_grid(bits, phy_cfg)
    assert grid.symbols.shape == (14, 128)
    assert int(grid.pilot_mask.sum()) == 2 * 128
    assert grid.symbols.size - int(grid.pilot_mask.sum()) == 1536


def test_grid_pilots_deterministic(phy_cfg, rng):
    bits = rng.integers(0, 2, phy_cfg.coded_bits_per_frame).astype(np.uint8)
    a = build_grid(bits, phy_cfg)
    b = build_grid(bits, phy_cfg)
    assert np.array_equal(a.symbols, b.symbols)
    assert np.array_equal(pilot_values(phy_cfg), pilot_values(phy_cfg))


def test_grid_unit_energy_everywhere(phy_cfg, rng):
    bits = rng.integers(0, 2, phy_cfg.coded_bits_per_frame).astype(np.uint8)
    grid = build_grid(bits, phy_cfg)
    assert np.abs(np.abs(grid.symbols) ** 2 - 1.0).max() < 1e-12


def test_grid_rejects_wrong_bit_count(phy_cfg):
    with pytest.raises(ValueError):
        build_grid(np.zeros(100, dtype=np.uint8), phy_cfg)


def test_frame_capacity_arithmetic(phy_cfg):
    assert phy_cfg.coded_bits_per_frame == 128 * (14 - 2) * 2
    assert phy_cfg.info_bits_per_frame == 1536
    assert 1392 <= phy_cfg.info_bits_per_frame  # published payload fits one frame


# -------------------------------------------------------------------- OFDM


def test_ofdm_round_trip(phy_cfg, rng):
    bits = rng.integers(0, 2, phy_cfg.coded_bits_per_frame).astype(np.uint8)
    grid = build_grid(bits, phy_cfg)
    samples = ofdm_modulate(grid, phy_cfg)
    assert samples.size == 14 * (128 + 16)
    back = ofdm_demodulate(samples, phy_cfg)
    assert np.abs(back - grid.symbols).max() < 1e-9


def test_single_subcarrier_is_constant_modulus(phy_cfg):
    symbols = np.zeros((14, 128), dtype=np.complex128)
    symbols[:, 5] = 1.0
    grid_like = dataclasses.replace(
        build_grid(np.zeros(phy_cfg.coded_bits_per_frame, np.uint8), phy_cfg),
        symbols=symbols,
    )
    samples = ofdm_modulate(grid_like, phy_cfg).reshape(14, 144)
    magnitudes = np.abs(samples)
    assert np.allclose(magnitudes, magnitudes[0, 0])


def test_demodulate_rejects_wrong_length(phy_cfg):
    with pytest.raises(ValueError):
        ofdm_demodulate(np.zeros(100, dtype=complex), phy_cfg)


def test_sample_rate(phy_cfg):
    assert phy_cfg.sample_rate_hz == pytest.approx(30.72e6)


# ------------------------------------------------------- channel estimation


def _pilot_only_rx(phy_cfg, h):
    """Received grids for a per-antenna, per-symbol channel h (a, t, k)."""
    grid = np.zeros((14, 128), dtype=np.complex128)
    grid[list(phy_cfg.pilot_symbol_indices), :] = pilot_values(phy_cfg)
    return h * grid[None, :, :]


def test_estimate_identity_channel(phy_cfg):
    rx = _pilot_only_rx(phy_cfg, np.ones((2, 14, 128)))
    est = estimate_channel(rx, phy_cfg)
    assert np.abs(est.gains - 1.0).max() < 1e-9
    assert est.noise_variance <= 1e-9


def test_estimate_tracks_linear_evolution_between_pilots(phy_cfg):
    t = np.arange(14, dtype=float)[None, :, None]
    h = (0.5 + 0.05 * t) * np.exp(1j * 0.1 * t) * np.ones((2, 14, 128))
    # linear-in-time complex channel: exact on the pilot span, held outside
    h_lin = (1.0 + 0.2j) + (0.05 - 0.01j) * t * np.ones((2, 14, 128))
    rx = _pilot_only_rx(phy_cfg, h_lin)
    est = estimate_channel(rx, phy_cfg)
    first, last = phy_cfg.pilot_symbol_indices
    interior = slice(first, last + 1)
    assert np.abs(est.gains[:, interior, :] - h_lin[:, interior, :]).max() < 1e-9
    # edge symbols hold the nearest pilot's value
    assert np.abs(est.gains[:, 0, :] - h_lin[:, first, :]).max() < 1e-9
    assert np.abs(est.gains[:, 13, :] - h_lin[:, last, :]).max() < 1e-9


def test_estimate_error_matches_ls_variance_oracle(phy_cfg):
    """Monte-Carlo: averaging over the frame reaches sigma^2 / num_pilot_rows."""
    rng = np.random.default_rng(4242)
    h = 0.5 + 0.5j
    sigma2 = 0.01
    trials = 300
    err_avg = 0.0
    err_cell = 0.0
    for _ in range(trials):
        noise = math.sqrt(sigma2 / 2) * (
            rng.standard_normal((2, 14, 128)) + 1j * rng.standard_normal((2, 14, 128))
        )
        rx = _pilot_only_rx(phy_cfg, np.full((2, 14, 128), h)) + noise
        est = estimate_channel(rx, phy_cfg)
        err_avg += np.mean(np.abs(est.gains.mean(axis=1) - h) ** 2)
        err_cell += np.mean(np.abs(est.gains - h) ** 2)
    err_avg /= trials
    err_cell /= trials
    assert err_avg <= (sigma2 / 2) * 1.5
    assert err_cell <= sigma2 * 1.5
    # the noise estimate itself should be in the right ballpark
    assert est.noise_variance == pytest.approx(sigma2, rel=0.5)


def test_estimate_rejects_zero_pilots(phy_cfg):
    rx = np.ones((2, 14, 128), dtype=complex)
    pilots = pilot_values(phy_cfg).copy()
    pilots[0, 0] = 0.0
    with pytest.raises(ValueError):
        estimate_channel(rx, phy_cfg, pilots=pilots)


# ----------------------------------------------------------------- combining


def test_coherent_combining_recovers_symbol():
    gains = np.ones((2, 14, 128), dtype=complex)
    est = ChannelEstimate(gains=gains, noise_variance=1e-12)
    x = np.full((14, 128), 0.3 - 0.7j)
    rx = np.stack([x, x])
    combined, post_snr = equalize_combine(rx, est)
    assert np.abs(combined - x).max() < 1e-9
    assert np.all(post_snr > 0)


def test_single_antenna_degenerate_case():
    gains = np.stack(
        [np.ones((14, 128), dtype=complex), np.zeros((14, 128), dtype=complex)]
    )
    sigma2 = 0.2
    est = ChannelEstimate(gains=gains, noise_variance=sigma2)
    x = np.full((14, 128), 1.0 + 0j)
    rx = np.stack([x, np.zeros_like(x)])
    combined, post_snr = equalize_combine(rx, est)
    assert np.allclose(combined, 1.0 / (1.0 + sigma2))
    assert np.allclose(post_snr, 1.0 / sigma2)


def test_zero_forcing_limit(rng):
    h = rng.standard_normal((2, 14, 128)) + 1j * rng.standard_normal((2, 14, 128))
    est = ChannelEstimate(gains=h, noise_variance=1e-12)
    x = qam_map(rng.integers(0, 2, 2 * 14 * 128).astype(np.uint8)).reshape(14, 128)
    rx = h * x[None, :, :]
    combined, _ = equalize_combine(rx, est)
    assert np.abs(combined - x).max() < 1e-5


def test_erasure_cell_is_zero_not_an_error():
    gains = np.zeros((2, 14, 128), dtype=complex)
    est = ChannelEstimate(gains=gains, noise_variance=0.1)
    rx = np.ones((2, 14, 128), dtype=complex)
    combined, post_snr = equalize_combine(rx, est)
    assert not combined.any()
    assert not post_snr.any()
    # erasures demap to zero LLRs
    llrs = qam_demap_llr(
        extract_data_cells(combined, PhyConfig()),
        extract_data_cells(demap_noise_variance(post_snr), PhyConfig()),
    )
    assert not llrs.any()


# ------------------------------------------------------------ full PHY loop


def _loop_once(phy_cfg, code, rng, estimated_csi):
    info = rng.integers(0, 2, code.k).astype(np.uint8)
    coded = fec.encode(code, info)
    grid = build_grid(coded, phy_cfg)
    samples = ofdm_modulate(grid, phy_cfg)
    rx_one = ofdm_demodulate(samples, phy_cfg)
    rx = np.stack([rx_one, rx_one])  # ideal channel to both antennas
    if estimated_csi:
        est = estimate_channel(rx, phy_cfg)
    else:
        est = perfect_estimate(np.ones_like(rx), 1e-12)
    combined, post_snr = equalize_combine(rx, est)
    llrs = qam_demap_llr(
        extract_data_cells(combined, phy_cfg),
        extract_data_cells(demap_noise_variance(post_snr), phy_cfg),
    )
    out, _ = fec.decode(code, llrs)
    return info, out


@pytest.mark.parametrize("estimated_csi", [False, True])
def test_phy_loop_bit_exact(phy_cfg, frame_code, rng, estimated_csi):
    for _ in range(25):
        info, out = _loop_once(phy_cfg, frame_code, rng, estimated_csi)
        assert np.array_equal(info, out)


def test_receiver_is_scale_consistent(phy_cfg, frame_code, rng):
    info = rng.integers(0, 2, frame_code.k).astype(np.uint8)
    coded = fec.encode(frame_code, info)
    grid = build_grid(coded, phy_cfg)
    h = np.ones((2, 14, 128), dtype=complex)
    noise = 0.3 * (rng.standard_normal((2, 14, 128)) + 1j * rng.standard_normal((2, 14, 128)))
    rx = h * grid.symbols[None] + noise

    def receive(grids):
        est = estimate_channel(grids, phy_cfg)
        combined, post_snr = equalize_combine(grids, est)
        return fec.decode(
            frame_code,
            qam_demap_llr(
                extract_data_cells(combined, phy_cfg),
                extract_data_cells(demap_noise_variance(post_snr), phy_cfg),
            ),
        )[0]

    reference = receive(rx)
    scaled = receive(7.5 * rx)
    assert np.array_equal(reference, scaled)


# -------------------------------------------------------------- debug dumps


def test_grid_csv_dump(phy_cfg, rng):
    from semlink.phy import build_grid, grid_to_csv

    bits = rng.integers(0, 2, phy_cfg.coded_bits_per_frame).astype(np.uint8)
    grid = build_grid(bits, phy_cfg)
    text = grid_to_csv(grid)
    lines = text.strip().splitlines()
    assert lines[0] == "symbol,subcarrier,re,im,is_pilot"
    assert len(lines) == 1 + 14 * 128
    pilots = sum(1 for line in lines[1:] if line.endswith(",1"))
    assert pilots == 2 * 128
