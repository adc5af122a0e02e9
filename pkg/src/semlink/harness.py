"""Experiment driver: seeded Monte-Carlo SNR sweeps over the semantic and
conventional pipelines, with CSV results and optional SVG plots.

Reproducibility rules:

* Every trial's seed is a stable 64-bit hash of (master seed, mode, SNR
  index, trial index), so trials are order-independent and parallel-safe.
* The configured SNR is Es/N0 per receive antenna.  Curve positions shift
  with this convention, so it is fixed here once and for all.
* The same config file yields byte-identical CSV output (disable the
  timestamp header line for byte comparisons).
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np
import yaml

from . import fec, metrics, phy
from .channel import (
    ChannelConfig,
    ChannelKind,
    apply_channel,
    noise_variance_from_snr_db,
    realize_channel,
)
from .codec import CodecError, FixtureCorpus, MockCodec, RemoteCodec, TextKnowledge
from .framing import (
    CHUNK_INDEX_BITS,
    HEADER_BITS,
    BitFrame,
    PayloadKind,
    deframe_text,
    frame_image,
    frame_text,
    reassemble_image,
)
from .metrics import TrialReport
from .raster import ImageRaster

CSV_HEADER = "mode,snr_db,trial,seed,ber,bleu,ssim,edr_bps,bits_tx,bits_ok"

VALID_MODES = ("semantic", "conventional")
VALID_FORMATS = ("csv", "svg-plot")


class ConfigError(ValueError):
    """Raised for malformed sweep configuration."""


def derive_seed(*parts) -> int:
    """Stable 64-bit hash of the given labels (platform independent)."""
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        h.update(str(part).encode("utf-8"))
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "big")


@dataclass(frozen=True)
class SweepConfig:
    modes: tuple[str, ...] = ("semantic",)
    snr_db_list: tuple[float, ...] = (0.0, 2.0, 4.0, 6.0)
    trials_per_point: int = 200
    master_seed: int = 0
    corpus_path: Optional[str] = None
    image: Optional[str] = None
    gateway_url: Optional[str] = None
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    phy: phy.PhyConfig = field(default_factory=phy.PhyConfig)
    compute_bleu: bool = True
    compute_ssim: bool = True
    csi: str = "estimated"
    decoder_max_iters: int = 20
    min_sum: bool = False
    success_accounting: str = "bitwise"
    code_seed: int = 7
    output_dir: Optional[str] = None
    timestamp: bool = True
    plot: bool = False
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.modes:
            raise ConfigError("at least one mode is required")
        for mode in self.modes:
            if mode not in VALID_MODES:
                raise ConfigError(f"unknown mode {mode!r}")
        if not self.snr_db_list:
            raise ConfigError("snr_db list must be non-empty")
        if self.trials_per_point < 1:
            raise ConfigError("trials_per_point must be at least 1")
        if self.csi not in ("estimated", "perfect"):
            raise ConfigError(f"csi must be 'estimated' or 'perfect', got {self.csi!r}")
        if self.success_accounting not in ("bitwise", "frame"):
            raise ConfigError("success_accounting must be 'bitwise' or 'frame'")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if "semantic" in self.modes and not self.corpus_path and not self.gateway_url:
            raise ConfigError("semantic mode with the mock codec needs a corpus path")


_SCHEMA = {
    "modes": None,
    "snr_db": None,
    "trials_per_point": None,
    "master_seed": None,
    "corpus": None,
    "image": None,
    "gateway_url": None,
    "csi": None,
    "success_accounting": None,
    "code_seed": None,
    "output_dir": None,
    "timestamp": None,
    "plot": None,
    "workers": None,
    "decoder": {"max_iters": None, "min_sum": None},
    "channel": {
        "kind": None,
        "speed_kmh": None,
        "delay_spread_ns": None,
        "num_taps": None,
        "num_rx_antennas": None,
    },
    "phy": {
        "num_subcarriers": None,
        "num_symbols": None,
        "subcarrier_spacing_hz": None,
        "pilot_symbol_indices": None,
        "num_rx_antennas": None,
        "cp_length": None,
        "pilot_seed": None,
    },
    "metrics": {"bleu": None, "ssim": None},
}


def _check_keys(doc: dict, schema: dict, path: str = "") -> None:
    for key, value in doc.items():
        if key not in schema:
            raise ConfigError(f"unknown config key {path + str(key)!r}")
        sub = schema[key]
        if isinstance(sub, dict):
            if not isinstance(value, dict):
                raise ConfigError(f"config key {path + str(key)!r} must be a mapping")
            _check_keys(value, sub, path=f"{path}{key}.")


def load_sweep_config(path) -> SweepConfig:
    """Parse a YAML sweep config, rejecting unknown keys outright."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"malformed YAML in {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("sweep config must be a YAML mapping")
    _check_keys(doc, _SCHEMA)
    return sweep_config_from_dict(doc)


def sweep_config_from_dict(doc: dict) -> SweepConfig:
    _check_keys(doc, _SCHEMA)
    channel_doc = dict(doc.get("channel", {}))
    if "kind" in channel_doc:
        try:
            channel_doc["kind"] = ChannelKind(channel_doc["kind"])
        except ValueError as exc:
            raise ConfigError(f"unknown channel kind {channel_doc['kind']!r}") from exc
    phy_doc = dict(doc.get("phy", {}))
    if "pilot_symbol_indices" in phy_doc:
        phy_doc["pilot_symbol_indices"] = tuple(phy_doc["pilot_symbol_indices"])
    metrics_doc = doc.get("metrics", {})
    decoder_doc = doc.get("decoder", {})
    try:
        return SweepConfig(
            modes=tuple(doc.get("modes", ("semantic",))),
            snr_db_list=tuple(float(s) for s in doc.get("snr_db", (0.0, 2.0, 4.0, 6.0))),
            trials_per_point=int(doc.get("trials_per_point", 200)),
            master_seed=int(doc.get("master_seed", 0)),
            corpus_path=doc.get("corpus"),
            image=doc.get("image"),
            gateway_url=doc.get("gateway_url"),
            channel=ChannelConfig(**channel_doc),
            phy=phy.PhyConfig(**phy_doc),
            compute_bleu=bool(metrics_doc.get("bleu", True)),
            compute_ssim=bool(metrics_doc.get("ssim", True)),
            csi=doc.get("csi", "estimated"),
            decoder_max_iters=int(decoder_doc.get("max_iters", 20)),
            min_sum=bool(decoder_doc.get("min_sum", False)),
            success_accounting=doc.get("success_accounting", "bitwise"),
            code_seed=int(doc.get("code_seed", 7)),
            output_dir=doc.get("output_dir"),
            timestamp=bool(doc.get("timestamp", True)),
            plot=bool(doc.get("plot", False)),
            workers=int(doc.get("workers", 1)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


@dataclass(frozen=True)
class AggregatePoint:
    mode: str
    snr_db: float
    trials: int
    mean_ber: float
    median_ber: float
    mean_bleu: float
    median_bleu: float
    mean_ssim: float
    median_ssim: float
    mean_edr_bps: float
    median_edr_bps: float


@dataclass(frozen=True)
class SweepResult:
    trials: tuple[TrialReport, ...]
    aggregates: tuple[AggregatePoint, ...]


class LinkSession:
    """Everything a sweep shares across trials: corpus, codec, LDPC code.

    All members are immutable after construction, so trials may run from
    any number of worker threads.
    """

    def __init__(self, cfg: SweepConfig):
        self.cfg = cfg
        self.phy = cfg.phy
        self.code = fec.build_code(cfg.phy.coded_bits_per_frame, cfg.code_seed)
        self.corpus = FixtureCorpus.load(cfg.corpus_path) if cfg.corpus_path else None
        if cfg.gateway_url:
            self.codec = RemoteCodec(cfg.gateway_url)
        elif self.corpus is not None:
            self.codec = MockCodec(self.corpus)
        else:
            self.codec = None

    def default_image(self) -> ImageRaster:
        if self.corpus is None:
            raise ConfigError("no corpus configured to pick an image from")
        if self.cfg.image:
            return self.corpus.by_name(self.cfg.image).image
        return self.corpus.entries[0].image

    # -- one frame over the air -------------------------------------------

    def _frame_llrs(
        self, grid: phy.ResourceGrid, snr_db: float, chan_seed: int, noise_seed: int
    ) -> np.ndarray:
        cfg = self.cfg
        real = realize_channel(replace(cfg.channel, seed=chan_seed), self.phy)
        tx_samples = phy.ofdm_modulate(grid, self.phy)
        tx_grid = phy.ofdm_demodulate(tx_samples, self.phy)
        rx = apply_channel(tx_grid, real, snr_db, noise_seed)

        if cfg.csi == "perfect":
            est = phy.perfect_estimate(
                real.freq_response, noise_variance_from_snr_db(snr_db)
            )
        else:
            est = phy.estimate_channel(rx, self.phy)
        combined, post_snr = phy.equalize_combine(rx, est)
        data_symbols = phy.extract_data_cells(combined, self.phy)
        data_noise = phy.extract_data_cells(
            phy.demap_noise_variance(post_snr), self.phy
        )
        return phy.qam_demap_llr(data_symbols, data_noise)

    def send_info_bits(
        self, info_bits: np.ndarray, snr_db: float, trial_seed: int, frame_index: int = 0
    ) -> tuple[np.ndarray, bool]:
        """Push one frame of info bits through the full chain; returns the
        receiver's info bits and the decoder convergence flag."""
        coded = fec.encode(self.code, info_bits)
        grid = phy.build_grid(coded, self.phy)
        llrs = self._frame_llrs(
            grid,
            snr_db,
            derive_seed(trial_seed, "chan", frame_index),
            derive_seed(trial_seed, "noise", frame_index),
        )
        return fec.decode(
            self.code, llrs, self.cfg.decoder_max_iters, self.cfg.min_sum
        )

    # -- trials -------------------------------------------------------------

    def run_trial(
        self,
        mode: str,
        snr_db: float,
        trial_seed: int,
        image: Optional[ImageRaster] = None,
    ) -> TrialReport:
        if mode == "semantic":
            return self._semantic_trial(snr_db, trial_seed, image)
        if mode == "conventional":
            return self._conventional_trial(snr_db, trial_seed, image)
        raise ConfigError(f"unknown mode {mode!r}")

    def _failed_report(self, mode: str, snr_db: float, trial_seed: int) -> TrialReport:
        return TrialReport(
            mode=mode,
            snr_db=snr_db,
            seed=trial_seed,
            bits_total=0,
            bits_success=0,
            num_ofdm_symbols=self.phy.num_symbols,
            total_time_s=self.phy.num_symbols / self.phy.subcarrier_spacing_hz,
            ber=1.0,
            effective_rate_bps=0.0,
            bleu=math.nan,
            ssim=math.nan,
        )

    def _bits_success(self, intact_by_frame: list[tuple[int, int]]) -> int:
        """Successfully delivered payload bits under the configured accounting.

        Takes (payload_bits, error_count) per frame.
        """
        if self.cfg.success_accounting == "frame":
            return sum(total for total, errors in intact_by_frame if errors == 0)
        return sum(total - errors for total, errors in intact_by_frame)

    def _semantic_trial(
        self, snr_db: float, trial_seed: int, image: Optional[ImageRaster]
    ) -> TrialReport:
        cfg = self.cfg
        if self.codec is None:
            raise ConfigError("semantic mode requires a corpus or gateway")
        source = image if image is not None else self.default_image()
        try:
            text = self.codec.encode(source)
        except CodecError:
            return self._failed_report("semantic", snr_db, trial_seed)

        tx_frame = frame_text(text, capacity_bits=self.code.k)
        rx_info, _ = self.send_info_bits(tx_frame.bits, snr_db, trial_seed)
        rx_frame = BitFrame(
            bits=rx_info,
            payload_kind=PayloadKind.TEXT,
            payload_bits=tx_frame.payload_bits,
        )
        rx_text = deframe_text(rx_frame)

        payload = slice(HEADER_BITS, HEADER_BITS + tx_frame.payload_bits)
        errors = int(np.count_nonzero(tx_frame.bits[payload] != rx_info[payload]))
        bits_total = tx_frame.payload_bits
        ber_val = errors / bits_total
        bits_ok = self._bits_success([(bits_total, errors)])

        bleu_val: Optional[float] = None
        if cfg.compute_bleu:
            bleu_val = metrics.bleu(text.text, rx_text.text)

        ssim_val: Optional[float] = None
        if cfg.compute_ssim:
            try:
                regenerated = self.codec.decode(rx_text, seed=trial_seed)
                # Generated images carry their own resolution; compare at
                # the original's size.
                regenerated = regenerated.resized(source.width, source.height)
                ssim_val = metrics.ssim(source, regenerated)
            except CodecError:
                ssim_val = math.nan

        num_symbols = self.phy.num_symbols
        return TrialReport(
            mode="semantic",
            snr_db=snr_db,
            seed=trial_seed,
            bits_total=bits_total,
            bits_success=bits_ok,
            num_ofdm_symbols=num_symbols,
            total_time_s=num_symbols / self.phy.subcarrier_spacing_hz,
            ber=ber_val,
            effective_rate_bps=metrics.effective_data_rate(
                bits_total, bits_ok, num_symbols, self.phy.subcarrier_spacing_hz
            ),
            bleu=bleu_val,
            ssim=ssim_val,
        )

    def _conventional_trial(
        self, snr_db: float, trial_seed: int, image: Optional[ImageRaster]
    ) -> TrialReport:
        cfg = self.cfg
        source = image if image is not None else self.default_image()
        tx_frames = frame_image(source, capacity_bits=self.code.k)

        info = np.stack([f.bits for f in tx_frames])
        coded = fec.encode_batch(self.code, info)
        llrs = np.empty((len(tx_frames), self.code.n))
        for i in range(len(tx_frames)):
            grid = phy.build_grid(coded[i], self.phy)
            llrs[i] = self._frame_llrs(
                grid,
                snr_db,
                derive_seed(trial_seed, "chan", i),
                derive_seed(trial_seed, "noise", i),
            )
        rx_info, _, _ = fec.decode_batch(
            self.code, llrs, cfg.decoder_max_iters, cfg.min_sum
        )

        payload_start = HEADER_BITS + CHUNK_INDEX_BITS
        per_frame = []
        rx_frames = []
        for i, tx_frame in enumerate(tx_frames):
            region = slice(payload_start, payload_start + tx_frame.payload_bits)
            errors = int(
                np.count_nonzero(tx_frame.bits[region] != rx_info[i][region])
            )
            per_frame.append((tx_frame.payload_bits, errors))
            rx_frames.append(
                BitFrame(
                    bits=rx_info[i],
                    payload_kind=PayloadKind.IMAGE_CHUNK,
                    payload_bits=tx_frame.payload_bits,
                )
            )
        recovered = reassemble_image(rx_frames, source.width, source.height)

        bits_total = sum(total for total, _ in per_frame)
        errors_total = sum(err for _, err in per_frame)
        ber_val = errors_total / bits_total
        bits_ok = self._bits_success(per_frame)
        num_symbols = self.phy.num_symbols * len(tx_frames)

        ssim_val = metrics.ssim(source, recovered) if cfg.compute_ssim else None
        return TrialReport(
            mode="conventional",
            snr_db=snr_db,
            seed=trial_seed,
            bits_total=bits_total,
            bits_success=bits_ok,
            num_ofdm_symbols=num_symbols,
            total_time_s=num_symbols / self.phy.subcarrier_spacing_hz,
            ber=ber_val,
            effective_rate_bps=metrics.effective_data_rate(
                bits_total, bits_ok, num_symbols, self.phy.subcarrier_spacing_hz
            ),
            bleu=None,
            ssim=ssim_val,
        )


def run_trial(
    cfg: SweepConfig,
    mode: str,
    snr_db: float,
    trial_seed: int,
    image: Optional[ImageRaster] = None,
) -> TrialReport:
    """One end-to-end trial; convenience wrapper building a fresh session."""
    return LinkSession(cfg).run_trial(mode, snr_db, trial_seed, image)


def _aggregate(trials: Sequence[TrialReport]) -> tuple[AggregatePoint, ...]:
    points = []
    seen = []
    for report in trials:
        key = (report.mode, report.snr_db)
        if key not in seen:
            seen.append(key)
    for mode, snr_db in seen:
        group = [t for t in trials if t.mode == mode and t.snr_db == snr_db]

        def collect(attr):
            vals = [getattr(t, attr) for t in group]
            vals = [math.nan if v is None else v for v in vals]
            arr = np.array(vals, dtype=float)
            if np.all(np.isnan(arr)):
                return math.nan, math.nan
            return float(np.nanmean(arr)), float(np.nanmedian(arr))

        mean_ber, median_ber = collect("ber")
        mean_bleu, median_bleu = collect("bleu")
        mean_ssim, median_ssim = collect("ssim")
        mean_edr, median_edr = collect("effective_rate_bps")
        points.append(
            AggregatePoint(
                mode=mode,
                snr_db=snr_db,
                trials=len(group),
                mean_ber=mean_ber,
                median_ber=median_ber,
                mean_bleu=mean_bleu,
                median_bleu=median_bleu,
                mean_ssim=mean_ssim,
                median_ssim=median_ssim,
                mean_edr_bps=mean_edr,
                median_edr_bps=median_edr,
            )
        )
    return tuple(points)


def run_sweep(
    cfg: SweepConfig,
    out_dir: Optional[str] = None,
    progress: bool = False,
) -> SweepResult:
    """Run all (mode, SNR, trial) points, write results, return aggregates."""
    destination = out_dir or cfg.output_dir
    if destination is None:
        raise ConfigError("an output directory is required (output_dir or --out)")
    out_path = Path(destination)
    out_path.mkdir(parents=True, exist_ok=True)
    csv_path = out_path / "trials.csv"
    try:
        with open(csv_path, "w", encoding="utf-8"):
            pass
    except OSError as exc:
        raise ConfigError(f"cannot write results to {csv_path}: {exc}") from exc

    session = LinkSession(cfg)
    jobs = [
        (mode, snr_idx, trial_idx)
        for mode in cfg.modes
        for snr_idx in range(len(cfg.snr_db_list))
        for trial_idx in range(cfg.trials_per_point)
    ]

    def execute(job):
        mode, snr_idx, trial_idx = job
        seed = derive_seed(cfg.master_seed, mode, snr_idx, trial_idx)
        snr_db = cfg.snr_db_list[snr_idx]
        return job, session.run_trial(mode, snr_db, seed)

    results: dict[tuple, TrialReport] = {}
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            for job, report in pool.map(execute, jobs):
                results[job] = report
                if progress:
                    print(f"  done {job}", flush=True)
    else:
        for job in jobs:
            job, report = execute(job)
            results[job] = report
            if progress and job[2] == cfg.trials_per_point - 1:
                print(f"  finished mode={job[0]} snr={cfg.snr_db_list[job[1]]}", flush=True)

    ordered = tuple(results[job] for job in jobs)
    result = SweepResult(trials=ordered, aggregates=_aggregate(ordered))

    formats = ["csv"] + (["svg-plot"] if cfg.plot else [])
    emit_report(result, out_path, formats=formats, timestamp=cfg.timestamp)
    return result


def _fmt(value) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "nan"
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def emit_report(
    result: SweepResult,
    out_dir,
    formats: Iterable[str] = ("csv",),
    timestamp: bool = True,
) -> list[Path]:
    """Write the trials CSV (always) and optional per-metric SVG plots."""
    formats = list(formats)
    for fmt in formats:
        if fmt not in VALID_FORMATS:
            raise ValueError(f"unknown report format {fmt!r}")
    if not result.trials:
        raise ValueError("cannot emit a report for an empty sweep result")
    out_path = Path(out_dir)
    out_path.mkdir(parents=True, exist_ok=True)
    written = []

    if "csv" in formats:
        csv_path = out_path / "trials.csv"
        lines = []
        if timestamp:
            import datetime

            stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
            lines.append(f"# generated {stamp}")
        lines.append(CSV_HEADER)
        trial_counter: dict[tuple, int] = {}
        for report in result.trials:
            key = (report.mode, report.snr_db)
            idx = trial_counter.get(key, 0)
            trial_counter[key] = idx + 1
            lines.append(
                ",".join(
                    [
                        report.mode,
                        _fmt(report.snr_db),
                        str(idx),
                        str(report.seed),
                        _fmt(report.ber),
                        _fmt(report.bleu),
                        _fmt(report.ssim),
                        _fmt(report.effective_rate_bps),
                        str(report.bits_total),
                        str(report.bits_success),
                    ]
                )
            )
        csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
        written.append(csv_path)

    if "svg-plot" in formats:
        for metric, attr in (
            ("ber", "median_ber"),
            ("bleu", "median_bleu"),
            ("ssim", "median_ssim"),
            ("edr_bps", "median_edr_bps"),
        ):
            series = {}
            for point in result.aggregates:
                value = getattr(point, attr)
                if math.isnan(value):
                    continue
                series.setdefault(point.mode, []).append((point.snr_db, value))
            if not series:
                continue
            svg_path = out_path / f"{metric}_vs_snr.svg"
            svg_path.write_text(
                _svg_line_plot(f"median {metric} vs SNR", "SNR (dB)", metric, series),
                encoding="utf-8",
            )
            written.append(svg_path)
    return written


_SVG_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _svg_line_plot(title: str, xlabel: str, ylabel: str, series: dict) -> str:
    width, height = 640, 420
    left, right, top, bottom = 70, 20, 40, 50
    plot_w = width - left - right
    plot_h = height - top - bottom

    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts]
    x_min, x_max = min(xs), max(xs)
    y_min, y_max = min(ys), max(ys)
    if x_max == x_min:
        x_max = x_min + 1.0
    if y_max == y_min:
        y_max = y_min + 1.0

    def sx(x):
        return left + (x - x_min) / (x_max - x_min) * plot_w

    def sy(y):
        return top + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" y2="{top + plot_h}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="{height - 10}" text-anchor="middle" font-size="12">{xlabel}</text>',
        f'<text x="15" y="{top + plot_h / 2:.1f}" font-size="12" '
        f'transform="rotate(-90 15 {top + plot_h / 2:.1f})" text-anchor="middle">{ylabel}</text>',
        f'<text x="{left - 5}" y="{top + plot_h + 4}" text-anchor="end" font-size="10">{y_min:.4g}</text>',
        f'<text x="{left - 5}" y="{top + 4}" text-anchor="end" font-size="10">{y_max:.4g}</text>',
        f'<text x="{left}" y="{top + plot_h + 16}" text-anchor="middle" font-size="10">{x_min:.4g}</text>',
        f'<text x="{left + plot_w}" y="{top + plot_h + 16}" text-anchor="middle" font-size="10">{x_max:.4g}</text>',
    ]
    for i, (mode, pts) in enumerate(sorted(series.items())):
        color = _SVG_COLORS[i % len(_SVG_COLORS)]
        pts = sorted(pts)
        path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        parts.append(
            f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="2"/>'
        )
        for x, y in pts:
            parts.append(
                f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" fill="{color}"/>'
            )
        parts.append(
            f'<text x="{left + plot_w - 5}" y="{top + 15 + 15 * i}" text-anchor="end" '
            f'font-size="12" fill="{color}">{mode}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
