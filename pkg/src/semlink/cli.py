"""Command-line entry points: sweep, trial, theory.

Exit codes: 0 on success, 2 for configuration problems, 3 for runtime
failures.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

from .channel import ChannelConfig, ChannelKind
from .codec import CodecError
from .harness import (
    ConfigError,
    LinkSession,
    SweepConfig,
    load_sweep_config,
    run_sweep,
)
from .raster import ImageRaster
from .theory import ContradictoryMessageError, load_world_model, logical_probability, semantic_entropy

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _cmd_sweep(args) -> int:
    cfg = load_sweep_config(args.config)
    overrides = {}
    if args.out:
        overrides["output_dir"] = args.out
    if args.plot:
        overrides["plot"] = True
    if args.no_timestamp:
        overrides["timestamp"] = False
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    result = run_sweep(cfg, progress=not args.quiet)
    if not args.quiet:
        for point in result.aggregates:
            print(
                f"{point.mode:12s} snr={point.snr_db:+6.2f} dB  "
                f"median ber={point.median_ber:.4g} bleu={point.median_bleu:.4g} "
                f"ssim={point.median_ssim:.4g} edr={point.median_edr_bps:.4g} bps"
            )
    return EXIT_OK


def _cmd_trial(args) -> int:
    image_path = Path(args.image)
    if not image_path.exists():
        raise ConfigError(f"image file {image_path} does not exist")
    corpus = args.corpus or str(image_path.parent)
    cfg = SweepConfig(
        modes=(args.mode,),
        snr_db_list=(args.snr,),
        trials_per_point=1,
        master_seed=args.seed,
        corpus_path=corpus,
        gateway_url=args.gateway,
        channel=ChannelConfig(
            kind=ChannelKind(args.channel), speed_kmh=args.speed
        ),
        csi=args.csi,
    )
    session = LinkSession(cfg)
    image = ImageRaster.from_png_file(image_path)
    report = session.run_trial(args.mode, args.snr, args.seed, image=image)
    payload = dataclasses.asdict(report)
    for key, value in payload.items():
        if isinstance(value, float) and math.isnan(value):
            payload[key] = None
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_theory(args) -> int:
    model = load_world_model(args.model)
    lp = logical_probability(model, args.msg)
    print(f"logical_probability({args.msg}) = {lp:.12g}")
    entropy = semantic_entropy(model, args.msg)
    print(f"semantic_entropy({args.msg}) = {entropy:.12g} bits")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semlink",
        description="Link-level simulator for caption-based semantic image transmission",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run a Monte-Carlo SNR sweep from a config file")
    sweep.add_argument("--config", required=True, help="YAML sweep configuration")
    sweep.add_argument("--out", help="output directory (overrides the config)")
    sweep.add_argument("--plot", action="store_true", help="also write SVG plots")
    sweep.add_argument(
        "--no-timestamp", action="store_true", help="omit the CSV timestamp header line"
    )
    sweep.add_argument("--quiet", action="store_true", help="suppress progress output")
    sweep.set_defaults(func=_cmd_sweep)

    trial = sub.add_parser("trial", help="run a single end-to-end trial")
    trial.add_argument("--mode", choices=("semantic", "conventional"), required=True)
    trial.add_argument("--snr", type=float, required=True, help="Es/N0 per rx antenna, dB")
    trial.add_argument("--seed", type=int, required=True)
    trial.add_argument("--image", required=True, help="PNG image to transmit")
    trial.add_argument(
        "--corpus", help="fixture corpus directory (default: the image's directory)"
    )
    trial.add_argument("--gateway", help="model gateway URL (default: mock codec)")
    trial.add_argument("--channel", choices=("tdl", "awgn"), default="tdl")
    trial.add_argument("--speed", type=float, default=90.0, help="mobile speed, km/h")
    trial.add_argument("--csi", choices=("estimated", "perfect"), default="estimated")
    trial.set_defaults(func=_cmd_trial)

    theory = sub.add_parser("theory", help="query a world model file")
    theory.add_argument("--model", required=True, help="world model YAML file")
    theory.add_argument("--msg", required=True, help="message identifier")
    theory.set_defaults(func=_cmd_theory)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CodecError, ContradictoryMessageError, KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
