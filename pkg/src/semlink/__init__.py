"""semlink: link-level simulator for caption-based semantic image
transmission over an OFDM radio link."""

from .channel import ChannelConfig, ChannelKind, apply_channel, max_doppler, realize_channel, realize_tdl
from .codec import (
    FixtureCorpus,
    MockCodec,
    RemoteCodec,
    TextKnowledge,
    codec_roundtrip_similarity,
)
from .fec import LdpcCode, build_code, decode, encode
from .framing import BitFrame, PayloadKind, deframe_text, frame_image, frame_text, reassemble_image
from .harness import LinkSession, SweepConfig, load_sweep_config, run_sweep, run_trial
from .metrics import TrialReport, ber, bleu, compression_ratio, effective_data_rate, ssim
from .phy import PhyConfig, ResourceGrid, build_grid, equalize_combine, estimate_channel, ofdm_demodulate, ofdm_modulate, qam_demap_llr, qam_map
from .raster import ImageRaster
from .theory import (
    DiscreteJoint,
    Hypothesis,
    WorldModel,
    capacity_objective,
    capacity_sup,
    hypothesis_classifier,
    load_world_model,
    logical_probability,
    semantic_entropy,
)

__version__ = "0.1.0"
