import pathlib

import numpy as np
import pytest

from semlink import fec
from semlink.codec import FixtureCorpus
from semlink.phy import PhyConfig

REPO_ROOT = pathlib.Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def corpus_dir() -> pathlib.Path:
    return REPO_ROOT / "fixtures"


@pytest.fixture(scope="session")
def corpus(corpus_dir) -> FixtureCorpus:
    return FixtureCorpus.load(corpus_dir)


@pytest.fixture(scope="session")
def phy_cfg() -> PhyConfig:
    return PhyConfig()


@pytest.fixture(scope="session")
def small_code() -> fec.LdpcCode:
    return fec.build_code(16, 1)


@pytest.fixture(scope="session")
def frame_code(phy_cfg) -> fec.LdpcCode:
    return fec.build_code(phy_cfg.coded_bits_per_frame, 7)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(0xBEEF)
