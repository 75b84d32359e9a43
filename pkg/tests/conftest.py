import numpy as np
import pytest
from hypothesis import settings

from scrc.pipeline import GestureCoupleRecording, PipelineConfig, train
from scrc.synthgen import SynthConfig, gen_couple

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

COUPLE_SEED = 100


def make_couples(seed=COUPLE_SEED, gestures=(1, 2, 3, 4, 5), cycles=6, scfg=None):
    scfg = scfg or SynthConfig()
    out = []
    for g in gestures:
        rec, truth = gen_couple(g, cycles, scfg, seed=seed + g)
        out.append(GestureCoupleRecording(rec, g, f"g{g}", truth))
    return out


@pytest.fixture(scope="session")
def couples():
    return make_couples()


@pytest.fixture(scope="session")
def model(couples):
    return train(couples, PipelineConfig())


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
