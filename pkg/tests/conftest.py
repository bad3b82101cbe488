import numpy as np
import pytest

from trms_ftc import multimodel, plant, synthesis
from trms_ftc.params import TrmsParams


@pytest.fixture(scope="session")
def params():
    return TrmsParams()


@pytest.fixture(scope="session")
def default_bank(params):
    """Three-node bank at the default trim pitches."""
    return multimodel.build_bank(params)


@pytest.fixture(scope="session")
def default_design(default_bank):
    return synthesis.design_gains(default_bank)


@pytest.fixture(scope="session")
def frozen_setup(params):
    """Single-model bank at the level-pitch trim plus its synthesized design."""
    x_star, u_star = plant.trim(0.0, 0.0, params)
    model = multimodel.linearize(params, x_star, u_star)
    bank = multimodel.ModelBank((model,), np.array([0.0]), 0.25)
    gains, uio = synthesis.design_gains(bank)
    return bank, model, gains, uio, x_star, u_star
