import numpy as np
import pytest

import udnsim as u


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def make_scenario(
    dimension=u.Dimension.PLANE_2D,
    density=100.0,
    model=None,
    fading="rayleigh",
    noise=None,
    thresholds=(1.0,),
    **kwargs,
):
    """Small scenario builder so tests stay terse."""
    return u.NetworkScenario(
        geometry=u.DeploymentGeometry(dimension),
        density=density,
        pathloss=model or u.PathLossModel.single_slope(4.0),
        fading=u.FadingModel(fading) if isinstance(fading, str) else fading,
        noise=noise or u.NoiseSpec.off(),
        thresholds=thresholds,
        **kwargs,
    )
