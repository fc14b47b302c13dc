import math

import numpy as np
import pytest

from slitaudit import fileio
from slitaudit.geometry import REFERENCE_CONFIG, ApparatusConfig, fraunhofer_satisfied


@pytest.fixture
def reference_config():
    return REFERENCE_CONFIG


@pytest.fixture
def recorded_features():
    return fileio.load_features(fileio.recorded_features_path())


def random_configs(n, seed=0):
    """Valid configs whose principal lobe and first side fringes fit on the camera.

    d/a is integral so a missing order exists, and the Fraunhofer condition holds.
    """
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        wavelength = rng.uniform(450e-9, 700e-9)
        a = rng.uniform(8e-6, 25e-6)
        m = int(rng.integers(6, 21))
        pitch = rng.uniform(5e-6, 10e-6)
        half_width_px = rng.uniform(450, 900)
        D = half_width_px * pitch / math.tan(math.asin(wavelength / a))
        cfg = ApparatusConfig(
            wavelength=wavelength,
            slit_width_a=a,
            slit_separation_d=m * a,
            screen_distance_D=D,
            pixel_pitch=pitch,
            pixel_count=3000,
        )
        if fraunhofer_satisfied(cfg) and half_width_px / m >= 20:
            out.append(cfg)
    return out


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
