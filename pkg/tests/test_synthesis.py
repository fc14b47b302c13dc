import math

import numpy as np
import pytest

from slitaudit import synthesis as s
from slitaudit.audit import detect_fringe_peaks, fringe_comb
from slitaudit.geometry import REFERENCE_CONFIG
from slitaudit.spectral import detect_interference_peak, power_spectrum, r_statistic


def test_intensity_exact_landmarks():
    c = REFERENCE_CONFIG
    assert s.intensity_exact(c, 0.0) == pytest.approx(1.0)
    assert s.intensity_exact(c, math.asin(c.wavelength / c.slit_width_a)) == pytest.approx(0.0, abs=1e-20)
    assert s.intensity_exact(c, math.asin(c.wavelength / (2 * c.slit_separation_d))) == pytest.approx(0.0, abs=1e-20)


def test_reference_simulation():
    ref = s.simulate_reference()
    assert len(ref.samples) == 10004
    assert ref.unit == "rad" and ref.pixel_pitch == 2e-4
    theta = (ref.pixel_index - ref.center_pixel) * ref.pixel_pitch
    assert ref.samples[theta == 0][0] == pytest.approx(1.0)
    # brute-force scan for the first missing fringe: order 20 at theta = pi/10
    crests = np.arange(1, 40) * math.pi / 200
    heights = np.interp(crests, theta, ref.samples)
    first_gone = crests[np.argmax(heights < 1e-3)]
    assert first_gone == pytest.approx(math.pi / 10, abs=1e-9)
    assert 200 * first_gone / math.pi == pytest.approx(20)


def test_envelope_normalisation():
    x = np.array([-math.pi, 0.0, math.pi])
    assert s.envelope("raised-cosine", x) == pytest.approx([0, 1, 0], abs=1e-15)
    assert s.envelope_coefficients(0.25) == pytest.approx((0.375, 0.5, 0.125))
    grid = np.linspace(-math.pi, math.pi, 101)
    assert np.allclose(s.envelope("extended", grid, 0.0), s.envelope("raised-cosine", grid))
    assert s.envelope("exact-sinc2", np.array([0.0]))[0] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        s.envelope("gaussian", grid)
    with pytest.raises(ValueError):
        s.SynthesisParams(I0=1.0, V=0.5, K=10, envelope="extended", A=1.0)


def test_raised_cosine_expansion_matches_product():
    x = np.linspace(-math.pi, math.pi, 257)
    I0, V, I_DC, K = 787.0, 0.6, 245.0, 44
    direct = s.envelope("raised-cosine", x) * I0 * (1 + V * np.cos(K * x)) + I_DC
    assert np.allclose(s.raised_cosine_expansion(I0, V, I_DC, K, x), direct, rtol=0, atol=1e-9)


def test_synthesize_constant_when_no_interference():
    p = s.SynthesisParams(I0=500.0, V=0.0, K=10, envelope="flat")
    t = s.synthesize_trace(p)
    assert np.allclose(t.samples, 500.0)


def test_synthesize_reference_like_maximum():
    # I0 (1 + V) above the offset reaches 1045
    p = s.SynthesisParams(I0=400.0, V=1.0, K=44, I_DC=245.0)
    t = s.synthesize_trace(p)
    assert int(np.argmax(t.samples)) == 1500
    assert t.samples.max() == pytest.approx(1045, rel=1e-12)


def test_synthesize_roundtrip_r_is_one():
    t = s.synthesize_trace(s.SynthesisParams(I0=787.0, V=1.0, K=44))
    spec = power_spectrum(t)
    k, _ = detect_interference_peak(spec)
    assert k == 44
    assert r_statistic(spec, k) == pytest.approx(1.0, rel=1e-9)


def test_noise_is_seeded():
    p = s.SynthesisParams(I0=787.0, V=0.8, K=44, noise_sigma=5.0, rng_seed=7)
    a, b = s.synthesize_trace(p), s.synthesize_trace(p)
    assert np.array_equal(a.samples, b.samples)
    c = s.synthesize_trace(s.SynthesisParams(I0=787.0, V=0.8, K=44, noise_sigma=5.0, rng_seed=8))
    assert not np.array_equal(a.samples, c.samples)
    assert (a.samples >= 0).all()


@pytest.mark.parametrize(
    "kwargs",
    [dict(I0=-1.0), dict(V=1.5), dict(K=0), dict(envelope="extended", A=-0.1), dict(noise_sigma=-1.0)],
)
def test_params_validation(kwargs):
    base = dict(I0=1.0, V=0.5, K=10)
    base.update(kwargs)
    with pytest.raises(ValueError):
        s.SynthesisParams(**base)


def test_trace_validation():
    with pytest.raises(ValueError):
        s.Trace(np.ones(8))
    with pytest.raises(ValueError):
        s.Trace(np.array([1.0] * 20 + [np.nan]))
    with pytest.raises(ValueError):
        s.Trace(-np.ones(20))


def test_defects_identity():
    t = s.exact_trace(REFERENCE_CONFIG, I0=787)
    assert np.array_equal(s.apply_defects(t).samples, t.samples)


def test_dead_pixels_remove_seven_fringes():
    t = s.exact_trace(REFERENCE_CONFIG, I0=787)
    comb = fringe_comb(t)
    crests = comb.by_order()
    # one dead run from the trough before order 3 to the trough after order 9
    lo = int(round(crests[2][0] + 0.5 * comb.spacing))
    hi = int(round(crests[9][0] + 0.5 * comb.spacing))
    dead = s.apply_defects(t, dead_pixels=range(lo, hi + 1))
    before, _ = detect_fringe_peaks(t.samples)
    after, _ = detect_fringe_peaks(dead.samples)
    assert len(before) - len(after) == 7


def test_dead_pixel_out_of_range():
    t = s.exact_trace(REFERENCE_CONFIG, I0=787)
    with pytest.raises(IndexError):
        s.apply_defects(t, dead_pixels=[5000])


def test_apodization_lowers_secondary_max():
    t = s.exact_trace(REFERENCE_CONFIG, I0=787)
    apo = s.apply_defects(t, apodization_strength=2.0)
    window = slice(2800, 2940)
    assert t.samples[window].max() == pytest.approx(0.047 * 787, rel=0.05)
    assert apo.samples[window].max() < 0.047 * 787


def test_exact_trace_on_reference_config():
    t = s.exact_trace(REFERENCE_CONFIG, I0=787, I_DC=245)
    assert len(t.samples) == 3000
    assert t.samples[1500] == pytest.approx(787 + 245)
