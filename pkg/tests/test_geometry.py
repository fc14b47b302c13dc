import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slitaudit import geometry as g
from slitaudit.geometry import REFERENCE_CONFIG, ApparatusConfig, DomainError


def test_missing_order_examples():
    assert g.missing_order(200e-6, 10e-6) == pytest.approx(20)
    assert g.missing_order(2 * 7e-6, 7e-6) == 2
    assert g.missing_order(150e-6, 10e-6) == pytest.approx(15)


def test_missing_order_rejects_overlap():
    with pytest.raises(DomainError):
        g.missing_order(10e-6, 10e-6)
    with pytest.raises(DomainError):
        g.missing_order(10e-6, -1e-6)


def test_fringe_counts():
    assert g.fringe_count(20) == 39
    assert g.fringe_count(1) == 1
    assert g.observed_fringe_count(17, 16) == 32
    with pytest.raises(DomainError):
        g.fringe_count(0)


def test_fringe_spacing_reference():
    m, px = g.fringe_spacing(REFERENCE_CONFIG)
    assert m == pytest.approx(3.29056e-4, abs=1e-9)
    assert px == pytest.approx(47, abs=0.1)


def test_fringe_spacing_linear_in_distance():
    m1, _ = g.fringe_spacing(REFERENCE_CONFIG)
    m2, _ = g.fringe_spacing(REFERENCE_CONFIG.replace(screen_distance_D=2 * REFERENCE_CONFIG.screen_distance_D))
    assert m2 == pytest.approx(2 * m1, rel=1e-12)


def test_principal_half_width_reference():
    off = g.principal_half_width(REFERENCE_CONFIG)
    assert math.degrees(off.theta) == pytest.approx(3.63, abs=0.01)
    assert off.length == pytest.approx(0.659e-2, abs=0.001e-2)
    assert 2 * off.pixels == pytest.approx(1884, abs=2)


def test_principal_half_width_at_14cm():
    off = g.principal_half_width(REFERENCE_CONFIG.replace(screen_distance_D=0.14))
    assert 2 * off.pixels == pytest.approx(2537, abs=1)


def test_principal_half_width_narrows_with_wavelength():
    small = g.principal_half_width(REFERENCE_CONFIG.replace(wavelength=1e-12))
    assert small.theta < 1e-6 and small.length < 1e-7


def test_secondary_max_reference():
    sm = g.secondary_max_geometry(REFERENCE_CONFIG)
    assert math.sin(sm.theta) == pytest.approx(0.09176, abs=1e-5)
    assert sm.length == pytest.approx(0.958e-2, abs=0.001e-2)
    assert sm.pixels == pytest.approx(1369, abs=1)
    assert sm.absolute_pixel == pytest.approx(2869, abs=2)
    assert sm.in_view
    assert 245 + sm.rel_height * 787 == pytest.approx(282, abs=2)


def test_secondary_max_out_of_view_at_14cm():
    sm = g.secondary_max_geometry(REFERENCE_CONFIG.replace(screen_distance_D=0.14))
    assert sm.absolute_pixel > 3000
    assert not sm.in_view


def test_fraunhofer():
    assert g.fraunhofer_number(REFERENCE_CONFIG) == pytest.approx(1.52e-3, rel=0.01)
    assert g.fraunhofer_satisfied(REFERENCE_CONFIG)
    wide = REFERENCE_CONFIG.replace(slit_width_a=1e-3, slit_separation_d=2e-3, screen_distance_D=0.1)
    assert g.fraunhofer_number(wide) == pytest.approx(15.8, abs=0.05)
    assert not g.fraunhofer_satisfied(wide)
    tiny = REFERENCE_CONFIG.replace(slit_width_a=1e-9, slit_separation_d=2e-8, wavelength=1e-10)
    assert g.fraunhofer_number(tiny) < 1e-7


def test_inferred_distances():
    lam, a, d = 632.8e-9, 10e-6, 200e-6
    assert g.infer_distance_from_width(0.81e-2, a, lam) == pytest.approx(0.128, abs=0.001)
    assert g.infer_distance_from_width(1.0e-2, a, lam) == pytest.approx(0.158, abs=0.001)
    x = g.principal_half_width(REFERENCE_CONFIG).length
    assert g.infer_distance_from_width(x, a, lam) == pytest.approx(0.104, rel=1e-12)
    assert g.infer_distance_from_spacing(69, 7e-6, d, lam) == pytest.approx(0.153, abs=0.001)
    assert g.infer_distance_from_spacing(47, 7e-6, d, lam) == pytest.approx(0.104, abs=0.001)
    mean = 0.5 * (g.infer_distance_from_width(0.81e-2, a, lam) + g.infer_distance_from_spacing(69, 7e-6, d, lam))
    assert mean == pytest.approx(0.14, abs=0.005)


def test_photon_flux():
    flux = g.photon_flux_per_slit(REFERENCE_CONFIG)
    assert flux.photon_energy == pytest.approx(3.14e-19, rel=0.01)
    assert 1e12 <= flux.per_slit_rate < 1e14
    assert flux.transit_time == pytest.approx(3.5e-10, rel=0.02)


def test_predict_reference():
    p = g.predict(REFERENCE_CONFIG)
    assert p.missing_order == 20
    assert p.fringe_count == 39
    assert p.principal_width_px == pytest.approx(1884, abs=2)
    assert p.secondary_max_in_view


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(wavelength=0.0),
        dict(slit_width_a=-1e-6),
        dict(slit_separation_d=5e-6),
        dict(pixel_count=8),
        dict(screen_distance_D=float("nan")),
    ],
)
def test_config_validation(kwargs):
    base = dict(wavelength=632.8e-9, slit_width_a=10e-6, slit_separation_d=200e-6, screen_distance_D=0.104)
    base.update(kwargs)
    with pytest.raises(DomainError):
        ApparatusConfig(**base)


def test_secondary_max_needs_subunit_sine():
    with pytest.raises(DomainError):
        g.secondary_max_geometry(REFERENCE_CONFIG.replace(wavelength=9e-6))


@settings(max_examples=60, deadline=None)
@given(
    lam=st.floats(400e-9, 800e-9),
    a=st.floats(5e-6, 50e-6),
    m=st.integers(2, 30),
    D=st.floats(0.02, 1.0),
)
def test_inverse_distance_roundtrip(lam, a, m, D):
    cfg = ApparatusConfig(wavelength=lam, slit_width_a=a, slit_separation_d=m * a, screen_distance_D=D)
    x = g.principal_half_width(cfg).length
    assert g.infer_distance_from_width(x, a, lam) == pytest.approx(D, rel=1e-9)
    _, px = g.fringe_spacing(cfg)
    assert g.infer_distance_from_spacing(px, cfg.pixel_pitch, m * a, lam) == pytest.approx(D, rel=1e-9)
    assert g.fringe_count(round(g.missing_order(m * a, a))) == 2 * m - 1
