import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from ghmtq import jets
from ghmtq.geometry import (GeometryError, MetricField2, Signature, build_coframe, connection_field,
                            connection_from_cartan, curvature, detect_signature, gauge_transform,
                            geodesic_curvature, line_integral, loop_holonomy, pipeline,
                            rotate_coframe)
from ghmtq.solutions import make_family

AVTD = make_family("gowdy_paper_metric").metric()
SPHERE = MetricField2(lambda th, ph: (1.0 + 0 * th, 0 * th, jets.sin(th) ** 2))
POLAR = MetricField2(lambda r, th: (1.0 + 0 * r, 0 * r, r * r))
DS2 = MetricField2(lambda t, x: (-1.0 + 0 * t, 0 * t, jets.cosh(t) ** 2), Signature.LORENTZIAN)
ADS2 = MetricField2(lambda r, t: (1.0 + 0 * r, 0 * r, -jets.cosh(r) ** 2), Signature.LORENTZIAN)


def const_metric(h11, h12, h22, sig=None):
    x, _ = jets.variables(0.0, 0.0)
    return tuple(jets.as_jet(c, (), 3) + 0 * x for c in (h11, h12, h22))


def values(theta):
    return [[float(c.v) for c in row] for row in theta]


def test_coframe_avtd_at_origin():
    cf = build_coframe(AVTD.at((0.0, 0.0)))
    assert np.allclose(values(cf.theta), [[1 / math.sqrt(2), 0.0], [0.0, 1 / math.sqrt(2)]])
    assert cf.convention == "lower_triangular"


def test_coframe_identity_metrics():
    cf = build_coframe(const_metric(1.0, 0.0, 1.0))
    assert values(cf.theta) == [[1.0, 0.0], [0.0, 1.0]]
    lor = build_coframe(const_metric(1.0, 0.0, -1.0))
    assert lor.signature is Signature.LORENTZIAN
    assert values(lor.theta) == [[1.0, 0.0], [0.0, 1.0]]


def test_coframe_rejects_other_conventions():
    with pytest.raises(ValueError):
        build_coframe(const_metric(1.0, 0.0, 1.0), convention="paper_frame")


@pytest.mark.parametrize("h", [(1.0, 1.0, 1.0), (0.0, 0.0, 0.0), (1.0, 1e-7, 1e-14)])
def test_degenerate_metrics_raise(h):
    with pytest.raises(GeometryError):
        build_coframe(const_metric(*h), Signature.RIEMANNIAN)


def test_degenerate_points_are_reported():
    m = MetricField2(lambda x, y: (1.0 + 0 * x, 0 * x, x * x))
    with pytest.raises(GeometryError) as err:
        build_coframe(m.at((np.array([0.0, 1.0]), np.array([0.0, 0.0]))))
    assert err.value.mask.tolist() == [True, False]


def test_signature_detection():
    assert detect_signature(const_metric(2.0, 0.5, 1.0)) is Signature.RIEMANNIAN
    assert detect_signature(const_metric(-1.0, 0.0, 1.0)) is Signature.LORENTZIAN
    with pytest.raises(GeometryError):
        detect_signature(const_metric(-1.0, 0.0, -1.0))
    assert Signature.LORENTZIAN.group == "SO(1,1)"


def test_coframe_reproduces_metric():
    h = AVTD.at((np.linspace(-1, 1, 7), np.zeros(7)))
    assert np.max(build_coframe(h).reproduction_error(h)) < 1e-14


def test_avtd_connection_and_curvature():
    _, conn, curv = pipeline(AVTD.at((0.0, 0.0)))
    assert float(conn.frame[0].v) == pytest.approx(0.0, abs=1e-15)
    assert float(conn.frame[1].v) == pytest.approx(-1 / math.sqrt(2))
    assert (curv.F, curv.R) == pytest.approx((-1.0, -2.0))
    assert conn.frame_consistency_error() < 1e-15


@pytest.mark.parametrize("metric, p, R", [
    (SPHERE, (1.1, 0.4), 2.0),
    (POLAR, (1.7, 0.2), 0.0),
    (DS2, (0.3, 0.1), 2.0),
    (ADS2, (0.4, 0.1), -2.0),
])
def test_constant_curvature_controls(metric, p, R):
    _, _, curv = pipeline(metric.at(p), metric.signature)
    assert float(curv.R) == pytest.approx(R, abs=1e-12)


def test_connection_needs_first_order_jets():
    with pytest.raises(ValueError):
        connection_from_cartan(build_coframe(AVTD.at((0.0, 0.0), order=0)))


def test_gauge_invariance_of_F():
    p = (np.array([0.3, -0.5]), np.array([1.2, 2.0]))
    cf, conn, curv = pipeline(AVTD.at(p))
    x1, x2 = jets.variables(*p)
    conn2 = gauge_transform(conn, jets.sin(x1 * x2))
    assert np.max(np.abs(curvature(conn2).F - curv.F)) < 1e-9
    assert np.max(conn2.frame_consistency_error()) < 1e-13


def test_gauge_of_flat_connection():
    cf, conn, _ = pipeline(const_metric(1.0, 0.0, 1.0))
    x1, _ = jets.variables(0.0, 0.0)
    conn2 = gauge_transform(conn, x1)
    assert [float(c.v) for c in conn2.coord] == [-1.0, 0.0]


def test_frame_choice_independence():
    p = (np.linspace(0.2, 1.0, 5), np.linspace(0.0, 3.0, 5))
    cf, conn, curv = pipeline(AVTD.at(p))
    x1, x2 = jets.variables(*p)
    rotated = rotate_coframe(cf, jets.cos(x1) * x2 + 0.3 * x1 * x1)
    assert np.max(rotated.reproduction_error(AVTD.at(p))) < 1e-13
    assert np.max(np.abs(curvature(connection_from_cartan(rotated)).R - curv.R)) < 1e-8


def test_lorentzian_boost_keeps_curvature():
    p = (0.3, 0.1)
    cf, conn, curv = pipeline(DS2.at(p), Signature.LORENTZIAN)
    x1, x2 = jets.variables(*p)
    boosted = rotate_coframe(cf, 0.5 * x1 * x2)
    assert abs(curvature(connection_from_cartan(boosted)).R - curv.R) < 1e-10


@pytest.mark.parametrize("c", [0.0, 0.7, 1.0, -2.5])
def test_holonomy_of_monopole_form(c):
    form = lambda x, y: (-c * y / (x * x + y * y), c * x / (x * x + y * y))
    circle = lambda s: (jets.cos(2 * math.pi * s), jets.sin(2 * math.pi * s))
    hol = loop_holonomy(form, circle, 64)
    assert abs(hol.value - 2 * math.pi * c) < 1e-10


def test_avtd_loop_holonomy():
    hol = line_integral(connection_field(AVTD), lambda s: (0.0 * s, 2 * math.pi * s), 64)
    assert abs(hol.value + math.pi) < 1e-12


def test_line_integral_preconditions():
    form = lambda x, y: (x, y)
    with pytest.raises(ValueError):
        line_integral(form, lambda s: (s, s), 10)
    with pytest.raises(GeometryError):
        loop_holonomy(form, lambda s: (s, s), 16)
    with pytest.raises(GeometryError):
        line_integral(form, lambda s: (2 * s, s), 16, domain=((0, 1), (0, 1)))


def test_exact_form_has_zero_loop_integral():
    # d(x^2 y) around the unit circle
    form = lambda x, y: (2 * x * y, x * x)
    circle = lambda s: (jets.cos(2 * math.pi * s), jets.sin(2 * math.pi * s))
    assert abs(loop_holonomy(form, circle, 64).value) < 1e-12


def test_geodesic_curvature_examples():
    assert geodesic_curvature(AVTD, 1, (1.0, 0.3)) == pytest.approx(math.exp(0.5) / math.sqrt(2))
    assert geodesic_curvature(POLAR, 1, (2.0, 0.3)) == pytest.approx(0.5)
    # radial lines and the sphere's equator are geodesics
    assert geodesic_curvature(POLAR, 0, (2.0, 0.3)) == pytest.approx(0.0, abs=1e-14)
    assert geodesic_curvature(SPHERE, 1, (math.pi / 2, 0.3)) == pytest.approx(0.0, abs=1e-14)
    lat = 0.8
    assert geodesic_curvature(SPHERE, 1, (lat, 0.0)) == pytest.approx(math.cos(lat) / math.sin(lat))


def test_null_edge_rejected():
    null = MetricField2(lambda u, v: (0 * u, 1.0 + 0 * u, 0 * u), Signature.LORENTZIAN)
    with pytest.raises(GeometryError):
        geodesic_curvature(null, 0, (0.1, 0.2))


@pytest.mark.parametrize("metric, p", [
    (AVTD, (0.4, 1.0)),
    (SPHERE, (1.0, 0.5)),
    (MetricField2(lambda x, y: (1 + x * x, x * y / 3, 2 + jets.sin(y))), (0.5, 0.7)),
])
def test_ricci_matches_christoffel_oracle(metric, p):
    _, _, curv = pipeline(metric.at(p))
    ref = oracles.christoffel_ricci(metric, *p)
    assert float(curv.R) == pytest.approx(float(ref[0]), rel=1e-7, abs=1e-7)


coef = st.floats(-0.5, 0.5)


@given(coef, coef, coef, st.floats(-1, 1), st.floats(-1, 1))
def test_ricci_oracle_property(a, b, c, x, y):
    metric = MetricField2(lambda u, v: (jets.exp(a * u + b * v), c * jets.sin(u) * 0.3,
                                        1.5 + jets.cos(u * v) * 0.5))
    _, _, curv = pipeline(metric.at((x, y)))
    ref = oracles.christoffel_ricci(metric, x, y)
    assert abs(float(curv.R) - float(ref[0])) < 1e-6 * max(1.0, abs(float(ref[0])))


@given(coef, coef, st.floats(-1, 1), st.floats(0.1, 3))
def test_gauge_invariance_property(a, b, x, y):
    cf, conn, curv = pipeline(AVTD.at((x, y)))
    u, v = jets.variables(x, y)
    lam = a * jets.exp(u) + b * jets.sin(u * v)
    assert abs(curvature(gauge_transform(conn, lam)).F - curv.F) < 1e-9


def test_flat_connection_gives_zero_curvature():
    _, conn, curv = pipeline(const_metric(2.0, 0.3, 1.0))
    assert all(float(c.v) == 0.0 for c in conn.coord)
    assert (curv.F, curv.R) == (0.0, 0.0)


@pytest.mark.parametrize("name, cfg, p", [
    ("gowdy", {}, (np.linspace(-1, 1, 50), np.linspace(0.1, 6, 50))),
    ("gowdy_avtd", {}, (np.linspace(-1, 1, 50), np.linspace(0.1, 6, 50))),
    ("einstein_rosen", {}, (np.linspace(-1, 1, 50), np.linspace(0.6, 3, 50))),
    ("schwarzschild", {}, (np.linspace(3, 9, 50), np.linspace(0.1, 3, 50))),
])
def test_printed_frame_and_lower_triangular_agree_on_R(name, cfg, p):
    fam = make_family(name, cfg)
    conn = connection_from_cartan(fam.paper_coframe(p))
    _, _, curv = pipeline(fam.metric().at(p), fam.metric().signature)
    assert np.max(np.abs(curvature(conn).R - curv.R)) < 1e-8
    assert np.max(fam.paper_coframe(p).reproduction_error(fam.metric().at(p))) < 1e-10


def test_holonomy_gauge_shift_vanishes_for_single_valued_lambda():
    c = 0.4
    circle = lambda s: (jets.cos(2 * math.pi * s), jets.sin(2 * math.pi * s))
    form = lambda x, y: (-c * y / (x * x + y * y), c * x / (x * x + y * y))

    def shifted(x, y):
        u, v = jets.variables(x, y, order=1)
        dl = jets.grad(jets.sin(u * v) + 0.3 * u * u)
        w1, w2 = form(x, y)
        return w1 - dl[0].v, w2 - dl[1].v
    diff = loop_holonomy(shifted, circle, 128).value - loop_holonomy(form, circle, 128).value
    assert abs(diff) < 1e-10


ER_TEST = {"psi": "0.1*t + 0.2*rho", "Omega": "rho*t"}


def test_er_test_fields_connection():
    # the v component matches the printed form; u misses the contribution of
    # the explicit sqrt(rho) in the first leg, so only the repaired form agrees
    fam = make_family("einstein_rosen", ER_TEST)
    conn = connection_from_cartan(fam.paper_coframe((1.0, 2.0)))
    omega = np.array([float(c.v) for c in conn.frame])
    printed = fam.closed_form_connection((1.0, 2.0))
    assert printed[1] == pytest.approx(omega[1], rel=1e-12)
    assert abs(printed[0] - omega[0]) > 0.5
    assert np.allclose(oracles.er_connection_corrected(fam, (1.0, 2.0)), omega, rtol=1e-12)


def test_er_test_fields_curvature():
    # F = -2/rho (= -1 at rho = 2) is not what the Cartan pipeline gives for
    # these off-shell fields; the pipeline agrees with the Christoffel oracle
    fam = make_family("einstein_rosen", ER_TEST)
    conn = connection_from_cartan(fam.paper_coframe((1.0, 2.0)))
    curv = curvature(conn)
    assert float(curv.F) == pytest.approx(2.5244426717, rel=1e-9)
    assert float(curv.R) == pytest.approx(float(oracles.christoffel_ricci(fam.metric(), 1.0, 2.0)[0]), rel=1e-7)
