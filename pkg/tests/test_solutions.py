import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from ghmtq import jets, solutions as sol
from ghmtq.ghm import field_eq_residual, induced_metric
from ghmtq.solutions import (IntegrabilityError, SolutionsError, closed_form_connection,
                             closed_form_ricci, make_family, onshell_family, paper_coframe,
                             paper_frame_pipeline, quadrature_gradient, quadrature_integrability,
                             reconstruct_potential, stress_quadrature_mismatch)

# distinct integer derivatives with P = ψ = 0, so every printed summand is an
# integer that identifies its monomial
P_INT = {"": 0.0, "1": 2.0, "2": 3.0, "11": 5.0, "12": 7.0, "22": 11.0}
Q_INT = {"": 0.0, "1": 13.0, "2": 17.0, "11": 19.0, "12": 23.0, "22": 29.0}

TERMS = {
    "gowdy_U_terms": [171366, -149396, 37349, 8112, -7072, 1690, 884, 2964, 4420, -2584, 24],
    "gowdy_V_terms": [30758, -6591, -15548, 5746, -28730, 624, 16796, -544, 728, -156, -780,
                      -368, 136, 456],
    "gowdy_W_terms": [39304, -19652, -270504, 748, -348, 45084, 310284, -1428, 828, 24565, -52598,
                      -16473, 30498, 765, -25857, 31603, -118638, -14703, -513],
    "er_u_terms": [2197, 416, -76, 130],
    "er_v_terms": [8398, -14365, 2176, -2496, 15379, -7774, 912, -1560, 1456, -736],
}

# exponential weight of each summand: factor picked up when P (or ψ) = ln 2
WEIGHTS = {
    "gowdy_U_terms": [8, 16, 8, 2, 2, 2, 2, 2, 2, 2, 1],
    "gowdy_V_terms": [4, 4, 4, 4, 4, 1, 4, 1, 1, 1, 1, 1, 1, 1],
    "gowdy_W_terms": [1, 1, 1, .25, .25, 1, 1, .25, .25, 1, 1, 1, 1, .25, 1, 1, 1, 1, .25],
    "er_u_terms": [1 / 16, 1, 1, 1],
    "er_v_terms": [1 / 16, 1 / 16, 1, 1, 1, 1 / 16, 1, 1, 1, 1],
}


@pytest.mark.parametrize("name", sorted(TERMS))
def test_printed_terms_spot_values(name):
    fn = getattr(sol, name)
    assert [float(v) for v in fn(P_INT, Q_INT)] == TERMS[name]
    shifted = dict(P_INT, **{"": math.log(2.0)})
    scaled = [float(v) for v in fn(shifted, Q_INT)]
    assert scaled == pytest.approx([w * t for w, t in zip(WEIGHTS[name], TERMS[name])], rel=1e-13)


def test_avtd_paper_metric_closed_forms():
    fam = make_family("gowdy_paper_metric")
    t = math.log(2.0)
    assert float(closed_form_ricci(fam, (t, 0.5))) == pytest.approx(-4.0)
    _, conn, curv = paper_frame_pipeline(fam, (t, 0.5))
    assert float(curv.R) == pytest.approx(-4.0)


def test_er_printed_ricci_value():
    assert float(closed_form_ricci("einstein_rosen", (0.0, 4.0))) == -1.0


def test_er_printed_ricci_disagrees_with_pipeline():
    # the printed R = -4/ρ is not reproduced by the Cartan pipeline, even on
    # an exact solution of the field equations
    psi = "-0.25*log(8*1.5**2*rho**(2*1.5-2)/(8*(1+rho**(2*1.5))**2))"
    fam = make_family("einstein_rosen", {"psi": psi, "Omega": "2*t"})
    p = (np.array([0.1, -0.3]), np.array([1.0, 2.0]))
    assert np.max(np.abs(fam.main_eq_residuals(p))) < 1e-12
    _, _, curv = paper_frame_pipeline(fam, p)
    assert np.min(np.abs(curv.R * p[1] + 4.0)) > 0.1
    assert np.allclose(curv.R, oracles.christoffel_ricci(fam.metric(), *p), rtol=1e-6)


def test_gowdy_printed_forms_disagree_and_corrected_agree():
    fam = make_family("gowdy", {"P": "0.3*t*t + 0.2*cos(theta)", "Q": "theta + 0.4*sin(t)"})
    p = (np.array([0.2, -0.4]), np.array([1.0, 2.5]))
    _, conn, curv = paper_frame_pipeline(fam, p)
    omega = np.array([c.v for c in conn.frame])
    assert np.max(np.abs(closed_form_connection(fam, p) - omega)) > 1e-3
    assert np.max(np.abs(closed_form_ricci(fam, p) - curv.R)) > 1e-3
    assert np.allclose(oracles.gowdy_connection_corrected(fam, p), omega, rtol=1e-10)
    assert np.allclose(oracles.gowdy_ricci_corrected(fam, p), curv.R, rtol=1e-10)


def test_gowdy_printed_connection_on_avtd_data():
    fam = make_family("gowdy_avtd")
    p = (np.linspace(-1, 1, 5), np.linspace(0, 6, 5))
    _, conn, _ = paper_frame_pipeline(fam, p)
    omega = np.array([c.v for c in conn.frame])
    assert np.allclose(closed_form_connection(fam, p), omega, rtol=1e-10, atol=1e-14)


def test_er_corrected_connection_agrees():
    fam = make_family("einstein_rosen")
    p = (np.array([0.2, -0.5]), np.array([1.5, 2.5]))
    _, conn, _ = paper_frame_pipeline(fam, p)
    omega = np.array([c.v for c in conn.frame])
    assert np.allclose(oracles.er_connection_corrected(fam, p), omega, rtol=1e-10)


def test_schwarzschild_closed_forms_vanish():
    fam = make_family("schwarzschild")
    p = (np.array([3.0, 5.0]), np.array([0.4, 2.0]))
    _, conn, curv = paper_frame_pipeline(fam, p)
    assert np.max(np.abs([c.v for c in conn.frame])) < 1e-12
    assert np.max(np.abs(curv.R)) < 1e-12
    assert np.all(closed_form_ricci(fam, p) == 0.0)


@pytest.mark.parametrize("name, p", [
    ("gowdy", (0.3, 1.0)), ("gowdy_avtd", (0.5, 2.0)), ("einstein_rosen", (0.1, 1.7)),
    ("schwarzschild", (4.0, 0.5)), ("gowdy_paper_metric", (0.2, 0.3)),
])
def test_paper_coframe_reproduces_metric(name, p):
    fam = make_family(name)
    cf = paper_coframe(fam, p)
    assert cf.convention == "paper_frame"
    assert cf.reproduction_error(fam.metric().at(p)) < 1e-12


def test_quadrature_examples():
    assert quadrature_gradient("weyl_static", (1.0, 0.0)) == pytest.approx([1.0, 0.0])
    t = np.array([0.0, 1.0])
    g = quadrature_gradient("gowdy_avtd", (t, np.zeros(2)))
    assert np.allclose(g[0], 1 + np.exp(-4 * t)) and np.all(g[1] == 0.0)


@pytest.mark.parametrize("name, p", [
    ("axisym", (1.2, 0.3)), ("weyl_static", (0.8, 0.5)), ("gowdy", (0.3, 1.0)),
    ("gowdy_avtd", (0.7, 2.0)), ("einstein_rosen", (0.1, 1.7)),
])
def test_stress_quadrature_relation(name, p):
    assert np.max(np.abs(stress_quadrature_mismatch(name, p))) < 1e-12


def test_potential_curzon():
    res = reconstruct_potential("weyl_static", [(2.0, 0.0), (1.0, 0.0)])
    assert abs(res.value + 0.375) < 1e-9


def test_potential_avtd():
    res = reconstruct_potential("gowdy_avtd", [(0.0, 0.3), (1.0, 0.3)])
    assert res.value == pytest.approx(1 + (1 - math.exp(-4)) / 4, abs=1e-9)
    assert res.value == pytest.approx(1.24542, abs=1e-5)


def test_potential_edge_cases():
    assert reconstruct_potential("weyl_static", [(1.0, 0.5), (1.0, 0.5)]).value == 0.0
    with pytest.raises(SolutionsError):
        reconstruct_potential("weyl_static", [(1.0, 0.5)])
    with pytest.raises(SolutionsError):
        reconstruct_potential("weyl_static", [(1.0, 0.5), (2.0, 0.5)], n_steps=3)


def test_potential_requires_integrability():
    assert np.max(np.abs(quadrature_integrability("axisym", (1.2, 0.3)))) > 1e-3
    with pytest.raises(IntegrabilityError) as err:
        reconstruct_potential("axisym", [(1.0, 0.0), (1.5, 0.5)])
    assert err.value.residual > 1e-8


def test_potential_path_independence():
    direct = reconstruct_potential("weyl_static", [(0.8, -0.5), (1.6, 0.7)]).value
    corner = reconstruct_potential("weyl_static", [(0.8, -0.5), (0.8, 0.7), (1.6, 0.7)]).value
    assert abs(direct - corner) < 1e-8


def test_config_validation():
    with pytest.raises(SolutionsError):
        make_family("gowdy", {"R": "t"})
    with pytest.raises(SolutionsError):
        make_family("kerr")
    with pytest.raises(SolutionsError):
        make_family("axisym", {"Omega": "2.0"})
    with pytest.raises(SolutionsError):
        make_family("einstein_rosen", {"Omega": "3"})
    with pytest.raises(SolutionsError):
        make_family("schwarzschild", {"X": "r*phi*phi"})
    assert sol.config_keys("einstein_rosen") == ("psi", "Omega", "amplitude")


def test_onshell_family():
    p0 = (0.3, 1.4)
    coeffs = [[0.1, 0.2, -0.1, 0, 0.05, 0.02, 0, 0.01, 0, 0.03],
              [1.0, 0.3, 0.5, 0, -0.1, 0.04, 0, 0.0, 0.02, 0]]
    fam = onshell_family("einstein_rosen", p0, coeffs)
    assert np.max(np.abs(field_eq_residual(fam.system(), p0))) < 1e-10
    # off the expansion point the cubic is only approximately on shell
    assert np.max(np.abs(field_eq_residual(fam.system(), (0.6, 1.7)))) > 1e-8


@given(st.floats(0.5, 2.0), st.floats(-1.0, 1.0), st.floats(0.5, 2.0), st.floats(-1.0, 1.0))
def test_curzon_potential_matches_closed_form(r0, z0, r1, z1):
    fam = make_family("weyl_static")
    res = reconstruct_potential(fam, [(r0, z0), (r1, z1)])
    exact = fam.closed_form_potential((r1, z1)) - fam.closed_form_potential((r0, z0))
    assert abs(res.value - exact) < 1e-7


@given(st.floats(-2.0, 2.0), st.floats(0.0, 2 * math.pi))
def test_avtd_induced_metric_property(t, th):
    h = induced_metric(sol.build_system("gowdy_avtd"), (t, th))
    assert float(h[0].v) == pytest.approx(0.5 * math.exp(-t), rel=1e-12)
    assert float(h[2].v) == pytest.approx(0.5 * math.exp(-t - 2 * t), rel=1e-12)
    assert abs(float(h[1].v)) < 1e-15


def test_curzon_main_equation_on_grid():
    r, z = np.meshgrid(np.linspace(0.3, 2.0, 12), np.linspace(-1.0, 1.0, 12))
    assert np.max(np.abs(make_family("weyl_static").main_eq_residuals((r, z)))) < 1e-10


def test_constant_fields_have_zero_quadrature():
    fam = make_family("gowdy", {"P": "0.7", "Q": "1.3"})
    assert np.all(quadrature_gradient(fam, (0.2, 0.5)) == 0.0)


def test_er_ricci_times_rho_is_field_dependent():
    # R*rho is reported, not asserted to be -4
    fam = make_family("einstein_rosen")
    rho = np.linspace(0.6, 3.0, 9)
    _, _, curv = paper_frame_pipeline(fam, (np.full(9, 0.2), rho))
    assert np.ptp(curv.R * rho) > 1.0
