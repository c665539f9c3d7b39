"""Connection evaluation, representing functions, transpose, decomposition,
and the shift schedule for singular inputs."""

import math

import numpy as np
import pytest

from kubomeans.connections import (
    Connection,
    add_connections,
    decompose_connection,
    evaluate,
    evaluate_canonical,
    evaluate_report,
    is_mean,
    is_symmetric_connection,
    mean_convex_decomposition,
    parallel_sum,
    representing_function,
    scale_connection,
    symmetrize,
    transpose,
    transpose_rep_function,
    weighted_harmonic,
)
from kubomeans.errors import NotPsdError, ShapeError, SingularPencilError
from kubomeans.measures import (
    HalfLineMeasure,
    UnitMeasure,
    cantor_measure,
    dirac,
    geometric_density,
    halfline_dirac,
    halfline_geometric,
    lebesgue_density,
    pushforward_psi,
)
from kubomeans.quadrature import QuadratureSpec
from kubomeans.spd import loewner_leq, random_spd, spectral_norm


def _pair(key, dim=4, cond=100.0):
    return random_spd(dim, cond, 2 * key).entries, random_spd(dim, cond, 2 * key + 1).entries


def test_weighted_harmonic_endpoints_bitwise():
    a, b = _pair(1)
    assert np.array_equal(weighted_harmonic(a, b, 0.0).entries, a)
    assert np.array_equal(weighted_harmonic(a, b, 1.0).entries, b)


def test_weighted_harmonic_matches_inverse_form():
    a, b = _pair(2, dim=5)
    for t in (0.25, 0.5, 0.9):
        got = weighted_harmonic(a, b, t).entries
        want = np.linalg.inv((1 - t) * np.linalg.inv(a) + t * np.linalg.inv(b))
        assert np.allclose(got, want, rtol=1e-12, atol=1e-12)


def test_weighted_harmonic_scalar_resistors():
    got = weighted_harmonic(np.array([[1.0]]), np.array([[3.0]]), 0.5)
    assert got.entries[0, 0] == pytest.approx(1.5, rel=1e-15)


def test_weighted_harmonic_t_domain():
    a, b = _pair(3)
    for t in (-0.1, 1.1, math.nan):
        with pytest.raises(ValueError):
            weighted_harmonic(a, b, t)


def test_parallel_sum_is_half_harmonic():
    a, b = _pair(4, dim=3)
    left = parallel_sum(a, b).entries
    right = 0.5 * weighted_harmonic(a, b, 0.5).entries
    np.testing.assert_allclose(left, right, rtol=1e-13, atol=1e-14)


def test_parallel_sum_with_zero_block():
    b = random_spd(3, 10.0, 9).entries
    zero = np.zeros((3, 3))
    assert np.allclose(parallel_sum(zero, b).entries, 0.0, atol=1e-15)


def test_shape_mismatch_raises():
    a = random_spd(3, 10.0, 11).entries
    b = random_spd(4, 10.0, 12).entries
    with pytest.raises(ShapeError):
        weighted_harmonic(a, b, 0.5)
    with pytest.raises(ShapeError):
        evaluate(Connection(dirac(0.5)), a, b)


def test_indefinite_input_raises():
    bad = np.array([[1.0, 2.0], [2.0, 1.0]])
    ok = np.eye(2)
    with pytest.raises(NotPsdError):
        evaluate(Connection(dirac(0.5)), bad, ok)


def test_evaluate_atomic_measures_exact():
    a, b = _pair(5)
    conn = Connection(UnitMeasure(atoms=((0.0, 0.7), (1.0, 0.3))))
    got = evaluate(conn, a, b).entries
    assert np.array_equal(got, 0.7 * a + 0.3 * b)


def test_evaluate_zero_measure():
    a, b = _pair(6)
    report = evaluate_report(Connection(UnitMeasure()), a, b)
    assert np.array_equal(report.value.entries, np.zeros_like(a))
    assert report.parts == (("empty", 0, 0.0),)


def test_evaluate_norm_bound():
    a, b = _pair(7, dim=6)
    conn = Connection(UnitMeasure(ac=lebesgue_density()))
    value = evaluate(conn, a, b).entries
    bound = max(spectral_norm(a), spectral_norm(b))
    assert spectral_norm(value) <= bound * (1 + 1e-9)


def test_evaluate_geometric_density_matches_congruence():
    a, b = _pair(8, dim=4)
    conn = Connection(UnitMeasure(ac=geometric_density(0.5)))
    got = evaluate(conn, a, b).entries
    rt = np.linalg.cholesky(a)
    inner = np.linalg.solve(rt, np.linalg.solve(rt, b).T)
    w, v = np.linalg.eigh(0.5 * (inner + inner.T))
    want = rt @ ((v * np.sqrt(w)) @ v.T) @ rt.T
    assert np.allclose(got, want, rtol=1e-9, atol=1e-10)


def test_report_fields_on_pd_inputs():
    a, b = _pair(9)
    report = evaluate_report(Connection(UnitMeasure(ac=geometric_density(0.3))), a, b)
    assert not report.regularized and report.eps_used is None
    assert report.nodes_used > 0
    assert report.error_estimate < 1e-8


def test_schedule_engages_for_harmonic_type_singular_input():
    # rank-deficient input with an interior-charging measure: accepted, O(eps)
    d = 3
    proj = np.diag([1.0, 1.0, 0.0])
    a = proj @ random_spd(d, 10.0, 21).entries @ proj
    b = random_spd(d, 10.0, 22).entries
    conn = Connection(dirac(0.5))
    report = evaluate_report(conn, a, b)
    assert report.regularized and report.eps_used is not None
    want = a @ np.linalg.solve(0.5 * (a + b), b)  # A !_{1/2} B = 2 A(A+B)^-1 B
    want = 0.5 * (want + want.T)
    scale = 1.0 + spectral_norm(a) + spectral_norm(b)
    assert spectral_norm(report.value.entries - want) <= 1e-5 * scale


def test_schedule_rejects_geometric_on_singular_input():
    # sqrt(eps) drift never meets the acceptance gap: an honest failure
    proj = np.diag([1.0, 1.0, 0.0])
    a = proj @ random_spd(3, 10.0, 23).entries @ proj
    b = random_spd(3, 10.0, 24).entries
    conn = Connection(UnitMeasure(ac=geometric_density(0.5)))
    with pytest.raises(SingularPencilError):
        evaluate(conn, a, b)


def test_no_schedule_for_endpoint_measures_on_singular_input():
    proj = np.diag([1.0, 0.0])
    a = proj @ random_spd(2, 10.0, 25).entries @ proj
    b = random_spd(2, 10.0, 26).entries
    conn = Connection(UnitMeasure(atoms=((0.0, 0.5), (1.0, 0.5))))
    report = evaluate_report(conn, a, b)
    assert not report.regularized
    assert np.array_equal(report.value.entries, 0.5 * a + 0.5 * b)


def test_rep_function_values_and_edges():
    conn = Connection(
        UnitMeasure(atoms=((0.0, 0.25), (0.5, 0.25)), ac=lebesgue_density(0.5))
    )
    f = representing_function(conn)
    assert f.at_zero() == 0.25
    assert f(0.0) == 0.25
    assert f(1.0) == pytest.approx(1.0, abs=1e-10)
    xs = np.array([0.5, 1.0, 2.0, 8.0])
    vals = f(xs)
    assert vals.shape == (4,)
    assert np.all(np.diff(vals) > 0)  # nondecreasing in x
    with pytest.raises(ValueError):
        f(-1.0)
    with pytest.raises(ValueError):
        f(math.inf)


def test_rep_function_scalar_in_scalar_out():
    f = representing_function(Connection(dirac(0.5)))
    out = f(2.0)
    assert isinstance(out, float)
    assert out == pytest.approx(2.0 / 1.5, rel=1e-15)


def test_transpose_rep_duality():
    conn = Connection(UnitMeasure(ac=geometric_density(0.3)))
    f = representing_function(conn)
    for x in (0.25, 0.5, 2.0, 4.0):
        assert transpose_rep_function(conn, x) == pytest.approx(
            x * f(1.0 / x), abs=1e-10
        )


def test_transpose_involution_and_atoms():
    conn = Connection(UnitMeasure(atoms=((0.0, 0.75), (1.0, 0.25))))
    t = transpose(conn)
    assert t.measure.atoms == ((0.0, 0.25), (1.0, 0.75))
    assert transpose(t).measure == conn.measure


def test_evaluate_canonical_atoms():
    a, b = _pair(10)
    nu = HalfLineMeasure(atoms=((0.0, 0.5), (math.inf, 0.5)))
    got = evaluate_canonical(nu, a, b).entries
    assert np.array_equal(got, 0.5 * a + 0.5 * b)
    nu1 = halfline_dirac(1.0, 0.5)
    got1 = evaluate_canonical(nu1, a, b).entries
    want1 = 0.5 * parallel_sum(a, b).entries * 2.0
    np.testing.assert_allclose(got1, want1, rtol=1e-12, atol=1e-13)


def test_evaluate_canonical_matches_pushforward_route():
    a, b = _pair(11, dim=3)
    nu = halfline_geometric(0.5)
    direct = evaluate_canonical(nu, a, b).entries
    pushed = evaluate(Connection(pushforward_psi(nu)), a, b).entries
    scale = 1.0 + spectral_norm(a) + spectral_norm(b)
    assert spectral_norm(direct - pushed) <= 1e-6 * scale


def test_is_mean_and_symmetry_predicates():
    assert is_mean(Connection(dirac(0.5)))
    assert not is_mean(Connection(dirac(0.5, 0.5)))
    assert is_symmetric_connection(Connection(dirac(0.5)))
    assert not is_symmetric_connection(Connection(dirac(0.3)))


def test_symmetrize_yields_symmetric_mean():
    conn = Connection(UnitMeasure(ac=geometric_density(0.3)))
    sym = symmetrize(conn)
    assert is_symmetric_connection(sym)
    assert is_mean(sym)


def test_connection_algebra_mass():
    c1 = Connection(dirac(0.5, 0.4))
    c2 = Connection(UnitMeasure(ac=lebesgue_density(0.6)))
    both = add_connections(c1, c2)
    assert is_mean(both)
    with pytest.raises(ValueError):
        scale_connection(c1, -2.0)


def test_decompose_connection_resums():
    mu = UnitMeasure(
        atoms=((0.5, 0.3),), ac=lebesgue_density(0.5), sc=(cantor_measure().sc[0], 0.2)
    )
    conn = Connection(mu, label="mixed")
    s_ac, s_sc, s_sd, f_ac, f_sc, f_sd = decompose_connection(conn)
    assert s_ac.label == "mixed[ac]"
    f = representing_function(conn)
    for x in (0.1, 0.7, 1.0, 3.0, 10.0):
        resummed = f_ac(x) + f_sc(x) + f_sd(x)
        assert resummed == pytest.approx(f(x), abs=1e-9)


def test_mean_convex_decomposition_zero_parts():
    k_ac, k_sc, k_sd, parts = mean_convex_decomposition(
        Connection(UnitMeasure(ac=geometric_density(0.5)))
    )
    assert (k_ac, k_sc, k_sd) == (1.0, 0.0, 0.0)
    assert parts[1].measure.is_zero() and parts[2].measure.is_zero()
    assert "zero" in parts[1].label


def test_mean_convex_decomposition_rejects_non_mean():
    with pytest.raises(ValueError):
        mean_convex_decomposition(Connection(dirac(0.5, 2.0)))


def test_connection_is_frozen():
    conn = Connection(dirac(0.5), label="w")
    with pytest.raises(AttributeError):
        conn.label = "x"
