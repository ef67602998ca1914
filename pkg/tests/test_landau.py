import functools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from benthic_patterns.continuation import newton_correct
from benthic_patterns.errors import DomainMismatchError, NoAmplitudeSolution
from benthic_patterns.homogeneous import dispersion_matrix, find_critical_points, state_by_index
from benthic_patterns.kinetics import ParameterSet, bilinear_B
from benthic_patterns.landau import (
    AmplitudeTriple,
    HexLattice,
    amplitude_jacobian,
    amplitude_rhs,
    amplitude_stability,
    coefficient_sweep,
    critical_eigenpair,
    hexagon_amplitudes,
    landau_coefficients,
    mixed_mode_amplitudes,
    quadratic_corrections,
    reconstruct_field,
    stripe_amplitudes,
    subcriticality_index,
    translation_modes,
)
from benthic_patterns.pde import Domain, cosine_coefficient, residual

P = ParameterSet(gamma=0.25)


@functools.lru_cache(maxsize=None)
def critical():
    return max(find_critical_points(P))


@pytest.fixture(scope="module")
def crit():
    return critical()


@pytest.fixture(scope="module")
def lc(crit):
    sc, kc = crit
    return landau_coefficients(P, kc, sc)


def test_lattice_vectors_sum_to_zero():
    kv = HexLattice(0.3).vectors
    assert np.allclose(kv.sum(axis=0), 0)
    assert np.allclose(np.linalg.norm(kv, axis=1), 0.3)


def test_eigenpair_relations(crit):
    sc, kc = crit
    q = P.replace(sigma=sc - 0.01)
    s = state_by_index(q, 1)
    mu, Phi, PhiS = critical_eigenpair(s, q, kc)
    L = dispersion_matrix(s, q, kc)
    assert np.allclose(L @ Phi, mu * Phi)
    assert np.allclose(L.conj().T @ PhiS, np.conj(mu) * PhiS)
    assert np.sum(Phi * np.conj(PhiS)) == pytest.approx(1.0)
    assert np.linalg.norm(Phi) == pytest.approx(1.0)
    assert Phi[0].real > 0 and abs(Phi[0].imag) < 1e-14
    assert mu.real > 0


def test_quadratic_corrections_solve_their_systems(crit, lc):
    sc, kc = crit
    q = P.replace(sigma=sc)
    s = state_by_index(q, 1)
    phi_ii, phi_0, phi_ij = quadratic_corrections(s, q, kc, lc.Phi)
    d = lc.d  # unused, only checks presence
    assert len(d) == 4
    from benthic_patterns.kinetics import derivatives

    dt = derivatives((s.u, s.v), q)
    Bpp = bilinear_B(lc.Phi, lc.Phi, dt)
    Bpc = bilinear_B(lc.Phi, np.conj(lc.Phi), dt)
    assert np.allclose(dispersion_matrix(s, q, 2 * kc) @ phi_ii, -Bpp)
    assert np.allclose(dispersion_matrix(s, q, 0.0) @ phi_0, -2 * Bpc)
    assert np.allclose(dispersion_matrix(s, q, math.sqrt(3) * kc) @ phi_ij, -2 * Bpc)


def test_c1_vanishes_at_onset_and_tracks_growth_rate(crit, lc):
    sc, kc = crit
    assert abs(lc.c1) < 1e-12
    for ds in (-0.002, 0.002):
        l2 = landau_coefficients(P, kc, sc, sc + ds)
        q = P.replace(sigma=sc + ds)
        ev = np.linalg.eigvals(dispersion_matrix(state_by_index(q, 1), q, kc))
        assert l2.c1.real == pytest.approx(ev.real.max(), rel=1e-12)
        assert np.sign(l2.c1.real) == -np.sign(ds)
        # c2..c4 are frozen at the expansion point in the classical mode
        assert l2.real[1:] == pytest.approx(lc.real[1:])


def test_classical_and_uniform_coincide_at_onset(crit):
    sc, kc = crit
    a = landau_coefficients(P, kc, sc, mode="classical")
    b = landau_coefficients(P, kc, sc, mode="uniform")
    assert np.allclose(a.real, b.real, rtol=1e-12, atol=1e-15)
    c = landau_coefficients(P, kc, sc, sc - 0.003, mode="uniform")
    assert c.real[2] != pytest.approx(a.real[2], rel=1e-9)


def test_d4_variants_agree_for_real_phi(crit):
    sc, kc = crit
    a = landau_coefficients(P, kc, sc, d4="printed")
    b = landau_coefficients(P, kc, sc, d4="conjugate")
    assert np.all(np.abs(a.Phi.imag) == 0)
    assert a.c4 == pytest.approx(b.c4, rel=1e-14)


def test_bad_options(crit):
    sc, kc = crit
    with pytest.raises(ValueError):
        landau_coefficients(P, kc, sc, mode="other")
    with pytest.raises(ValueError):
        landau_coefficients(P, kc, sc, d4="other")


def test_coefficients_are_real_at_turing_point(lc):
    for c in (lc.c2, lc.c3, lc.c4):
        assert abs(c.imag) < 1e-12 * max(1.0, abs(c))


def test_c3_against_pde_stripes_near_onset(crit, lc):
    """Oracle: stripes of the discretized PDE very close to onset.

    A = cos-coefficient / (2 Phi_u) gives c3_eff = -c1 / A^2, which tends to
    c3 as A -> 0; a linear fit in A^2 removes the quintic correction.
    """
    sc, kc = crit
    d = Domain.for_wavenumber(kc, 2, 128)
    a2s, c3s = [], []
    for dl in (4e-5, 8e-5, 1.6e-4):
        s = sc - dl
        l2 = landau_coefficients(P, kc, sc, s)
        a = stripe_amplitudes(l2)[0]
        f, _ = newton_correct(reconstruct_field(AmplitudeTriple(a, 0, 0, "stripe"), l2, d, sigma=s), s, P,
                              tol=1e-12, max_iter=60)
        amp = cosine_coefficient(f, (kc,), "u") / (2 * lc.Phi[0].real)
        a2s.append(amp * amp)
        c3s.append(-l2.c1.real / (amp * amp))
    c3_fit = np.polyfit(a2s, c3s, 1)[1]
    assert c3_fit == pytest.approx(lc.c3.real, rel=0.03)


def test_reconstructed_field_is_near_steady(crit):
    # the ansatz residual shrinks like A^3 along the stripe family
    sc, kc = crit
    d = Domain.for_wavenumber(kc, 2, 64)
    res = []
    for dl in (1e-4, 4e-4):
        s = sc - dl
        l2 = landau_coefficients(P, kc, sc, s)
        a = stripe_amplitudes(l2)[0]
        w = reconstruct_field(AmplitudeTriple(a, 0, 0, "stripe"), l2, d, sigma=s)
        r = residual(w, P)
        res.append((a, np.abs(np.concatenate([r.u, r.v])).max()))
    (a1, r1), (a2, r2) = res
    assert math.log(r2 / r1) / math.log(a2 / a1) > 2.5


amps = st.floats(-0.3, 0.3)


@settings(max_examples=50)
@given(amps, amps, amps, amps, amps, amps)
def test_amplitude_jacobian_against_finite_differences(x1, y1, x2, y2, x3, y3):
    sc, kc = critical()
    lc = landau_coefficients(P, kc, sc, sc - 0.001)
    A = np.array([x1 + 1j * y1, x2 + 1j * y2, x3 + 1j * y3])

    def F(z):
        a = z[0::2] + 1j * z[1::2]
        f = amplitude_rhs(a, lc)
        return np.column_stack([f.real, f.imag]).ravel()

    z = np.column_stack([A.real, A.imag]).ravel()
    h = 1e-6
    Jfd = np.column_stack([(F(z + h * e) - F(z - h * e)) / (2 * h) for e in np.eye(6)])
    assert np.allclose(amplitude_jacobian(A, lc), Jfd, atol=1e-8)


def test_steady_amplitudes_solve_the_system(crit):
    sc, kc = crit
    for ds in (-0.002, 0.001):
        l2 = landau_coefficients(P, kc, sc, sc + ds)
        if ds < 0:
            for a in stripe_amplitudes(l2):
                assert np.abs(amplitude_rhs([a, 0, 0], l2)).max() < 1e-14
        for a in hexagon_amplitudes(l2):
            assert np.abs(amplitude_rhs([a, a, a], l2)).max() < 1e-14
        for t in mixed_mode_amplitudes(l2):
            assert np.abs(amplitude_rhs(t.as_array(), l2)).max() < 1e-12


def test_mixed_modes_include_stripes_hexagons_beans(crit):
    sc, kc = crit
    l2 = landau_coefficients(P, kc, sc, sc - 0.01)
    sols = mixed_mode_amplitudes(l2)
    pats = {t.pattern for t in sols}
    assert {"homogeneous", "stripe", "hexagon_plus", "hexagon_minus"} <= pats
    beans = [t for t in sols if t.kind == "bean"]
    assert beans
    for t in beans:
        assert abs(t.A1) > abs(t.A2) and t.A2 == t.A3 and t.A2.real > 0
        # beans are amplitude-unstable at this gamma
        assert not amplitude_stability(t, l2)[1]


def test_no_stripes_above_onset(crit):
    sc, kc = crit
    with pytest.raises(NoAmplitudeSolution):
        stripe_amplitudes(landau_coefficients(P, kc, sc, sc + 0.001))


def test_translation_modes_are_neutral(crit):
    sc, kc = crit
    l2 = landau_coefficients(P, kc, sc, sc - 0.002)
    a = hexagon_amplitudes(l2)[0]
    J = amplitude_jacobian([a, a, a], l2)
    G = translation_modes([a, a, a])
    assert G.shape == (6, 2)
    assert np.allclose(J @ G, 0, atol=1e-12)
    s = stripe_amplitudes(l2)[0]
    assert translation_modes([s, 0, 0]).shape == (6, 1)
    assert translation_modes([0, 0, 0]).shape == (6, 0)


def test_stripe_stability_flag_ignores_translation(crit):
    sc, kc = crit
    l2 = landau_coefficients(P, kc, sc, sc - 0.0001)
    s = stripe_amplitudes(l2)[0]
    ev, _ = amplitude_stability(AmplitudeTriple(s, 0, 0, "stripe"), l2)
    assert np.min(np.abs(ev)) < 1e-12


def test_subcriticality_index(lc):
    c1, c2, c3, c4 = lc.real
    assert subcriticality_index(lc) == pytest.approx(c2 * c2 / (4 * (c3 + 2 * c4) ** 2))


def test_reconstruct_rejects_incompatible_domain(crit, lc):
    sc, kc = crit
    d = Domain(((0.0, 10.0), (0.0, 10.0)), (11, 11))
    with pytest.raises(DomainMismatchError):
        reconstruct_field(AmplitudeTriple(0.1, 0.1, 0.1, "hexagon_plus"), lc, d)
    d1 = Domain.for_wavenumber(kc, 2, 16)
    with pytest.raises(DomainMismatchError):
        reconstruct_field(AmplitudeTriple(0.1, 0.1, 0.1, "hexagon_plus"), lc, d1)


def test_reconstruct_zero_amplitude_is_homogeneous(crit, lc):
    sc, kc = crit
    d = Domain.for_wavenumber(kc, 2, 16, hexagonal=True)
    w = reconstruct_field(AmplitudeTriple(0, 0, 0, "homogeneous"), lc, d)
    s = state_by_index(P.replace(sigma=sc), 1)
    assert np.allclose(w.u, s.u) and np.allclose(w.v, s.v)


def test_sweep_marks_missing_points():
    rows = coefficient_sweep(P, [0.25, 0.95], n_scan=200)
    assert rows[0]["ok"]
    assert rows[0]["sigma_c"] == pytest.approx(0.1253, abs=1e-3)
    bad = [r for r in rows if not r["ok"]]
    for r in bad:
        assert math.isnan(r["c3"])
