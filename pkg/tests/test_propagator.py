"""Linear propagator backends: kernel algebra, unitarity, duality, decay."""

import numpy as np
import pytest

from rotor_gpe import (
    AliasRisk,
    DEFAULT_OVERSAMPLE,
    Field,
    GridSpec,
    GridTooLarge,
    InvalidExponent,
    ORACLE_SIZE_CAP,
    PhysicsParams,
    WindowViolation,
    calibrated_rotation_sign,
    compose_propagators,
    default_scan_pairs,
    dispersive_scan,
    exact_linear_evolution,
    ground_state,
    kernel_matrices,
    lp_norm,
    pairing,
    propagate,
    propagate_dual,
    propagate_fast,
    propagate_inverse,
    propagate_oracle,
    random_smooth_field,
    strichartz_exponent,
    strichartz_ratio,
    vortex_state,
)
from rotor_gpe.propagator import default_substeps

OGRID = GridSpec(24, 6.0)  # quadrature-backend reference geometry
PARAMS = PhysicsParams(omega=1.0, beta=0.0)
WINDOW = PARAMS.window


def rel_l2(f: Field, g: Field) -> float:
    return float(np.linalg.norm(f.data - g.data) / np.linalg.norm(g.data))


def smooth(rng, grid=OGRID) -> Field:
    return random_smooth_field(grid, rng, width=grid.extent / 6.0)


# ---------------------------------------------------------------------------
# kernel matrix algebra
# ---------------------------------------------------------------------------


def test_kernel_matrix_identities_hold_across_the_window():
    rng = np.random.default_rng(101)
    w = 1.7
    params = PhysicsParams(omega=w, beta=0.0)
    for _ in range(60):
        t = float(rng.uniform(0.05, 1.0)) * params.window
        s = float(rng.uniform(0.05, 1.0)) * params.window
        km = kernel_matrices(t, params, s=s)
        theta = w * t
        # Chirp scale of the left factorization.
        assert km.tilde_scale == pytest.approx(np.tan(theta / 2.0), abs=1e-14)
        # The reflected dressing is its exact negative.
        assert km.breve_scale == pytest.approx(-km.tilde_scale, abs=1e-14)
        # Transverse phase-mixing block: A_perp^T A_perp = csc^2(theta) I.
        a_perp = km.a_matrix[:2, :2]
        gram = a_perp.T @ a_perp
        csc2 = 1.0 / np.sin(theta) ** 2
        assert np.max(np.abs(gram - csc2 * np.eye(2))) < 1e-12 * csc2
        assert km.a_matrix[2, 2] == pytest.approx(1.0 / np.sin(theta), rel=1e-13)
        assert np.max(np.abs(km.a_matrix[:2, 2])) == 0.0
        assert np.max(np.abs(km.a_matrix[2, :2])) == 0.0
        # Two-time block: B_perp B_perp^T = (sin(w s)/sin(w t))^2 I.
        ratio = np.sin(w * s) / np.sin(w * t)
        b_perp = km.b_matrix[:2, :2]
        assert np.max(np.abs(b_perp @ b_perp.T - ratio**2 * np.eye(2))) < 1e-12 * max(
            ratio**2, 1.0
        )
        assert km.b_matrix[2, 2] == pytest.approx(ratio, rel=1e-13)
        # Kernel amplitude.
        expected_amp = (w / (2.0 * np.pi * np.sin(theta))) ** 1.5
        assert abs(km.prefactor) == pytest.approx(expected_amp, rel=1e-12)


def test_kernel_matrices_reject_out_of_window_times():
    with pytest.raises(WindowViolation):
        kernel_matrices(0.0, PARAMS)
    with pytest.raises(WindowViolation):
        kernel_matrices(WINDOW * 1.01, PARAMS)
    with pytest.raises(WindowViolation):
        kernel_matrices(-0.1, PARAMS)


# ---------------------------------------------------------------------------
# guards
# ---------------------------------------------------------------------------


def test_oracle_rejects_large_grids_and_bad_times():
    big = GridSpec(ORACLE_SIZE_CAP + 2, 6.0)
    f = Field(big, np.zeros(big.shape))
    with pytest.raises(GridTooLarge):
        propagate_oracle(f, 0.6, PARAMS)
    g = ground_state(OGRID, PARAMS)
    with pytest.raises(WindowViolation):
        propagate_oracle(g, 0.0, PARAMS)
    with pytest.raises(WindowViolation):
        propagate_oracle(g, WINDOW + 1e-3, PARAMS)


def test_alias_guard_warns_on_undersampled_quadrature():
    # Early times steepen the kernel chirp; a coarse wide box cannot sample
    # it: omega*cot(omega t)*extent*h_q crosses pi and the oracle warns.
    coarse = GridSpec(16, 8.0)
    f = Field(coarse, np.exp(-coarse.r2) + 0j)
    with pytest.warns(AliasRisk):
        propagate_oracle(f, 0.3, PARAMS)
    # The reference geometry at mid-window times is clean: no warning.
    g = ground_state(OGRID, PARAMS)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("error", AliasRisk)
        propagate_oracle(g, 0.6, PARAMS)


# ---------------------------------------------------------------------------
# unitarity
# ---------------------------------------------------------------------------


def test_oracle_preserves_mass_on_smooth_fields():
    rng = np.random.default_rng(5)
    for t in (0.55, WINDOW):
        for _ in range(2):
            f = smooth(rng)
            out = propagate_oracle(f, t, PARAMS)
            assert abs(lp_norm(out, 2) - 1.0) < 1e-6


def test_fast_backend_is_unitary_to_rounding():
    rng = np.random.default_rng(6)
    grid = GridSpec(32, 6.0)
    for t in (0.2, 0.5, WINDOW):
        f = random_smooth_field(grid, rng, width=grid.extent / 6.0)
        out = propagate_fast(f, t, PARAMS)
        assert abs(lp_norm(out, 2) - 1.0) < 1e-10


# ---------------------------------------------------------------------------
# closed-form referees
# ---------------------------------------------------------------------------


def test_oracle_reproduces_eigenstate_phases():
    t = 0.6
    for kind, state in (("ground", ground_state(OGRID, PARAMS)),
                        ("vortex_plus", vortex_state(OGRID, PARAMS, +1))):
        got = propagate_oracle(state, t, PARAMS)
        want = exact_linear_evolution(OGRID, PARAMS, kind, t)
        assert rel_l2(got, want) < 1e-5


def test_oracle_follows_the_coherent_orbit():
    center, kick = (1.0, 0.0, 0.0), (0.0, 0.3, 0.0)
    t = 0.6
    u0 = exact_linear_evolution(OGRID, PARAMS, "coherent", 0.0, center, kick)
    got = propagate_oracle(u0, t, PARAMS)
    want = exact_linear_evolution(OGRID, PARAMS, "coherent", t, center, kick)
    assert rel_l2(got, want) < 1e-5


def test_fast_matches_oracle_on_eigenstates():
    # Cross-backend agreement: quadrature kernel vs split-step spectral.
    t = 0.6
    for state in (ground_state(OGRID, PARAMS), vortex_state(OGRID, PARAMS, +1)):
        fast = propagate_fast(state, t, PARAMS, 512)
        oracle = propagate_oracle(state, t, PARAMS)
        assert rel_l2(fast, oracle) < 1e-6


def test_propagate_dispatch_validates_backend():
    g = ground_state(OGRID, PARAMS)
    with pytest.raises(ValueError):
        propagate(g, 0.6, PARAMS, backend="magic")
    a = propagate(g, 0.6, PARAMS, backend="oracle")
    b = propagate_oracle(g, 0.6, PARAMS)
    assert np.array_equal(a.data, b.data)


# ---------------------------------------------------------------------------
# duality, inverse, semigroup
# ---------------------------------------------------------------------------


def test_oracle_dual_is_the_exact_transpose():
    rng = np.random.default_rng(9)
    t = 0.55
    for _ in range(4):
        f, g = smooth(rng), smooth(rng)
        lhs = pairing(propagate_oracle(f, t, PARAMS), g)
        rhs = pairing(f, propagate_dual(g, t, PARAMS))
        scale = lp_norm(f, 2) * lp_norm(g, 2)
        assert abs(lhs - rhs) < 1e-12 * scale


def test_fast_dual_pairs_to_a_spectral_floor():
    rng = np.random.default_rng(10)
    t = 0.5
    for _ in range(3):
        f, g = smooth(rng), smooth(rng)
        lhs = pairing(propagate_fast(f, t, PARAMS), g)
        rhs = pairing(f, propagate_dual(g, t, PARAMS, backend="fast"))
        # The swap-conjugate dual matches the forward transpose up to the
        # spectral tail of the band-limited data, not to rounding.
        assert abs(lhs - rhs) < 1e-7


def test_inverse_undoes_the_flow_on_concentrated_states():
    # Strong-norm accuracy of the transpose-built inverse is set by the
    # data's spectral tail, so the roundtrip referee uses spectrally
    # concentrated states (broadband noise has an honest ~1e-4 floor).
    t = 0.6
    g = ground_state(OGRID, PARAMS)
    out = propagate_inverse(propagate_oracle(g, t, PARAMS), t, PARAMS)
    assert rel_l2(out, g) < 1e-6
    out = propagate_inverse(
        propagate_fast(g, t, PARAMS, 64), t, PARAMS, backend="fast", substeps=64
    )
    assert rel_l2(out, g) < 1e-6


def test_semigroup_composition_matches_single_step():
    # forward(t) after inverse(s) must equal the flow at t - s.
    t, s = 0.775, 0.39
    for u in (ground_state(OGRID, PARAMS), vortex_state(OGRID, PARAMS, +1)):
        composed = compose_propagators(u, t, s, PARAMS, variant="inverse", oversample=3)
        direct = propagate_oracle(u, t - s, PARAMS, oversample=3)
        assert rel_l2(composed, direct) < 1e-6


def test_inverse_composition_approaches_identity_linearly():
    # S(t) S^{-1}(t - delta) = S(delta) -> identity at first order in delta.
    # A coherent state keeps the O(delta) term far above spectral floors.
    # (The *dual* composition does not do this: at s = t it is a squared
    # flow, not the identity -- that is what makes its decay scan nontrivial.)
    grid = GridSpec(32, 6.0)
    f = exact_linear_evolution(grid, PARAMS, "coherent", 0.0, (1.0, 0.0, 0.0), (0.0, 0.5, 0.0))
    t = 0.6
    errs = []
    for delta in (4e-3, 2e-3, 1e-3):
        out = compose_propagators(
            f, t, t - delta, PARAMS, variant="inverse", backend="fast", substeps=64
        )
        errs.append(rel_l2(out, f))
    rate1 = np.log2(errs[0] / errs[1])
    rate2 = np.log2(errs[1] / errs[2])
    assert 0.8 < rate1 < 1.2
    assert 0.8 < rate2 < 1.2


def test_dual_composition_at_equal_times_is_not_the_identity():
    # The transpose composition S(t) S^T(t) is a genuine squared flow.
    g = ground_state(OGRID, PARAMS)
    out = compose_propagators(g, 0.6, 0.6, PARAMS, variant="dual", backend="fast", substeps=64)
    assert rel_l2(out, g) > 0.5


def test_compose_rejects_unknown_variant():
    g = ground_state(OGRID, PARAMS)
    with pytest.raises(ValueError):
        compose_propagators(g, 0.6, 0.3, PARAMS, variant="adjoint")


# ---------------------------------------------------------------------------
# fast backend internals
# ---------------------------------------------------------------------------


def test_calibrated_rotation_sign_is_fixed():
    s1 = calibrated_rotation_sign()
    s2 = calibrated_rotation_sign()
    assert s1 in (-1, +1)
    assert s1 == s2


def test_default_substeps_scales_with_time():
    assert default_substeps(WINDOW, PARAMS) == 64
    assert default_substeps(WINDOW / 2.0, PARAMS) == 32
    assert default_substeps(1e-9, PARAMS) == 1
    assert default_substeps(0.3, PARAMS) <= default_substeps(0.6, PARAMS)


def test_fast_substep_refinement_converges_at_second_order():
    rng = np.random.default_rng(14)
    f = smooth(rng)
    t = 0.5
    ref = propagate_fast(f, t, PARAMS, 256)
    errs = [rel_l2(propagate_fast(f, t, PARAMS, m), ref) for m in (4, 8, 16)]
    orders = [np.log2(errs[i] / errs[i + 1]) for i in range(2)]
    for order in orders:
        assert 1.8 < order < 2.2


# ---------------------------------------------------------------------------
# dispersive decay scan
# ---------------------------------------------------------------------------


def narrow_probe(grid: GridSpec) -> Field:
    sig = 2.0 * grid.h
    data = np.exp(-grid.r2 / (2.0 * sig**2))
    f = Field(grid, data)
    return Field(grid, f.data / lp_norm(f, 2))


def test_scan_requires_enough_pairs_and_valid_times():
    probe = narrow_probe(GridSpec(32, 4.0))
    with pytest.raises(ValueError):
        dispersive_scan(probe, PARAMS, pairs=[(0.3, 0.1), (0.4, 0.1)])
    with pytest.raises(WindowViolation):
        dispersive_scan(probe, PARAMS, pairs=[(0.9, 0.1), (0.3, 0.1), (0.2, 0.1)])


def test_scan_bound_column_is_the_closed_form_constant():
    grid = GridSpec(32, 4.0)
    probe = narrow_probe(grid)
    pairs = [(0.2, 0.1), (0.3, 0.1), (0.4, 0.1)]
    scan = dispersive_scan(probe, PARAMS, pairs=pairs, substeps=8)
    for row, (t, s) in zip(scan.rows, pairs):
        want = (PARAMS.omega / (np.pi * np.sin(PARAMS.omega * (t + s)))) ** 1.5
        assert row.bound == pytest.approx(want, rel=1e-12)
        assert row.ratio > 0.0


def test_scan_measures_the_decay_rate_on_a_narrow_probe():
    # Geometry sized so the probe is in the concentrated regime across the
    # whole sweep: width 2h = 0.125 keeps the kernel-resolution correction
    # below a percent, and extent 4 holds the spread envelope sin(t+s)/width
    # well inside the box.
    grid = GridSpec(64, 4.0)
    probe = narrow_probe(grid)
    taus = np.geomspace(0.15, 0.5, 6)
    pairs = [(2.0 * tau / 3.0, tau / 3.0) for tau in taus]
    scan = dispersive_scan(probe, PARAMS, pairs=pairs, substeps=12)
    ratios = [row.ratio for row in scan.rows]
    assert all(a > b for a, b in zip(ratios, ratios[1:]))  # monotone decay
    assert -1.75 < scan.slope_sum < -1.35
    assert scan.max_bound_excess() < 1.0


def test_default_scan_pairs_cover_a_decade_in_window():
    pairs = default_scan_pairs(PARAMS)
    assert len(pairs) >= 10
    for t, s in pairs:
        assert 0.0 < s <= WINDOW
        assert 0.0 < t <= WINDOW
    sums = [t + s for t, s in pairs]
    assert max(sums) / min(sums) > 8.0


# ---------------------------------------------------------------------------
# Strichartz quotients
# ---------------------------------------------------------------------------


def test_strichartz_exponent_pairing():
    assert strichartz_exponent(4.0) == pytest.approx(8.0 / 3.0)
    assert strichartz_exponent(2.0) == np.inf
    assert strichartz_exponent(3.0) == pytest.approx(4.0)
    with pytest.raises(InvalidExponent):
        strichartz_exponent(6.0)
    with pytest.raises(InvalidExponent):
        strichartz_exponent(1.5)


def test_strichartz_ratio_is_scale_invariant_and_stable():
    rng = np.random.default_rng(15)
    grid = GridSpec(32, 6.0)
    f = random_smooth_field(grid, rng, width=grid.extent / 6.0)
    times = np.linspace(0.05, 0.7, 9)
    r1 = strichartz_ratio(f, PARAMS, times)
    assert np.isfinite(r1) and r1 > 0.0
    doubled = Field(grid, 2.0 * f.data)
    assert strichartz_ratio(doubled, PARAMS, times) == pytest.approx(r1, rel=1e-12)
    # Refining the time grid moves the quotient by quadrature error only.
    fine = strichartz_ratio(f, PARAMS, np.linspace(0.05, 0.7, 17))
    assert abs(fine - r1) / r1 < 0.05
