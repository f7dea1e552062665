import cmath
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from qbailey import DomainError, QModulus, SpectralPoint, TruncationPolicy
from qbailey.identities import (
    BalancedSextet,
    StarTriangleConfig,
    _guarded,
    _qbeta_degenerate,
    admissible,
    has_cancelling_matching,
    qbeta_lhs,
    qbeta_lhs_oracle,
    qbeta_rhs,
    sample_config,
    star_triangle_rhs,
    substitution_map,
    verify_qbeta,
    verify_sample,
    verify_star_triangle,
)
from qbailey.operators import DPair, d_function, m_kernel, m_prefactor

POLICY = TruncationPolicy()
Q03 = QModulus.of(0.3)


def sp(a, n=0):
    return SpectralPoint(a, n)


def sextet_with(ns, q=0.3, phases=(0.4, -1.3, 2.2, 0.9, -2.6)):
    """Equal moduli q^(1/6), so a_6 = q / prod a_j stays inside the unit disk."""
    qm = QModulus.of(q)
    r = q ** (1 / 6)
    pts = [sp(r * cmath.exp(1j * p), n) for p, n in zip(phases, ns[:5])]
    sx = BalancedSextet.from_five(pts, qm)
    assert sx.indices == list(ns)
    return sx, qm


class TestBalancedSextet:
    def test_rejects_unbalanced_indices(self):
        with pytest.raises(DomainError):
            BalancedSextet(tuple(sp(0.3 ** (1 / 6)) for _ in range(5)) + (sp(0.3 ** (1 / 6), 1),), 0.3)

    def test_rejects_wrong_product(self):
        with pytest.raises(DomainError):
            BalancedSextet(tuple(sp(0.5) for _ in range(6)), 0.3)

    def test_rejects_wrong_size(self):
        with pytest.raises(DomainError):
            BalancedSextet((sp(0.3),), 0.3)


class TestSubstitutionMap:
    def test_trivial_point(self):
        one = sp(1.0)
        sx = substitution_map(StarTriangleConfig(one, one, one, one, one), Q03)
        expected = [1, 1, Q03.sqrt_q, Q03.sqrt_q, 1, 1]
        assert np.allclose(sx.fugacities, expected, rtol=0, atol=1e-16)
        assert sx.indices == [0] * 6

    def test_hand_composed(self):
        s, t, y, w, x = (0.6 * cmath.exp(0.2j), 0.7 * cmath.exp(-0.9j), 0.98 * cmath.exp(1.7j),
                         1.02 * cmath.exp(-0.3j), 0.99 * cmath.exp(2.5j))
        ns, nt, l, k, j = 1, -1, 0, 1, -1
        cfg = StarTriangleConfig(sp(s, ns), sp(t, nt), sp(y, l), sp(w, k), sp(x, j))
        sx = substitution_map(cfg, Q03)
        r = 0.3 ** 0.5
        a = [s * w, s / w, r * y / (s * t), r / (s * t * y), t * x, t / x]
        n = [k + ns, ns - k, l - ns - nt, -l - ns - nt, j + nt, nt - j]
        assert np.allclose(sx.fugacities, a, rtol=1e-15, atol=0)
        assert sx.indices == n


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_substitution_balances(seed):
    rng = np.random.default_rng(seed)
    qm = QModulus.of(rng.uniform(0.05, 0.9) * cmath.exp(1j * rng.uniform(-3, 3)))

    def pt():
        return sp(rng.uniform(0.2, 2.0) * cmath.exp(1j * rng.uniform(0, 6.3)), int(rng.integers(-5, 6)))

    cfg = StarTriangleConfig(pt(), pt(), pt(), pt(), pt())
    sx = substitution_map(cfg, qm)
    assert sum(sx.indices) == 0
    assert abs(np.prod(sx.fugacities) - qm.q) < 1e-12


class TestQbetaRhs:
    def test_real_for_real_inputs(self):
        qm = QModulus.of(0.3)
        a = [0.9, 0.8, 0.85, 0.7, 0.75]
        sx = BalancedSextet.from_five([sp(v) for v in a], qm)
        assert abs(qbeta_rhs(sx, qm, POLICY).imag) < 1e-12

    def test_conjugation(self):
        sx, qm = sextet_with([1, -1, 0, 2, -1, -1])
        conj = BalancedSextet(tuple(sp(p.a.conjugate(), p.n) for p in sx.points), qm.q)
        lhs = qbeta_rhs(conj, qm, POLICY)
        rhs = qbeta_rhs(sx, qm, POLICY).conjugate()
        assert abs(lhs - rhs) <= 1e-12 * abs(rhs)

    def test_oracle(self):
        sx, qm = sextet_with([2, -1, -1, 1, 0, -1])
        ref = oracles.qbeta_rhs(sx.fugacities, sx.indices, 0.3)
        assert oracles.close(qbeta_rhs(sx, qm, POLICY), ref, 1e-12)

    def test_permutation_symmetry(self):
        sx, qm = sextet_with([2, -1, -1, 1, 0, -1])
        base = qbeta_rhs(sx, qm, POLICY)
        for perm in itertools.islice(itertools.permutations(range(6)), 0, 720, 37):
            pts = tuple(sx.points[i] for i in perm)
            val = qbeta_rhs(BalancedSextet(pts, qm.q), qm, POLICY)
            assert abs(val - base) <= 1e-12 * abs(base)


@pytest.mark.parametrize("ns", [
    [0, 0, 0, 0, 0, 0],
    [1, -1, 1, -1, 0, 0],
    [2, -1, -1, 1, 0, -1],
], ids=["zero", "pairwise", "general"])
def test_qbeta_examples(ns):
    sx, qm = sextet_with(ns)
    assert admissible(sx.pairs(), qm, POLICY)
    assert has_cancelling_matching(ns) == (ns != [2, -1, -1, 1, 0, -1])
    rep = verify_qbeta(sx, qm, POLICY)
    assert rep.status == "pass", rep.to_dict()
    assert rep.rel_err < 1e-6
    assert rep.settings["nodes_used"] > 0 and rep.settings["window_used"] > 0


def test_qbeta_lhs_matches_folded_oracle():
    sx, qm = sextet_with([2, -1, -1, 1, 0, -1])
    res = qbeta_lhs(sx, qm, POLICY)
    ref = qbeta_lhs_oracle(sx, qm, POLICY, nodes=4 * res.nodes, window=res.window)
    assert abs(res.value - ref) <= 1e-8 * abs(ref)


def test_qbeta_rejects_wrong_side_configuration():
    # |a_1| > 1 puts an outer pole family inside the unit circle
    qm = Q03
    pts = [sp(1.3), sp(0.8), sp(0.8j), sp(0.7), sp(0.9)]
    sx = BalancedSextet.from_five(pts, qm)
    rep = verify_qbeta(sx, qm, POLICY)
    assert rep.status == "rejected"
    assert "reason" in rep.settings


def test_general_regime_excludes_all_matchings():
    assert has_cancelling_matching([1, 1, -1, -1, 0, 0])
    assert has_cancelling_matching([0, 0, 0, 0, 0, 0])
    assert not has_cancelling_matching([2, -1, -1, 1, 0, -1])
    assert has_cancelling_matching([1, 1, 1, -1, -1, -1])
    assert not has_cancelling_matching([1, 1, -2, 0, 0, 0])


# -- star-triangle ---------------------------------------------------------------------


def star_cfg(ns=1, nt=-1, l=0, k=1, j=0, q=0.3):
    s = sp(q ** 0.15 * cmath.exp(0.7j), ns)
    t = sp(q ** 0.12 * cmath.exp(-1.9j), nt)
    return StarTriangleConfig(s, t, sp(1.01 * cmath.exp(0.4j), l), sp(0.99 * cmath.exp(2.1j), k),
                              sp(cmath.exp(-0.6j), j)), QModulus.of(q)


def test_star_triangle_rhs_oracle():
    cfg, qm = star_cfg()
    s, t, y, w, x = cfg.s, cfg.t, cfg.y, cfg.omega, cfg.x
    q = 0.3
    ref = (oracles.d_function(t.a, t.n, y.a, y.n, w.a, w.n, q)
           * oracles.m_prefactor(s.a * t.a, s.n + t.n, q)
           * oracles.m_kernel(s.a * t.a, s.n + t.n, w.a, w.n, x.a, x.n, q,
                              weight=s.a ** (2 * s.n) * t.a ** (2 * t.n))
           * oracles.d_function(s.a, s.n, y.a, y.n, x.a, x.n, q))
    assert oracles.close(star_triangle_rhs(cfg, qm, POLICY), ref, 1e-12)


def test_star_triangle_example():
    cfg, qm = star_cfg()
    rep = verify_star_triangle(cfg, qm, POLICY)
    assert rep.status == "pass", rep.to_dict()
    assert rep.rel_err < 1e-5


def test_star_triangle_reflection_invariance():
    cfg, qm = star_cfg(ns=0, nt=1, l=-1, k=1, j=1)
    flipped = StarTriangleConfig(cfg.s, cfg.t, cfg.y, sp(1 / cfg.omega.a, -cfg.omega.n), cfg.x)
    a = verify_star_triangle(cfg, qm, POLICY)
    b = verify_star_triangle(flipped, qm, POLICY)
    assert a.status == b.status == "pass"
    assert abs(a.rhs - b.rhs) <= 1e-12 * abs(a.rhs)
    assert abs(a.rel_err - b.rel_err) < 2e-6


def test_unit_s_collapses_rhs():
    cfg, qm = star_cfg()
    one = sp(1.0)
    unit = StarTriangleConfig(one, cfg.t, cfg.y, cfg.omega, cfg.x)
    ref = (d_function(DPair(cfg.t, cfg.y, cfg.omega), qm, POLICY)
           * m_prefactor(cfg.t, qm, POLICY)
           * m_kernel(cfg.t, cfg.omega, cfg.x, qm, POLICY))
    assert abs(star_triangle_rhs(unit, qm, POLICY) - ref) <= 1e-13 * abs(ref)


def test_unit_s_pinches_contour():
    cfg, qm = star_cfg()
    unit = StarTriangleConfig(sp(1.0), cfg.t, cfg.y, cfg.omega, cfg.x)
    assert verify_star_triangle(unit, qm, POLICY).status == "rejected"


def test_star_triangle_near_unit_s():
    cfg, qm = star_cfg(ns=0)
    near = StarTriangleConfig(sp(0.3 ** 0.02 * cmath.exp(0.3j)), cfg.t, cfg.y, cfg.omega, cfg.x)
    narrow = TruncationPolicy(pole_guard_delta=0.01)
    rep = verify_star_triangle(near, qm, narrow)
    assert rep.status == "pass", rep.to_dict()


# -- outcomes ---------------------------------------------------------------------------


def test_degenerate_pass_status():
    rep = _guarded("qbeta", {}, POLICY, 1e-6, lambda: (0j, 1e-20 + 0j, {}), degenerate=True)
    assert rep.status == "degenerate-pass"
    rep = _guarded("qbeta", {}, POLICY, 1e-6, lambda: (0j, 1e-20 + 0j, {}), degenerate=False)
    assert rep.status == "fail"


def test_degenerate_detection():
    # a_1 a_2 = q^2 with n_1 + n_2 = 0 is a zero of qratio(., 0)
    qm = Q03
    pts = [sp(0.3), sp(0.3), sp(1.5), sp(1.5), sp(1.2)]
    sx = BalancedSextet.from_five(pts, qm)
    assert _qbeta_degenerate(sx, qm)
    assert abs(qbeta_rhs(sx, qm, POLICY)) < 1e-14


# -- sampler ----------------------------------------------------------------------------


@pytest.mark.parametrize("mode", ["qbeta", "star-triangle", "d-props", "reflection", "bailey"])
def test_sampler_determinism(mode):
    a = sample_config(17, None, POLICY, mode)
    b = sample_config(17, None, POLICY, mode)
    assert a == b


@pytest.mark.parametrize("regime", ["any", "pairwise", "general"])
def test_sampled_sextets_are_admissible(regime):
    for seed in range(20):
        s = sample_config(seed, None, POLICY, "qbeta", regime)
        sx = s.config
        assert sum(sx.indices) == 0
        assert abs(np.prod(sx.fugacities) - s.qm.q) < 1e-12
        assert admissible(sx.pairs(), s.qm, POLICY)
        if regime == "pairwise":
            assert has_cancelling_matching(sx.indices)
        if regime == "general":
            assert not has_cancelling_matching(sx.indices)


def test_sampled_star_configs_balance():
    for seed in range(20):
        s = sample_config(seed, None, POLICY, "star-triangle")
        sx = substitution_map(s.config, s.qm)
        assert sum(sx.indices) == 0
        assert abs(np.prod(sx.fugacities) - s.qm.q) < 1e-12


def test_unknown_mode():
    with pytest.raises(ValueError):
        sample_config(0, None, POLICY, "nope")


@pytest.mark.slow
def test_hundred_qbeta_samples():
    attempts = []
    for seed in range(100):
        s = sample_config(seed, None, POLICY, "qbeta")
        attempts.append(s.attempts)
        (rep,) = verify_sample(s, "qbeta", POLICY)
        assert rep.status == "pass", (seed, rep.to_dict())
    assert 0 < 100 / sum(attempts) <= 1
