"""End-to-end identity checks and the seeded configuration sampler."""

from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from qbailey.errors import ConvergenceError, DomainError, PoleProximityError, SamplingExhausted
from qbailey.operators import (
    DPair,
    ProductPoint,
    combine,
    d_function,
    d_values,
    inverse,
    m_apply,
    m_kernel,
    m_kernel_values,
    m_prefactor,
    m_prefactor_value,
    bailey_step,
    f_pair,
)
from qbailey.qkernel import (
    DEFAULT_POLICY,
    QModulus,
    SpectralPoint,
    TruncationPolicy,
    check_ratio,
    pochhammer_pole_distance,
    qpow_half,
    qratio,
)
from qbailey.quadrature import (
    DiscreteKernel,
    SumIntegral,
    factor_pole_families,
    pole_guard,
    sum_integral,
    symmetric_sum_integral,
)
from qbailey.report import Report, make_report

SUM_INTEGRAL_TOL = 1e-6
CLOSED_FORM_TOL = 1e-10
BALANCE_TOL = 1e-12


# -- configurations -----------------------------------------------------------


@dataclass(frozen=True)
class BalancedSextet:
    """Six pairs (a_j, n_j) with sum n_j = 0 and prod a_j = q."""

    points: tuple[SpectralPoint, ...]
    q: complex

    def __post_init__(self):
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) != 6:
            raise DomainError("a sextet needs exactly six points")
        if sum(p.n for p in pts) != 0:
            raise DomainError(f"indices must sum to zero, got {[p.n for p in pts]}")
        prod = np.prod([p.a for p in pts])
        if abs(prod - self.q) >= BALANCE_TOL:
            raise DomainError(f"fugacities must multiply to q; |prod - q| = {abs(prod - self.q):.3g}")

    @classmethod
    def from_five(cls, points: Sequence[SpectralPoint], qm: QModulus) -> "BalancedSextet":
        """Complete five points with a_6 = q / prod a_j and n_6 = -sum n_j."""
        a6 = qm.q / np.prod([p.a for p in points])
        n6 = -sum(p.n for p in points)
        return cls(tuple(points) + (SpectralPoint(a6, n6),), qm.q)

    @property
    def fugacities(self) -> list[complex]:
        return [p.a for p in self.points]

    @property
    def indices(self) -> list[int]:
        return [p.n for p in self.points]

    def pairs(self) -> list[tuple[complex, int]]:
        return [(p.a, p.n) for p in self.points]

    def params(self) -> dict:
        out: dict = {"q": complex(self.q)}
        for j, p in enumerate(self.points, 1):
            out[f"a{j}"] = p.a
        for j, p in enumerate(self.points, 1):
            out[f"n{j}"] = p.n
        return out


@dataclass(frozen=True)
class StarTriangleConfig:
    s: SpectralPoint
    t: SpectralPoint
    y: SpectralPoint
    omega: SpectralPoint
    x: SpectralPoint

    def params(self, qm: QModulus) -> dict:
        return {
            "q": qm.q,
            "s": self.s.a, "n_s": self.s.n,
            "t": self.t.a, "n_t": self.t.n,
            "y": self.y.a, "l": self.y.n,
            "omega": self.omega.a, "k": self.omega.n,
            "x": self.x.a, "j": self.x.n,
        }


@dataclass(frozen=True)
class DPropsConfig:
    t: SpectralPoint
    omega: SpectralPoint
    z: SpectralPoint

    def params(self, qm: QModulus) -> dict:
        return {"q": qm.q, "t": self.t.a, "n_t": self.t.n, "omega": self.omega.a,
                "n": self.omega.n, "z": self.z.a, "m": self.z.n}


@dataclass(frozen=True)
class ReflectionConfig:
    w: complex
    n: int


@dataclass(frozen=True)
class BaileyConfig:
    """Spectral data for one Bailey step seeded with alpha = delta_{n,0}."""

    s: SpectralPoint
    t: SpectralPoint
    y: SpectralPoint
    points: tuple[SpectralPoint, ...]

    def params(self, qm: QModulus, point: SpectralPoint) -> dict:
        return {"q": qm.q, "s": self.s.a, "n_s": self.s.n, "t": self.t.a, "n_t": self.t.n,
                "y": self.y.a, "l": self.y.n, "x": point.a, "k": point.n}


# -- substitution map ----------------------------------------------------------


def substitution_map(cfg: StarTriangleConfig, qm: QModulus) -> BalancedSextet:
    """Sextet whose q-beta integrand is the star-triangle integrand up to a constant.

    a = (s w, s / w, q^(1/2) y / (s t), q^(1/2) / (s t y), t x, t / x)
    n = (k + n_s, -k + n_s, l - n_s - n_t, -l - n_s - n_t, j + n_t, -j + n_t)
    """
    s, ns = cfg.s.a, cfg.s.n
    t, nt = cfg.t.a, cfg.t.n
    y, l = cfg.y.a, cfg.y.n
    w, k = cfg.omega.a, cfg.omega.n
    x, j = cfg.x.a, cfg.x.n
    sq = qm.sqrt_q
    pts = (
        SpectralPoint(s * w, k + ns),
        SpectralPoint(s / w, -k + ns),
        SpectralPoint(sq * y / (s * t), l - ns - nt),
        SpectralPoint(sq / (s * t * y), -l - ns - nt),
        SpectralPoint(t * x, j + nt),
        SpectralPoint(t / x, -j + nt),
    )
    return BalancedSextet(pts, qm.q)


# -- q-beta sum-integral --------------------------------------------------------


def admissible(pairs: Sequence[tuple[complex, int]], qm: QModulus,
               policy: TruncationPolicy = DEFAULT_POLICY) -> bool:
    """Pole guard for prod F(a_j, n_j; z, m) over every shell that can be closest to the circle."""
    reach = max(abs(n) for _, n in pairs) + 2
    return all(pole_guard(factor_pole_families(pairs, m, qm), policy) for m in range(-reach, reach + 1))


def qbeta_integrand(sextet: BalancedSextet, qm: QModulus, policy: TruncationPolicy = DEFAULT_POLICY):
    pairs = sextet.pairs()

    def integrand(z, m):
        out = z ** (-6 * m)
        for a, n in pairs:
            out = out * f_pair(a, n, z, m, qm, policy)
        return out

    return integrand


def qbeta_lhs(sextet: BalancedSextet, qm: QModulus, policy: TruncationPolicy = DEFAULT_POLICY, *,
              nodes: int | None = None, window: int | None = None) -> SumIntegral:
    """sum_m int [d_m z] z^(-6m) prod_j F(a_j, n_j; z, m), measure counted once."""
    pairs = sextet.pairs()
    return sum_integral(qbeta_integrand(sextet, qm, policy), qm, policy, nodes=nodes, window=window,
                        families=lambda m: factor_pole_families(pairs, m, qm))


def qbeta_lhs_oracle(sextet: BalancedSextet, qm: QModulus, policy: TruncationPolicy, *,
                     nodes: int, window: int) -> complex:
    """Independent path: fixed grid, folded (m, z) -> (-m, 1/z) symmetry, no caching."""
    return symmetric_sum_integral(qbeta_integrand(sextet, qm, policy), qm, policy,
                                  nodes=nodes, window=window).value


def qbeta_rhs(sextet: BalancedSextet, qm: QModulus, policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """prod_j a_j^(-n_j) * prod_{j<k} qratio(a_j a_k, n_j + n_k)."""
    out = 1.0 + 0j
    for p in sextet.points:
        out /= p.a ** p.n
    for p, r in combinations(sextet.points, 2):
        check_ratio(p.a * r.a, p.n + r.n, qm, policy, "q-beta closed form")
        out *= qratio(p.a * r.a, p.n + r.n, qm, policy)
    return complex(out)


def ratio_vanishes(x: complex, k: int, qm: QModulus, rtol: float = 1e-12) -> bool:
    """True when qratio(x, k) has a zero at x, i.e. x = q^(1 + |k|/2 + i)."""
    return pochhammer_pole_distance(qpow_half(qm, 2 + abs(k)) / complex(x), qm) < rtol


def _qbeta_degenerate(sextet: BalancedSextet, qm: QModulus) -> bool:
    return any(ratio_vanishes(p.a * r.a, p.n + r.n, qm) for p, r in combinations(sextet.points, 2))


def _settings(policy: TruncationPolicy, **extra) -> dict:
    out = policy.as_dict()
    out.update(extra)
    return out


def _guarded(identity, params, policy, tol, compute, degenerate=False) -> Report:
    """Run ``compute`` -> (lhs, rhs, extra settings) and package the outcome."""
    start = time.perf_counter()
    try:
        lhs, rhs, extra = compute()
    except PoleProximityError as exc:
        return make_report(identity, params, math.nan, math.nan, tol,
                           _settings(policy, reason=str(exc)),
                           (time.perf_counter() - start) * 1e3, status="rejected")
    except ConvergenceError as exc:
        return make_report(identity, params, math.nan, math.nan, tol,
                           _settings(policy, reason=str(exc)),
                           (time.perf_counter() - start) * 1e3, status="non-convergent")
    elapsed = (time.perf_counter() - start) * 1e3
    status = None
    if degenerate and max(abs(lhs), abs(rhs)) < 1e-12:
        status = "degenerate-pass"
    return make_report(identity, params, lhs, rhs, tol, _settings(policy, **extra), elapsed, status)


def verify_qbeta(sextet: BalancedSextet, qm: QModulus, policy: TruncationPolicy = DEFAULT_POLICY, *,
                 tol: float = SUM_INTEGRAL_TOL, nodes: int | None = None,
                 window: int | None = None) -> Report:
    def compute():
        rhs = qbeta_rhs(sextet, qm, policy)
        res = qbeta_lhs(sextet, qm, policy, nodes=nodes, window=window)
        return res.value, rhs, {"nodes_used": res.nodes, "window_used": res.window}

    return _guarded("qbeta", sextet.params(), policy, tol, compute, _qbeta_degenerate(sextet, qm))


# -- star-triangle relation -------------------------------------------------------


def star_triangle_integrand(cfg: StarTriangleConfig, qm: QModulus,
                            policy: TruncationPolicy = DEFAULT_POLICY):
    """M_s-kernel(w, k; z, m) * D(s t; y, l; z, m) * M_t-kernel(z, m; x, j), prefactors excluded."""
    s, t = cfg.s, cfg.t
    st = SpectralPoint(s.a * t.a, s.n + t.n)
    w, k = cfg.omega.a, cfg.omega.n
    x, j = cfg.x.a, cfg.x.n
    y, l = cfg.y.a, cfg.y.n

    def integrand(z, m):
        return (m_kernel_values(s, w, k, z, m, qm, policy)
                * d_values(st, y, l, z, m, qm, policy)
                * m_kernel_values(t, z, m, x, j, qm, policy))

    return integrand


def star_triangle_lhs(cfg: StarTriangleConfig, qm: QModulus, policy: TruncationPolicy = DEFAULT_POLICY, *,
                      nodes: int | None = None, window: int | None = None) -> SumIntegral:
    """Kernel-level left side: the (z, m) sum-integral with both M prefactors."""
    pairs = substitution_map(cfg, qm).pairs()
    pref = m_prefactor(cfg.s, qm, policy) * m_prefactor(cfg.t, qm, policy)
    res = sum_integral(star_triangle_integrand(cfg, qm, policy), qm, policy, nodes=nodes, window=window,
                       families=lambda m: factor_pole_families(pairs, m, qm))
    return SumIntegral(pref * res.value, res.nodes, res.window)


def star_triangle_lhs_oracle(cfg: StarTriangleConfig, qm: QModulus, policy: TruncationPolicy, *,
                             nodes: int, window: int) -> complex:
    pref = m_prefactor_value(cfg.s, qm, policy) * m_prefactor_value(cfg.t, qm, policy)
    res = symmetric_sum_integral(star_triangle_integrand(cfg, qm, policy), qm, policy,
                                 nodes=nodes, window=window)
    return pref * res.value


def star_triangle_rhs(cfg: StarTriangleConfig, qm: QModulus, policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """D(t, n_t; y, l; w, k) * M(st)-prefactor * M(st)-kernel(w, k; x, j) * D(s, n_s; y, l; x, j)."""
    st = combine(cfg.s, cfg.t)
    return (d_function(DPair(cfg.t, cfg.y, cfg.omega), qm, policy)
            * m_prefactor(st, qm, policy)
            * m_kernel(st, cfg.omega, cfg.x, qm, policy)
            * d_function(DPair(cfg.s, cfg.y, cfg.x), qm, policy))


def _star_degenerate(cfg: StarTriangleConfig, qm: QModulus) -> bool:
    # a vanishing M prefactor numerator (q^n t^2; q) = 0
    return any(pochhammer_pole_distance(qpow_half(qm, 2 * p.n) * p.a ** 2, qm) < 1e-12
               for p in (cfg.s, cfg.t))


def verify_star_triangle(cfg: StarTriangleConfig, qm: QModulus, policy: TruncationPolicy = DEFAULT_POLICY, *,
                         tol: float = SUM_INTEGRAL_TOL, nodes: int | None = None,
                         window: int | None = None) -> Report:
    def compute():
        sextet = substitution_map(cfg, qm)
        if not admissible(sextet.pairs(), qm, policy):
            raise PoleProximityError("induced sextet fails the pole guard")
        rhs = star_triangle_rhs(cfg, qm, policy)
        res = star_triangle_lhs(cfg, qm, policy, nodes=nodes, window=window)
        return res.value, rhs, {"nodes_used": res.nodes, "window_used": res.window}

    return _guarded("star-triangle", cfg.params(qm), policy, tol, compute, _star_degenerate(cfg, qm))


# -- D-function properties and reflection ------------------------------------------


def verify_d_props(cfg: DPropsConfig, qm: QModulus, policy: TruncationPolicy = DEFAULT_POLICY, *,
                   tol: float = CLOSED_FORM_TOL, unit_tol: float = 1e-14) -> Report:
    """D(t, n_t) D(1/t, -n_t) = 1, with D(1, 0) = 1 checked at the same slots."""
    unit = SpectralPoint(1.0, 0)

    def compute():
        lhs = (d_function(DPair(cfg.t, cfg.omega, cfg.z), qm, policy)
               * d_function(DPair(inverse(cfg.t), cfg.omega, cfg.z), qm, policy))
        unit_val = d_function(DPair(unit, cfg.omega, cfg.z), qm, policy)
        return lhs, 1.0, {"unit_residual": abs(unit_val - 1.0)}

    rep = _guarded("d-props", cfg.params(qm), policy, tol, compute)
    if rep.status == "pass" and not rep.settings["unit_residual"] < unit_tol:
        rep.status = "fail"
    return rep


def verify_reflection_sample(cfg: ReflectionConfig, qm: QModulus,
                             policy: TruncationPolicy = DEFAULT_POLICY, *, tol: float = CLOSED_FORM_TOL) -> Report:
    from qbailey.qkernel import verify_reflection

    params = {"q": qm.q, "w": cfg.w, "n": cfg.n}

    def compute():
        rep = verify_reflection(cfg.w, cfg.n, qm, policy, tol)
        return rep.lhs, rep.rhs, {}

    return _guarded("reflection", params, policy, tol, compute)


# -- Bailey step ---------------------------------------------------------------------


def bailey_pair_check(cfg: BaileyConfig, qm: QModulus, policy: TruncationPolicy = DEFAULT_POLICY, *,
                      nodes: int | None = None):
    """Values (beta'_k(x), [M(st) alpha']_k(x)) at each evaluation point.

    The seed pair is alpha = delta_{n,0}, beta = M(t, n_t) alpha; the returned
    kernels are evaluated with shared caches.
    """
    alpha = DiscreteKernel.delta(0)
    beta = m_apply(cfg.t, alpha, qm, policy, nodes=nodes)
    alpha2, beta2 = bailey_step(alpha, beta, cfg.s, cfg.t, cfg.y, qm, policy, nodes=nodes)
    target = m_apply(combine(cfg.s, cfg.t), alpha2, qm, policy, nodes=nodes)
    out = []
    for p in cfg.points:
        out.append((complex(beta2(np.array([p.a]), p.n)[0]), complex(target(np.array([p.a]), p.n)[0])))
    return out


def bailey_admissible(cfg: BaileyConfig, qm: QModulus, policy: TruncationPolicy = DEFAULT_POLICY) -> bool:
    s, t, y = cfg.s, cfg.t, cfg.y
    sq = qm.sqrt_q
    st = s.a * t.a
    n_st = s.n + t.n
    base = [(sq * y.a / st, y.n - n_st), (sq / (st * y.a), -y.n - n_st)]
    # inner integral over w for beta_m(z): factors (t z, n_t + m), (t / z, n_t - m), |z| = 1
    if not abs(t.a) < 1.0 - policy.pole_guard_delta:
        return False
    d_s = [(sq * y.a / s.a, y.n - s.n), (sq / (s.a * y.a), -y.n - s.n)]
    for p in cfg.points:
        outer = base + [(s.a * p.a, s.n + p.n), (s.a / p.a, s.n - p.n)]
        target = d_s + [(st * p.a, n_st + p.n), (st / p.a, n_st - p.n)]
        if not (admissible(outer, qm, policy) and admissible(target, qm, policy)):
            return False
    return True


def verify_bailey(cfg: BaileyConfig, qm: QModulus, policy: TruncationPolicy = DEFAULT_POLICY, *,
                  tol: float = 1e-5, nodes: int | None = None) -> list[Report]:
    """One report per evaluation point comparing beta' with M(st) alpha'."""
    start = time.perf_counter()
    try:
        if not bailey_admissible(cfg, qm, policy):
            raise PoleProximityError("Bailey configuration fails the pole guard")
        values = bailey_pair_check(cfg, qm, policy, nodes=nodes)
    except (PoleProximityError, ConvergenceError, DomainError) as exc:
        status = "non-convergent" if isinstance(exc, ConvergenceError) else "rejected"
        elapsed = (time.perf_counter() - start) * 1e3
        return [make_report("bailey", cfg.params(qm, p), math.nan, math.nan, tol,
                            _settings(policy, reason=str(exc)), elapsed, status=status)
                for p in cfg.points]
    elapsed = (time.perf_counter() - start) * 1e3 / len(cfg.points)
    return [make_report("bailey", cfg.params(qm, p), lhs, rhs, tol, _settings(policy), elapsed)
            for p, (lhs, rhs) in zip(cfg.points, values)]


# -- sampling --------------------------------------------------------------------------

MODES = ("qbeta", "star-triangle", "reflection", "d-props", "bailey")
REGIMES = ("any", "pairwise", "general")
MAX_ATTEMPTS = 1000


@dataclass
class Sample:
    config: object
    qm: QModulus
    attempts: int


def has_cancelling_matching(ns: Sequence[int]) -> bool:
    """True when the indices split into pairs that each sum to zero."""
    c = Counter(ns)
    if c[0] % 2:
        return False
    return all(c[v] == c[-v] for v in c if v > 0)


def _phase(rng) -> complex:
    return complex(np.exp(2j * np.pi * rng.random()))


def _fugacity(rng, q: float, lo: float, hi: float) -> complex:
    """Modulus q^e with e uniform in [lo, hi], uniform phase."""
    return q ** rng.uniform(lo, hi) * _phase(rng)


def _draw_q(rng, qm):
    return QModulus.of(rng.uniform(0.1, 0.4)) if qm is None else qm


def sample_config(rng_seed: int, qm: QModulus | None = None, policy: TruncationPolicy = DEFAULT_POLICY,
                  mode: str = "qbeta", regime: str = "any") -> Sample:
    """Deterministic pole-safe sample for ``mode``.

    q is drawn real from [0.1, 0.4] unless ``qm`` is given.  Indices come from
    {-1, 0, 1}.  For q-beta, fugacity moduli are q^e with e in [0.1, 0.4],
    a_6 = q / prod a_j and n_6 = -sum n_j; ``regime`` selects index vectors
    that do ("pairwise") or do not ("general") split into cancelling pairs.
    Spectral parameters s, t use the same modulus range; external slots
    (w, x, y, z) have moduli q^e with e in [-0.05, 0.05].
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r}")
    rng = np.random.default_rng(rng_seed)
    qm = _draw_q(rng, qm)
    q = qm.abs_q
    for attempt in range(1, MAX_ATTEMPTS + 1):
        cfg = _SAMPLERS[mode](rng, qm, q, policy, regime)
        if cfg is not None:
            return Sample(cfg, qm, attempt)
    raise SamplingExhausted(f"no admissible {mode} sample after {MAX_ATTEMPTS} attempts (seed {rng_seed})")


def _indices(rng, size):
    return [int(v) for v in rng.integers(-1, 2, size)]


def _sample_qbeta(rng, qm, q, policy, regime):
    if regime == "pairwise":
        h = _indices(rng, 3)
        ns = [h[0], -h[0], h[1], -h[1], h[2], -h[2]]
    else:
        ns = _indices(rng, 5)
        ns.append(-sum(ns))
    if regime == "general" and has_cancelling_matching(ns):
        return None
    pts = [SpectralPoint(_fugacity(rng, q, 0.1, 0.4), n) for n in ns[:5]]
    a6 = qm.q / np.prod([p.a for p in pts])
    if not abs(a6) < 1.0:
        return None
    sextet = BalancedSextet(tuple(pts) + (SpectralPoint(a6, ns[5]),), qm.q)
    if not admissible(sextet.pairs(), qm, policy):
        return None
    return sextet


def _external(rng, q, n):
    return SpectralPoint(_fugacity(rng, q, -0.05, 0.05), n)


def _sample_star(rng, qm, q, policy, regime):
    ns, nt, k, j, l = _indices(rng, 5)
    cfg = StarTriangleConfig(
        s=SpectralPoint(_fugacity(rng, q, 0.1, 0.4), ns),
        t=SpectralPoint(_fugacity(rng, q, 0.1, 0.4), nt),
        y=_external(rng, q, l),
        omega=_external(rng, q, k),
        x=_external(rng, q, j),
    )
    if not admissible(substitution_map(cfg, qm).pairs(), qm, policy):
        return None
    try:
        star_triangle_rhs(cfg, qm, policy)
        m_prefactor(cfg.s, qm, policy)
        m_prefactor(cfg.t, qm, policy)
    except PoleProximityError:
        return None
    return cfg


def _sample_dprops(rng, qm, q, policy, regime):
    nt, n, m = _indices(rng, 3)
    cfg = DPropsConfig(SpectralPoint(_fugacity(rng, q, 0.1, 0.4), nt), _external(rng, q, n), _external(rng, q, m))
    try:
        d_function(DPair(cfg.t, cfg.omega, cfg.z), qm, policy)
        d_function(DPair(inverse(cfg.t), cfg.omega, cfg.z), qm, policy)
    except PoleProximityError:
        return None
    return cfg


def _sample_reflection(rng, qm, q, policy, regime):
    n = int(rng.integers(-4, 5))
    w = rng.uniform(0.1, 0.9) * _phase(rng)
    for den in (qpow_half(qm, -2 * n) * w, qpow_half(qm, 2 * n) * w):
        if pochhammer_pole_distance(den, qm) < policy.pole_guard_delta:
            return None
    return ReflectionConfig(w, n)


def _sample_bailey(rng, qm, q, policy, regime, n_points=1):
    ns, nt, l = _indices(rng, 3)
    s = SpectralPoint(_fugacity(rng, q, 0.1, 0.3), ns)
    t = SpectralPoint(_fugacity(rng, q, 0.1, 0.3), nt)
    y = _external(rng, q, l)
    points = tuple(SpectralPoint(_phase(rng), int(rng.integers(-1, 2))) for _ in range(n_points))
    cfg = BaileyConfig(s, t, y, points)
    if not bailey_admissible(cfg, qm, policy):
        return None
    return cfg


_SAMPLERS = {
    "qbeta": _sample_qbeta,
    "star-triangle": _sample_star,
    "d-props": _sample_dprops,
    "reflection": _sample_reflection,
    "bailey": _sample_bailey,
}


def sample_bailey(rng_seed: int, qm: QModulus | None = None, policy: TruncationPolicy = DEFAULT_POLICY,
                  n_points: int = 3) -> Sample:
    """Bailey configuration with ``n_points`` evaluation points on the unit circle."""
    rng = np.random.default_rng(rng_seed)
    qm = _draw_q(rng, qm)
    for attempt in range(1, MAX_ATTEMPTS + 1):
        cfg = _sample_bailey(rng, qm, qm.abs_q, policy, "any", n_points)
        if cfg is not None:
            return Sample(cfg, qm, attempt)
    raise SamplingExhausted(f"no admissible bailey sample after {MAX_ATTEMPTS} attempts (seed {rng_seed})")


def verify_sample(sample: Sample, mode: str, policy: TruncationPolicy = DEFAULT_POLICY,
                  tol: float | None = None, **kw) -> list[Report]:
    """Dispatch a sampled configuration to its verifier."""
    qm, cfg = sample.qm, sample.config
    if mode == "qbeta":
        return [verify_qbeta(cfg, qm, policy, tol=tol or SUM_INTEGRAL_TOL, **kw)]
    if mode == "star-triangle":
        return [verify_star_triangle(cfg, qm, policy, tol=tol or SUM_INTEGRAL_TOL, **kw)]
    if mode == "d-props":
        return [verify_d_props(cfg, qm, policy, tol=tol or CLOSED_FORM_TOL)]
    if mode == "reflection":
        return [verify_reflection_sample(cfg, qm, policy, tol=tol or CLOSED_FORM_TOL)]
    if mode == "bailey":
        return verify_bailey(cfg, qm, policy, tol=tol or 1e-5, **kw)
    raise ValueError(f"unknown mode {mode!r}")


__all__ = [
    "BalancedSextet", "StarTriangleConfig", "DPropsConfig", "ReflectionConfig", "BaileyConfig",
    "Sample", "substitution_map", "qbeta_lhs", "qbeta_rhs", "qbeta_lhs_oracle", "verify_qbeta",
    "star_triangle_lhs", "star_triangle_rhs", "star_triangle_lhs_oracle", "verify_star_triangle",
    "verify_d_props", "verify_reflection_sample", "bailey_pair_check", "verify_bailey",
    "sample_config", "sample_bailey", "verify_sample", "has_cancelling_matching", "admissible",
    "ProductPoint",
]
