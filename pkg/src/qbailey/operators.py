"""The D-function, the M sum-integral operator and the Bailey step.

Both D and the M-kernel are products of the building block

    F(a, n; z, m) = qratio(a z, n + m) * qratio(a / z, n - m),

which is also the single-parameter factor of the q-beta integrand.  The
private ``*_values`` functions are unchecked and vectorized; the public
wrappers take SpectralPoints, check pole proximity and return scalars.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qbailey.errors import DomainError, PoleProximityError
from qbailey.qkernel import (
    DEFAULT_POLICY,
    QModulus,
    SpectralPoint,
    TruncationPolicy,
    check_ratio,
    pochhammer_pole_distance,
    qpoch,
    qpow_half,
    qratio,
)
from qbailey.quadrature import DiscreteKernel, factor_pole_families, sum_integral


@dataclass(frozen=True)
class ProductPoint:
    """The combined spectral parameter (s t, n_s + n_t).

    It behaves like a SpectralPoint with fugacity s*t and index n_s + n_t,
    except that its M-kernel monomial is s^(2 n_s) t^(2 n_t) rather than
    (s t)^(2 (n_s + n_t)).  With that normalization the star-triangle
    relation and the Bailey step hold for every n_s, n_t.
    """

    s: SpectralPoint
    t: SpectralPoint

    @property
    def a(self) -> complex:
        return self.s.a * self.t.a

    @property
    def n(self) -> int:
        return self.s.n + self.t.n

    @property
    def weight(self) -> complex:
        return self.s.weight * self.t.weight

    def plain(self) -> SpectralPoint:
        return SpectralPoint(self.a, self.n)


def combine(s: SpectralPoint, t: SpectralPoint) -> ProductPoint:
    return ProductPoint(s, t)


def inverse(t: SpectralPoint) -> SpectralPoint:
    """(1/t, -n_t), the parameter for which D is the reciprocal of D(t, n_t)."""
    return SpectralPoint(1.0 / t.a, -t.n)


@dataclass(frozen=True)
class DPair:
    """Arguments of D(t, n_t; w, n; z, m): scaling pair t, slots u = (w, n), v = (z, m)."""

    t: SpectralPoint
    u: SpectralPoint
    v: SpectralPoint


@dataclass(frozen=True)
class MParams:
    """Arguments of the M-kernel M(t, m_t)_{x, m; z, n}."""

    t: SpectralPoint
    source: SpectralPoint
    target: SpectralPoint

    def check_domain(self) -> None:
        ta, x = self.t.a, self.source.a
        if not (abs(ta * x) < 1.0 and abs(ta / x) < 1.0):
            raise DomainError(f"M requires |t x| < 1 and |t / x| < 1, got t = {ta}, x = {x}")


# -- vectorized building blocks ----------------------------------------------


def f_pair(a, n: int, z, m: int, qm: QModulus, policy: TruncationPolicy = DEFAULT_POLICY):
    """F(a, n; z, m) = qratio(a z, n + m) qratio(a / z, n - m)."""
    return qratio(a * z, n + m, qm, policy) * qratio(a / z, n - m, qm, policy)


def d_values(t, w, n: int, z, m: int, qm: QModulus, policy: TruncationPolicy = DEFAULT_POLICY):
    """D(t, n_t; w, n; z, m) for array-valued w and/or z (no pole checks).

    The four ratios pair up as F(q^(1/2) w / t, n - n_t; z, m) and
    F(q^(1/2) / (t w), -n - n_t; z, m).  The monomial uses t^(2 n_t) with the
    plain fugacity even for a ProductPoint.
    """
    ta, nt = t.a, t.n
    sq = qm.sqrt_q
    pref = qpow_half(qm, 2 * nt) / (z ** (2 * m) * w ** (2 * n) * ta ** (2 * nt))
    return (pref
            * f_pair(sq * w / ta, n - nt, z, m, qm, policy)
            * f_pair(sq / (ta * w), -n - nt, z, m, qm, policy))


def m_kernel_values(t, x, m: int, z, n: int, qm: QModulus, policy: TruncationPolicy = DEFAULT_POLICY):
    """M-kernel of M(t, m_t)_{x, m; z, n} without prefactor or measure.

    1 / (z^(2n) x^(2m) w_t) * F(t x, m_t + m; z, n) * F(t / x, m_t - m; z, n),
    where w_t is ``t.weight``.
    """
    ta, mt = t.a, t.n
    mono = z ** (2 * n) * x ** (2 * m) * t.weight
    return f_pair(ta * x, mt + m, z, n, qm, policy) * f_pair(ta / x, mt - m, z, n, qm, policy) / mono


def m_prefactor_value(t, qm: QModulus, policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    q_mt = qpow_half(qm, 2 * t.n)
    return qpoch(q_mt * t.a ** 2, qm, policy) / qpoch(qm.q * q_mt / t.a ** 2, qm, policy)


# -- checked scalar API -------------------------------------------------------


def d_function(p: DPair, qm: QModulus, policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """D(t, n_t; w, n; z, m) at a single point, with pole-proximity checks."""
    t, (w, n), (z, m) = p.t, (p.u.a, p.u.n), (p.v.a, p.v.n)
    sq = qm.sqrt_q
    for a, k in ((sq * w / t.a, n - t.n), (sq / (t.a * w), -n - t.n)):
        check_ratio(a * z, k + m, qm, policy, "D-function")
        check_ratio(a / z, k - m, qm, policy, "D-function")
    return complex(d_values(t, w, n, z, m, qm, policy))


def m_prefactor(t, qm: QModulus, policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """(q^m_t t^2; q)_inf / (q^(1 + m_t) t^-2; q)_inf."""
    # poles remaining after cancellation: t^2 = q^(1 + |m_t| + i)
    probe = qpow_half(qm, 2 + 2 * abs(t.n)) / t.a ** 2
    if pochhammer_pole_distance(probe, qm) < policy.pole_guard_delta:
        raise PoleProximityError(f"M prefactor: t = {t.a}, m_t = {t.n} is near a pole")
    return m_prefactor_value(t, qm, policy)


def m_kernel(t, x_slot: SpectralPoint, z_slot: SpectralPoint, qm: QModulus,
             policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """The M-kernel at a single (x, m; z, n), with pole-proximity checks."""
    x, m, z, n = x_slot.a, x_slot.n, z_slot.a, z_slot.n
    for a, k in ((t.a * x, t.n + m), (t.a / x, t.n - m)):
        check_ratio(a * z, k + n, qm, policy, "M-kernel")
        check_ratio(a / z, k - n, qm, policy, "M-kernel")
    return complex(m_kernel_values(t, x, m, z, n, qm, policy))


def m_apply(t, alpha, qm: QModulus, policy: TruncationPolicy = DEFAULT_POLICY, *,
            nodes: int | None = None, memoize: bool = True) -> DiscreteKernel:
    """beta(x, m) = M(t, m_t)_{x, m; z, n} alpha(z, n) as a lazily evaluated kernel.

    Each evaluation is one sum-integral over (n, z), vectorized over an array
    of x.  Results are cached per (m, x-array) when ``memoize`` is set.
    """
    pref = m_prefactor(t, qm, policy)

    def beta(x, m):
        xs = np.atleast_1d(np.asarray(x, dtype=complex))
        if not (np.all(np.abs(t.a * xs) < 1.0) and np.all(np.abs(t.a / xs) < 1.0)):
            raise DomainError(f"M requires |t x| < 1 and |t / x| < 1 (t = {t.a})")
        xc = xs[:, None]

        def integrand(z, n):
            return m_kernel_values(t, xc, m, z[None, :], n, qm, policy) * alpha(z, n)[None, :]

        def families(n):
            pts = [(t.a * xv, t.n + m) for xv in xs] + [(t.a / xv, t.n - m) for xv in xs]
            return factor_pole_families(pts, n, qm)

        res = sum_integral(integrand, qm, policy, nodes=nodes,
                           support=getattr(alpha, "support", None), families=families)
        # empty support leaves a scalar zero
        out = pref * np.broadcast_to(res.value, xs.shape)
        return complex(out[0]) if np.ndim(x) == 0 else out.reshape(np.shape(x))

    params = {"t": t.a, "n_t": t.n}
    return DiscreteKernel(beta, params, memoize=memoize)


def bailey_step(alpha, beta, s: SpectralPoint, t: SpectralPoint, y: SpectralPoint,
                qm: QModulus, policy: TruncationPolicy = DEFAULT_POLICY, *,
                nodes: int | None = None) -> tuple[DiscreteKernel, DiscreteKernel]:
    """New pair from a Bailey pair (alpha, beta) relative to t.

    alpha'_k(x) = D(s, n_s; y, l; x, k) alpha_k(x)
    beta'_k(x)  = D(1/t, -n_t; y, l; x, k) M(s, n_s)_{x, k; z, m} D(s t, n_s + n_t; y, l; z, m) beta_m(z)

    The result is a Bailey pair relative to ``combine(s, t)``.
    """
    st = SpectralPoint(s.a * t.a, s.n + t.n)
    t_inv = inverse(t)
    w, l = y.a, y.n

    def alpha_new(x, k):
        return d_values(s, w, l, x, k, qm, policy) * alpha(x, k)

    def gamma(z, m):
        return d_values(st, w, l, z, m, qm, policy) * beta(z, m)

    inner = m_apply(s, DiscreteKernel(gamma), qm, policy, nodes=nodes)

    def beta_new(x, k):
        return d_values(t_inv, w, l, x, k, qm, policy) * inner(x, k)

    a_new = DiscreteKernel(alpha_new, {"s": s.a, "n_s": s.n, "y": w, "l": l},
                           support=getattr(alpha, "support", None))
    b_new = DiscreteKernel(beta_new, {"s": s.a, "n_s": s.n, "t": t.a, "n_t": t.n, "y": w, "l": l},
                           memoize=True)
    return a_new, b_new
