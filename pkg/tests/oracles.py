"""Extended-precision reference values built term by term from the defining formulas.

These use mpmath's own q-Pochhammer and square root, so they share no code
with the package.
"""

import mpmath as mp

mp.mp.dps = 30


def qp(z, q):
    return mp.qp(mp.mpc(z), mp.mpc(q))


def qp_long_product(z, q, terms=200):
    z, q = mp.mpc(z), mp.mpc(q)
    out = mp.mpc(1)
    for j in range(terms):
        out *= 1 - z * q**j
    return out


def half(q, k):
    return mp.sqrt(mp.mpc(q)) ** k


def d_function(t, nt, w, n, z, m, q):
    """D(t, n_t; w, n; z, m) term by term, last denominator exponent (-n - n_t - m)/2."""
    t, w, z = mp.mpc(t), mp.mpc(w), mp.mpc(z)
    h = lambda k: half(q, k)
    pref = h(2 * nt) / (z ** (2 * m) * w ** (2 * n) * t ** (2 * nt))
    num = (qp(h(2 + n - nt + m) * h(-1) * t / (z * w), q)
           * qp(h(2 + n - nt - m) * h(-1) * t * z / w, q)
           * qp(h(2 - n - nt + m) * h(-1) * t * w / z, q)
           * qp(h(2 - n - nt - m) * h(-1) * t * w * z, q))
    den = (qp(h(n - nt + m) * h(1) * w * z / t, q)
           * qp(h(n - nt - m) * h(1) * w / (t * z), q)
           * qp(h(-n - nt + m) * h(1) * z / (t * w), q)
           * qp(h(-n - nt - m) * h(1) / (t * w * z), q))
    return pref * num / den


def d_function_flipped(t, nt, w, n, z, m, q):
    """Same as ``d_function`` but with the last denominator exponent sign-flipped to (n - n_t - m)/2."""
    t, w, z = mp.mpc(t), mp.mpc(w), mp.mpc(z)
    h = lambda k: half(q, k)
    fixed = qp(h(-n - nt - m) * h(1) / (t * w * z), q)
    flipped = qp(h(n - nt - m) * h(1) / (t * w * z), q)
    return d_function(t, nt, w, n, z, m, q) * fixed / flipped


def m_prefactor(t, mt, q):
    t = mp.mpc(t)
    return qp(half(q, 2 * mt) * t**2, q) / qp(half(q, 2 + 2 * mt) / t**2, q)


def m_kernel(t, mt, x, m, z, n, q, weight=None):
    """M(t, m_t)_{x, m; z, n} integrand without measure or prefactor, written out."""
    t, x, z = mp.mpc(t), mp.mpc(x), mp.mpc(z)
    h = lambda k: half(q, k)
    weight = t ** (2 * mt) if weight is None else weight
    mono = 1 / (z ** (2 * n) * x ** (2 * m) * weight)
    num = (qp(h(2 + m + mt + n) / (t * x * z), q) * qp(h(2 + m + mt - n) * z / (t * x), q)
           * qp(h(2 - m + mt + n) * x / (t * z), q) * qp(h(2 - m + mt - n) * x * z / t, q))
    den = (qp(h(m + mt + n) * t * x * z, q) * qp(h(m + mt - n) * t * x / z, q)
           * qp(h(-m + mt + n) * t * z / x, q) * qp(h(-m + mt - n) * t / (x * z), q))
    return mono * num / den


def qbeta_rhs(a, n, q):
    out = mp.mpc(1)
    for aj, nj in zip(a, n):
        out /= mp.mpc(aj) ** nj
    for j in range(6):
        for k in range(j + 1, 6):
            A = mp.mpc(a[j]) * mp.mpc(a[k])
            K = n[j] + n[k]
            out *= qp(half(q, 2 + K) / A, q) / qp(half(q, K) * A, q)
    return out


def close(x, y, rtol):
    x, y = complex(x), complex(y)
    return abs(x - y) <= rtol * max(abs(x), abs(y))
