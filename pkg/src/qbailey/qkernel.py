"""q-Pochhammer products, half-integer q-powers and the reflection identity.

Everything here is vectorized over numpy arrays of arguments: ``qpoch``
accepts a scalar or an array and returns the same shape.
"""

from __future__ import annotations

import cmath
import math
import time
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from qbailey.errors import ConvergenceError, DomainError, PoleProximityError
from qbailey.report import Report, make_report


@dataclass(frozen=True)
class QModulus:
    """The nome q together with a fixed square-root branch.

    Every half-integer power q^(k/2) is computed as ``sqrt_q ** k`` so that
    the products of such powers are consistent with one another.
    """

    q: complex
    sqrt_q: complex

    @classmethod
    def of(cls, q: complex) -> "QModulus":
        q = complex(q)
        if not 0.0 < abs(q) < 1.0:
            raise DomainError(f"nome must satisfy 0 < |q| < 1, got q = {q}")
        return cls(q, cmath.sqrt(q))

    def __post_init__(self):
        if not 0.0 < abs(self.q) < 1.0:
            raise DomainError(f"nome must satisfy 0 < |q| < 1, got q = {self.q}")
        if abs(self.sqrt_q * self.sqrt_q - self.q) > 4e-16 * max(1.0, abs(self.q)) * 4:
            raise DomainError("sqrt_q is not a square root of q")

    @property
    def abs_q(self) -> float:
        return abs(self.q)


@dataclass(frozen=True)
class SpectralPoint:
    """A continuous fugacity ``a`` paired with an integer index ``n``."""

    a: complex
    n: int = 0

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        if self.a == 0:
            raise DomainError("fugacity must be nonzero")
        if int(self.n) != self.n:
            raise DomainError(f"index must be an integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def weight(self) -> complex:
        """Monomial a^(2n) that normalizes the M-kernel for this point."""
        return self.a ** (2 * self.n)

    def conjugate(self) -> "SpectralPoint":
        return SpectralPoint(self.a.conjugate(), self.n)


@dataclass(frozen=True)
class TruncationPolicy:
    """Cutoffs and tolerances for products, lattice sums and quadrature."""

    product_eps: float = 1e-14
    product_max_terms: int = 20000
    sum_tail_eps: float = 1e-12
    sum_window_max: int = 400
    quad_nodes_min: int = 32
    quad_nodes_max: int = 16384
    quad_eps: float = 1e-10
    pole_guard_delta: float = 0.05

    def __post_init__(self):
        for name in ("product_eps", "sum_tail_eps", "quad_eps", "pole_guard_delta"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.product_max_terms < 1:
            raise DomainError("product_max_terms must be >= 1")
        if self.sum_window_max < 1:
            raise DomainError("sum_window_max must be >= 1")
        for name in ("quad_nodes_min", "quad_nodes_max"):
            k = getattr(self, name)
            if k < 8 or k & (k - 1):
                raise DomainError(f"{name} must be a power of two >= 8, got {k}")
        if self.quad_nodes_min > self.quad_nodes_max:
            raise DomainError("quad_nodes_min must not exceed quad_nodes_max")

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT_POLICY = TruncationPolicy()


def qpow_half(qm: QModulus, k: int) -> complex:
    """q^(k/2) on the fixed branch, i.e. ``sqrt_q ** k``."""
    return qm.sqrt_q ** int(k)


@lru_cache(maxsize=256)
def _powers(q: complex, n: int) -> np.ndarray:
    # q^0 .. q^(n-1) by repeated multiplication, so every caller sees identical values
    out = np.empty(n, dtype=complex)
    acc = 1.0 + 0j
    for j in range(n):
        out[j] = acc
        acc *= q
    out.flags.writeable = False
    return out


def product_terms(zmax: float, qm: QModulus, policy: TruncationPolicy) -> int:
    """Smallest N with zmax * |q|^N / (1 - |q|) < product_eps."""
    if zmax == 0.0:
        return 0
    aq = qm.abs_q
    target = policy.product_eps * (1.0 - aq) / zmax
    if target >= 1.0:
        return 0
    n = math.ceil(math.log(target) / math.log(aq))
    # guard against rounding in the logarithms
    while zmax * aq**n / (1.0 - aq) >= policy.product_eps:
        n += 1
    return max(n, 0)


def qpoch(z, qm: QModulus, policy: TruncationPolicy = DEFAULT_POLICY):
    """(z; q)_inf = prod_{j>=0} (1 - z q^j), truncated by a geometric tail bound.

    The product stops after N factors, N the smallest integer with
    |z| |q|^N / (1 - |q|) < product_eps; the neglected tail then changes the
    logarithm of the product by about product_eps.  For array input the
    largest |z| sets N for the whole array.
    """
    if not qm.abs_q < 1.0:
        raise DomainError("qpoch requires |q| < 1")
    arr = np.asarray(z, dtype=complex)
    if arr.size == 0:
        return arr.copy()
    if not np.all(np.isfinite(arr)):
        raise DomainError("qpoch argument must be finite")
    zmax = float(np.max(np.abs(arr)))
    n = product_terms(zmax, qm, policy)
    if n > policy.product_max_terms:
        raise ConvergenceError(
            f"q-Pochhammer product needs {n} terms (cap {policy.product_max_terms}) "
            f"for |z| = {zmax:.3g}, |q| = {qm.abs_q:.3g}"
        )
    out = np.ones_like(arr)
    for qj in _powers(qm.q, n):
        out *= 1.0 - arr * qj
    if np.ndim(z) == 0:
        return complex(out)
    return out


def qpoch_multi(zs, qm: QModulus, policy: TruncationPolicy = DEFAULT_POLICY):
    """(z1, z2, ...; q)_inf, the product of the individual q-Pochhammer symbols."""
    out = 1.0 + 0j
    for z in zs:
        out = out * qpoch(z, qm, policy)
    return out


def qratio(x, k: int, qm: QModulus, policy: TruncationPolicy = DEFAULT_POLICY):
    """(q^(1+k/2) / x; q)_inf / (q^(k/2) x; q)_inf.

    This ratio is the building block of every kernel in the package.  After
    cancelling common factors its only poles sit at x = q^(-|k|/2 - i),
    i >= 0, and its only zeros at x = q^(1 + |k|/2 + i).  Negative k is
    evaluated through qratio(x, -k) = (-1)^k q^(k/2) x^(-k) qratio(x, k), which
    avoids the removable 0/0 of the literal quotient.
    """
    x = np.asarray(x, dtype=complex) if np.ndim(x) else complex(x)
    if k < 0:
        j = -k
        return (-1) ** j * qpow_half(qm, j) * x ** (-j) * qratio(x, j, qm, policy)
    return qpoch(qpow_half(qm, k + 2) / x, qm, policy) / qpoch(qpow_half(qm, k) * x, qm, policy)


def ratio_pole_distance(x: complex, k: int, qm: QModulus) -> float:
    """Smallest relative distance |x / p - 1| from x to a pole p of ``qratio(., k)``."""
    return pochhammer_pole_distance(complex(x) * qpow_half(qm, abs(k)), qm)


def check_ratio(x: complex, k: int, qm: QModulus, policy: TruncationPolicy, what: str = "ratio") -> None:
    if ratio_pole_distance(x, k, qm) < policy.pole_guard_delta:
        raise PoleProximityError(f"{what}: argument {x} with index {k} is near a pole")


def pochhammer_pole_distance(z: complex, qm: QModulus) -> float:
    """Smallest relative distance from z to a zero q^(-r), r >= 0, of (z; q)_inf."""
    z = complex(z)
    best = math.inf
    p = 1.0 + 0j
    for _ in range(10_000):
        best = min(best, abs(z / p - 1.0))
        if abs(p) > 2.0 * abs(z) + 1.0:
            break
        p = p / qm.q
    return best


def verify_reflection(w: complex, n: int, qm: QModulus, policy: TruncationPolicy = DEFAULT_POLICY,
                      tol: float = 1e-10) -> Report:
    """Check (q^(1-n)/w; q)/(q^(-n) w; q) = q^n / (-w)^(2n) * (q^(1+n)/w; q)/(q^n w; q)."""
    w = complex(w)
    if w == 0:
        raise DomainError("reflection identity needs w != 0")
    n = int(n)
    for den in (qpow_half(qm, -2 * n) * w, qpow_half(qm, 2 * n) * w):
        if pochhammer_pole_distance(den, qm) < policy.pole_guard_delta:
            raise PoleProximityError(f"denominator argument {den} is near a zero of (.; q)_inf")
    start = time.perf_counter()
    lhs = qpoch(qpow_half(qm, 2 - 2 * n) / w, qm, policy) / qpoch(qpow_half(qm, -2 * n) * w, qm, policy)
    factor = qpow_half(qm, 2 * n) / (-w) ** (2 * n)
    rhs = factor * (qpoch(qpow_half(qm, 2 + 2 * n) / w, qm, policy) / qpoch(qpow_half(qm, 2 * n) * w, qm, policy))
    elapsed = (time.perf_counter() - start) * 1e3
    params = {"q": qm.q, "w": w, "n": n}
    return make_report("reflection", params, lhs, rhs, tol, policy.as_dict(), elapsed)
