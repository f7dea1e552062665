"""Sum-integrals over Z x unit circle.

The measure [d_m z] = (1 - q^m z^2)(1 - q^m z^-2) q^-m dz / (4 pi i z) is split
in two: ``measure_weight`` returns the z, m dependent product and the
constant dz / (4 pi i z) = d(theta) / (4 pi) lives in ``MEASURE_NORM``.
Trapezoid sums are plain means over the grid, so a shell contributes
``MEASURE_NORM * mean(weight * kernel)``.  ``MEASURE_NORM`` is applied in
``_shell`` and nowhere else.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from qbailey.errors import ConvergenceError, PoleProximityError
from qbailey.qkernel import DEFAULT_POLICY, QModulus, TruncationPolicy, qpow_half

# (1 / 4 pi) * (2 pi / K) * sum_k = MEASURE_NORM * mean_k
MEASURE_NORM = 0.5


@lru_cache(maxsize=64)
def _nodes(k: int) -> np.ndarray:
    # (2 pi j) / K: the even nodes of the 2K grid are bit-identical to the K grid
    theta = (2.0 * np.pi * np.arange(k)) / k
    z = np.exp(1j * theta)
    z.flags.writeable = False
    return z


@dataclass(frozen=True)
class UnitCircleGrid:
    """K equispaced nodes exp(2 pi i k / K) on the unit circle, K a power of two."""

    node_count: int

    def __post_init__(self):
        k = self.node_count
        if k < 8 or k & (k - 1):
            raise ValueError(f"node_count must be a power of two >= 8, got {k}")

    @property
    def nodes(self) -> np.ndarray:
        return _nodes(self.node_count)

    def refined(self) -> "UnitCircleGrid":
        return UnitCircleGrid(2 * self.node_count)


class DiscreteKernel:
    """A map (z, m) -> complex, vectorized over arrays of z.

    ``support`` optionally lists the only indices m where the kernel is
    nonzero.  With ``memoize`` the values for each (m, z-array) are cached;
    the cache tolerates concurrent readers and duplicate writes.
    """

    def __init__(self, fn: Callable, params: dict | None = None,
                 support: Iterable[int] | None = None, memoize: bool = False):
        self._fn = fn
        self.params = dict(params or {})
        self.support = None if support is None else tuple(sorted(set(int(m) for m in support)))
        self.memoize = memoize
        self._cache: dict = {}

    def __call__(self, z, m: int):
        m = int(m)
        if self.support is not None and m not in self.support:
            return np.zeros(np.shape(z), dtype=complex) if np.ndim(z) else 0j
        if not self.memoize:
            return self._fn(z, m)
        zz = np.asarray(z, dtype=complex)
        key = (m, zz.shape, zz.tobytes())
        hit = self._cache.get(key)
        if hit is None:
            hit = self._fn(z, m)
            self._cache[key] = hit
        return hit

    def __add__(self, other: "DiscreteKernel") -> "DiscreteKernel":
        support = None
        if self.support is not None and other.support is not None:
            support = set(self.support) | set(other.support)
        return DiscreteKernel(lambda z, m: self(z, m) + other(z, m), support=support)

    def __rmul__(self, c) -> "DiscreteKernel":
        return DiscreteKernel(lambda z, m: c * self(z, m), self.params, self.support)

    @classmethod
    def zero(cls) -> "DiscreteKernel":
        return cls(lambda z, m: np.zeros(np.shape(z), dtype=complex), support=())

    @classmethod
    def delta(cls, n0: int = 0, value: complex = 1.0) -> "DiscreteKernel":
        """The kernel equal to ``value`` at index n0 for every z and zero elsewhere."""
        return cls(lambda z, m: np.full(np.shape(z), value, dtype=complex),
                   {"delta": n0}, support=(n0,))


def measure_weight(z, m: int, qm: QModulus):
    """(1 - q^m z^2)(1 - q^m z^-2) / q^m."""
    qm_m = qpow_half(qm, 2 * m)
    z2 = np.asarray(z, dtype=complex) ** 2 if np.ndim(z) else complex(z) ** 2
    return (1.0 - qm_m * z2) * (1.0 - qm_m / z2) / qm_m


def contour_integral(f: Callable, grid: UnitCircleGrid):
    """Trapezoid mean (1/K) sum_k f(z_k) of f over the grid.

    For a Laurent polynomial of degree < K this is its constant term exactly.
    """
    return np.mean(f(grid.nodes), axis=-1)


def adaptive_contour_integral(f: Callable, policy: TruncationPolicy = DEFAULT_POLICY,
                              scale: float = 0.0):
    """Nested-doubling trapezoid mean of f; returns (value, node_count).

    Starting at ``quad_nodes_min``, the grid is doubled (reusing the old nodes)
    until two successive estimates differ by at most quad_eps times the larger
    of their magnitude and ``scale``.
    """
    k = policy.quad_nodes_min
    est = np.mean(f(_nodes(k)), axis=-1)
    while True:
        k2 = 2 * k
        if k2 > policy.quad_nodes_max:
            raise ConvergenceError(
                f"trapezoid rule not converged at {k} nodes (cap {policy.quad_nodes_max})"
            )
        odd = _nodes(k2)[1::2]
        new = 0.5 * (est + np.mean(f(odd), axis=-1))
        ref = max(float(np.max(np.abs(new))), scale)
        if float(np.max(np.abs(new - est))) <= policy.quad_eps * ref:
            return new, k2
        est, k = new, k2


@dataclass(frozen=True)
class PoleFamily:
    """Moduli of the first members of a pole family of an integrand in z.

    ``side`` is ``"outer"`` for families accumulating at infinity (which must
    stay outside the unit circle) and ``"inner"`` for families accumulating at
    zero (which must stay inside).
    """

    label: str
    side: str
    moduli: tuple[float, ...]


@dataclass
class PoleGuardResult:
    passed: bool
    offending: list[tuple[str, str, float]] = field(default_factory=list)

    def __bool__(self):
        return self.passed

    def describe(self) -> str:
        return "; ".join(f"{label} ({why}) at |z| = {mod:.6g}" for label, why, mod in self.offending)


def pole_guard(families: Iterable[PoleFamily], policy: TruncationPolicy = DEFAULT_POLICY) -> PoleGuardResult:
    """Reject pole configurations that touch or cross the unit circle."""
    bad = []
    for fam in families:
        for mod in fam.moduli:
            if abs(mod - 1.0) < policy.pole_guard_delta:
                bad.append((fam.label, "within guard band", mod))
            elif fam.side == "outer" and mod < 1.0:
                bad.append((fam.label, "wrong side: inside", mod))
            elif fam.side == "inner" and mod > 1.0:
                bad.append((fam.label, "wrong side: outside", mod))
    return PoleGuardResult(not bad, bad)


def factor_pole_families(points: Sequence[tuple[complex, int]], m: int, qm: QModulus,
                         depth: int = 3) -> list[PoleFamily]:
    """Pole families of prod_j qratio(a_j z, n_j + m) qratio(a_j / z, n_j - m).

    Uses the poles left after cancelling common numerator and denominator
    factors: qratio(x, k) has poles only at x = q^(-|k|/2 - i).
    """
    aq = qm.abs_q
    fams = []
    for idx, (a, n) in enumerate(points):
        ra = abs(a)
        k_out = abs(n + m)
        k_in = abs(n - m)
        fams.append(PoleFamily(f"a{idx + 1}*z, index {n + m}", "outer",
                               tuple(aq ** (-k_out / 2 - i) / ra for i in range(depth))))
        fams.append(PoleFamily(f"a{idx + 1}/z, index {n - m}", "inner",
                               tuple(ra * aq ** (k_in / 2 + i) for i in range(depth))))
    return fams


@dataclass
class SumIntegral:
    value: complex | np.ndarray
    nodes: int
    window: int


def _shell(integrand, m, qm, policy, nodes, scale):
    def f(z):
        return measure_weight(z, m, qm) * integrand(z, m)

    if nodes is not None:
        val = contour_integral(f, UnitCircleGrid(nodes))
        used = nodes
    else:
        val, used = adaptive_contour_integral(f, policy, scale / MEASURE_NORM)
    return MEASURE_NORM * val, used


def sum_integral(integrand: Callable, qm: QModulus, policy: TruncationPolicy = DEFAULT_POLICY, *,
                 nodes: int | None = None, window: int | None = None,
                 support: Sequence[int] | None = None,
                 families: Callable[[int], list[PoleFamily]] | None = None) -> SumIntegral:
    """sum_{m in Z} int_T [d_m z] integrand(z, m).

    The integrand may return an array of shape (..., K) for K nodes; the result
    then has shape (...).  Shells are added in the fixed order 0, +-1, +-2, ...
    With ``window`` the sum runs over |m| <= window exactly; otherwise it stops
    once two consecutive shells each contribute less than sum_tail_eps of the
    accumulated magnitude.  ``nodes`` fixes the trapezoid grid; otherwise every
    shell is refined adaptively.  ``families(m)`` supplies pole families that
    are checked with ``pole_guard`` before each shell is evaluated.
    """

    def shell(m, scale):
        if families is not None:
            res = pole_guard(families(m), policy)
            if not res:
                raise PoleProximityError(f"shell m = {m}: {res.describe()}")
        return _shell(integrand, m, qm, policy, nodes, scale)

    if support is not None:
        ms = sorted(set(int(m) for m in support), key=lambda m: (abs(m), -m))
        if window is not None:
            ms = [m for m in ms if abs(m) <= window]
        acc = 0j
        used = 0
        for m in ms:
            val, k = shell(m, float(np.max(np.abs(acc))))
            acc = acc + val
            used = max(used, k)
        return SumIntegral(acc, used or (nodes or 0), max((abs(m) for m in ms), default=0))

    acc, used = shell(0, 0.0)
    quiet = 0
    big_m = 0
    while True:
        if window is not None and big_m >= window:
            break
        big_m += 1
        if window is None and big_m > policy.sum_window_max:
            raise ConvergenceError(f"lattice sum not converged within |m| <= {policy.sum_window_max}")
        scale = float(np.max(np.abs(acc)))
        plus, k1 = shell(big_m, scale)
        minus, k2 = shell(-big_m, scale)
        contrib = plus + minus
        acc = acc + contrib
        used = max(used, k1, k2)
        if window is None:
            mag = float(np.max(np.abs(acc)))
            if float(np.max(np.abs(contrib))) < policy.sum_tail_eps * mag:
                quiet += 1
                if quiet >= 2:
                    break
            else:
                quiet = 0
    return SumIntegral(acc, used, big_m)


def z_sum_integral(kernel: Callable, qm: QModulus, policy: TruncationPolicy = DEFAULT_POLICY,
                   grid: UnitCircleGrid | None = None):
    """Value of sum_m int [d_m z] kernel(z, m); adaptive unless a grid is given."""
    support = getattr(kernel, "support", None)
    nodes = None if grid is None else grid.node_count
    return sum_integral(kernel, qm, policy, nodes=nodes, support=support).value


def symmetric_sum_integral(integrand: Callable, qm: QModulus, policy: TruncationPolicy, *,
                           nodes: int, window: int) -> SumIntegral:
    """Fixed-grid sum folding shell -m onto shell m.

    Valid only for integrands invariant under (m, z) -> (-m, 1/z); serves as an
    independent cross-check of ``sum_integral``.
    """
    grid = UnitCircleGrid(nodes)
    acc = MEASURE_NORM * contour_integral(lambda z: measure_weight(z, 0, qm) * integrand(z, 0), grid)
    for m in range(1, window + 1):
        acc = acc + 2.0 * MEASURE_NORM * contour_integral(
            lambda z: measure_weight(z, m, qm) * integrand(z, m), grid)
    return SumIntegral(acc, nodes, window)


def shell_values(integrand: Callable, qm: QModulus, m: int, nodes: int):
    """Single-shell value MEASURE_NORM * mean(weight * integrand) on a fixed grid."""
    grid = UnitCircleGrid(nodes)
    return MEASURE_NORM * contour_integral(lambda z: measure_weight(z, m, qm) * integrand(z, m), grid)

