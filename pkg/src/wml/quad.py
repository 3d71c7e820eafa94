"""Adaptive quadrature over the real line and the positive half-line.

All pairings in this package reduce to one-dimensional integrals of
rapidly decaying (possibly oscillatory, possibly complex-valued)
integrands.  The engine here is deliberately simple and robust:

* the real line is mapped to (-1, 1) by ``x = t / (1 - t^2)``, which is
  smooth, monotone, and preserves exponential decay of the integrand;
* each panel is integrated with the embedded 7-point Gauss / 15-point
  Kronrod pair, whose difference provides the local error estimate;
* panels are bisected worst-first until the global estimate meets
  ``max(abs_tol, rel_tol * |value|)`` or the subdivision budget runs out.

The half-line is reduced to the real line by the logarithmic
substitution ``x = e^y``, so endpoint behaviour at 0 becomes ordinary
decay at ``y -> -inf``.

Everything is computed in 64-bit floating point; integrands are called
with a numpy array of nodes and must return an array of values.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

__all__ = [
    "QuadratureConfig",
    "IntegralResult",
    "QuadratureError",
    "NonConvergence",
    "NonFiniteEvaluation",
    "integrate_real_line",
    "integrate_half_line",
    "gauss_hermite",
    "hermite_rule",
]


class QuadratureError(Exception):
    """Base class for quadrature failures."""


class NonFiniteEvaluation(QuadratureError):
    """The integrand produced NaN or infinity at a quadrature node."""


class NonConvergence(QuadratureError):
    """The subdivision budget was exhausted before the tolerance was met.

    Carries the best available estimate in ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and budgets for the adaptive engine.

    ``node_count`` sizes fixed-node rules (Gauss-Hermite); the adaptive
    rule always uses the embedded 7/15 pair per panel.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000
    node_count: int = 200

    def __post_init__(self):
        if not (self.rel_tol > 0.0):
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if not (self.abs_tol > 0.0):
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol}")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.node_count < 1:
            raise ValueError("node_count must be >= 1")

    def oscillatory(self) -> "QuadratureConfig":
        """Variant with the raised subdivision budget used for oscillatory
        integrands (sin(2*pi*log x) factors, e^{iux} pairings)."""
        return replace(self, max_subdivisions=max(self.max_subdivisions, 8000))


@dataclass(frozen=True)
class IntegralResult:
    """Outcome of one adaptive integration."""

    value: complex
    error_estimate: float
    evaluations: int
    converged: bool


# 7-point Gauss / 15-point Kronrod pair on [-1, 1] (QUADPACK dqk15).
_XGK = np.array([
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
])
_WGK = np.array([
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
])
_WG = np.array([
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
])

_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny


def _kronrod_panel(f, a, b):
    """Integrate one panel, returning (value, error_estimate, evaluations).

    The error model is QUADPACK's: the raw Gauss/Kronrod difference is
    rescaled by the panel's variation so that smooth panels are not
    flagged as inaccurate, with a floor at 50 ulp of the absolute
    integral.
    """
    centr = 0.5 * (a + b)
    hlgth = 0.5 * (b - a)
    nodes = np.concatenate((centr - hlgth * _XGK[:7], centr + hlgth * _XGK[:7], [centr]))
    fv = np.asarray(f(nodes))
    if fv.shape != nodes.shape:
        raise ValueError("integrand must return one value per node")
    if not np.all(np.isfinite(fv.view(float) if fv.dtype.kind == "c" else fv)):
        bad = nodes[~np.isfinite(np.abs(fv))]
        raise NonFiniteEvaluation(f"integrand returned a non-finite value near x={bad[:3]}")

    flo, fhi, fc = fv[:7], fv[7:14], fv[14]
    resk = np.dot(_WGK[:7], flo + fhi) + _WGK[7] * fc
    resg = np.dot(_WG[:3], flo[1::2] + fhi[1::2]) + _WG[3] * fc
    resabs = np.dot(_WGK[:7], np.abs(flo) + np.abs(fhi)) + _WGK[7] * abs(fc)
    reskh = 0.5 * resk
    resasc = np.dot(_WGK[:7], np.abs(flo - reskh) + np.abs(fhi - reskh)) + _WGK[7] * abs(fc - reskh)

    value = resk * hlgth
    resabs *= abs(hlgth)
    resasc *= abs(hlgth)
    abserr = abs((resk - resg) * hlgth)
    if resasc != 0.0 and abserr != 0.0:
        abserr = resasc * min(1.0, (200.0 * abserr / resasc) ** 1.5)
    if resabs > _TINY / (50.0 * _EPS):
        abserr = max(50.0 * _EPS * resabs, abserr)
    return value, abserr, 15


def _adaptive(f, a, b, cfg: QuadratureConfig) -> IntegralResult:
    """Worst-panel-first bisection of [a, b] with the embedded pair."""
    value, err, nev = _kronrod_panel(f, a, b)
    heap = [(-err, 0, a, b, value, err)]
    counter = 1
    val_sum, err_sum = value, err
    evaluations = nev
    subdivisions = 0
    stuck_err = 0.0  # panels too narrow to split further

    while True:
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(val_sum))
        if err_sum <= tol:
            return IntegralResult(val_sum, err_sum, evaluations, True)
        if subdivisions >= cfg.max_subdivisions or not heap:
            return IntegralResult(val_sum, err_sum, evaluations, False)

        _, _, pa, pb, pval, perr = heapq.heappop(heap)
        mid = 0.5 * (pa + pb)
        if mid <= pa or mid >= pb:
            # panel narrower than one ulp; its error is irreducible
            stuck_err += perr
            if stuck_err > tol:
                return IntegralResult(val_sum, err_sum, evaluations, False)
            continue
        v1, e1, n1 = _kronrod_panel(f, pa, mid)
        v2, e2, n2 = _kronrod_panel(f, mid, pb)
        evaluations += n1 + n2
        subdivisions += 1
        val_sum += (v1 + v2) - pval
        err_sum += (e1 + e2) - perr
        heapq.heappush(heap, (-e1, counter, pa, mid, v1, e1))
        heapq.heappush(heap, (-e2, counter + 1, mid, pb, v2, e2))
        counter += 2


def integrate_real_line(f, cfg: QuadratureConfig | None = None) -> IntegralResult:
    """Approximate the integral of ``f`` over the whole real line.

    ``f`` must accept an ndarray of points and return finite values; it
    must be absolutely integrable.  Uses the substitution
    ``x = t / (1 - t^2)`` with Jacobian ``(1 + t^2) / (1 - t^2)^2``.
    Beyond the representable floating-point range (|x| > ~1e150) the
    transformed integrand is treated as zero, which for an integrable
    ``f`` discards a tail of mass below 1e-150.
    """
    if cfg is None:
        cfg = QuadratureConfig()

    def transformed(t):
        one = 1.0 - t * t
        good = one > 1e-150
        x = t[good] / one[good]
        jac = (1.0 + t[good] * t[good]) / (one[good] * one[good])
        fx = np.asarray(f(x))
        vals = np.zeros(t.shape, dtype=np.result_type(fx.dtype, np.float64))
        vals[good] = fx * jac
        return vals

    return _adaptive(transformed, -1.0, 1.0, cfg)


def integrate_half_line(f, cfg: QuadratureConfig | None = None) -> IntegralResult:
    """Approximate the integral of ``f`` over (0, inf).

    Applies the logarithmic substitution ``x = e^y`` and reuses
    :func:`integrate_real_line` on ``y -> f(e^y) e^y``.  The substituted
    range is clipped to |log x| <= 64, i.e. x in [e^-64, e^64]; outside
    it the integrand is treated as zero.  Every density/kernel pairing in
    this package is identically zero in double precision well inside
    that envelope, and the clip keeps naive power-times-density
    integrands evaluable (x^j stays finite there for j <= 11; compose
    more extreme products in exponent space).
    """

    def substituted(y):
        good = np.abs(y) < 64.0
        x = np.exp(y[good])
        fx = np.asarray(f(x))
        vals = np.zeros(y.shape, dtype=np.result_type(fx.dtype, np.float64))
        vals[good] = fx * x
        return vals

    return integrate_real_line(substituted, cfg)


@lru_cache(maxsize=64)
def hermite_rule(n: int):
    """Nodes and weights of the n-point Gauss-Hermite rule (weight e^{-x^2}).

    Computed by the Golub-Welsch eigenvalue method on the Jacobi matrix;
    nodes are symmetrised so the rule is exactly even.
    """
    if n < 1:
        raise ValueError("node count must be >= 1")
    if n == 1:
        return np.array([0.0]), np.array([np.sqrt(np.pi)])
    off = np.sqrt(np.arange(1, n) / 2.0)
    jac = np.diag(off, 1) + np.diag(off, -1)
    nodes, vecs = np.linalg.eigh(jac)
    weights = np.sqrt(np.pi) * vecs[0] ** 2
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def gauss_hermite(f, n: int, center: float = 0.0, scale: float = 1.0) -> float:
    """Fixed-node rule: sum of ``w_i * f(center + scale * x_i)`` for the
    degree-n Hermite rule, exact for polynomials of degree <= 2n - 1
    under the weight e^{-x^2}."""
    if scale <= 0.0:
        raise ValueError("scale must be positive")
    nodes, weights = hermite_rule(n)
    vals = np.asarray(f(center + scale * nodes))
    if not np.all(np.isfinite(np.abs(vals))):
        raise NonFiniteEvaluation("integrand returned a non-finite value at a Hermite node")
    return float(np.dot(weights, vals))
