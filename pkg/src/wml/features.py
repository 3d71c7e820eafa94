"""Weak moments, the feature map, and the objects derived from it.

The weak moment of order j pairs a model with the kernel:

    w_j = E[X^j phi(X)],

finite for every order and every model in the catalog because the
Gaussian window decays faster than any polynomial grows.  Two
evaluation routes are provided:

* the density route integrates x^j phi(x) f(x) over the model support;
* the characteristic-function route uses Parseval's identity.  With the
  forward transform Psi(u) = int psi(x) e^{-iux} dx and the model's
  char fn c(u) = E[e^{iuX}] = int f(x) e^{iux} dx, one has

      int f(x) psi(x) dx = (1 / 2 pi) int c(u) Psi(u) du,

  and for psi(x) = x^j phi(x) with a Gaussian window the transform
  Psi_j is available in closed form as a complex polynomial times the
  transform of the window itself (a Hermite-derivative identity).

The tilted law f phi / w_0 supplies weak cumulants; the boundedness of
x^j phi(x) supplies the influence bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .models import (
    KernelSpec,
    ModelFamily,
    ModelSpec,
    NoDensity,
    char_fn,
    density,
    kernel_eval,
    support,
    support_has_density,
)
from .quad import (
    IntegralResult,
    NonConvergence,
    QuadratureConfig,
    integrate_half_line,
    integrate_real_line,
)

__all__ = [
    "FeatureMapSpec",
    "MomentEstimate",
    "FeatureVector",
    "WeakCumulants",
    "weak_moment",
    "feature_map",
    "weak_char_fn",
    "weak_cumulants",
    "moments_to_cumulants",
    "influence_value",
    "influence_bound",
]

_PATHS = ("density", "charfn", "auto")


@dataclass(frozen=True)
class FeatureMapSpec:
    """Which weak moments to evaluate and how."""

    orders: tuple
    path: str = "auto"
    quadrature: QuadratureConfig = QuadratureConfig()

    def __post_init__(self):
        orders = tuple(int(j) for j in self.orders)
        object.__setattr__(self, "orders", orders)
        if len(orders) == 0:
            raise ValueError("at least one moment order is required")
        if any(j < 0 for j in orders):
            raise ValueError("moment orders must be nonnegative")
        if any(b <= a for a, b in zip(orders, orders[1:])):
            raise ValueError("moment orders must be strictly increasing")
        if self.path not in _PATHS:
            raise ValueError(f"path must be one of {_PATHS}, got {self.path!r}")


@dataclass(frozen=True)
class MomentEstimate:
    """One weak moment with its quadrature error and the route used."""

    value: float
    error: float
    path: str


@dataclass(frozen=True)
class FeatureVector:
    """Evaluated feature map: values w_{j_k} plus per-entry provenance."""

    values: np.ndarray
    errors: np.ndarray
    paths: tuple

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        e = np.asarray(self.errors, dtype=float)
        v.flags.writeable = False
        e.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "errors", e)


@dataclass(frozen=True)
class WeakCumulants:
    """Cumulants kappa_1..kappa_J of the kernel-tilted law f phi / w_0."""

    kappa: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.kappa, dtype=float)
        k.flags.writeable = False
        object.__setattr__(self, "kappa", k)


def _moment_integrand(m, k, j):
    # multiply x^j only where the damped base is nonzero: at points where
    # phi * f underflows to 0 the true product is far below double range,
    # while x^j alone may overflow
    def integrand(x):
        base = kernel_eval(k, x) * density(m, x)
        out = np.zeros_like(base)
        nz = base != 0.0
        out[nz] = x[nz] ** j * base[nz]
        return out

    return integrand


def _integrate_support(m, f, cfg) -> IntegralResult:
    if support(m) == "half":
        return integrate_half_line(f, cfg)
    return integrate_real_line(f, cfg)


def _require_converged(res: IntegralResult, what: str) -> IntegralResult:
    if not res.converged:
        raise NonConvergence(f"{what}: error {res.error_estimate:.3e} after budget exhausted", res)
    return res


def _window_transform_coeffs(j: int, k: KernelSpec) -> np.ndarray:
    """Ascending coefficients of the polynomial P_j with

        Psi_j(u) = int x^j phi(x) e^{-iux} dx = P_j(u) exp(-iuc - s^2 u^2 / 2).

    Differentiating Psi_0 once per order gives the recursion
    P_{j+1} = (c - i s^2 u) P_j + i P_j'.
    """
    s2 = k.s * k.s
    p = np.array([1.0 + 0.0j])
    for _ in range(j):
        nxt = np.zeros(p.size + 1, dtype=complex)
        nxt[: p.size] += k.c * p
        nxt[1:] += -1j * s2 * p
        if p.size > 1:
            nxt[: p.size - 1] += 1j * p[1:] * np.arange(1, p.size)
        p = nxt
    return p


def _charfn_moment(m, k, j, cfg) -> IntegralResult:
    coeffs = _window_transform_coeffs(j, k)
    s2 = k.s * k.s
    c = k.c

    def integrand(u):
        psi = np.polynomial.polynomial.polyval(u, coeffs) * np.exp(-1j * u * c - 0.5 * s2 * u * u)
        return char_fn(m, u) * psi / (2.0 * np.pi)

    return integrate_real_line(integrand, cfg.oscillatory())


def weak_moment(m: ModelSpec, k: KernelSpec, j: int, spec: FeatureMapSpec | None = None) -> MomentEstimate:
    """Weak moment w_j = E[X^j phi(X)] with an error estimate.

    ``spec.path`` selects the route: 'density' integrates against the
    model density, 'charfn' uses Parseval with the closed-form window
    transform, 'auto' prefers the density and falls back to the char-fn
    route when no density exists.
    """
    if spec is None:
        spec = FeatureMapSpec(orders=(j,))
    if j < 0:
        raise ValueError("moment order must be nonnegative")
    cfg = spec.quadrature

    if spec.path == "density":
        res = _require_converged(_integrate_support(m, _moment_integrand(m, k, j), cfg),
                                 f"weak moment j={j} (density path)")
        return MomentEstimate(float(np.real(res.value)), res.error_estimate, "density")
    if spec.path == "charfn":
        res = _require_converged(_charfn_moment(m, k, j, cfg), f"weak moment j={j} (charfn path)")
        return MomentEstimate(float(np.real(res.value)), res.error_estimate, "charfn")
    # auto
    try:
        res = _require_converged(_integrate_support(m, _moment_integrand(m, k, j), cfg),
                                 f"weak moment j={j} (density path)")
        return MomentEstimate(float(np.real(res.value)), res.error_estimate, "density")
    except NoDensity:
        res = _require_converged(_charfn_moment(m, k, j, cfg), f"weak moment j={j} (charfn path)")
        return MomentEstimate(float(np.real(res.value)), res.error_estimate, "charfn")


def feature_map(fam: ModelFamily, theta, k: KernelSpec, spec: FeatureMapSpec) -> FeatureVector:
    """Evaluate the feature map theta -> (w_{j_0}, ..., w_{j_K})."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if theta.size != fam.p:
        raise ValueError(f"family {fam.name} expects {fam.p} parameters, got {theta.size}")
    m = fam.make(theta)
    values, errors, paths = [], [], []
    for j in spec.orders:
        try:
            est = weak_moment(m, k, j, spec)
        except (NoDensity, NonConvergence) as exc:
            raise type(exc)(f"feature map failed at order j={j}: {exc}") from exc
        values.append(est.value)
        errors.append(est.error)
        paths.append(est.path)
    return FeatureVector(np.array(values), np.array(errors), tuple(paths))


def weak_char_fn(m: ModelSpec, k: KernelSpec, u: float, cfg: QuadratureConfig | None = None) -> complex:
    """Weak characteristic function E[e^{iuX} phi(X)] by complex quadrature
    of the density pairing (entire in u)."""
    if cfg is None:
        cfg = QuadratureConfig()
    if not support_has_density(m):
        raise NoDensity(f"{type(m).__name__}: the weak char fn is computed on the density path")
    f = lambda x: np.exp(1j * u * x) * kernel_eval(k, x) * density(m, x)
    res = _require_converged(_integrate_support(m, f, cfg.oscillatory()), f"weak char fn at u={u}")
    return complex(res.value)


def moments_to_cumulants(raw: np.ndarray) -> np.ndarray:
    """Convert raw moments (m_1, ..., m_J) to cumulants (kappa_1, ..., kappa_J)
    by the standard recursion

        kappa_r = m_r - sum_{i=1}^{r-1} C(r-1, i-1) kappa_i m_{r-i}.
    """
    raw = np.asarray(raw, dtype=float)
    J = raw.size
    kappa = np.zeros(J)
    for r in range(1, J + 1):
        acc = raw[r - 1]
        for i in range(1, r):
            acc -= comb(r - 1, i - 1) * kappa[i - 1] * raw[r - i - 1]
        kappa[r - 1] = acc
    return kappa


def weak_cumulants(m: ModelSpec, k: KernelSpec, J: int, cfg: QuadratureConfig | None = None) -> WeakCumulants:
    """Cumulants of the tilted probability f phi / w_0 up to order J <= 6."""
    if not (1 <= J <= 6):
        raise ValueError("cumulant order must lie in [1, 6]")
    if cfg is None:
        cfg = QuadratureConfig()
    if not support_has_density(m):
        raise NoDensity("weak cumulants need pointwise f phi (a density-bearing model)")
    spec = FeatureMapSpec(orders=tuple(range(J + 1)), path="density", quadrature=cfg)
    w = [weak_moment(m, k, r, spec).value for r in range(J + 1)]
    tilted = np.array(w[1:]) / w[0]
    return WeakCumulants(moments_to_cumulants(tilted))


def influence_value(k: KernelSpec, j: int, x: float, w_j: float) -> float:
    """Influence function of the weak-moment functional at x: x^j phi(x) - w_j."""
    return float(x**j * kernel_eval(k, x) - w_j)


def influence_bound(k: KernelSpec, j: int) -> float:
    """sup_x |x^j phi(x)|, the worst-case contribution of one observation.

    Centred kernels admit the closed form: the maximiser is x = +-s sqrt(j)
    with value (s sqrt(j))^j e^{-j/2} / sqrt(2 pi s^2) for j >= 1 (for
    j = 0 the supremum is phi(c)).  Off-centre kernels are handled by a
    dense grid search with local refinement.
    """
    if j < 0:
        raise ValueError("order must be nonnegative")
    if j == 0:
        return float(kernel_eval(k, k.c))
    if k.c == 0.0:
        r = k.s * np.sqrt(j)
        return float(r**j * np.exp(-0.5 * j) / (np.sqrt(2.0 * np.pi) * k.s))
    half_width = abs(k.c) + k.s * (np.sqrt(j) + 12.0)
    grid = np.linspace(-half_width, half_width, 400001)
    vals = np.abs(grid**j * kernel_eval(k, grid))
    best = grid[int(np.argmax(vals))]
    step = grid[1] - grid[0]
    for _ in range(3):
        local = np.linspace(best - step, best + step, 2001)
        lv = np.abs(local**j * kernel_eval(k, local))
        best = local[int(np.argmax(lv))]
        step = local[1] - local[0]
    return float(np.abs(best**j * kernel_eval(k, best)))
