"""Exact violation volume of the singlet for the Bell-1964 settings.

With ``a`` fixed on the z axis the remaining settings are charted by
``x = cos(theta_b)``, ``y = cos(theta_c)`` and ``z = cos(phi)**2``. For a
fixed ``z`` the violating part of the ``x``-``y`` square (half ``y > x``) is
bounded below by :func:`y_boundary` and above by ``y = 1``; its area is
``A(z)``. Folding the azimuth-sum weight and both halves gives

    V = 4 pi * integral_0^1 A(z) / sqrt(z (1 - z)) dz = 16 pi^2 / 3

out of a total setting volume of ``16 pi^2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

TOTAL_VOLUME = 16 * math.pi**2
EXACT_VOLUME = 16 * math.pi**2 / 3

SERIES_CROSSOVER = 0.9
SERIES_MAX_TERMS = 10**6
QUADRATURE_TOL_FLOOR = 1e-13


class Method(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"
    SERIES = "series"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class ReducedCoordinates:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not (-1 <= self.x <= 1 and -1 <= self.y <= 1 and 0 <= self.z <= 1):
            raise ValueError(f"reduced coordinates out of range: {self}")

    @classmethod
    def from_angles(cls, theta_b: float, theta_c: float, phi: float) -> "ReducedCoordinates":
        return cls(math.cos(theta_b), math.cos(theta_c), math.cos(phi) ** 2)


# the four azimuth-difference intervals in which cos(phi) >= 0
PHI_CELLS = (
    (-2 * math.pi, -1.5 * math.pi),
    (-0.5 * math.pi, 0.0),
    (0.0, 0.5 * math.pi),
    (1.5 * math.pi, 2 * math.pi),
)


@dataclass(frozen=True)
class VolumeResult:
    volume: float
    total: float
    relative: float
    method: Method
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "volume": self.volume,
            "total": self.total,
            "relative": self.relative,
            "method": self.method.value,
            **{f"diag_{k}": v for k, v in self.diagnostics.items()},
        }


def _result(volume: float, method: Method, **diagnostics) -> VolumeResult:
    return VolumeResult(volume, TOTAL_VOLUME, volume / TOTAL_VOLUME, method, diagnostics)


def y_boundary(x: float, z: float) -> float:
    """Lower edge ``y`` of the violating region at fixed ``z = cos(phi)**2``."""
    if not (-1 <= x <= 1 and 0 <= z <= 1):
        raise ValueError(f"y_boundary needs x in [-1, 1] and z in [0, 1], got ({x}, {z})")
    if x == -1 and z == 0:
        raise ValueError("y_boundary is indeterminate (0/0) at x = -1, z = 0")
    num = (1 + x) - z * (1 - x)
    den = (1 + x) + z * (1 - x)
    return num / den


def area_closed(z):
    """Closed-form area ``A(z)``; loses accuracy as ``z -> 1``.

    Accepts scalars or arrays. The endpoints take their limits ``A(0) = 0``
    and ``A(1) = 2``.
    """
    z_arr = np.asarray(z, dtype=float)
    out = np.empty_like(z_arr)
    lo = z_arr <= 0
    hi = z_arr >= 1
    mid = ~(lo | hi)
    zm = z_arr[mid]
    out[mid] = 2 - 2 / (1 - zm) ** 2 * (2 * zm * np.log(zm) + (1 - zm**2))
    out[lo] = 0.0
    out[hi] = 2.0
    return float(out) if out.ndim == 0 else out


def area_series(z: float, rel_tol: float = 1e-16) -> float:
    """``A(z) = 4 z sum_n (1 - z)**n / (n + 2)``, stable near ``z = 1``.

    Summation stops once the geometric bound on the remaining tail,
    ``term / z``, falls below ``rel_tol`` times the running sum.
    """
    if not 0 <= z <= 1:
        raise ValueError(f"z must lie in [0, 1], got {z}")
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    if z == 0:
        return 0.0
    q = 1.0 - z
    total = 0.0
    power = 1.0
    for n in range(SERIES_MAX_TERMS):
        term = power / (n + 2)
        total += term
        power *= q
        if power / (n + 3) <= rel_tol * total * z:
            return 4 * z * total
    raise ArithmeticError(f"area series did not converge in {SERIES_MAX_TERMS} terms at z={z}")


def _area_series_array(z: np.ndarray) -> np.ndarray:
    q = 1.0 - z
    total = np.zeros_like(z)
    power = np.ones_like(z)
    n = 0
    while True:
        total += power / (n + 2)
        power = power * q
        n += 1
        if np.all(power / (n + 2) <= 1e-17 * total * z):
            return 4 * z * total


def area(z):
    """Area function with the closed form below ``z = 0.9`` and the series above."""
    z_arr = np.asarray(z, dtype=float)
    out = np.asarray(area_closed(z_arr), dtype=float).copy()
    near_one = z_arr > SERIES_CROSSOVER
    if np.any(near_one):
        out[near_one] = _area_series_array(z_arr[near_one])
    return float(out) if out.ndim == 0 else out


def integrand_u(u, area_fn: Callable = area):
    """Smooth form of the folded integrand after ``z = sin(u)**2``."""
    return 8 * math.pi * area_fn(np.sin(u) ** 2)


def _gauss_legendre_panels(f: Callable, a: float, b: float, panels: int, order: int) -> float:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    u = mid[:, None] + half[:, None] * nodes[None, :]
    vals = np.asarray(f(u.ravel()), dtype=float).reshape(u.shape)
    # ordered per-panel reduction keeps the result independent of evaluation order
    per_panel = half * (vals @ weights)
    return math.fsum(per_panel)


def volume_quadrature(
    abs_tol: float = 1e-10,
    *,
    area_fn: Callable = area,
    order: int = 16,
    max_panels: int = 2**16,
) -> VolumeResult:
    """Integrate the folded volume by composite Gauss-Legendre in ``u``.

    Panels are doubled until two successive estimates differ by less than
    ``abs_tol``; the finer one is returned.
    """
    if not abs_tol >= QUADRATURE_TOL_FLOOR:
        raise ValueError(
            f"abs_tol={abs_tol!r} is below the achievable floor {QUADRATURE_TOL_FLOOR:g}"
        )
    f = lambda u: integrand_u(u, area_fn)
    panels = 1
    prev = _gauss_legendre_panels(f, 0.0, math.pi / 2, panels, order)
    while True:
        panels *= 2
        cur = _gauss_legendre_panels(f, 0.0, math.pi / 2, panels, order)
        diff = abs(cur - prev)
        if diff < abs_tol:
            break
        if panels >= max_panels:
            raise ArithmeticError(f"quadrature did not reach {abs_tol:g} (last change {diff:.3e})")
        prev = cur
    return _result(
        cur, Method.QUADRATURE, panels=panels, order=order, nodes=panels * order, last_change=diff
    )


def gamma_ratios(n_terms: int) -> np.ndarray:
    """``Gamma(n + 1/2) / Gamma(n + 3)`` for ``n < n_terms`` by forward recurrence."""
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    n = np.arange(n_terms - 1, dtype=float)
    factors = np.concatenate(([math.sqrt(math.pi) / 2], (n + 0.5) / (n + 3)))
    return np.cumprod(factors)


def volume_series_partial_sums(n_terms: int) -> np.ndarray:
    """All partial sums ``S_1 .. S_N`` of ``8 pi^(3/2) sum Gamma(n+1/2)/Gamma(n+3)``."""
    return 8 * math.pi**1.5 * np.cumsum(gamma_ratios(n_terms))


def volume_series_partial(n_terms: int) -> float:
    return float(volume_series_partial_sums(n_terms)[-1])


def series_tail_bound(n_terms: int) -> float:
    """Upper bound on ``16 pi^2/3 - S_N``.

    Gautschi's inequality gives ``Gamma(n+1/2)/Gamma(n+1) < n**(-1/2)``, so
    each omitted term is below ``n**(-5/2)``; the tail is then bounded by
    the integral of ``t**(-5/2)`` from ``N - 1``.
    """
    if n_terms < 2:
        return math.inf
    return 8 * math.pi**1.5 * (2 / 3) * (n_terms - 1) ** -1.5


def hyp2f1_at_one(a: float, b: float, c: float) -> float:
    """Gauss summation ``2F1(a, b; c; 1)``, valid for ``c > a + b``."""
    if not c > a + b:
        raise ValueError("2F1(a, b; c; 1) converges only for c > a + b")
    lg = math.lgamma
    return math.exp(lg(c) + lg(c - a - b) - lg(c - a) - lg(c - b))


def volume_series(n_terms: int) -> VolumeResult:
    s = volume_series_partial(n_terms)
    return _result(s, Method.SERIES, terms=n_terms, tail_bound=series_tail_bound(n_terms))


def exact_volume() -> VolumeResult:
    """``16 pi^2 / 3`` with the hypergeometric closure as a diagnostic."""
    # sum_n Gamma(n+1/2)/Gamma(n+3) = Gamma(1/2)/2 * 2F1(1/2, 1; 3; 1) = 2 sqrt(pi)/3
    gamma_sum = math.sqrt(math.pi) / 2 * hyp2f1_at_one(0.5, 1.0, 3.0)
    return VolumeResult(
        EXACT_VOLUME,
        TOTAL_VOLUME,
        1 / 3,
        Method.CLOSED_FORM,
        {"gamma_series_sum": gamma_sum, "hyp2f1": hyp2f1_at_one(0.5, 1.0, 3.0)},
    )


def boundary_table(z_values, x_values):
    """Rows ``(z, x, y_boundary, A(z))``.

    At the indeterminate corner ``(x, z) = (-1, 0)`` the curve is continued
    along fixed ``z = 0``, where it is identically ``y = 1``.
    """
    rows = []
    for z in z_values:
        a = area(z)
        for x in x_values:
            y = 1.0 if (x == -1 and z == 0) else y_boundary(x, z)
            rows.append((float(z), float(x), float(y), float(a)))
    return rows
