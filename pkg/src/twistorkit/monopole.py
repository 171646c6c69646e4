"""Complex one-parameter action on strongly centred charge-2 monopoles.

Points are rational maps ``(a z + b) / (z**2 - c)`` with ``b**2 - c a**2 = 1``.
With ``beta**2 = c`` the action multiplies ``p(beta) = a beta + b`` by
``exp(lam beta)``; every matrix entry is even in ``beta`` so no square-root
branch is ever chosen.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

CONSTRAINT_TOL = 1e-12
STABILIZER_TOL = 1e-10
CHART_TOL = 1e-12


class ChartError(ValueError):
    pass


def cosh_sqrt(x: complex) -> complex:
    """``cosh(sqrt(x))``, entire in ``x``."""
    if abs(x) < 1e-6:
        return 1 + x / 2 + x * x / 24 + x**3 / 720
    return cmath.cosh(cmath.sqrt(x))


def sinhc_sqrt(x: complex) -> complex:
    """``sinh(sqrt(x)) / sqrt(x)``, entire in ``x``."""
    if abs(x) < 1e-6:
        return 1 + x / 6 + x * x / 120 + x**3 / 5040
    s = cmath.sqrt(x)
    return cmath.sinh(s) / s


@dataclass(frozen=True)
class RationalMapPoint:
    a: complex
    b: complex
    c: complex

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.constraint_residual() > CONSTRAINT_TOL * max(1.0, abs(self.b) ** 2, abs(self.c * self.a**2)):
            raise ValueError("point violates b^2 - c a^2 = 1")

    @classmethod
    def _unchecked(cls, a: complex, b: complex, c: complex) -> "RationalMapPoint":
        obj = object.__new__(cls)
        for name, v in zip("abc", (a, b, c)):
            object.__setattr__(obj, name, complex(v))
        return obj

    def constraint_residual(self) -> float:
        return abs(self.b**2 - self.c * self.a**2 - 1)

    @classmethod
    def from_ac(cls, a: complex, c: complex, sign: int = 1) -> "RationalMapPoint":
        return cls(a, sign * cmath.sqrt(1 + c * a * a), c)

    def p(self, beta: complex) -> complex:
        return self.a * beta + self.b

    @property
    def beta(self) -> complex:
        return cmath.sqrt(self.c)

    def as_tuple(self) -> tuple[complex, complex, complex]:
        return (self.a, self.b, self.c)

    def to_json(self) -> dict:
        return {k: [v.real, v.imag] for k, v in zip("abc", self.as_tuple())}

    @classmethod
    def from_json(cls, data) -> "RationalMapPoint":
        def cplx(v):
            return complex(*v) if isinstance(v, (list, tuple)) else complex(v)

        return cls(cplx(data["a"]), cplx(data["b"]), cplx(data["c"]))


def _act_raw(lam: complex, a: complex, b: complex, c: complex) -> tuple[complex, complex, complex]:
    x = lam * lam * c
    ch = cosh_sqrt(x)
    sh = sinhc_sqrt(x)
    # sinh(lam beta)/beta = lam * sh, beta sinh(lam beta) = lam c sh
    return (ch * a + lam * sh * b, lam * c * sh * a + ch * b, c)


def act(lam: complex, m: RationalMapPoint) -> RationalMapPoint:
    # images are reported, not re-validated, so drift shows up in residuals
    return RationalMapPoint._unchecked(*_act_raw(complex(lam), m.a, m.b, m.c))


def scaling_residual(lam: complex, m: RationalMapPoint) -> float:
    """``|p'(beta) - exp(lam beta) p(beta)|`` for both square roots ``beta``."""
    m2 = act(lam, m)
    out = 0.0
    for beta in (m.beta, -m.beta):
        out = max(out, abs(m2.p(beta) - cmath.exp(lam * beta) * m.p(beta)))
    return out


def moment_value(m: RationalMapPoint) -> complex:
    """``c / 2``: with ``X = (b, c a, 0)``, ``X(log p(beta)) = beta`` and ``X(beta) = 0``."""
    return m.c / 2


def generator(m: RationalMapPoint) -> tuple[complex, complex, complex]:
    """Infinitesimal action ``d/dlam act(lam, m)`` at ``lam = 0``."""
    return (m.b, m.c * m.a, 0j)


def _check_chart(a: complex, b: complex, c: complex) -> complex:
    if abs(c) < CHART_TOL:
        raise ChartError("outside the chart of omega: c = 0")
    beta = cmath.sqrt(c)
    if abs(a * beta + b) < CHART_TOL:
        raise ChartError("outside the chart of omega: p(beta) = 0")
    return beta


def omega(point: tuple[complex, complex, complex], v, w) -> complex:
    """``dp(beta)/p(beta) ^ dbeta`` on ambient tangent vectors ``(da, db, dc)``."""
    a, b, c = point
    beta = _check_chart(a, b, c)
    p = a * beta + b
    vb = v[2] / (2 * beta)
    wb = w[2] / (2 * beta)
    dpv = beta * v[0] + v[1] + a * vb
    dpw = beta * w[0] + w[1] + a * wb
    return (dpv * wb - dpw * vb) / p


def tangent_basis(m: RationalMapPoint) -> tuple[tuple[complex, ...], tuple[complex, ...]]:
    """Chart coordinate fields at ``m``: ``(d_a, d_c)``, or ``(d_b, d_c)`` near ``b = 0``."""
    a, b, c = m.as_tuple()
    if _uses_ac_chart(m):
        return (1, c * a / b, 0), (0, a * a / (2 * b), 1)
    return (b / (c * a), 1, 0), (-a / (2 * c), 0, 1)


def _uses_ac_chart(m: RationalMapPoint) -> bool:
    return abs(m.b) >= abs(m.c * m.a)


def _chart_point(m: RationalMapPoint, s: complex, c: complex) -> tuple[complex, complex, complex]:
    """Point on the constraint surface with chart coordinates ``(s, c)`` on the sheet of ``m``."""
    if _uses_ac_chart(m):
        b = cmath.sqrt(1 + c * s * s)
        return (s, b if abs(b - m.b) <= abs(b + m.b) else -b, c)
    a = cmath.sqrt((s * s - 1) / c)
    return (a if abs(a - m.a) <= abs(a + m.a) else -a, s, c)


def _pushforward(lam: complex, m: RationalMapPoint, h: float):
    """Central differences of the image of the two chart coordinate curves through ``m``."""
    s0 = m.a if _uses_ac_chart(m) else m.b
    out = []
    for ds, dc in ((h, 0), (0, h)):
        plus = _act_raw(lam, *_chart_point(m, s0 + ds, m.c + dc))
        minus = _act_raw(lam, *_chart_point(m, s0 - ds, m.c - dc))
        out.append(tuple((p - q) / (2 * h) for p, q in zip(plus, minus)))
    return out


def symplectic_residual(lam: complex, m: RationalMapPoint, h: float = 1e-4) -> float:
    """``|omega(phi_* d_s, phi_* d_c) - omega(d_s, d_c)|`` on the chart coordinate fields.

    The reference value uses the exact fields at ``m``; the pushforward is a
    central difference along the coordinate curves.  The residual is
    ``O(h**2)`` (also at ``lam = 0``) and tends to zero as ``h -> 0`` exactly
    when the action preserves omega.
    """
    lam = complex(lam)
    _check_chart(*m.as_tuple())
    image = act(lam, m)
    _check_chart(*image.as_tuple())
    before = omega(m.as_tuple(), *tangent_basis(m))
    after = omega(image.as_tuple(), *_pushforward(lam, m, h))
    return abs(after - before)


def in_stabilizer_lattice(lam: complex, c: complex, tol: float = STABILIZER_TOL) -> bool:
    """Whether ``lam beta`` lies in ``2 pi i Z``."""
    n = complex(lam) * cmath.sqrt(c) / (2j * math.pi)
    return abs(n - round(n.real)) <= tol * max(1.0, abs(n))


def stabilizer_check(lam: complex, m: RationalMapPoint, tol: float = STABILIZER_TOL) -> bool:
    if abs(m.c) < CHART_TOL:
        raise ChartError("stabilizer check needs c != 0")
    m2 = act(lam, m)
    return max(abs(x - y) for x, y in zip(m2.as_tuple(), m.as_tuple())) <= tol


@dataclass(frozen=True)
class OrbitSample:
    lam: complex
    point: RationalMapPoint
    constraint_residual: float
    scaling_residual: float
    moment: complex
    stabilizes: bool


def orbit_table(m: RationalMapPoint, lams) -> list[OrbitSample]:
    rows = []
    for lam in lams:
        lam = complex(lam)
        img = act(lam, m)
        stab = stabilizer_check(lam, m) if abs(m.c) >= CHART_TOL else lam == 0
        rows.append(OrbitSample(lam, img, img.constraint_residual(), scaling_residual(lam, m),
                                moment_value(img), stab))
    return rows
