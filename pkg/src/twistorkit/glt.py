"""Generalized Legendre transform.

A function F on the real sections ``eta(zeta) = sum_i w_i zeta**i`` of
O(2k) is generated by contour integrals

    F(w) = (1/2 pi i) oint G(eta(zeta), zeta) dzeta,

with ``G`` a finite sum of terms ``c eta**a zeta**b``.  Real sections obey
``w[2k-i] = (-1)**(k+i) conj(w[i])``.  The Kähler potential in the
holomorphic coordinates ``z = w_0`` and ``u`` is

    K(z, u) = F(w) - u w_1 - conj(u w_1) - <lambda, w>,

extremised over ``w_1`` (the Legendre pair of ``u``) and over
``w_2 .. w_k`` (the constraints ``F_{w_i} = lambda-target``).  For k = 1
``w_1`` is real and the pairing is ``(u + conj(u)) w_1``.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

REALITY_TOL = 1e-8
QUAD_TOL = 1e-10
MAX_NODES = 1 << 14
NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 100
MAX_HALVINGS = 20
FD_STEP = 1e-4


class GLTError(ArithmeticError):
    pass


class RealityError(GLTError):
    pass


class QuadratureError(GLTError):
    pass


class DegeneratePointError(GLTError):
    pass


class ConvergenceError(GLTError):
    pass


@dataclass(frozen=True)
class Term:
    """``coeff * eta**power * zeta**zeta_power``."""

    coeff: complex
    power: int
    zeta_power: int

    def __post_init__(self):
        object.__setattr__(self, "coeff", complex(self.coeff))
        if self.power < 0:
            raise ValueError("eta power must be non-negative")


@dataclass(frozen=True)
class ContourSpec:
    center: complex = 0j
    radius: float = 1.0
    orientation: int = 1
    nodes: int = 64

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("contour radius must be positive")
        if self.nodes < 64:
            raise ValueError("contour needs at least 64 nodes")
        if self.orientation not in (1, -1):
            raise ValueError("orientation is +1 or -1")


def lambda_dimension(k: int) -> int:
    """Number of real constraint parameters, ``2k - 3`` for k >= 2."""
    return max(0, 2 * k - 3)


@dataclass(frozen=True)
class GLTProblem:
    k: int
    terms: tuple[Term, ...]
    contours: tuple[ContourSpec, ...] = (ContourSpec(),)
    lam: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "contours", tuple(self.contours))
        lam = tuple(float(x) for x in (self.lam or ())) or (0.0,) * lambda_dimension(self.k)
        if len(lam) != lambda_dimension(self.k):
            raise ValueError(
                f"lambda must have length {lambda_dimension(self.k)} for k={self.k}, got {len(lam)}"
            )
        object.__setattr__(self, "lam", lam)

    def with_lambda(self, lam: Sequence[float]) -> "GLTProblem":
        return replace(self, lam=tuple(lam))

    def paired_term(self, t: Term) -> Term:
        """Image of ``t`` under the real structure; pairs residues j <-> 2ka - j."""
        m = self.k * t.power
        j = -t.zeta_power - 1
        sign = -1 if (m + j) % 2 else 1
        return Term(sign * t.coeff.conjugate(), t.power, -2 * m - t.zeta_power - 2)

    def realified(self) -> "GLTProblem":
        """Average each term with its real-structure image, so F becomes Re F."""
        terms = [Term(t.coeff / 2, t.power, t.zeta_power) for t in self.terms]
        terms += [Term(p.coeff / 2, p.power, p.zeta_power) for p in map(self.paired_term, self.terms)]
        return replace(self, terms=tuple(terms))

    def targets(self) -> dict[int, complex]:
        """Constraint values ``F_{w_i}`` for ``2 <= i <= k`` read off lambda."""
        lam = self.lam
        out: dict[int, complex] = {}
        for i in range(2, self.k):
            out[i] = complex(lam[2 * (i - 2)], lam[2 * (i - 2) + 1])
        if self.k >= 2:
            out[self.k] = complex(lam[2 * self.k - 4])
        return out

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "terms": [
                {"coeff": [t.coeff.real, t.coeff.imag], "power": t.power, "zeta_power": t.zeta_power}
                for t in self.terms
            ],
            "contours": [
                {"center": [c.center.real, c.center.imag], "radius": c.radius,
                 "orientation": c.orientation, "nodes": c.nodes}
                for c in self.contours
            ],
            "lambda": list(self.lam),
        }

    @classmethod
    def from_json(cls, data) -> "GLTProblem":
        def cplx(v):
            return complex(*v) if isinstance(v, (list, tuple)) else complex(v)

        terms = tuple(
            Term(cplx(t["coeff"]), int(t["power"]), int(t["zeta_power"])) for t in data["terms"]
        )
        contours = tuple(
            ContourSpec(cplx(c.get("center", 0)), float(c.get("radius", 1.0)),
                        int(c.get("orientation", 1)), int(c.get("nodes", 64)))
            for c in data.get("contours", [{}])
        ) or (ContourSpec(),)
        lam = data.get("lambda")
        return cls(int(data["k"]), terms, contours, tuple(lam) if lam is not None else None)


# --- real sections of O(2k) ----------------------------------------------------


def _sign(k: int, i: int) -> int:
    return -1 if (k + i) % 2 else 1


def real_section(k: int, head: Sequence[complex]) -> np.ndarray:
    """Full ``w_0..w_2k`` from the free coordinates ``w_0..w_k`` (``w_k`` real)."""
    w = np.zeros(2 * k + 1, dtype=complex)
    w[: k + 1] = head
    w[k] = w[k].real
    for i in range(k):
        w[2 * k - i] = _sign(k, i) * np.conj(w[i])
    return w


def reality_defect(k: int, w: Sequence[complex]) -> float:
    w = np.asarray(w, dtype=complex)
    return float(max(abs(w[2 * k - i] - _sign(k, i) * np.conj(w[i])) for i in range(2 * k + 1)))


@dataclass(frozen=True)
class SectionPoint:
    k: int
    w: tuple[complex, ...]

    def __post_init__(self):
        w = tuple(complex(v) for v in self.w)
        object.__setattr__(self, "w", w)
        if len(w) != 2 * self.k + 1:
            raise ValueError(f"a section of O({2 * self.k}) has {2 * self.k + 1} coordinates")
        scale = max(1.0, max(abs(v) for v in w))
        if reality_defect(self.k, w) > 1e-12 * scale:
            raise ValueError("point violates the reality condition")

    @classmethod
    def from_head(cls, k: int, head: Sequence[complex]) -> "SectionPoint":
        return cls(k, tuple(real_section(k, head)))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.w, dtype=complex)


def random_section(k: int, rng: np.random.Generator, scale: float = 1.0) -> SectionPoint:
    head = scale * (rng.normal(size=k + 1) + 1j * rng.normal(size=k + 1))
    return SectionPoint.from_head(k, head)


# --- contour quadrature ---------------------------------------------------------


def _integrand_parts(terms: Sequence[Term], eta: np.ndarray, zeta: np.ndarray):
    G = np.zeros_like(eta)
    G1 = np.zeros_like(eta)
    G2 = np.zeros_like(eta)
    for t in terms:
        zb = zeta ** t.zeta_power
        a = t.power
        G = G + t.coeff * eta**a * zb
        if a >= 1:
            G1 = G1 + t.coeff * a * eta ** (a - 1) * zb
        if a >= 2:
            G2 = G2 + t.coeff * a * (a - 1) * eta ** (a - 2) * zb
    return G, G1, G2


def _quadrature(problem: GLTProblem, w: np.ndarray, scale: int):
    n = w.size
    F = 0j
    grad = np.zeros(n, dtype=complex)
    hess = np.zeros((n, n), dtype=complex)
    for c in problem.contours:
        N = c.nodes * scale
        e = np.exp(2j * np.pi * np.arange(N) / N)
        zeta = c.center + c.radius * e
        # dzeta / (2 pi i) on the trapezoidal grid
        weight = c.orientation * c.radius * e / N
        eta = np.polynomial.polynomial.polyval(zeta, w)
        G, G1, G2 = _integrand_parts(problem.terms, eta, zeta)
        Z = zeta[:, None] ** np.arange(n)[None, :]
        F += np.sum(weight * G)
        grad += Z.T @ (weight * G1)
        wg2 = weight * G2
        for i in range(n):
            hess[i] += (Z[:, i] * wg2) @ Z
    return F, grad, hess


def _converged_quadrature(problem: GLTProblem, w: np.ndarray):
    prev = _quadrature(problem, w, 1)
    scale = 2
    while problem.contours[0].nodes * scale <= MAX_NODES:
        cur = _quadrature(problem, w, scale)
        size = 1.0 + max(abs(cur[0]), np.max(np.abs(cur[1])), np.max(np.abs(cur[2])))
        change = max(abs(cur[0] - prev[0]), np.max(np.abs(cur[1] - prev[1])),
                     np.max(np.abs(cur[2] - prev[2])))
        if change < QUAD_TOL * size:
            return cur
        prev = cur
        scale *= 2
    raise QuadratureError("contour too close to singularity: node doubling does not converge")


def _as_w(problem: GLTProblem, w) -> np.ndarray:
    w = w.array if isinstance(w, SectionPoint) else np.asarray(w, dtype=complex)
    if w.size != 2 * problem.k + 1:
        raise ValueError(f"expected {2 * problem.k + 1} coordinates")
    return w


def eval_F_complex(problem: GLTProblem, w) -> complex:
    """Raw contour integral, before the reality check."""
    return complex(_converged_quadrature(problem, _as_w(problem, w))[0])


def eval_F(problem: GLTProblem, w) -> float:
    """F at a real section; raises ``RealityError`` if the integral is not real."""
    val = eval_F_complex(problem, w)
    if abs(val.imag) > REALITY_TOL * max(1.0, abs(val)):
        raise RealityError(
            f"F is not real on the reality locus: imaginary part {val.imag:.3e}; "
            "pair integrand terms with their real-structure images"
        )
    return val.real


def gradient_F(problem: GLTProblem, w) -> np.ndarray:
    """Holomorphic partials ``F_{w_i}`` (differentiation under the integral)."""
    return _converged_quadrature(problem, _as_w(problem, w))[1]


def pde_residual(H: np.ndarray) -> float:
    """Largest spread of ``H[i, j]`` along the antidiagonals ``i + j = const``."""
    n = H.shape[0]
    worst = 0.0
    for s in range(2 * n - 1):
        vals = np.array([H[i, s - i] for i in range(max(0, s - n + 1), min(n, s + 1))])
        worst = max(worst, float(np.max(np.abs(vals - vals[0]))))
    return worst


@dataclass(frozen=True)
class HessianResult:
    matrix: np.ndarray
    pde_residual: float


def hessian_F(problem: GLTProblem, w) -> HessianResult:
    """``F_{w_i w_j} = (1/2 pi i) oint zeta**(i+j) G_etaeta dzeta``, entry by entry."""
    H = _converged_quadrature(problem, _as_w(problem, w))[2]
    return HessianResult(H, pde_residual(H))


# --- constraint solve (Newton with step halving) --------------------------------


def _unknown_basis(k: int) -> np.ndarray:
    """Complex coordinates ``w_0..w_2k`` spanned by each real unknown.

    Unknowns: (w_1) for k = 1, else (Re w_1, Im w_1, Re w_i, Im w_i for
    2 <= i < k, w_k).
    """
    cols = []
    if k == 1:
        cols.append({1: 1.0})
    else:
        for i in range(1, k):
            cols.append({i: 1.0, 2 * k - i: _sign(k, i)})
            cols.append({i: 1j, 2 * k - i: -1j * _sign(k, i)})
        cols.append({k: 1.0})
    B = np.zeros((2 * k + 1, len(cols)), dtype=complex)
    for q, col in enumerate(cols):
        for i, v in col.items():
            B[i, q] = v
    return B


def _section(k: int, z: complex, x: np.ndarray) -> np.ndarray:
    w = _unknown_basis(k) @ x
    w[0] += z
    w[2 * k] += _sign(k, 0) * np.conj(z)
    return w


def _residual(problem: GLTProblem, grad: np.ndarray, u: complex) -> np.ndarray:
    k = problem.k
    if k == 1:
        return np.array([grad[1].real - 2 * u.real])
    r = [grad[1] - u]
    targets = problem.targets()
    for i in range(2, k):
        r.append(grad[i] - targets[i])
    out = []
    for v in r:
        out += [v.real, v.imag]
    out.append(grad[k].real - targets[k].real)
    return np.array(out)


def _jacobian(problem: GLTProblem, hess: np.ndarray) -> np.ndarray:
    k = problem.k
    D = hess @ _unknown_basis(k)  # d grad / d unknowns
    if k == 1:
        return D[1:2].real
    rows = []
    for i in range(1, k):
        rows += [D[i].real, D[i].imag]
    rows.append(D[k].real)
    return np.array(rows)


@dataclass(frozen=True)
class ConstrainedSection:
    point: SectionPoint
    unknowns: np.ndarray
    residual: float
    iterations: int


def solve_constraints(
    problem: GLTProblem,
    z: complex,
    u: complex,
    initial: np.ndarray | None = None,
    tol: float = NEWTON_TOL,
    max_iter: int = NEWTON_MAX_ITER,
) -> ConstrainedSection:
    """Section with ``w_0 = z`` solving the Legendre equation and the constraints.

    Iterates past ``tol`` until the residual stops decreasing so that
    finite differences of the solution stay clean.
    """
    k = problem.k
    z, u = complex(z), complex(u)
    nx = _unknown_basis(k).shape[1]
    x = np.zeros(nx) if initial is None else np.array(initial, dtype=float)

    def state(x):
        _, grad, hess = _converged_quadrature(problem, _section(k, z, x))
        return _residual(problem, grad, u), hess

    r, hess = state(x)
    norm = np.linalg.norm(r)
    it = 0
    stalled = 0
    while it < max_iter:
        if norm <= tol * 1e-5:
            break
        J = _jacobian(problem, hess)
        s = np.linalg.svd(J, compute_uv=False)
        if s[0] == 0 or s[-1] < 1e-12 * max(1.0, s[0]):
            raise DegeneratePointError("degenerate point: singular constraint Jacobian")
        step = np.linalg.solve(J, -r)
        t = 1.0
        for _ in range(MAX_HALVINGS + 1):
            r_new, hess_new = state(x + t * step)
            if np.linalg.norm(r_new) < norm:
                break
            t /= 2
        else:
            break
        it += 1
        new_norm = np.linalg.norm(r_new)
        x, r, hess = x + t * step, r_new, hess_new
        if norm <= tol and new_norm > 0.5 * norm:
            stalled += 1
            if stalled >= 2:
                norm = new_norm
                break
        norm = new_norm
    if norm > tol:
        raise ConvergenceError(f"no constrained section found (residual {norm:.3e})")
    return ConstrainedSection(SectionPoint(k, tuple(_section(k, z, x))), x, float(norm), it)


# --- Kähler potential, metric, Monge-Ampère -------------------------------------


def _kahler_value(problem: GLTProblem, w: np.ndarray, F: float, u: complex) -> float:
    k = problem.k
    if k == 1:
        return F - 2 * u.real * w[1].real
    K = F - 2 * (u * w[1]).real
    for i, c in problem.targets().items():
        K -= c.real * w[i].real if i == k else 2 * (c * w[i]).real
    return K


def _kahler_gradient(problem: GLTProblem, sol: ConstrainedSection) -> np.ndarray:
    """``(K_z, K_u)`` from the envelope theorem: ``K_z = F_{w_0}``, ``K_u = -w_1``."""
    w = sol.point.array
    grad = gradient_F(problem, w)
    Ku = -w[1].real if problem.k == 1 else -w[1]
    return np.array([grad[0], Ku], dtype=complex)


@dataclass(frozen=True)
class MetricSample:
    z: complex
    u: complex
    K: float
    metric: np.ndarray  # real 4x4 in (Re z, Im z, Re u, Im u)
    complex_hessian: np.ndarray  # K_{a b-bar}, a, b in (z, u)
    section: SectionPoint

    @property
    def determinant(self) -> float:
        H = self.complex_hessian
        return float((H[0, 0] * H[1, 1] - H[0, 1] * H[1, 0]).real)

    @property
    def symmetry_defect(self) -> float:
        return float(np.max(np.abs(self.metric - self.metric.T)))


def kahler_potential_and_metric(
    problem: GLTProblem, z: complex, u: complex, h: float = FD_STEP,
    initial: np.ndarray | None = None,
) -> MetricSample:
    """Kähler potential at ``(z, u)`` and the metric from its complex Hessian.

    The Hessian is a central difference of the exact gradient ``(K_z, K_u)``
    with step ``h``, Richardson-extrapolated once.
    """
    z, u = complex(z), complex(u)
    center = solve_constraints(problem, z, u, initial=initial)
    w = center.point.array
    F = eval_F(problem, w)
    K = _kahler_value(problem, w, F, u)

    def grad_at(dz: complex, du: complex) -> np.ndarray:
        sol = solve_constraints(problem, z + dz, u + du, initial=center.unknowns)
        return _kahler_gradient(problem, sol)

    moves = [(1, 0), (1j, 0), (0, 1), (0, 1j)]

    def central(step: float) -> np.ndarray:
        D = np.zeros((2, 4), dtype=complex)  # d(K_a) / d(real coordinate)
        for q, (mz, mu) in enumerate(moves):
            plus = grad_at(mz * step, mu * step)
            minus = grad_at(-mz * step, -mu * step)
            D[:, q] = (plus - minus) / (2 * step)
        return D

    D = (4 * central(h / 2) - central(h)) / 3
    # K_{a b-bar} = (d/dx_b + i d/dy_b) K_a / 2
    H = np.array([[(D[a, 2 * b] + 1j * D[a, 2 * b + 1]) / 2 for b in range(2)] for a in range(2)])
    R, I = H.real, H.imag
    g = np.zeros((4, 4))
    ix = [0, 2]
    iy = [1, 3]
    for a in range(2):
        for b in range(2):
            g[ix[a], ix[b]] = 2 * R[a, b]
            g[iy[a], iy[b]] = 2 * R[a, b]
            g[ix[a], iy[b]] = 2 * I[a, b]
            g[iy[b], ix[a]] = -2 * I[b, a]
    return MetricSample(z, u, K, g, H, center.point)


def square_grid(z0: complex, u0: complex, spacing: float = 0.05, n: int = 5) -> list[tuple[complex, complex]]:
    """``n x n`` grid in (z, u): z moves along exp(i pi/6), u along exp(i pi/3)."""
    offs = (np.arange(n) - (n - 1) / 2) * spacing
    dz, du = np.exp(1j * np.pi / 6), np.exp(1j * np.pi / 3)
    return [(z0 + s * dz, u0 + t * du) for s in offs for t in offs]


@dataclass(frozen=True)
class MongeAmpereResult:
    residual: float
    constant: float
    determinants: tuple[float, ...]
    samples: tuple[MetricSample, ...] = field(repr=False)


def monge_ampere_residual(problem: GLTProblem, grid: Sequence[tuple[complex, complex]]) -> MongeAmpereResult:
    """Max deviation of ``K_zz̄ K_uū - K_zū K_uz̄`` from its value at the grid center."""
    grid = list(grid)
    if not grid:
        raise ValueError("empty grid")
    c_idx = len(grid) // 2
    center = kahler_potential_and_metric(problem, *grid[c_idx])
    samples = []
    for i, (z, u) in enumerate(grid):
        samples.append(center if i == c_idx else kahler_potential_and_metric(problem, z, u))
    dets = tuple(s.determinant for s in samples)
    const = center.determinant
    residual = max(abs(d - const) for d in dets)
    return MongeAmpereResult(residual, const, dets, tuple(samples))


@dataclass(frozen=True)
class SweepRow:
    lam: tuple[float, ...]
    residual: float | None
    determinant: float | None
    metric_center: tuple[float, ...] | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("TWISTOR_THREADS", "1")))
    except ValueError:
        return 1


def deformation_sweep(
    problem: GLTProblem,
    lambdas: Iterable[Sequence[float]],
    grid: Sequence[tuple[complex, complex]],
    threads: int | None = None,
) -> list[SweepRow]:
    """Monge-Ampère residual over a family of lambda slices; rows in input order."""
    lambdas = [tuple(float(v) for v in lam) for lam in lambdas]
    grid = list(grid)
    if not grid:
        return []

    def run(lam):
        try:
            res = monge_ampere_residual(problem.with_lambda(lam), grid)
        except (GLTError, ValueError) as exc:
            return SweepRow(lam, None, None, None, str(exc))
        g = res.samples[len(grid) // 2].metric
        entries = (g[0, 0], g[1, 1], g[2, 2], g[3, 3], g[0, 2], g[0, 3])
        return SweepRow(lam, res.residual, res.constant, tuple(float(x) for x in entries))

    workers = threads or _threads()
    if workers == 1 or len(lambdas) <= 1:
        return [run(lam) for lam in lambdas]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, lambdas))


SWEEP_COLUMNS = ("lambda", "residual", "determinant", "g_xz_xz", "g_yz_yz", "g_xu_xu",
                 "g_yu_yu", "g_xz_xu", "g_xz_yu", "error")
