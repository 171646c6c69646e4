"""Twistor Lie algebras: Lie algebra bundles over the projective line.

An algebra is a splitting ``p_1..p_n`` together with structure constants
``f(i, j, k)``, each a polynomial section of O(p_i + p_j - p_k) in the
zeta-chart.  The 1/zeta-chart constants are derived, never stored.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .bundles import ZERO, BundleOnP1, LaurentPolynomial, splitting_type

RANK_TOL = 1e-9
COEFF_TOL = 1e-10
# Generic fiber points for rank decisions; far from 0, infinity and the unit circle's
# roots of unity.
SAMPLE_POINTS = (0.37 + 0.61j, -1.13 + 0.29j, 0.82 - 1.41j, -0.55 - 0.77j, 1.71 + 0.93j)


class InvalidAlgebraError(ValueError):
    pass


class BCHError(ArithmeticError):
    pass


class StratificationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class TwistorLieAlgebra:
    splitting: tuple[int, ...]
    brackets: Mapping[tuple[int, int, int], LaurentPolynomial] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "splitting", tuple(int(p) for p in self.splitting))
        clean = {}
        n = len(self.splitting)
        for (i, j, k), f in dict(self.brackets).items():
            if not all(0 <= x < n for x in (i, j, k)):
                raise InvalidAlgebraError(f"bracket index {(i, j, k)} out of range")
            f = f if isinstance(f, LaurentPolynomial) else LaurentPolynomial({0: f})
            if not f.is_zero():
                clean[(i, j, k)] = f
        object.__setattr__(self, "brackets", clean)

    @property
    def dim(self) -> int:
        return len(self.splitting)

    @classmethod
    def abelian(cls, splitting: Sequence[int]) -> "TwistorLieAlgebra":
        return cls(tuple(splitting), {})

    @classmethod
    def from_upper(cls, splitting, table: Mapping[tuple[int, int], Mapping[int, object]]):
        """Build from ``{(i, j): {k: f}}`` for i < j, filling in antisymmetry."""
        brackets = {}
        for (i, j), row in table.items():
            for k, f in row.items():
                f = f if isinstance(f, LaurentPolynomial) else LaurentPolynomial({0: f})
                brackets[(i, j, k)] = f
                brackets[(j, i, k)] = -f
        return cls(tuple(splitting), brackets)

    def bracket(self, i: int, j: int, k: int) -> LaurentPolynomial:
        f = self.brackets.get((i, j, k))
        if f is not None:
            return f
        f = self.brackets.get((j, i, k))
        return -f if f is not None else ZERO

    def bracket_at_infinity(self, i: int, j: int, k: int) -> LaurentPolynomial:
        """Structure constant in the 1/zeta-chart, as a polynomial in 1/zeta.

        ``f~(w) = w**d f(1/w)`` with ``d = p_i + p_j - p_k``.
        """
        d = self.splitting[i] + self.splitting[j] - self.splitting[k]
        return self.bracket(i, j, k).inverted().shift(d)

    def structure_constants(self, zeta: complex) -> np.ndarray:
        n = self.dim
        c = np.zeros((n, n, n), dtype=complex)
        for i, j, k in itertools.product(range(n), repeat=3):
            f = self.bracket(i, j, k)
            if not f.is_zero():
                c[i, j, k] = f(zeta)
        return c

    def restrict(self, indices: Sequence[int]) -> "TwistorLieAlgebra":
        pos = {old: new for new, old in enumerate(indices)}
        brackets = {
            (pos[i], pos[j], pos[k]): f
            for (i, j, k), f in self.brackets.items()
            if i in pos and j in pos and k in pos
        }
        return TwistorLieAlgebra(tuple(self.splitting[i] for i in indices), brackets)

    def to_json(self) -> dict:
        return {
            "splitting": list(self.splitting),
            "brackets": [
                {"i": i, "j": j, "k": k, "section": f.to_json()}
                for (i, j, k), f in sorted(self.brackets.items())
            ],
        }

    @classmethod
    def from_json(cls, data) -> "TwistorLieAlgebra":
        brackets = {}
        antisym = data.get("antisymmetric", True)
        for entry in data.get("brackets", []):
            i, j, k = int(entry["i"]), int(entry["j"]), int(entry["k"])
            f = LaurentPolynomial.from_json(entry["section"])
            brackets[(i, j, k)] = f
            if antisym and (j, i, k) not in brackets and i != j:
                brackets[(j, i, k)] = -f
        return cls(tuple(data["splitting"]), brackets)


def fiber_bracket(c: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.einsum("ijk,i,j->k", c, x, y)


# --- validation --------------------------------------------------------------


@dataclass
class Violation:
    kind: str  # "antisymmetry" | "degree" | "jacobi"
    indices: tuple[int, ...]
    residual: LaurentPolynomial

    def to_json(self) -> dict:
        return {"kind": self.kind, "indices": list(self.indices), "residual": self.residual.to_json()}


@dataclass
class ValidationReport:
    violations: list[Violation]

    @property
    def valid(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"valid": self.valid, "violations": [v.to_json() for v in self.violations]}


def _significant(p: LaurentPolynomial, tol: float = COEFF_TOL) -> bool:
    return p.norm() > tol


def validate(L: TwistorLieAlgebra) -> ValidationReport:
    """Check antisymmetry, degree constraints and the Jacobi identity exactly in zeta."""
    n = L.dim
    p = L.splitting
    out: list[Violation] = []
    for (i, j, k), f in sorted(L.brackets.items()):
        if i == j:
            out.append(Violation("antisymmetry", (i, j, k), f))
        elif (j, i, k) in L.brackets and i < j:
            r = f + L.brackets[(j, i, k)]
            if _significant(r):
                out.append(Violation("antisymmetry", (i, j, k), r))
    for (i, j, k), f in sorted(L.brackets.items()):
        if i > j and (j, i, k) in L.brackets:
            continue
        d = p[i] + p[j] - p[k]
        if f.min_exponent < 0 or f.max_exponent > d:
            out.append(Violation("degree", (i, j, k), f))
    for i, j, l in itertools.combinations(range(n), 3):
        for m in range(n):
            r = ZERO
            for a, b, c in ((i, j, l), (j, l, i), (l, i, j)):
                for t in range(n):
                    f1 = L.bracket(a, b, t)
                    if f1.is_zero():
                        continue
                    r = r + f1 * L.bracket(t, c, m)
            if _significant(r):
                out.append(Violation("jacobi", (i, j, l, m), r))
    return ValidationReport(out)


# --- lower central series -----------------------------------------------------


def _orthonormal_span(vectors: np.ndarray) -> np.ndarray:
    if vectors.size == 0:
        return vectors.reshape(vectors.shape[0], 0)
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return u[:, :0]
    return u[:, : int(np.sum(s > RANK_TOL * max(1.0, s[0])))]


def lower_central_dims(c: np.ndarray, max_steps: int | None = None) -> list[int]:
    """Dimensions of C^1 = g, C^{r+1} = [g, C^r] for a fiber with constants ``c``.

    Stops at zero or when the dimension stops dropping.
    """
    n = c.shape[0]
    basis = np.eye(n, dtype=complex)
    dims = [n]
    ad = np.transpose(c, (0, 2, 1))  # ad[i] @ v = [e_i, v]
    for _ in range(max_steps or n + 1):
        if basis.shape[1] == 0:
            break
        images = np.concatenate([ad[i] @ basis for i in range(n)], axis=1)
        basis = _orthonormal_span(images)
        dims.append(basis.shape[1])
        if dims[-1] == dims[-2]:
            break
    return dims


def _class_from_dims(dims: list[int]) -> int | None:
    if dims[-1] != 0:
        return None
    return len(dims) - 1


@dataclass(frozen=True)
class Nilpotency:
    is_negative: bool
    nilpotency_class: int | None  # None: not nilpotent
    dims: tuple[int, ...]

    @property
    def label(self):
        return self.nilpotency_class if self.nilpotency_class is not None else "not nilpotent"


def nilpotency(L: TwistorLieAlgebra, check: bool = True) -> Nilpotency:
    if check:
        report = validate(L)
        if not report.valid:
            raise InvalidAlgebraError(f"invalid twistor Lie algebra: {report.violations[0].kind}")
    is_negative = all(p < 0 for p in L.splitting)
    # Generic ranks are the maximum over sample points, taken step by step.
    series = [lower_central_dims(L.structure_constants(z)) for z in SAMPLE_POINTS]
    length = max(len(s) for s in series)
    dims = tuple(max(s[min(r, len(s) - 1)] for s in series) for r in range(length))
    return Nilpotency(is_negative, _class_from_dims(list(dims)), dims)


@dataclass(frozen=True)
class NegativePart:
    algebra: TwistorLieAlgebra
    indices: tuple[int, ...]
    leaks: tuple[tuple[int, int, int], ...]

    @property
    def closed(self) -> bool:
        return not self.leaks

    @property
    def message(self) -> str:
        return "closed" if self.closed else "negative part not a subalgebra"


def maximal_negative_subalgebra(L: TwistorLieAlgebra) -> NegativePart:
    """Restriction to the summands of negative degree, with an explicit closure check."""
    neg = tuple(i for i, p in enumerate(L.splitting) if p < 0)
    negset = set(neg)
    leaks = tuple(
        (i, j, k)
        for (i, j, k), f in sorted(L.brackets.items())
        if i in negset and j in negset and k not in negset and _significant(f)
    )
    return NegativePart(L.restrict(neg), neg, leaks)


# --- Campbell-Hausdorff group law on a fiber ---------------------------------


@dataclass(frozen=True)
class FiberElement:
    zeta: complex
    coords: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(complex(v) for v in self.coords))
        object.__setattr__(self, "zeta", complex(self.zeta))

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.coords, dtype=complex)


@functools.lru_cache(maxsize=None)
def dynkin_coefficients(order: int) -> dict[str, Fraction]:
    """Coefficients of right-nested words in log(e^X e^Y), total degree <= order.

    Dynkin's formula; a word ``"XXY"`` stands for ``[X, [X, Y]]``.
    """
    words: dict[str, Fraction] = {}

    def blocks(remaining):
        for r in range(remaining + 1):
            for s in range(remaining - r + 1):
                if r + s:
                    yield r, s

    def rec(m, seq, used):
        if seq:
            word = "".join("X" * r + "Y" * s for r, s in seq)
            denom = used
            for r, s in seq:
                denom *= math.factorial(r) * math.factorial(s)
            coeff = Fraction((-1) ** (m - 1), m) / denom
            words[word] = words.get(word, Fraction(0)) + coeff
        for r, s in blocks(order - used):
            rec(m + 1, seq + [(r, s)], used + r + s)

    rec(0, [], 0)
    return {w: c for w, c in words.items() if c}


def _nested(c: np.ndarray, word: str, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    letters = {"X": x, "Y": y}
    v = letters[word[-1]]
    for ch in reversed(word[:-1]):
        v = fiber_bracket(c, letters[ch], v)
    return v


def bch_series(c: np.ndarray, x: np.ndarray, y: np.ndarray, order: int) -> np.ndarray:
    z = np.zeros_like(x, dtype=complex)
    for word, coeff in dynkin_coefficients(order).items():
        if len(word) > 1 and word[-1] == word[-2]:
            continue
        z = z + float(coeff) * _nested(c, word, x, y)
    return z


def fiber_class(L: TwistorLieAlgebra, zeta: complex) -> int:
    dims = lower_central_dims(L.structure_constants(zeta))
    cls = _class_from_dims(dims)
    if cls is None:
        raise BCHError("BCH does not terminate: fiber is not nilpotent")
    return cls


def bch_multiply(L: TwistorLieAlgebra, x: FiberElement, y: FiberElement) -> FiberElement:
    """Group law log(exp x exp y) on the fiber over ``x.zeta``, exact at its nilpotency class."""
    if x.zeta != y.zeta:
        raise ValueError("elements lie over different points")
    order = max(fiber_class(L, x.zeta), 1)
    c = L.structure_constants(x.zeta)
    return FiberElement(x.zeta, tuple(bch_series(c, x.vector, y.vector, order)))


def bch_inverse(x: FiberElement) -> FiberElement:
    # log(exp(x) exp(-x)) = 0 holds to all orders.
    return FiberElement(x.zeta, tuple(-v for v in x.coords))


# --- unipotent radical family over the sphere --------------------------------


def principal_sl2(N: int) -> list[np.ndarray]:
    """Images of the Pauli matrices under the N-dimensional irreducible representation."""
    j = (N - 1) / 2
    m = np.arange(j, -j - 1, -1)
    Jp = np.zeros((N, N), dtype=complex)
    for a in range(1, N):
        Jp[a - 1, a] = np.sqrt(j * (j + 1) - m[a] * (m[a] + 1))
    Jx = (Jp + Jp.conj().T) / 2
    Jy = (Jp - Jp.conj().T) / 2j
    Jz = np.diag(m).astype(complex)
    return [2 * Jx, 2 * Jy, 2 * Jz]


def _raising(N: int) -> tuple[np.ndarray, np.ndarray]:
    s1, s2, _ = principal_sl2(N)
    return (s1 + 1j * s2) / 2, (s1 - 1j * s2) / 2


GROUPS = {"sl2": 2, "sl3": 3}


def zeta_to_direction(zeta: complex) -> np.ndarray:
    """Point of the unit sphere whose negative eigenline of x.sigma is spanned by (zeta, 1)."""
    d = 1 + abs(zeta) ** 2
    return np.array([-2 * zeta.real, 2 * zeta.imag, 1 - abs(zeta) ** 2]) / d


def direction_to_zeta(x: Sequence[float]) -> complex:
    x1, x2, x3 = x
    if 1 + x3 < 1e-12:
        return complex("inf")
    return -(x1 - 1j * x2) / (1 + x3)


def adjoint(X: np.ndarray) -> np.ndarray:
    """Matrix of ad(X) on gl_N, row-major vectorisation."""
    N = X.shape[0]
    I = np.eye(N)
    return np.kron(X, I) - np.kron(I, X.T)


def negative_eigenspace(N: int, direction: Sequence[float]) -> np.ndarray:
    """Orthonormal basis (columns, vectorised N x N matrices) of the negative eigenspaces."""
    x = np.asarray(direction, dtype=float)
    x = x / np.linalg.norm(x)
    X = sum(xi * s for xi, s in zip(x, principal_sl2(N)))
    w, V = np.linalg.eig(adjoint(X))
    ambiguous = (np.abs(w) > 1e-6) & (np.abs(w) < 0.5)
    if ambiguous.any():
        raise StratificationError("non-constant stratification: eigenvalue collision at sample")
    return _orthonormal_span(V[:, w.real < -0.5])


def _nilradical_basis(N: int, lower: bool) -> list[np.ndarray]:
    out = []
    for a, b in itertools.product(range(N), repeat=2):
        if (a > b) if lower else (a < b):
            E = np.zeros((N, N), dtype=complex)
            E[a, b] = 1
            out.append(E)
    return out


def _expm_nilpotent(A: np.ndarray) -> np.ndarray:
    out = np.eye(A.shape[0], dtype=complex)
    term = out
    for r in range(1, A.shape[0]):
        term = term @ A / r
        out = out + term
    return out


def holomorphic_frames(N: int, zeta: complex) -> tuple[np.ndarray, np.ndarray]:
    """Frames of the family at ``zeta`` from both charts (vectorised, as columns).

    zeta-chart: Ad(exp(zeta J+)) applied to the lower nilradical;
    1/zeta-chart: Ad(exp(J- / zeta)) applied to the upper nilradical.
    """
    Jp, Jm = _raising(N)
    g0 = _expm_nilpotent(zeta * Jp)
    g0i = _expm_nilpotent(-zeta * Jp)
    g1 = _expm_nilpotent(Jm / zeta)
    g1i = _expm_nilpotent(-Jm / zeta)
    E0 = np.stack([(g0 @ B @ g0i).ravel() for B in _nilradical_basis(N, lower=True)], axis=1)
    E1 = np.stack([(g1 @ B @ g1i).ravel() for B in _nilradical_basis(N, lower=False)], axis=1)
    return E0, E1


@functools.lru_cache(maxsize=None)
def family_bundle(g: str, samples: int = 64) -> BundleOnP1:
    """Transition data of the nilradical family, from frames on the two charts.

    ``T(zeta)`` solves ``E0 = E1 T`` on the unit circle; its Laurent
    coefficients come from a discrete Fourier transform of the samples.
    """
    N = GROUPS[g]
    zs = np.exp(2j * np.pi * np.arange(samples) / samples)
    Ts = []
    for z in zs:
        E0, E1 = holomorphic_frames(N, z)
        T, *_ = np.linalg.lstsq(E1, E0, rcond=None)
        if np.linalg.norm(E1 @ T - E0) > 1e-9:
            raise ArithmeticError("chart frames span different subspaces")
        Ts.append(T)
    Ts = np.array(Ts)
    coeffs = np.fft.fft(Ts, axis=0) / samples  # coeffs[e] multiplies zeta**e, e mod samples
    d = Ts.shape[1]
    rows = []
    for i in range(d):
        row = []
        for j in range(d):
            terms = {}
            for e in range(samples):
                v = coeffs[e, i, j]
                if abs(v) > 1e-10:
                    expo = e if e <= samples // 2 else e - samples
                    terms[expo] = v
            row.append(LaurentPolynomial(terms))
        rows.append(tuple(row))
    return BundleOnP1(tuple(rows))


@dataclass(frozen=True)
class UnipotentSample:
    group: str
    direction: tuple[float, float, float]
    fiber_basis: tuple[np.ndarray, ...]
    splitting: tuple[int, ...]

    @property
    def fiber_dim(self) -> int:
        return len(self.fiber_basis)


def unipotent_family(g: str, direction: Sequence[float]) -> UnipotentSample:
    """Fiber of the nilradical family at ``direction`` and the family's splitting type."""
    if g not in GROUPS:
        raise ValueError(f"unsupported group {g!r}; expected one of {sorted(GROUPS)}")
    x = np.asarray(direction, dtype=float)
    if abs(np.linalg.norm(x) - 1) > 1e-9:
        raise ValueError("direction must lie on the unit sphere")
    N = GROUPS[g]
    V = negative_eigenspace(N, x)
    basis = tuple(V[:, a].reshape(N, N) for a in range(V.shape[1]))
    expected = N * (N - 1) // 2
    if len(basis) != expected:
        raise StratificationError("non-constant stratification: fiber dimension jumps")
    return UnipotentSample(g, tuple(float(v) for v in x), basis, splitting_type(family_bundle(g)))
