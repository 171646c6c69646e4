"""Line bundles and vector bundles on the projective line.

A bundle of rank n is stored as an n x n matrix of Laurent polynomials in
``zeta``: the transition sending coefficients of a local section in the
``zeta``-chart frame to coefficients in the ``1/zeta``-chart frame.  With
this convention O(k) has transition ``zeta**-k`` and its global sections
are the polynomials of degree at most k.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

RANK_TOL = 1e-9


class InvalidTransitionError(ValueError):
    """Transition matrix is not invertible on the overlap."""


class EmbeddingError(ValueError):
    """A line-bundle map into a trivial bundle is not a subbundle inclusion."""


class LaurentPolynomial:
    """Finite sum of complex multiples of integer powers of zeta.

    Immutable; zero coefficients are never stored.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[int, complex] | None = None):
        c = {}
        for e, v in (coeffs or {}).items():
            v = complex(v)
            if v != 0:
                c[int(e)] = v
        self._c = c

    @classmethod
    def monomial(cls, exponent: int, value: complex = 1.0) -> "LaurentPolynomial":
        return cls({exponent: value})

    @classmethod
    def from_array(cls, values: Sequence[complex], start: int = 0) -> "LaurentPolynomial":
        """Coefficients ``values[i]`` of ``zeta**(start + i)``."""
        return cls({start + i: v for i, v in enumerate(values)})

    @property
    def coeffs(self) -> dict[int, complex]:
        return dict(self._c)

    def __getitem__(self, exponent: int) -> complex:
        return self._c.get(exponent, 0j)

    def is_zero(self) -> bool:
        return not self._c

    def is_monomial(self) -> bool:
        return len(self._c) == 1

    @property
    def min_exponent(self) -> int | None:
        return min(self._c) if self._c else None

    @property
    def max_exponent(self) -> int | None:
        return max(self._c) if self._c else None

    def norm(self) -> float:
        return max((abs(v) for v in self._c.values()), default=0.0)

    def __add__(self, other):
        if not isinstance(other, LaurentPolynomial):
            other = LaurentPolynomial({0: other})
        c = dict(self._c)
        for e, v in other._c.items():
            c[e] = c.get(e, 0) + v
        return LaurentPolynomial(c)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPolynomial({e: -v for e, v in self._c.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, LaurentPolynomial) else -complex(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LaurentPolynomial):
            other = complex(other)
            return LaurentPolynomial({e: v * other for e, v in self._c.items()})
        c: dict[int, complex] = {}
        for (e1, v1), (e2, v2) in itertools.product(self._c.items(), other._c.items()):
            c[e1 + e2] = c.get(e1 + e2, 0) + v1 * v2
        return LaurentPolynomial(c)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, float, complex)):
            other = LaurentPolynomial({0: other})
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        return self._c == other._c

    def __hash__(self):
        return hash(tuple(sorted(self._c.items(), key=lambda kv: kv[0])))

    def __call__(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        out = np.zeros_like(zeta)
        for e, v in self._c.items():
            out = out + v * zeta**e
        return out if out.ndim else complex(out)

    def shift(self, m: int) -> "LaurentPolynomial":
        """Multiply by ``zeta**m``."""
        return LaurentPolynomial({e + m: v for e, v in self._c.items()})

    def inverted(self) -> "LaurentPolynomial":
        """Substitute ``1/zeta`` for ``zeta``."""
        return LaurentPolynomial({-e: v for e, v in self._c.items()})

    def conjugate(self) -> "LaurentPolynomial":
        return LaurentPolynomial({e: v.conjugate() for e, v in self._c.items()})

    def chop(self, tol: float) -> "LaurentPolynomial":
        """Drop coefficients with modulus below ``tol``."""
        return LaurentPolynomial({e: v for e, v in self._c.items() if abs(v) > tol})

    def to_json(self) -> dict[str, list[float]]:
        return {str(e): [v.real, v.imag] for e, v in sorted(self._c.items())}

    @classmethod
    def from_json(cls, data) -> "LaurentPolynomial":
        if isinstance(data, (int, float)):
            return cls({0: data})
        out = {}
        for e, v in data.items():
            if isinstance(v, (int, float)):
                out[int(e)] = complex(v)
            else:
                re, im = v
                out[int(e)] = complex(re, im)
        return cls(out)

    def __repr__(self):
        if not self._c:
            return "LaurentPolynomial(0)"
        terms = " + ".join(f"({v:.6g})z^{e}" for e, v in sorted(self._c.items()))
        return f"LaurentPolynomial({terms})"


ZERO = LaurentPolynomial()
ONE = LaurentPolynomial({0: 1})
ZETA = LaurentPolynomial({1: 1})

LaurentMatrix = tuple[tuple[LaurentPolynomial, ...], ...]


def as_laurent(x) -> LaurentPolynomial:
    return x if isinstance(x, LaurentPolynomial) else LaurentPolynomial({0: x})


def matrix(rows: Iterable[Iterable]) -> LaurentMatrix:
    return tuple(tuple(as_laurent(x) for x in row) for row in rows)


def matmul(A: LaurentMatrix, B: LaurentMatrix) -> LaurentMatrix:
    inner = len(B)
    return tuple(
        tuple(sum((A[i][t] * B[t][j] for t in range(inner)), ZERO) for j in range(len(B[0])))
        for i in range(len(A))
    )


def determinant(A: LaurentMatrix) -> LaurentPolynomial:
    n = len(A)
    if n == 1:
        return A[0][0]
    if n == 2:
        return A[0][0] * A[1][1] - A[0][1] * A[1][0]
    total = ZERO
    for j in range(n):
        if A[0][j].is_zero():
            continue
        minor = tuple(tuple(row[c] for c in range(n) if c != j) for row in A[1:])
        term = A[0][j] * determinant(minor)
        total = total + (term if j % 2 == 0 else -term)
    return total


def adjugate(A: LaurentMatrix) -> LaurentMatrix:
    n = len(A)
    if n == 1:
        return ((ONE,),)
    cof = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = tuple(
                tuple(A[r][c] for c in range(n) if c != j) for r in range(n) if r != i
            )
            d = determinant(minor)
            cof[j][i] = d if (i + j) % 2 == 0 else -d
    return tuple(tuple(row) for row in cof)


def chop_matrix(A: LaurentMatrix, rel_tol: float = 1e-11) -> LaurentMatrix:
    scale = max((p.norm() for row in A for p in row), default=0.0)
    tol = rel_tol * max(scale, 1.0)
    return tuple(tuple(p.chop(tol) for p in row) for row in A)


def _leading_monomial(p: LaurentPolynomial, rel_tol: float) -> tuple[int, complex] | None:
    """``(d, c)`` when ``p`` is ``c zeta**d`` up to relative noise ``rel_tol``."""
    if p.is_zero():
        return None
    scale = p.norm()
    big = {e: v for e, v in p.coeffs.items() if abs(v) > rel_tol * scale}
    if len(big) != 1:
        return None
    ((d, c),) = big.items()
    return d, c


@dataclass(frozen=True)
class BundleOnP1:
    """Holomorphic vector bundle over the projective line (two-chart cover)."""

    transition: LaurentMatrix

    def __post_init__(self):
        T = matrix(self.transition)
        object.__setattr__(self, "transition", T)
        n = len(T)
        if n == 0 or any(len(row) != n for row in T):
            raise InvalidTransitionError("invalid transition matrix: not square")
        if _leading_monomial(determinant(T), 1e-9) is None:
            raise InvalidTransitionError(
                "invalid transition matrix: determinant is not a nonzero monomial"
            )

    @classmethod
    def line(cls, k: int) -> "BundleOnP1":
        return cls(((LaurentPolynomial.monomial(-k),),))

    @classmethod
    def diagonal(cls, degrees: Sequence[int]) -> "BundleOnP1":
        n = len(degrees)
        return cls(
            tuple(
                tuple(LaurentPolynomial.monomial(-degrees[i]) if i == j else ZERO for j in range(n))
                for i in range(n)
            )
        )

    @property
    def rank(self) -> int:
        return len(self.transition)

    @property
    def degree(self) -> int:
        d, _ = _leading_monomial(determinant(self.transition), 1e-9)
        return -d

    def twist(self, m: int) -> "BundleOnP1":
        """Tensor with O(m)."""
        return BundleOnP1(tuple(tuple(p.shift(-m) for p in row) for row in self.transition))

    def dual(self) -> "BundleOnP1":
        adj = adjugate(self.transition)
        d, c = _leading_monomial(determinant(self.transition), 1e-9)
        inv = LaurentPolynomial.monomial(-d, 1 / c)
        n = self.rank
        return BundleOnP1(tuple(tuple(adj[j][i] * inv for j in range(n)) for i in range(n)))

    def to_json(self) -> list[list[dict]]:
        return [[p.to_json() for p in row] for row in self.transition]

    @classmethod
    def from_json(cls, rows) -> "BundleOnP1":
        return cls(tuple(tuple(LaurentPolynomial.from_json(p) for p in row) for row in rows))


# --- sections and cohomology of line bundles ------------------------------


class LineBundleCohomology(NamedTuple):
    h0: int
    h1: int
    real_dim: int | None
    flag: str | None


def line_bundle_cohomology(k: int, real: bool = False) -> LineBundleCohomology:
    """Cohomology dimensions of O(k).

    ``real_dim`` is the real dimension of the invariant part of whichever
    of H^0, H^1 is nonzero; it exists only for even k, where the antipodal
    real structure is an involution.
    """
    h0 = max(0, k + 1)
    h1 = max(0, -k - 1)
    if not real:
        return LineBundleCohomology(h0, h1, None, None)
    if k % 2:
        return LineBundleCohomology(h0, h1, None, "k odd: not a twistor group")
    return LineBundleCohomology(h0, h1, h0 if k >= 0 else h1, None)


def _reality_sign(k: int, i: int) -> int:
    return -1 if (k // 2 + i) % 2 else 1


@dataclass(frozen=True)
class LineBundleSection:
    """Section ``sum(coeffs[i] * zeta**i)`` of O(degree) in the zeta-chart."""

    degree: int
    coeffs: tuple[complex, ...]

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        expected = max(0, self.degree + 1)
        if self.degree < 0:
            if any(c != 0 for c in coeffs):
                raise ValueError(f"O({self.degree}) has no nonzero sections")
            object.__setattr__(self, "coeffs", ())
        elif len(coeffs) != expected:
            raise ValueError(f"section of O({self.degree}) needs {expected} coefficients")

    @classmethod
    def zero(cls, degree: int) -> "LineBundleSection":
        return cls(degree, (0,) * max(0, degree + 1))

    @classmethod
    def from_polynomial(cls, degree: int, p: LaurentPolynomial) -> "LineBundleSection":
        if not p.is_zero() and (p.min_exponent < 0 or p.max_exponent > degree):
            raise ValueError(f"{p!r} is not a section of O({degree})")
        return cls(degree, tuple(p[i] for i in range(degree + 1)))

    def polynomial(self) -> LaurentPolynomial:
        return LaurentPolynomial.from_array(self.coeffs)

    def __call__(self, zeta):
        return self.polynomial()(zeta)

    def reality_involution(self) -> "LineBundleSection":
        """Image under the antipodal real structure (even degree only).

        ``(tau c)[k - i] = (-1)**(k/2 + i) * conj(c[i])``.
        """
        k = self.degree
        if k % 2:
            raise ValueError("k odd: not a twistor group")
        out = [0j] * (k + 1)
        for i, c in enumerate(self.coeffs):
            out[k - i] = _reality_sign(k, i) * c.conjugate()
        return LineBundleSection(k, tuple(out))

    def is_real(self, tol: float = 1e-12) -> bool:
        if self.degree % 2:
            return False
        tau = self.reality_involution()
        return all(abs(a - b) <= tol for a, b in zip(self.coeffs, tau.coeffs))

    def realified(self) -> "LineBundleSection":
        tau = self.reality_involution()
        return LineBundleSection(
            self.degree, tuple((a + b) / 2 for a, b in zip(self.coeffs, tau.coeffs))
        )

    def to_json(self) -> dict:
        return {"degree": self.degree, "coeffs": [[c.real, c.imag] for c in self.coeffs]}

    @classmethod
    def from_json(cls, data) -> "LineBundleSection":
        coeffs = [complex(*c) if isinstance(c, (list, tuple)) else complex(c) for c in data["coeffs"]]
        return cls(int(data["degree"]), tuple(coeffs))


def real_section_basis(k: int) -> list[LineBundleSection]:
    """Real basis (over R) of the real sections of O(k), k even."""
    if k % 2:
        raise ValueError("k odd: not a twistor group")
    if k < 0:
        return []
    basis = []
    for i in range(k + 1):
        for unit in (1, 1j):
            c = [0j] * (k + 1)
            c[i] = unit
            basis.append(LineBundleSection(k, tuple(c)).realified())
    vecs = np.array([np.concatenate([np.real(s.coeffs), np.imag(s.coeffs)]) for s in basis])
    # Greedy selection of an independent subset.
    chosen: list[int] = []
    for idx in range(len(basis)):
        trial = vecs[chosen + [idx]]
        if np.linalg.matrix_rank(trial, tol=1e-10) == len(chosen) + 1:
            chosen.append(idx)
    return [basis[i] for i in chosen]


def random_real_section(k: int, rng: np.random.Generator) -> LineBundleSection:
    c = rng.normal(size=k + 1) + 1j * rng.normal(size=k + 1)
    return LineBundleSection(k, tuple(c)).realified()


# --- global sections and splitting type -------------------------------------


def _coefficient_tensor(T: LaurentMatrix) -> tuple[np.ndarray, int]:
    exps = [e for row in T for p in row for e in p.coeffs]
    lo, hi = min(exps), max(exps)
    n = len(T)
    C = np.zeros((n, n, hi - lo + 1), dtype=complex)
    for i, row in enumerate(T):
        for j, p in enumerate(row):
            for e, v in p.coeffs.items():
                C[i, j, e - lo] = v
    return C, lo


def _section_bound(T: LaurentMatrix) -> int:
    """Upper bound on the zeta-degree of any global section.

    A section s satisfies ``T s = q`` with q polynomial in ``1/zeta``, so
    ``s = adj(T) q / det(T)``.
    """
    d, _ = _leading_monomial(determinant(T), 1e-9)
    top = max((p.max_exponent for row in adjugate(T) for p in row if not p.is_zero()), default=0)
    return max(0, top - d)


def _h0(C: np.ndarray, lo: int, shift: int, D: int) -> int:
    """Kernel dimension of s -> positive-exponent part of zeta**shift T s."""
    if D < 0:
        return 0
    n, _, L = C.shape
    lo = lo + shift
    hi = lo + L - 1
    top = hi + D
    if top < 1:
        return n * (D + 1)
    e = np.arange(1, top + 1)[:, None]
    t = np.arange(D + 1)[None, :]
    idx = e - t - lo
    valid = (idx >= 0) & (idx < L)
    idx = np.clip(idx, 0, L - 1)
    A = np.zeros((n * top, n * (D + 1)), dtype=complex)
    for i in range(n):
        for j in range(n):
            c = C[i, j]
            if not c.any():
                continue
            A[i * top:(i + 1) * top, j * (D + 1):(j + 1) * (D + 1)] = np.where(valid, c[idx], 0)
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return n * (D + 1)
    return n * (D + 1) - int(np.sum(s > RANK_TOL * s[0]))


def bundle_h0(E: BundleOnP1) -> int:
    """Dimension of the space of global holomorphic sections of ``E``."""
    C, lo = _coefficient_tensor(E.transition)
    return _h0(C, lo, 0, _section_bound(E.transition))


def splitting_type(E: BundleOnP1) -> tuple[int, ...]:
    """Degrees ``a_1 >= ... >= a_n`` with ``E = O(a_1) + ... + O(a_n)``.

    Recovered from the jumps of ``m -> h0(E(m))``: its first difference
    counts the summands with ``a_i >= -m``.
    """
    T = E.transition
    n = E.rank
    C, lo = _coefficient_tensor(T)
    D0 = _section_bound(T)

    def h(m: int) -> int:
        # Twisting by O(m) multiplies T by zeta**-m and raises the bound by m.
        return _h0(C, lo, -m, D0 + m)

    values = {0: h(0)}
    m = 0
    while values[m] > 0:
        m -= 1
        values[m] = h(m)
    low = m
    m = 0
    while True:
        m += 1
        values[m] = h(m)
        if values[m] - values[m - 1] == n:
            break
    delta = {mm: values[mm] - values.get(mm - 1, 0) for mm in range(low, m + 1)}
    degrees: list[int] = []
    for mm in range(low + 1, m + 1):
        count = delta[mm] - delta[mm - 1]
        if count < 0:
            raise ArithmeticError("non-monotone h0 sequence; rank decision failed")
        degrees.extend([-mm] * count)
    if len(degrees) != n or sum(degrees) != E.degree:
        raise ArithmeticError(
            f"splitting {degrees} inconsistent with rank {n} and degree {E.degree}"
        )
    return tuple(sorted(degrees, reverse=True))


# --- quotient of a trivial bundle by a line subbundle -----------------------


def _padd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros(max(a.size, b.size), dtype=complex)
    out[: a.size] += a
    out[: b.size] += b
    return out


def _pmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.size == 0 or b.size == 0:
        return np.zeros(0, dtype=complex)
    return np.convolve(a, b)


def _pdiv(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Quotient and remainder of ``a / b``; coefficient arrays low to high."""
    rem = a.astype(complex).copy()
    db = b.size - 1
    if rem.size <= db:
        return np.zeros(0, dtype=complex), rem
    quo = np.zeros(rem.size - db, dtype=complex)
    for k in range(rem.size - 1, db - 1, -1):
        c = rem[k] / b[-1]
        quo[k - db] = c
        rem[k - db: k + 1] -= c * b
    return quo, rem[:db]


def _trim(p: np.ndarray, tol: float) -> np.ndarray:
    nz = np.nonzero(np.abs(p) > tol)[0]
    if nz.size == 0:
        return np.zeros(0, dtype=complex)
    out = p[: nz[-1] + 1].copy()
    out[np.abs(out) <= tol] = 0
    return out


def _unimodular_frame(q: list[np.ndarray], tol: float) -> list[list[np.ndarray]]:
    """Polynomial matrix with first column ``q`` and constant nonzero determinant.

    Euclidean reduction of the column ``q`` to ``g e_i``; ``q`` must have no
    common zero, so the final ``g`` is a nonzero constant.
    """
    n = len(q)
    v = [_trim(np.asarray(p, dtype=complex), tol) for p in q]
    if all(p.size == 0 for p in v):
        raise EmbeddingError("not injective: zero section")
    U = [[np.array([1.0 + 0j]) if r == c else np.zeros(0, dtype=complex) for c in range(n)]
         for r in range(n)]
    while True:
        nz = [i for i in range(n) if v[i].size]
        piv = min(nz, key=lambda i: (v[i].size, -abs(v[i][-1])))
        if len(nz) == 1:
            break
        for j in nz:
            if j == piv:
                continue
            quo, rem = _pdiv(v[j], v[piv])
            v[j] = _trim(rem, tol)
            for r in range(n):
                U[r][piv] = _trim(_padd(U[r][piv], _pmul(quo, U[r][j])), tol * 1e-3)
    g = v[piv]
    if g.size != 1:
        raise EmbeddingError("embedding degenerates: sections have a common zero")
    cols = [piv] + [c for c in range(n) if c != piv]
    return [[U[r][c] * (g[0] if c == piv else 1) for c in cols] for r in range(n)]


def _to_laurent(p: np.ndarray, inverted: bool = False) -> LaurentPolynomial:
    sign = -1 if inverted else 1
    return LaurentPolynomial({sign * i: c for i, c in enumerate(p)})


def quotient_bundle(q: Sequence[LineBundleSection]) -> BundleOnP1:
    """Quotient of the trivial rank-n bundle by the image of O(-r) -> O^n.

    Each ``q[i]`` is a section of O(r), r > 0, and together they give the
    inclusion. Raises ``EmbeddingError`` if the sections vanish
    simultaneously somewhere (including at infinity).
    """
    r = {s.degree for s in q}
    if len(r) != 1:
        raise ValueError("all components must be sections of the same O(r)")
    (r,) = r
    if r <= 0:
        raise ValueError("components must be sections of O(r) with r > 0")
    n = len(q)
    if n < 2:
        raise ValueError("need at least two components")
    coeffs = [np.array(s.coeffs, dtype=complex) for s in q]
    scale = max(float(np.max(np.abs(c))) for c in coeffs)
    if scale == 0:
        raise EmbeddingError("not injective: zero section")
    tol = 1e-10 * scale
    P0 = _unimodular_frame(coeffs, tol)
    Pinf = _unimodular_frame([c[::-1] for c in coeffs], tol)

    A = matrix([[_to_laurent(x) for x in row] for row in P0])
    B = matrix([[_to_laurent(x, inverted=True) for x in row] for row in Pinf])
    detB = determinant(chop_matrix(B))
    lead = _leading_monomial(detB, 1e-8)
    if lead is None or lead[0] != 0:
        raise ArithmeticError("frame completion at infinity lost unimodularity")
    Binv = tuple(tuple(x * (1 / lead[1]) for x in row) for row in adjugate(B))
    M = chop_matrix(matmul(Binv, A), 1e-10)
    sub_scale = max(max(p.norm() for row in M for p in row), 1.0)
    if any(M[i][0].norm() > 1e-8 * sub_scale for i in range(1, n)):
        raise ArithmeticError("frame completion does not preserve the subbundle")
    return BundleOnP1(tuple(tuple(M[i][j] for j in range(1, n)) for i in range(1, n)))
