"""Splitting-type arithmetic deciding when twistor actions and quotients exist."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .bundles import EmbeddingError, LineBundleSection, quotient_bundle, splitting_type


class QuotientError(ValueError):
    pass


@dataclass(frozen=True)
class QuotientScenario:
    """Action of a twistor group on the twistor space of a 4n-dimensional manifold.

    ``lie_g``/``lie_h`` are splitting types; ``embedding`` gives the
    inclusion of a rank-one ``lie_h`` into the trivial ``lie_g`` as
    sections of O(-lie_h[0]).
    """

    n: int
    lie_g: tuple[int, ...]
    lie_h: tuple[int, ...] | None = None
    embedding: tuple[LineBundleSection, ...] | None = None
    hamiltonian: bool = True
    invariant_moment: bool = True  # user assertion: mu o s is G-invariant

    def __post_init__(self):
        object.__setattr__(self, "lie_g", tuple(int(p) for p in self.lie_g))
        if self.lie_h is not None:
            object.__setattr__(self, "lie_h", tuple(int(p) for p in self.lie_h))
        if self.embedding is not None:
            emb = tuple(self.embedding)
            object.__setattr__(self, "embedding", emb)
            if len(emb) != len(self.lie_g):
                raise ValueError("embedding must have one component per summand of Lie(G)")
            if self.lie_h is None or len(self.lie_h) != 1:
                raise ValueError("embedding data is supported for rank-one Lie(H) only")
            if any(s.degree != -self.lie_h[0] for s in emb):
                raise ValueError(
                    f"embedding components must be sections of O({-self.lie_h[0]})"
                )

    @classmethod
    def from_json(cls, data) -> "QuotientScenario":
        emb = data.get("embedding")
        if emb is not None:
            emb = tuple(LineBundleSection.from_json(s) for s in emb)
        return cls(
            n=int(data["n"]),
            lie_g=tuple(data["lieG"]),
            lie_h=tuple(data["lieH"]) if data.get("lieH") is not None else None,
            embedding=emb,
            hamiltonian=bool(data.get("hamiltonian", True)),
            invariant_moment=bool(data.get("invariant_moment", True)),
        )


@dataclass
class ActionReport:
    locally_free_feasible: bool
    hamiltonian_feasible: bool
    hamiltonian: bool
    failures: list[str] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return self.hamiltonian_feasible if self.hamiltonian else self.locally_free_feasible

    def to_json(self) -> dict:
        return {
            "feasible": self.feasible,
            "locally_free_feasible": self.locally_free_feasible,
            "hamiltonian_feasible": self.hamiltonian_feasible,
            "failures": list(self.failures),
        }


def check_action_constraints(s: QuotientScenario) -> ActionReport:
    """Degree restrictions on Lie(G) for locally free (<= 1) and Hamiltonian (<= 0) actions."""
    top = max(s.lie_g, default=0)
    lf = top <= 1
    ham = top <= 0
    failures = []
    if not lf:
        failures.append(f"locally free action needs all degrees <= 1; found {top}")
    if s.hamiltonian and not ham:
        failures.append(f"Hamiltonian action needs all degrees <= 0; found {top}")
    return ActionReport(lf, ham, s.hamiltonian, failures)


@dataclass
class AdmissibilityReport:
    numeric_condition: bool
    degree_sum: int
    codimension: int
    quotient_splitting: tuple[int, ...] | None
    sufficient: bool
    necessary_failed: bool
    reasons: list[str] = field(default_factory=list)
    assumptions: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "admissible" if self.sufficient and not self.necessary_failed else "inadmissible"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "numeric_condition": self.numeric_condition,
            "degree_sum": self.degree_sum,
            "codimension": self.codimension,
            "quotient_splitting": list(self.quotient_splitting)
            if self.quotient_splitting is not None else None,
            "sufficient": self.sufficient,
            "necessary_failed": self.necessary_failed,
            "reasons": list(self.reasons),
            "assumptions": list(self.assumptions),
        }


def admissibility_check(s: QuotientScenario) -> AdmissibilityReport:
    """Admissibility of a subgroup H of a trivial twistor group.

    The numeric condition compares ``sum(p_i)`` for ``Lie(H) = sum O(-p_i)``
    with the fiber codimension.  The quotient ``Lie(G)/Lie(H)`` is then
    computed from the embedding: all degrees 1 is sufficient, any degree
    above 1 rules the quotient out.
    """
    if s.lie_h is None or s.embedding is None:
        raise ValueError("admissibility needs Lie(H) and embedding data")
    if any(p != 0 for p in s.lie_g):
        raise ValueError("admissibility from an embedding needs a trivial Lie(G)")
    p_sum = -sum(s.lie_h)
    codim = len(s.lie_g) - len(s.lie_h)
    numeric = p_sum == codim
    reasons = []
    if not numeric:
        reasons.append(f"numeric condition fails: sum p_i = {p_sum} != codimension {codim}")
    Q = quotient_bundle(s.embedding)  # EmbeddingError propagates
    split = splitting_type(Q)
    sufficient = all(a == 1 for a in split)
    necessary_failed = any(a > 1 for a in split)
    if necessary_failed:
        reasons.append(f"quotient has summands of degree > 1: {list(split)}")
    elif not sufficient:
        reasons.append(f"quotient is not a sum of O(1): {list(split)}")
    assumptions = []
    if s.invariant_moment:
        assumptions.append("mu o s is G-invariant (asserted, not checked)")
    return AdmissibilityReport(
        numeric, p_sum, codim, split, sufficient, necessary_failed, reasons, assumptions
    )


def splitting_admissibility(n: int, lie_l: Sequence[int], lie_l_perp: Sequence[int]) -> dict:
    """Degree bookkeeping for L inside L^perp inside the normal bundle O(1)^{2n}.

    Only decides what splitting types alone can decide: ranks, the bound
    ``deg <= 1`` on subbundles of O(1)^{2n}, and whether ``L^perp / L`` has
    the degree of a sum of O(1).
    """
    lie_l, lie_l_perp = list(lie_l), list(lie_l_perp)
    reasons = []
    if len(lie_l_perp) != 2 * n - len(lie_l):
        reasons.append(f"rank L^perp must be 2n - rank L = {2 * n - len(lie_l)}")
    if any(a > 1 for a in lie_l_perp):
        reasons.append("L^perp is a subbundle of O(1)^{2n}; degrees must be <= 1")
    rank_q = len(lie_l_perp) - len(lie_l)
    deg_q = sum(lie_l_perp) - sum(lie_l)
    if deg_q != rank_q:
        reasons.append(f"L^perp/L has degree {deg_q}, a sum of O(1) needs {rank_q}")
    return {"consistent": not reasons, "quotient_rank": rank_q, "quotient_degree": deg_q,
            "reasons": reasons}


def quotient_dimension(n: int, m: int) -> int:
    """Real dimension 4n - 4m of the twistor quotient."""
    if m > n:
        raise QuotientError("negative dimension: group fiber exceeds quaternionic dimension")
    if m < 0 or n < 0:
        raise ValueError("dimensions must be non-negative")
    return 4 * n - 4 * m


@dataclass(frozen=True)
class DeformationDim:
    dim: int
    parity_sensitive: bool


def deformation_space_dim(lie_n: Sequence[int]) -> DeformationDim:
    """Real dimension of H^1_R(P^1, Lie(N)) for a negative splitting type.

    Odd summands are counted with the full dimension -p-1 and flagged.
    """
    lie_n = [int(p) for p in lie_n]
    if any(p >= 0 for p in lie_n):
        raise QuotientError("deformation space needs a negative twistor group (all degrees < 0)")
    return DeformationDim(sum(max(0, -p - 1) for p in lie_n), any(p % 2 for p in lie_n))


__all__ = [
    "ActionReport",
    "AdmissibilityReport",
    "DeformationDim",
    "EmbeddingError",
    "QuotientError",
    "QuotientScenario",
    "admissibility_check",
    "check_action_constraints",
    "deformation_space_dim",
    "quotient_dimension",
    "splitting_admissibility",
]
