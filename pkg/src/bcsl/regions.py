"""Numeric evaluation of the rate-equivocation bounds on concrete channels.

Each bound is a list of inequality templates over the rate symbols
(R0, R1, R1e, R2, R2e); right-hand sides are signed sums of mutual
information constants named in the same "I(A;B|C)" syntax used by the
symbolic toolkit, instantiated from the joint distribution induced by an
auxiliary input pmf and the channel.

Outer bounds are conditioned on channel orderings; evaluation at a single
auxiliary is a single certificate point, never the region itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import linprog

from .channel_core import Channel3, JointPmf, NORM_TOL, conditional_mi, induced_joint
from .errors import PreconditionError, UsageError, ValidationError
from .orderings import OrderingReport

MARKOV_TOL = 1e-9
MATCH_TOL = 1e-9

RATE_SYMBOLS = ("R0", "R1", "R1e", "R2", "R2e")


# --------------------------------------------------------------------------
# auxiliary joints


@dataclass(frozen=True)
class AuxJoint:
    """Joint pmf over the auxiliaries (U1, U2, U3) and the input X."""

    m1: int
    m2: int
    m3: int
    nx: int
    p: np.ndarray  # shape (m1, m2, m3, nx)

    def __post_init__(self):
        arr = np.asarray(self.p, dtype=float)
        if arr.shape != (self.m1, self.m2, self.m3, self.nx):
            raise ValidationError(
                f"aux tensor shape {arr.shape} != {(self.m1, self.m2, self.m3, self.nx)}")
        if np.any(arr < 0):
            raise ValidationError("aux joint has negative entries")
        if abs(arr.sum() - 1.0) > NORM_TOL:
            raise ValidationError(f"aux joint sums to {arr.sum()!r}, not 1")
        object.__setattr__(self, "p", arr)

    @staticmethod
    def from_factors(p_u1: np.ndarray, p_u2_given_u1: np.ndarray,
                     p_xu3_given_u2: np.ndarray) -> "AuxJoint":
        """Build from the factorization p(u1) p(u2|u1) p(x,u3|u2)."""
        p_u1 = np.asarray(p_u1, float)
        p21 = np.asarray(p_u2_given_u1, float)        # (m1, m2)
        p32 = np.asarray(p_xu3_given_u2, float)       # (m2, m3, nx)
        joint = np.einsum("a,ab,bcx->abcx", p_u1, p21, p32)
        m1, m2 = p21.shape
        _, m3, nx = p32.shape
        return AuxJoint(m1, m2, m3, nx, joint)

    @staticmethod
    def random_factorized(rng: np.random.Generator, m1: int, m2: int,
                          m3: int, nx: int) -> "AuxJoint":
        """Sample an auxiliary with all required Markov chains holding by
        construction.

        The admissible joints factor simultaneously as p(u1)p(u2|u1)p(x,u3|u2)
        and p(u1)p(u3|u1)p(x,u2|u3), which forces U1 to be recoverable from U2
        and from U3 alone.  The sampler realizes this by partitioning the U2
        and U3 alphabets among the U1 values and drawing Dirichlet factors on
        each block (see :class:`FactorBlocks`).
        """
        return FactorBlocks.random(rng, m1, m2, m3, nx).to_aux()

    def joint_pmf(self) -> JointPmf:
        return JointPmf(("U1", "U2", "U3", "X"), self.p)

    def to_dict(self) -> dict:
        return {"m1": self.m1, "m2": self.m2, "m3": self.m3, "nx": self.nx,
                "p": self.p.tolist()}

    @staticmethod
    def from_dict(d: Mapping) -> "AuxJoint":
        return AuxJoint(int(d["m1"]), int(d["m2"]), int(d["m3"]),
                        int(d["nx"]), np.asarray(d["p"], float))


@dataclass
class FactorBlocks:
    """Parameterization of the admissible auxiliary family used for search.

    U2 and U3 symbols are partitioned among the U1 values (owner of symbol j
    is j mod m1), so U1 is a deterministic function of U2 and of U3 and every
    required Markov chain holds exactly.  Blocks: p(u1); p(u2|u1) supported on
    the symbols owned by u1; p(u3,x|u2) with u3 supported on the symbols owned
    by the same u1.
    """

    m1: int
    m2: int
    m3: int
    nx: int
    p1: np.ndarray
    p21: list[np.ndarray]   # per u1, over own2(u1)
    p32: list[np.ndarray]   # per u2, over own3(owner(u2)) x X, flattened

    @staticmethod
    def _check_sizes(m1: int, m2: int, m3: int):
        if m2 < m1 or m3 < m1:
            raise UsageError(
                "auxiliary cardinalities must satisfy m2 >= m1 and m3 >= m1 "
                "(the coarse layer is embedded in the finer ones)")

    @staticmethod
    def owners(m: int, m1: int) -> list[list[int]]:
        return [[j for j in range(m) if j % m1 == a] for a in range(m1)]

    @classmethod
    def random(cls, rng: np.random.Generator, m1: int, m2: int, m3: int,
               nx: int) -> "FactorBlocks":
        cls._check_sizes(m1, m2, m3)
        own2 = cls.owners(m2, m1)
        own3 = cls.owners(m3, m1)
        p1 = rng.dirichlet(np.ones(m1))
        p21 = [rng.dirichlet(np.ones(len(own2[a]))) for a in range(m1)]
        p32 = [rng.dirichlet(np.ones(len(own3[j % m1]) * nx))
               for j in range(m2)]
        return cls(m1, m2, m3, nx, p1, p21, p32)

    @classmethod
    def uniform(cls, m1: int, m2: int, m3: int, nx: int) -> "FactorBlocks":
        cls._check_sizes(m1, m2, m3)
        own2 = cls.owners(m2, m1)
        own3 = cls.owners(m3, m1)
        p1 = np.full(m1, 1 / m1)
        p21 = [np.full(len(own2[a]), 1 / len(own2[a])) for a in range(m1)]
        p32 = [np.full(len(own3[j % m1]) * nx, 1 / (len(own3[j % m1]) * nx))
               for j in range(m2)]
        return cls(m1, m2, m3, nx, p1, p21, p32)

    def to_aux(self) -> AuxJoint:
        own2 = self.owners(self.m2, self.m1)
        own3 = self.owners(self.m3, self.m1)
        joint = np.zeros((self.m1, self.m2, self.m3, self.nx))
        for a in range(self.m1):
            for jj, j in enumerate(own2[a]):
                block = self.p32[j].reshape(len(own3[a]), self.nx)
                for kk, k in enumerate(own3[a]):
                    joint[a, j, k, :] = (self.p1[a] * self.p21[a][jj]
                                         * block[kk])
        return AuxJoint(self.m1, self.m2, self.m3, self.nx, joint)

    def perturbed(self, rng: np.random.Generator, step: float
                  ) -> "FactorBlocks":
        """Copy with Gaussian noise added to one randomly chosen block."""
        blocks = [self.p1] + list(self.p21) + list(self.p32)
        i = int(rng.integers(0, len(blocks)))
        new = [b.copy() for b in blocks]
        new[i] = _renorm(new[i] + step * rng.normal(size=new[i].shape))
        p1 = new[0]
        p21 = new[1:1 + self.m1]
        p32 = new[1 + self.m1:]
        return FactorBlocks(self.m1, self.m2, self.m3, self.nx, p1, p21, p32)


MARKOV_CHAINS = (
    ("U1->U2->(U3,X)", ("U1",), ("U3", "X"), ("U2",)),
    ("U1->U3->(U2,X)", ("U1",), ("U2", "X"), ("U3",)),
    ("U1->(U2,U3)->X", ("U1",), ("X",), ("U2", "U3")),
)


def check_markov(aux: AuxJoint) -> list[tuple[str, float]]:
    """Residual conditional MI (bits) for each required Markov chain."""
    j = aux.joint_pmf()
    return [(chain, conditional_mi(j, a, b, c))
            for chain, a, b, c in MARKOV_CHAINS]


def markov_ok(aux: AuxJoint, tol: float = MARKOV_TOL) -> bool:
    return all(res <= tol for _, res in check_markov(aux))


# --------------------------------------------------------------------------
# rate tuples and polytopes


@dataclass(frozen=True)
class RateTuple:
    r0: float
    r1: float
    r1e: float
    r2: float
    r2e: float

    def __post_init__(self):
        eps = 1e-9
        for name, v in self.as_dict().items():
            if v < -eps:
                raise ValidationError(f"{name} = {v} is negative")
        if self.r1e > self.r1 + eps:
            raise ValidationError("R1e exceeds R1")
        if self.r2e > self.r2 + eps:
            raise ValidationError("R2e exceeds R2")

    def as_dict(self) -> dict[str, float]:
        return {"R0": self.r0, "R1": self.r1, "R1e": self.r1e,
                "R2": self.r2, "R2e": self.r2e}

    def as_vector(self) -> np.ndarray:
        return np.array([self.r0, self.r1, self.r1e, self.r2, self.r2e])


@dataclass(frozen=True)
class PolytopeRow:
    tag: str
    coeffs: tuple[tuple[str, float], ...]   # (rate symbol, coefficient)
    rhs: float                              # bits

    def lhs_at(self, r: RateTuple) -> float:
        d = r.as_dict()
        return sum(c * d[s] for s, c in self.coeffs)


@dataclass(frozen=True)
class SideCondition:
    tag: str
    lhs: float
    rhs: float

    @property
    def satisfied(self) -> bool:
        return self.lhs <= self.rhs + MATCH_TOL


@dataclass(frozen=True)
class RatePolytope:
    bound: str
    rows: tuple[PolytopeRow, ...]
    side_conditions: tuple[SideCondition, ...] = ()
    free_symbols: tuple[str, ...] = RATE_SYMBOLS  # rates not pinned to zero
    notes: tuple[str, ...] = ()

    def contains(self, r: RateTuple, tol: float = 1e-9) -> bool:
        if any(not sc.satisfied for sc in self.side_conditions):
            return False
        pinned = set(RATE_SYMBOLS) - set(self.free_symbols)
        if any(abs(r.as_dict()[s]) > tol for s in pinned):
            return False
        return all(row.lhs_at(r) <= row.rhs + tol for row in self.rows)

    def row(self, tag: str) -> PolytopeRow:
        for r in self.rows:
            if r.tag == tag:
                return r
        raise KeyError(tag)

    def to_dict(self) -> dict:
        return {
            "bound": self.bound,
            "rows": [{"tag": r.tag, "coeffs": dict(r.coeffs), "rhs_bits": r.rhs}
                     for r in self.rows],
            "side_conditions": [{"tag": s.tag, "lhs_bits": s.lhs,
                                 "rhs_bits": s.rhs, "satisfied": s.satisfied}
                                for s in self.side_conditions],
            "free_symbols": list(self.free_symbols),
            "notes": list(self.notes),
        }


class BoundId(Enum):
    """The six bound families: inner/outer three-message, the outer bound
    with secrecy rows removed, inner/outer two-message (type 1), and the
    matched two-message region (type 2, single auxiliary)."""

    INNER_3DM = "inner3dm"
    OUTER_3DM = "outer3dm"
    OUTER_NO_SECRECY = "outer_nosecrecy"
    INNER_TYPE1 = "inner_type1"
    OUTER_TYPE1 = "outer_type1"
    REGION_TYPE2 = "region_type2"


# Row templates: (tag, {rate: coeff}, [(sign, const name), ...])
_R = dict

_INNER_3DM_ROWS = [
    ("r1e_le_r1", _R(R1e=1, R1=-1), []),
    ("r2e_le_r2", _R(R2e=1, R2=-1), []),
    ("common", _R(R0=1), [(+1, "I(U3;Y3)")]),
    ("r1e_via_y2", _R(R1e=1), [(+1, "I(U2;Y2|U1)"), (-1, "I(U2;Y3|U1)")]),
    ("r1e_via_y1", _R(R1e=1),
     [(+1, "I(X;Y1|U3)"), (-1, "I(U2;Y3|U1)"), (-1, "I(X;Y3|U2)")]),
    ("r2e_cap", _R(R2e=1), [(+1, "I(X;Y1|U2)"), (-1, "I(X;Y3|U2)")]),
    ("joint_secrecy", _R(R1e=1, R2e=1),
     [(+1, "I(X;Y1|U1)"), (-1, "I(U2;Y3|U1)"), (-1, "I(X;Y3|U2)")]),
    ("sum01_a", _R(R0=1, R1=1), [(+1, "I(U2;Y2)")]),
    ("sum01_b", _R(R0=1, R1=1),
     [(+1, "I(U3;Y3)"), (+1, "I(U2;Y2|U1)"), (-1, "I(U2;U3|U1)")]),
    ("sum001", _R(R0=2, R1=1),
     [(+1, "I(U3;Y3)"), (+1, "I(U2;Y2)"), (-1, "I(U2;U3|U1)")]),
    ("sum02", _R(R0=1, R2=1), [(+1, "I(U3;Y3)"), (+1, "I(X;Y1|U2,U3)")]),
    ("sum012_a", _R(R0=1, R1=1, R2=1), [(+1, "I(U3;Y3)"), (+1, "I(X;Y1|U3)")]),
    ("sum012_b", _R(R0=1, R1=1, R2=1), [(+1, "I(X;Y1)")]),
    ("sum012_c", _R(R0=1, R1=1, R2=1),
     [(+1, "I(U3;Y3)"), (+1, "I(U2;Y2|U1)"), (-1, "I(U2;U3|U1)"),
      (+1, "I(X;Y1|U2,U3)")]),
    ("sum0012", _R(R0=2, R1=1, R2=1),
     [(+1, "I(U3;Y3)"), (+1, "I(U2;Y2)"), (-1, "I(U2;U3|U1)"),
      (+1, "I(X;Y1|U2,U3)")]),
    ("sum0112", _R(R0=1, R1=2, R2=1),
     [(+1, "I(U3;Y3)"), (+1, "I(U2;Y2|U1)"), (-1, "I(U2;U3|U1)"),
      (+1, "I(X;Y1|U3)")]),
    ("sum00112", _R(R0=2, R1=2, R2=1),
     [(+1, "I(U3;Y3)"), (+1, "I(U2;Y2)"), (-1, "I(U2;U3|U1)"),
      (+1, "I(X;Y1|U3)")]),
]

_INNER_3DM_CONDITIONS = [
    ("secure_x_layer", [(+1, "I(X;Y3|U2)")], [(+1, "I(X;Y1|U2,U3)")]),
]

_OUTER_3DM_ROWS = [
    ("r1e_le_r1", _R(R1e=1, R1=-1), []),
    ("r2e_le_r2", _R(R2e=1, R2=-1), []),
    ("common_y1", _R(R0=1), [(+1, "I(U1;Y1)")]),
    ("common_y3", _R(R0=1), [(+1, "I(U3;Y3)"), (-1, "I(U3;Y1|U1)")]),
    ("r1e_via_y2", _R(R1e=1), [(+1, "I(U2;Y2|U1)"), (-1, "I(U2;Y3|U1)")]),
    ("r1e_via_y1", _R(R1e=1), [(+1, "I(X;Y1|U3)"), (-1, "I(X;Y3|U1)")]),
    ("r2e_cap", _R(R2e=1), [(+1, "I(X;Y1|U2)"), (-1, "I(X;Y3|U2)")]),
    ("joint_secrecy", _R(R1e=1, R2e=1),
     [(+1, "I(X;Y1|U1)"), (-1, "I(X;Y3|U1)")]),
    ("sum01_a", _R(R0=1, R1=1), [(+1, "I(U2;Y1)")]),
    ("sum01_b", _R(R0=1, R1=1), [(+1, "I(U2;Y2)")]),
    ("sum01_c", _R(R0=1, R1=1), [(+1, "I(U1;Y1)"), (+1, "I(U2;Y2|U1)")]),
    ("sum01_d", _R(R0=1, R1=1), [(+1, "I(U3;Y3)"), (+1, "I(U2;Y1|U1)")]),
    ("sum01_e", _R(R0=1, R1=1), [(+1, "I(U3;Y3)"), (+1, "I(U2;Y2|U1)")]),
    ("sum02_a", _R(R0=1, R2=1), [(+1, "I(U1;Y1)"), (+1, "I(X;Y1|U2,U3)")]),
    ("sum02_b", _R(R0=1, R2=1), [(+1, "I(U3;Y3)"), (+1, "I(X;Y1|U2,U3)")]),
    ("sum012_a", _R(R0=1, R1=1, R2=1), [(+1, "I(X;Y1)")]),
    ("sum012_b", _R(R0=1, R1=1, R2=1), [(+1, "I(U3;Y3)"), (+1, "I(X;Y1|U3)")]),
    ("sum012_c", _R(R0=1, R1=1, R2=1),
     [(+1, "I(U1;Y1)"), (+1, "I(U2;Y2|U1)"), (+1, "I(X;Y1|U2,U3)")]),
    ("sum012_d", _R(R0=1, R1=1, R2=1),
     [(+1, "I(U3;Y3)"), (+1, "I(U2;Y2|U1)"), (+1, "I(X;Y1|U2,U3)")]),
    ("sum012_e", _R(R0=1, R1=1, R2=1),
     [(+1, "I(U2;Y2)"), (+1, "I(X;Y1|U2,U3)")]),
]

# Outer bound without secrecy rows: drop every row touching R1e or R2e.
_SECRECY_TAGS = {"r1e_le_r1", "r2e_le_r2", "r1e_via_y2", "r1e_via_y1",
                 "r2e_cap", "joint_secrecy"}
_OUTER_NOSEC_ROWS = [r for r in _OUTER_3DM_ROWS if r[0] not in _SECRECY_TAGS]

_INNER_TYPE1_ROWS = [
    ("r1e_le_r1", _R(R1e=1, R1=-1), []),
    ("common_a", _R(R0=1), [(+1, "I(U2;Y2)")]),
    ("common_b", _R(R0=1), [(+1, "I(U3;Y3)")]),
    ("r1e_via_full", _R(R1e=1),
     [(+1, "I(X;Y1|U1)"), (-1, "I(U2;Y3|U1)"), (-1, "I(X;Y3|U2)")]),
    ("r1e_via_split", _R(R1e=1),
     [(+1, "I(X;Y1|U2)"), (+1, "I(X;Y1|U3)"), (-1, "I(X;Y3|U2)"),
      (-1, "I(U2;Y3|U1)"), (-1, "I(X;Y3|U2)")]),
    ("sum00", _R(R0=2),
     [(+1, "I(U2;Y2)"), (+1, "I(U3;Y3)"), (-1, "I(U2;U3|U1)")]),
    ("sum01_a", _R(R0=1, R1=1), [(+1, "I(X;Y1)")]),
    ("sum01_b", _R(R0=1, R1=1), [(+1, "I(U2;Y2)"), (+1, "I(X;Y1|U2)")]),
    ("sum01_c", _R(R0=1, R1=1), [(+1, "I(U3;Y3)"), (+1, "I(X;Y1|U3)")]),
    ("sum001", _R(R0=2, R1=1),
     [(+1, "I(U2;Y2)"), (+1, "I(U3;Y3)"), (-1, "I(U2;U3|U1)"),
      (+1, "I(X;Y1|U2,U3)")]),
    ("sum0011", _R(R0=2, R1=2),
     [(+1, "I(U2;Y2)"), (+1, "I(X;Y1|U2)"), (+1, "I(U3;Y3)"),
      (+1, "I(X;Y1|U3)"), (-1, "I(U2;U3|U1)")]),
]

_INNER_TYPE1_CONDITIONS = [
    ("secure_x_layer", [(+1, "I(X;Y3|U2)")], [(+1, "I(X;Y1|U2,U3)")]),
    ("secure_u3_route", [(+1, "I(X;Y3|U2)")], [(+1, "I(X;Y1|U2)")]),
]

_OUTER_TYPE1_ROWS = [
    ("r1e_le_r1", _R(R1e=1, R1=-1), []),
    ("common_y1", _R(R0=1), [(+1, "I(U1;Y1)")]),
    ("common_y2", _R(R0=1), [(+1, "I(U2;Y2)"), (-1, "I(U2;Y1|U1)")]),
    ("common_y3", _R(R0=1), [(+1, "I(U3;Y3)"), (-1, "I(U3;Y1|U1)")]),
    ("r1e_cap", _R(R1e=1), [(+1, "I(X;Y1|U1)"), (-1, "I(X;Y3|U1)")]),
    ("sum01_a", _R(R0=1, R1=1), [(+1, "I(X;Y1)")]),
    ("sum01_b", _R(R0=1, R1=1), [(+1, "I(U2;Y2)"), (+1, "I(X;Y1|U2)")]),
    ("sum01_c", _R(R0=1, R1=1), [(+1, "I(U3;Y3)"), (+1, "I(X;Y1|U3)")]),
]

# Single-auxiliary matched region: U1 = U3 = U, U2 = X.
_REGION_TYPE2_ROWS = [
    ("r1e_le_r1", _R(R1e=1, R1=-1), []),
    ("common", _R(R0=1), [(+1, "I(U1;Y3)")]),
    ("r1e_via_y1", _R(R1e=1), [(+1, "I(X;Y1|U1)"), (-1, "I(X;Y3|U1)")]),
    ("r1e_via_y2", _R(R1e=1), [(+1, "I(X;Y2|U1)"), (-1, "I(X;Y3|U1)")]),
    ("sum01_a", _R(R0=1, R1=1), [(+1, "I(X;Y1)")]),
    ("sum01_b", _R(R0=1, R1=1), [(+1, "I(X;Y2)")]),
]

_BOUND_TABLES: dict[BoundId, tuple[list, list, tuple[str, ...]]] = {
    BoundId.INNER_3DM: (_INNER_3DM_ROWS, _INNER_3DM_CONDITIONS, RATE_SYMBOLS),
    BoundId.OUTER_3DM: (_OUTER_3DM_ROWS, [], RATE_SYMBOLS),
    BoundId.OUTER_NO_SECRECY: (_OUTER_NOSEC_ROWS, [], ("R0", "R1", "R2")),
    BoundId.INNER_TYPE1: (_INNER_TYPE1_ROWS, _INNER_TYPE1_CONDITIONS,
                          ("R0", "R1", "R1e")),
    BoundId.OUTER_TYPE1: (_OUTER_TYPE1_ROWS, [], ("R0", "R1", "R1e")),
    BoundId.REGION_TYPE2: (_REGION_TYPE2_ROWS, [], ("R0", "R1", "R1e")),
}


# --------------------------------------------------------------------------
# MI-constant evaluation


def parse_mi_name(name: str) -> tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]]:
    """Split "I(A;B|C)" into variable groups (A, B, C)."""
    if not (name.startswith("I(") and name.endswith(")")):
        raise UsageError(f"not an information constant: {name!r}")
    body = name[2:-1]
    if "|" in body:
        main, cond = body.split("|", 1)
        cvars = tuple(v.strip() for v in cond.split(","))
    else:
        main, cvars = body, ()
    a, b = main.split(";")
    return (tuple(v.strip() for v in a.split(",")),
            tuple(v.strip() for v in b.split(",")), cvars)


class MITable:
    """Caching evaluator of named MI constants on an induced joint pmf."""

    def __init__(self, joint: JointPmf):
        self.joint = joint
        self._cache: dict[str, float] = {}

    def __call__(self, name: str) -> float:
        if name not in self._cache:
            a, b, c = parse_mi_name(name)
            self._cache[name] = conditional_mi(self.joint, a, b, c)
        return self._cache[name]


def _require_report(reports: Iterable[OrderingReport] | None,
                    predicate: str, pair: tuple[int, int],
                    description: str, override: bool) -> list[str]:
    if override:
        return [f"condition unverified: {description} (override)"]
    for rep in reports or ():
        if rep.predicate == predicate and tuple(rep.pair) == pair:
            if rep.verdict is True:
                return []
            raise PreconditionError(
                f"ordering report shows {description} does not hold "
                f"(gap {rep.gap:.3e} bits)")
    raise PreconditionError(
        f"bound requires that {description}; supply an ordering report "
        "for the pair or evaluate with override=True")


def eval_bound(bound: BoundId, ch: Channel3, aux: AuxJoint, *,
               ordering_reports: Sequence[OrderingReport] | None = None,
               override: bool = False) -> RatePolytope:
    """Instantiate every inequality of the named bound at (ch, aux)."""
    if not isinstance(bound, BoundId):
        bound = BoundId(bound)
    if aux.nx != ch.nx:
        raise ValidationError(f"aux input alphabet {aux.nx} != channel {ch.nx}")
    residuals = check_markov(aux)
    bad = [(c, r) for c, r in residuals if r > MARKOV_TOL]
    if bad:
        chain, r = bad[0]
        raise ValidationError(
            f"auxiliary violates Markov chain {chain}: residual {r:.3e} bits")

    notes: list[str] = []
    if bound in (BoundId.OUTER_3DM, BoundId.OUTER_TYPE1):
        notes += _require_report(ordering_reports, "more_capable", (1, 3),
                                 "receiver 1 is more capable than receiver 3",
                                 override)
        notes.append("more-capable precondition applied to the whole bound, "
                     "not only the secrecy rows")
        notes.append("single-auxiliary outer-bound certificate point, "
                     "not the region")
    if bound is BoundId.REGION_TYPE2:
        notes += _require_report(ordering_reports, "less_noisy", (1, 3),
                                 "receiver 1 is less noisy than receiver 3",
                                 override)
        notes += _require_report(ordering_reports, "less_noisy", (2, 3),
                                 "receiver 2 is less noisy than receiver 3",
                                 override)

    mi = MITable(induced_joint(ch, aux))
    row_templates, cond_templates, free = _BOUND_TABLES[bound]
    rows = tuple(
        PolytopeRow(tag, tuple(sorted(coeffs.items())),
                    sum(s * mi(name) for s, name in terms))
        for tag, coeffs, terms in row_templates)
    conds = tuple(
        SideCondition(tag, sum(s * mi(n) for s, n in lhs),
                      sum(s * mi(n) for s, n in rhs))
        for tag, lhs, rhs in cond_templates)
    return RatePolytope(bound.value, rows, conds, free, tuple(notes))


def type2_aux(p_ux: np.ndarray, nx: int) -> AuxJoint:
    """Embed a single-auxiliary joint p(u,x) as U1 = U3 = U, U2 = X.

    The embedding deliberately breaks the three-auxiliary Markov chains
    (U1 is a copy of U3), so it must not be passed through eval_bound's
    Markov gate; it exists for the matched-region comparison below.
    """
    p_ux = np.asarray(p_ux, float)
    mu = p_ux.shape[0]
    joint = np.zeros((mu, nx, mu, nx))
    for u in range(mu):
        for x in range(nx):
            joint[u, x, u, x] = p_ux[u, x]
    return AuxJoint(mu, nx, mu, nx, joint)


@dataclass(frozen=True)
class Cor3MatchRow:
    tag: str
    region_rhs: float
    inner_rhs: float
    outer_rhs: float

    @property
    def residual(self) -> float:
        return max(abs(self.inner_rhs - self.region_rhs),
                   abs(self.outer_rhs - self.region_rhs))


@dataclass(frozen=True)
class Cor3MatchReport:
    rows: tuple[Cor3MatchRow, ...]
    tol: float = MATCH_TOL

    @property
    def matched(self) -> bool:
        return all(r.residual <= self.tol for r in self.rows)

    def to_dict(self) -> dict:
        return {"matched": self.matched, "tol": self.tol,
                "rows": [{"tag": r.tag, "region_rhs": r.region_rhs,
                          "inner_rhs": r.inner_rhs, "outer_rhs": r.outer_rhs,
                          "residual": r.residual} for r in self.rows]}


# Row correspondence for the single-auxiliary collapse: with R2 = R2e = 0,
# U2 = X, U3 = U1 = U, each region inequality is the specialization of one
# named row of the inner bound and one of the outer bound.  (Other bound rows
# do not disappear pointwise; they become redundant only once the union over
# auxiliaries is taken, which the converse establishes.)
_COR3_ROW_MAP = (
    # (region row, inner row, outer row)
    ("common", "common", "common_y3"),
    ("r1e_via_y1", "r1e_via_y1", "r1e_via_y1"),
    ("r1e_via_y2", "r1e_via_y2", "r1e_via_y2"),
    ("sum01_a", "sum012_b", "sum012_a"),
    ("sum01_b", "sum01_a", "sum01_b"),
)


def eval_cor3_match(ch: Channel3, p_ux: np.ndarray, *,
                    ordering_reports: Sequence[OrderingReport] | None = None,
                    override: bool = False) -> Cor3MatchReport:
    """Check that the inner and outer three-message bounds collapse to the
    matched single-auxiliary region when R2 = R2e = 0, U2 = X, U3 = U1 = U.

    Each region inequality is compared against its specialized counterpart
    row in both bounds; all RHS values must agree within ``MATCH_TOL``.
    """
    _require_report(ordering_reports, "less_noisy", (1, 3),
                    "receiver 1 is less noisy than receiver 3", override)
    _require_report(ordering_reports, "less_noisy", (2, 3),
                    "receiver 2 is less noisy than receiver 3", override)
    aux = type2_aux(p_ux, ch.nx)
    mi = MITable(induced_joint(ch, aux))

    def build(templates) -> RatePolytope:
        rows = tuple(PolytopeRow(tag, tuple(sorted(coeffs.items())),
                                 sum(s * mi(n) for s, n in terms))
                     for tag, coeffs, terms in templates)
        return RatePolytope("tmp", rows)

    inner = build(_INNER_3DM_ROWS)
    outer = build(_OUTER_3DM_ROWS)
    region = build(_REGION_TYPE2_ROWS)

    out_rows = tuple(
        Cor3MatchRow(reg_tag, region.row(reg_tag).rhs,
                     inner.row(inn_tag).rhs, outer.row(out_tag).rhs)
        for reg_tag, inn_tag, out_tag in _COR3_ROW_MAP)
    return Cor3MatchReport(out_rows)


# --------------------------------------------------------------------------
# weighted-rate maximization


@dataclass(frozen=True)
class SearchConfig:
    m1: int | None = None     # default nx + 1
    m2: int | None = None
    m3: int | None = None
    restarts: int = 16
    iters: int = 60
    step: float = 0.25
    seed: int = 0

    def sizes(self, nx: int) -> tuple[int, int, int]:
        d = nx + 1
        return (self.m1 or d, self.m2 or d, self.m3 or d)


def polytope_lp(pol: RatePolytope, weights: Sequence[float]
                ) -> tuple[RateTuple, float] | None:
    """Maximize weights . r over the polytope plus the rate-tuple
    invariants (nonnegativity, R1e <= R1, R2e <= R2, pinned rates = 0).
    Returns None when infeasible."""
    w = np.asarray(weights, float)
    idx = {s: i for i, s in enumerate(RATE_SYMBOLS)}
    a_ub, b_ub = [], []
    for row in pol.rows:
        coeff = np.zeros(5)
        for s, c in row.coeffs:
            coeff[idx[s]] = c
        a_ub.append(coeff)
        b_ub.append(row.rhs)
    for e_sym, r_sym in (("R1e", "R1"), ("R2e", "R2")):
        coeff = np.zeros(5)
        coeff[idx[e_sym]], coeff[idx[r_sym]] = 1.0, -1.0
        a_ub.append(coeff)
        b_ub.append(0.0)
    a_eq, b_eq = [], []
    for s in set(RATE_SYMBOLS) - set(pol.free_symbols):
        coeff = np.zeros(5)
        coeff[idx[s]] = 1.0
        a_eq.append(coeff)
        b_eq.append(0.0)
    res = linprog(-w, A_ub=np.array(a_ub), b_ub=np.array(b_ub),
                  A_eq=np.array(a_eq) if a_eq else None,
                  b_eq=np.array(b_eq) if b_eq else None,
                  bounds=[(0, None)] * 5, method="highs")
    if not res.success:
        return None
    vals = np.maximum(res.x, 0.0)
    # clamp tiny LP slack in the coupled invariants before constructing
    r = RateTuple(vals[0], max(vals[1], vals[2]), vals[2],
                  max(vals[3], vals[4]), vals[4])
    return r, float(w @ res.x)


def max_weighted_rate(bound: BoundId, ch: Channel3,
                      weights: Sequence[float],
                      cfg: SearchConfig = SearchConfig(), *,
                      ordering_reports: Sequence[OrderingReport] | None = None,
                      override: bool = False
                      ) -> tuple[RateTuple, AuxJoint, float]:
    """Best weighted rate found by LP over the polytope at each auxiliary,
    with the auxiliary improved by random-restart coordinate perturbation.

    The result is a lower bound on the true optimum for inner bounds and a
    heuristic certificate point for outer bounds.
    """
    w = np.asarray(weights, float)
    if w.shape != (5,) or np.any(w < 0) or not np.any(w > 0):
        raise UsageError("weights must be 5 nonnegative reals, not all zero")
    m1, m2, m3 = cfg.sizes(ch.nx)

    def evaluate(aux: AuxJoint) -> float | None:
        pol = eval_bound(bound, ch, aux, ordering_reports=ordering_reports,
                         override=override)
        sol = polytope_lp(pol, w)
        return None if sol is None else sol[1]

    best: tuple[float, int, AuxJoint] | None = None
    for restart in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, restart])
        state = (FactorBlocks.uniform(m1, m2, m3, ch.nx) if restart == 0
                 else FactorBlocks.random(rng, m1, m2, m3, ch.nx))
        aux = state.to_aux()
        val = evaluate(aux)
        if val is None:
            continue
        for _ in range(cfg.iters):
            cand = state.perturbed(rng, cfg.step)
            caux = cand.to_aux()
            cval = evaluate(caux)
            if cval is not None and cval > val + 1e-12:
                state, aux, val = cand, caux, cval
        if best is None or val > best[0] + 1e-12:
            best = (val, restart, aux)
    if best is None:
        pol = eval_bound(bound, ch,
                         FactorBlocks.uniform(m1, m2, m3, ch.nx).to_aux(),
                         ordering_reports=ordering_reports, override=override)
        violated = [sc.tag for sc in pol.side_conditions if not sc.satisfied]
        raise ValidationError(
            "polytope infeasible at every searched auxiliary"
            + (f"; violated side conditions: {violated}" if violated else ""))
    val, _, aux = best
    pol = eval_bound(bound, ch, aux, ordering_reports=ordering_reports,
                     override=override)
    rate, value = polytope_lp(pol, w)
    return rate, aux, value


def _renorm(v: np.ndarray) -> np.ndarray:
    v = np.maximum(v, 1e-9)
    return v / v.sum()
