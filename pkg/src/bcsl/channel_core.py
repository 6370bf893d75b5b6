"""Exact probability and information computations on finite alphabets.

Everything is base-2: entropies and mutual informations are in bits, rates
in bits per channel use.  Joint distributions are name-addressed tensors so
that expressions over many variable subsets cannot silently transpose axes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import UsageError, ValidationError

# Normalization tolerance on ingest.
NORM_TOL = 1e-12
# Information quantities this far below zero are clamped to zero ...
CLAMP_TOL = 1e-10
# ... but anything below this indicates a real bug and raises.
HARD_TOL = 1e-6


def _check_probs(p: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(p)):
        raise ValidationError(f"{what}: non-finite entry")
    if np.any(p < 0):
        raise ValidationError(f"{what}: negative entry {p.min()!r}")


def _clamp(value: float, what: str) -> float:
    """Clamp float noise below zero; hard-error on real negativity."""
    if value >= 0.0:
        return value
    if value >= -CLAMP_TOL:
        return 0.0
    if value >= -HARD_TOL:
        # grey zone: still noise for chained computations, clamp but keep
        # the value distinguishable from a modeling bug
        return 0.0
    raise ValidationError(f"{what} = {value}: negative beyond tolerance")


@dataclass(frozen=True)
class Pmf:
    """Probability mass function over a finite alphabet."""

    probs: np.ndarray

    def __init__(self, probs: Iterable[float]):
        p = np.asarray(list(probs) if not isinstance(probs, np.ndarray) else probs,
                       dtype=float)
        if p.ndim != 1 or p.size < 1:
            raise ValidationError("Pmf: need a 1-D nonempty vector")
        _check_probs(p, "Pmf")
        if abs(p.sum() - 1.0) > NORM_TOL:
            raise ValidationError(f"Pmf: sums to {p.sum()!r}, not 1")
        object.__setattr__(self, "probs", p)
        p.setflags(write=False)

    @property
    def k(self) -> int:
        return self.probs.size


@dataclass(frozen=True)
class JointPmf:
    """Joint pmf over named axes, stored as a dense tensor."""

    axes: tuple[str, ...]
    probs: np.ndarray

    def __init__(self, axes: Sequence[str], probs: np.ndarray):
        axes = tuple(axes)
        if len(set(axes)) != len(axes):
            raise ValidationError(f"JointPmf: duplicate axis names in {axes}")
        p = np.asarray(probs, dtype=float)
        if p.ndim != len(axes):
            raise ValidationError(
                f"JointPmf: {len(axes)} axis names but tensor rank {p.ndim}")
        _check_probs(p, "JointPmf")
        if abs(p.sum() - 1.0) > NORM_TOL:
            raise ValidationError(f"JointPmf: sums to {p.sum()!r}, not 1")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "probs", p)
        p.setflags(write=False)

    def _axis_indices(self, names: Iterable[str]) -> list[int]:
        idx = []
        for name in names:
            if name not in self.axes:
                raise UsageError(f"unknown axis {name!r}; have {self.axes}")
            idx.append(self.axes.index(name))
        return idx

    def marginal(self, keep: Sequence[str]) -> "JointPmf":
        """Marginalize onto the named axes (in the given order)."""
        keep = list(keep)
        self._axis_indices(keep)  # validates
        drop = [i for i, a in enumerate(self.axes) if a not in keep]
        reduced = self.probs.sum(axis=tuple(drop)) if drop else self.probs
        remaining = [a for a in self.axes if a in keep]
        # reorder to requested order
        perm = [remaining.index(a) for a in keep]
        return JointPmf(keep, np.transpose(reduced, perm))

    def group_entropy(self, names: Sequence[str]) -> float:
        return tensor_entropy(self.marginal(names).probs)


def tensor_entropy(p: np.ndarray) -> float:
    """Shannon entropy in bits of an arbitrary-shape probability tensor."""
    flat = np.asarray(p, dtype=float).ravel()
    nz = flat[flat > 0]
    return _clamp(float(-(nz * np.log2(nz)).sum()), "entropy")


def entropy(p: Pmf) -> float:
    """H(p) in bits, with 0 log 0 = 0."""
    return tensor_entropy(p.probs)


def mutual_information(j: JointPmf, group_a: Sequence[str],
                       group_b: Sequence[str]) -> float:
    """I(A;B) in bits between two disjoint groups of axes."""
    a, b = list(group_a), list(group_b)
    if not a or not b:
        raise UsageError("mutual_information: empty axis group")
    if set(a) & set(b):
        raise UsageError(f"mutual_information: overlapping groups {a} / {b}")
    ha = j.group_entropy(a)
    hb = j.group_entropy(b)
    hab = j.group_entropy(a + b)
    return _clamp(ha + hb - hab, "mutual information")


def conditional_mi(j: JointPmf, group_a: Sequence[str], group_b: Sequence[str],
                   group_c: Sequence[str]) -> float:
    """I(A;B|C) in bits; C may be empty (plain mutual information)."""
    a, b, c = list(group_a), list(group_b), list(group_c)
    if not a or not b:
        raise UsageError("conditional_mi: empty A or B group")
    groups = [set(a), set(b), set(c)]
    for i in range(3):
        for k in range(i + 1, 3):
            if groups[i] & groups[k]:
                raise UsageError("conditional_mi: axis sets overlap")
    if not c:
        return mutual_information(j, a, b)
    # I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C)
    hac = j.group_entropy(a + c)
    hbc = j.group_entropy(b + c)
    habc = j.group_entropy(a + b + c)
    hc = j.group_entropy(c)
    return _clamp(hac + hbc - habc - hc, "conditional mutual information")


@dataclass(frozen=True)
class Channel3:
    """Single-use 3-receiver DMC: p(y1,y2,y3|x) on finite alphabets."""

    nx: int
    ny1: int
    ny2: int
    ny3: int
    p: np.ndarray = field(repr=False)

    def __init__(self, nx: int, ny1: int, ny2: int, ny3: int, p: np.ndarray):
        sizes = (nx, ny1, ny2, ny3)
        if any(int(s) < 1 for s in sizes):
            raise ValidationError(f"Channel3: alphabet sizes {sizes} must be >= 1")
        t = np.asarray(p, dtype=float)
        if t.shape != sizes:
            raise ValidationError(
                f"Channel3: tensor shape {t.shape} does not match sizes {sizes}")
        _check_probs(t, "Channel3")
        if np.any(t > 1.0 + NORM_TOL):
            raise ValidationError("Channel3: entry above 1")
        row_sums = t.sum(axis=(1, 2, 3))
        bad = np.nonzero(np.abs(row_sums - 1.0) > NORM_TOL)[0]
        if bad.size:
            x = int(bad[0])
            raise ValidationError(
                f"Channel3: row x={x} sums to {row_sums[x]!r}, not 1")
        object.__setattr__(self, "nx", int(nx))
        object.__setattr__(self, "ny1", int(ny1))
        object.__setattr__(self, "ny2", int(ny2))
        object.__setattr__(self, "ny3", int(ny3))
        object.__setattr__(self, "p", t)
        t.setflags(write=False)

    # -- single-receiver marginals -------------------------------------
    def marginal_to(self, receiver: int) -> np.ndarray:
        """p(y_receiver|x) as an (nx, ny) matrix, receiver in {1,2,3}."""
        if receiver not in (1, 2, 3):
            raise UsageError(f"receiver must be 1, 2 or 3, got {receiver}")
        axes = {1: (2, 3), 2: (1, 3), 3: (1, 2)}[receiver]
        return self.p.sum(axis=axes)

    @classmethod
    def from_dict(cls, d: dict) -> "Channel3":
        try:
            return cls(d["nx"], d["ny1"], d["ny2"], d["ny3"], np.asarray(d["p"]))
        except KeyError as e:
            raise ValidationError(f"Channel3 JSON: missing key {e}") from e

    @classmethod
    def from_json(cls, path: str) -> "Channel3":
        with open(path) as fh:
            try:
                d = json.load(fh)
            except json.JSONDecodeError as e:
                raise ValidationError(f"{path}: malformed JSON ({e})") from e
        return cls.from_dict(d)

    def to_dict(self) -> dict:
        return {"nx": self.nx, "ny1": self.ny1, "ny2": self.ny2,
                "ny3": self.ny3, "p": self.p.tolist()}


def induced_joint(ch: Channel3, aux: "AuxJointLike") -> JointPmf:
    """Joint law of (U1,U2,U3,X,Y1,Y2,Y3) when `aux` drives the channel.

    p(u1,u2,u3,x,y1,y2,y3) = p(u1,u2,u3,x) * p(y1,y2,y3|x).
    """
    a = np.asarray(aux.p, dtype=float)
    if a.ndim != 4:
        raise UsageError("induced_joint: aux tensor must have rank 4")
    if a.shape[3] != ch.nx:
        raise UsageError(
            f"induced_joint: aux X alphabet {a.shape[3]} != channel nx {ch.nx}")
    joint = np.einsum("abcx,xijk->abcxijk", a, ch.p)
    return JointPmf(("U1", "U2", "U3", "X", "Y1", "Y2", "Y3"), joint)


class AuxJointLike:
    """Anything with a rank-4 `.p` tensor over (U1,U2,U3,X); see regions."""

    p: np.ndarray
