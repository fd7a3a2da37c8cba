"""Finite joint distributions and Shannon information quantities.

All reported quantities are in bits.  The conventions 0*log(0) = 0 and
0*log(0/0) = 0 are applied entrywise.  Probabilities are 64-bit floats;
input normalization is checked at 1e-9 and tightened to 1e-12 internally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateEntry,
    NegativeMass,
    NotNormalized,
    ParseError,
    UnknownVariable,
)

NORMALIZATION_TOL = 1e-9
INTERNAL_TOL = 1e-12


@dataclass(frozen=True)
class Alphabet:
    """Ordered finite alphabet; the label order fixes the index mapping."""

    labels: tuple[str, ...]

    def __init__(self, labels: Iterable[str]):
        labels = tuple(str(s) for s in labels)
        if not labels:
            raise ValueError("alphabet must be non-empty")
        if len(set(labels)) != len(labels):
            raise ValueError(f"alphabet labels must be unique: {labels}")
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise KeyError(f"label {label!r} not in alphabet {self.labels}")


def _normalize_names(names) -> tuple[str, ...]:
    if isinstance(names, str):
        return (names,)
    return tuple(names)


class JointDistribution:
    """Dense probability table over named variables with finite alphabets.

    Immutable after construction: the mass array is marked read-only and
    all operations return new values.
    """

    def __init__(self, variables: Sequence[tuple[str, Alphabet]], mass: np.ndarray):
        variables = tuple((str(n), a) for n, a in variables)
        names = [n for n, _ in variables]
        if len(set(names)) != len(names):
            raise ValueError(f"variable names must be unique: {names}")
        mass = np.asarray(mass, dtype=np.float64)
        shape = tuple(len(a) for _, a in variables)
        if mass.shape != shape:
            raise ValueError(f"mass shape {mass.shape} != alphabet shape {shape}")
        if mass.min(initial=0.0) < -INTERNAL_TOL:
            raise NegativeMass(f"negative probability {mass.min()}")
        mass = np.maximum(mass, 0.0)
        total = mass.sum()
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise NotNormalized(f"total mass {total} deviates from 1")
        mass = mass / total
        mass.flags.writeable = False
        self.variables = variables
        self.mass = mass

    # -- basic structure ------------------------------------------------

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.variables)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.mass.shape

    def alphabet(self, name: str) -> Alphabet:
        return self.variables[self.axis(name)][1]

    def axis(self, name: str) -> int:
        for i, (n, _) in enumerate(self.variables):
            if n == name:
                return i
        raise UnknownVariable(f"no variable named {name!r} (have {self.names})")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, JointDistribution)
            and self.variables == other.variables
            and np.array_equal(self.mass, other.mass)
        )

    def __repr__(self) -> str:
        return f"JointDistribution({self.names}, shape={self.shape})"

    def reorder(self, names: Sequence[str]) -> "JointDistribution":
        """Permute the variable order; the table is transposed accordingly."""
        names = _normalize_names(names)
        if sorted(names) != sorted(self.names):
            raise UnknownVariable(f"reorder {names} must permute {self.names}")
        axes = [self.axis(n) for n in names]
        return JointDistribution(
            [self.variables[a] for a in axes], np.transpose(self.mass, axes)
        )

    # -- marginals -------------------------------------------------------

    def marginal(self, names) -> "JointDistribution":
        """Sum out every variable not listed; listed order is preserved."""
        names = _normalize_names(names)
        if not names:
            raise UnknownVariable("marginal needs at least one variable")
        keep = [self.axis(n) for n in names]
        drop = tuple(i for i in range(len(self.variables)) if i not in keep)
        table = self.mass.sum(axis=drop) if drop else self.mass
        # sum() leaves the kept axes in their original order; permute to `names`
        remaining = sorted(keep)
        table = np.transpose(table, [remaining.index(a) for a in keep])
        return JointDistribution([self.variables[a] for a in keep], table)

    # -- information quantities (bits) ------------------------------------

    def entropy(self, names=None, given=()) -> float:
        """Shannon entropy H(names | given) in bits."""
        names = self.names if names is None else _normalize_names(names)
        given = _normalize_names(given)
        if set(names) & set(given):
            raise ValueError(f"entropy variables {names} overlap given {given}")
        h = _plain_entropy(self.marginal(tuple(names) + given).mass)
        if given:
            h -= _plain_entropy(self.marginal(given).mass)
        return h

    def mutual_info(self, a, b, given=()) -> float:
        """Conditional mutual information MI(a : b | given) in bits."""
        a, b, given = _normalize_names(a), _normalize_names(b), _normalize_names(given)
        for s, t in ((a, b), (a, given), (b, given)):
            if set(s) & set(t):
                raise ValueError(f"variable groups must be disjoint: {s} vs {t}")
        return self.entropy(a, given) - self.entropy(a, b + given)

    def co_information(self) -> float:
        """MI(v0:v1) - MI(v0:v1|v2) for a three-variable distribution."""
        if len(self.variables) != 3:
            raise UnknownVariable(
                f"co-information needs exactly 3 variables, have {self.names}"
            )
        v0, v1, v2 = self.names
        return self.mutual_info(v0, v1) - self.mutual_info(v0, v1, v2)

    def pair_marginals(self) -> "PairMarginals":
        """Split a three-variable distribution into (p, kappa, mu).

        The first variable is the target; kappa and mu are the row-stochastic
        channels to the second and third variable.  Rows at zero-probability
        target values are undefined and filled with NaN.
        """
        if len(self.variables) != 3:
            raise UnknownVariable(
                f"pair marginals need exactly 3 variables, have {self.names}"
            )
        x, y, z = self.names
        p = self.marginal(x).mass
        support = p > 0
        pxy = self.marginal((x, y)).mass
        pxz = self.marginal((x, z)).mass
        kappa = np.full_like(pxy, np.nan)
        mu = np.full_like(pxz, np.nan)
        kappa[support] = pxy[support] / p[support, None]
        mu[support] = pxz[support] / p[support, None]
        for m in (p, kappa, mu, support):
            m.flags.writeable = False
        return PairMarginals(p=p, kappa=kappa, mu=mu, support=support)


@dataclass(frozen=True)
class PairMarginals:
    """Target marginal plus the channels to the two source variables."""

    p: np.ndarray
    kappa: np.ndarray
    mu: np.ndarray
    support: np.ndarray = field(repr=False)


def _plain_entropy(mass: np.ndarray) -> float:
    p = mass[mass > 0]
    return float(-(p @ np.log2(p))) if p.size else 0.0


def from_table(entries, variables: Sequence[tuple[str, Alphabet]] | None = None):
    """Build a JointDistribution from (labels, probability) pairs.

    ``entries`` is a mapping or an iterable of ``(labels, prob)`` where
    ``labels`` holds one label per variable.  When ``variables`` is omitted,
    alphabets are collected from the entries in order of first appearance.
    """
    if hasattr(entries, "items"):
        entries = list(entries.items())
    else:
        entries = list(entries)
    if not entries:
        raise NotNormalized("empty table")
    nvars = len(entries[0][0]) if isinstance(entries[0][0], (tuple, list)) else 1
    rows = []
    for labels, prob in entries:
        labels = tuple(str(s) for s in (labels if isinstance(labels, (tuple, list)) else (labels,)))
        if len(labels) != nvars:
            raise ParseError(f"entry {labels} has {len(labels)} labels, expected {nvars}")
        if prob < 0:
            raise NegativeMass(f"negative probability {prob} at {labels}")
        rows.append((labels, float(prob)))
    if variables is None:
        seen: list[dict] = [dict() for _ in range(nvars)]
        for labels, _ in rows:
            for i, s in enumerate(labels):
                seen[i].setdefault(s, None)
        variables = [(f"V{i}", Alphabet(seen[i].keys())) for i in range(nvars)]
    variables = [(n, a) for n, a in variables]
    mass = np.zeros(tuple(len(a) for _, a in variables))
    filled = set()
    for labels, prob in rows:
        idx = tuple(a.index(s) for (_, a), s in zip(variables, labels))
        if idx in filled:
            raise DuplicateEntry(f"duplicate index tuple {labels}")
        filled.add(idx)
        mass[idx] = prob
    return JointDistribution(variables, mass)
