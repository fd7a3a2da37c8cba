"""Canonical test distributions, the dice family, and the I_min comparator."""

from __future__ import annotations

from collections import defaultdict
from itertools import product
from typing import Iterable, NamedTuple

import numpy as np

from .dist import JointDistribution, from_table, Alphabet
from .errors import UnknownName
from .decomposition import decompose
from .solver import SolverConfig

CANONICAL_NAMES = (
    "Rdn",
    "Unq",
    "Xor",
    "And",
    "RdnXor",
    "RdnUnqXor",
    "XorAnd",
    "Copy",
)

_VARS = ("X", "Y", "Z")


def _from_atoms(atoms: dict) -> JointDistribution:
    """Assemble (X,Y,Z) from accumulated atom masses with sorted alphabets."""
    alphabets = [Alphabet(sorted({k[i] for k in atoms})) for i in range(3)]
    variables = list(zip(_VARS, alphabets))
    return from_table(list(atoms.items()), variables=variables)


def _deterministic(source_bits: int, fx, fy, fz) -> JointDistribution:
    """Uniform i.i.d. bits pushed through deterministic maps to (X,Y,Z)."""
    atoms: dict = defaultdict(float)
    mass = 1.0 / 2**source_bits
    for bits in product((0, 1), repeat=source_bits):
        atoms[(fx(bits), fy(bits), fz(bits))] += mass
    return _from_atoms(dict(atoms))


def canonical(name: str) -> JointDistribution:
    """One of the canonical example distributions, by (case-insensitive) name."""
    key = str(name).lower()
    builders = {
        "rdn": lambda: _deterministic(1, lambda b: str(b[0]), lambda b: str(b[0]), lambda b: str(b[0])),
        "unq": lambda: _deterministic(
            2, lambda b: f"{b[0]}{b[1]}", lambda b: str(b[0]), lambda b: str(b[1])
        ),
        "xor": lambda: _deterministic(
            2, lambda b: str(b[0] ^ b[1]), lambda b: str(b[0]), lambda b: str(b[1])
        ),
        "and": lambda: _deterministic(
            2, lambda b: str(b[0] & b[1]), lambda b: str(b[0]), lambda b: str(b[1])
        ),
        "rdnxor": lambda: _deterministic(
            3,
            lambda b: f"{b[0] ^ b[1]}{b[2]}",
            lambda b: f"{b[0]}{b[2]}",
            lambda b: f"{b[1]}{b[2]}",
        ),
        "rdnunqxor": lambda: _deterministic(
            5,
            lambda b: f"{b[0] ^ b[1]}{b[2]}{b[3]}{b[4]}",
            lambda b: f"{b[0]}{b[2]}{b[4]}",
            lambda b: f"{b[1]}{b[3]}{b[4]}",
        ),
        "xorand": lambda: _deterministic(
            2,
            lambda b: f"{b[0] ^ b[1]}{b[0] & b[1]}",
            lambda b: str(b[0]),
            lambda b: str(b[1]),
        ),
        "copy": lambda: copy_distribution(),
    }
    if key not in builders:
        raise UnknownName(f"{name!r}; choose one of {CANONICAL_NAMES}")
    return builders[key]()


def copy_distribution(source: JointDistribution | None = None) -> JointDistribution:
    """X = (Y,Z) over a configurable source law (default: i.i.d. uniform bits)."""
    if source is None:
        return canonical("unq")
    if len(source.shape) != 2:
        raise ValueError("copy source must be a two-variable distribution")
    atoms = {}
    (yname, ya), (zname, za) = source.variables
    for i, ylab in enumerate(ya.labels):
        for j, zlab in enumerate(za.labels):
            m = source.mass[i, j]
            if m > 0:
                atoms[(f"{ylab},{zlab}", ylab, zlab)] = m
    return _from_atoms(atoms)


class DiceParams(NamedTuple):
    alpha: int  # weight of the second die in the sum, 1..6
    lam: float  # coupling: 0 = identical dice, 1 = independent dice

    def validate(self):
        if self.alpha not in range(1, 7):
            raise ValueError(f"alpha must be in 1..6, got {self.alpha}")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lambda must be in [0,1], got {self.lam}")


def dice(params: DiceParams) -> JointDistribution:
    """Two coupled dice Y, Z and their weighted sum X = Y + alpha*Z.

    P(Y=i, Z=j) = lam/36 + (1-lam) * [i==j]/6; the X alphabet is the set of
    attained sums, labelled by their integer values.
    """
    params = DiceParams(*params)
    params.validate()
    atoms: dict = defaultdict(float)
    for i in range(1, 7):
        for j in range(1, 7):
            m = params.lam / 36 + (1 - params.lam) * (1 / 6 if i == j else 0.0)
            atoms[(str(i + params.alpha * j), str(i), str(j))] += m
    alphabets = [
        Alphabet(sorted({k[0] for k in atoms}, key=int)),
        Alphabet([str(i) for i in range(1, 7)]),
        Alphabet([str(i) for i in range(1, 7)]),
    ]
    return from_table(list(atoms.items()), variables=list(zip(_VARS, alphabets)))


def i_min(
    P: JointDistribution,
    x: str | None = None,
    y: str | None = None,
    z: str | None = None,
) -> float:
    """Williams-Beer style minimum of the two specific informations.

    sum_x p(x) * min(I(X=x : Y), I(X=x : Z)) with the specific information
    I(X=x : V) = sum_v P(v|x) log2(P(x|v) / P(x)).
    """
    names = P.names
    x = names[0] if x is None else x
    y = names[1] if y is None else y
    z = names[2] if z is None else z
    px = P.marginal(x).mass

    def specific(v: str) -> np.ndarray:
        joint = P.marginal((x, v)).mass  # nx x nv
        pv = joint.sum(axis=0)
        out = np.zeros(len(px))
        for ix in np.flatnonzero(px > 0):
            for iv in np.flatnonzero(joint[ix] > 0):
                cond_v_given_x = joint[ix, iv] / px[ix]
                cond_x_given_v = joint[ix, iv] / pv[iv]
                out[ix] += cond_v_given_x * np.log2(cond_x_given_v / px[ix])
        return out

    return float(px @ np.minimum(specific(y), specific(z)))


class SweepRow(NamedTuple):
    lam: float
    si: float
    ui_y: float
    ui_z: float
    ci: float


def dice_sweep(
    alpha: int,
    lambdas: Iterable[float],
    config: SolverConfig | None = None,
) -> list[SweepRow]:
    """Decomposition of the dice family along a list of coupling values."""
    rows = []
    for lam in lambdas:
        dec = decompose(dice(DiceParams(alpha, float(lam))), config=config)
        rows.append(SweepRow(float(lam), dec.si, dec.ui_y, dec.ui_z, dec.ci))
    return rows
