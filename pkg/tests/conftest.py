"""Shared generators for the randomized tests.

Every test seeds its own ``numpy.random.default_rng`` so failures
reproduce exactly.
"""

from __future__ import annotations

import numpy as np

from uniqueinfo import Alphabet, JointDistribution


def labels(k: int) -> list[str]:
    return [str(i) for i in range(k)]


def joint_from_mass(mass: np.ndarray, names=("X", "Y", "Z")) -> JointDistribution:
    variables = [(n, Alphabet(labels(k))) for n, k in zip(names, mass.shape)]
    return JointDistribution(variables, mass)


def random_joint(rng, shape, names=("X", "Y", "Z")) -> JointDistribution:
    """Dense random joint distribution with the given alphabet sizes."""
    mass = rng.dirichlet(np.ones(int(np.prod(shape)))).reshape(shape)
    return joint_from_mass(mass, names)


def random_channel(rng, n_in: int, n_out: int) -> np.ndarray:
    """Row-stochastic matrix with Dirichlet rows."""
    return rng.dirichlet(np.ones(n_out), size=n_in)


def garble_source(P_xy_mass: np.ndarray, lam: np.ndarray) -> JointDistribution:
    """Extend an (X,Y) table by Z drawn from a channel on Y.

    The result has X independent of Z given Y, and the channel X -> Z is a
    garbling of the channel X -> Y by construction.
    """
    return joint_from_mass(P_xy_mass[:, :, None] * lam[None, :, :])


def common_channel_joint(p: np.ndarray, kappa: np.ndarray) -> JointDistribution:
    """Joint with the same channel from X to both sources.

    The (X,Y) and (X,Z) pair marginals coincide, so neither source can
    carry unique information.
    """
    mass = p[:, None, None] * kappa[:, :, None] * kappa[:, None, :]
    return joint_from_mass(mass)


def product_system(P1: JointDistribution, P2: JointDistribution) -> JointDistribution:
    """Independent composition: each variable is the pair of the factors'."""
    m = np.einsum("ijk,lmn->iljmkn", P1.mass, P2.mass)
    s1, s2 = P1.shape, P2.shape
    mass = m.reshape(s1[0] * s2[0], s1[1] * s2[1], s1[2] * s2[2])
    return joint_from_mass(mass)
