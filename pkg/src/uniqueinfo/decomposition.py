"""Shared, unique and synergistic information of two sources about a target.

All four quantities are read off a single optimizer of the convex program
solved in :mod:`.solver`; the five equivalent objective formulations make
this sound.  Values are reported in bits, with floating-point negatives in
[-1e-9, 0) clamped to zero (raw values kept in ``raw``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .dist import JointDistribution, Alphabet
from .errors import AlphabetTooLarge, NotConverged
from .solver import SolverConfig, SolverResult, solve

CLAMP = 1e-9
JOINT_SOURCE_GUARD = 64


@dataclass
class Decomposition:
    si: float
    ui_y: float
    ui_z: float
    ci: float
    mi_xy: float
    mi_xz: float
    mi_xyz: float
    coi: float
    diagnostics: SolverResult | None = None
    raw: dict[str, float] = field(default_factory=dict)


def _clamp(v: float) -> float:
    return 0.0 if -CLAMP <= v < 0.0 else v


def _roles(P: JointDistribution, x, y, z):
    names = P.names
    if len(names) != 3 and (x is None or y is None or z is None):
        raise ValueError("roles x, y, z must be named for a non-ternary distribution")
    x = names[0] if x is None else x
    y = names[1] if y is None else y
    z = names[2] if z is None else z
    if len({x, y, z}) != 3:
        raise ValueError(f"roles must be three distinct variables, got {x},{y},{z}")
    return x, y, z


def decompose(
    P: JointDistribution,
    x: str | None = None,
    y: str | None = None,
    z: str | None = None,
    config: SolverConfig | None = None,
) -> Decomposition:
    """Full decomposition of MI(x:(y,z)) for the given role assignment.

    Raises NotConverged (with the partial result attached) when the solver
    stops at a duality gap above tolerance.
    """
    x, y, z = _roles(P, x, y, z)
    ordered = P.reorder((x, y, z))
    result = solve(ordered, config)
    Q = result.optimizer.joint

    mi_xy = ordered.mutual_info(x, y)
    mi_xz = ordered.mutual_info(x, z)
    mi_xyz = ordered.mutual_info(x, (y, z))
    coi = ordered.co_information()

    raw = {
        "si": Q.co_information(),
        "ui_y": Q.mutual_info(x, y, z),
        "ui_z": Q.mutual_info(x, z, y),
        "ci": mi_xyz - result.value,
    }
    dec = Decomposition(
        si=_clamp(raw["si"]),
        ui_y=_clamp(raw["ui_y"]),
        ui_z=_clamp(raw["ui_z"]),
        ci=_clamp(raw["ci"]),
        mi_xy=mi_xy,
        mi_xz=mi_xz,
        mi_xyz=mi_xyz,
        coi=coi,
        diagnostics=result,
        raw=raw,
    )
    if not result.converged:
        raise NotConverged(
            f"gap {result.gap_certificate:.3e} bits after {result.iterations} iterations",
            partial=dec,
        )
    return dec


# -- Blackwell / channel-garbling order ---------------------------------


def blackwell_witness(
    P: JointDistribution,
    source_a: str | None = None,
    source_b: str | None = None,
    x: str | None = None,
    tol: float = 1e-9,
) -> np.ndarray | None:
    """Garbling channel turning source_a's pair marginal into source_b's.

    Returns a row-stochastic matrix ``lam`` (indexed a x b) with
    P(X,b) = sum_a P(X,a) lam(a;b) when one exists within ``tol``, else
    None.  Uses the joint-mass formulation, so zero-probability target
    values need no special casing.
    """
    names = P.names
    x = names[0] if x is None else x
    source_a = names[1] if source_a is None else source_a
    source_b = names[2] if source_b is None else source_b

    M = P.marginal((x, source_a)).mass  # nx x na
    N = P.marginal((x, source_b)).mass  # nx x nb
    nx, na = M.shape
    nb = N.shape[1]

    # variables: lam (na*nb), then residual split e+ and e- (nx*nb each)
    nlam = na * nb
    nres = nx * nb
    c = np.concatenate([np.zeros(nlam), np.ones(2 * nres)])
    A_eq = np.zeros((nres + na, nlam + 2 * nres))
    b_eq = np.zeros(nres + na)
    for ix in range(nx):
        for b in range(nb):
            r = ix * nb + b
            for a in range(na):
                A_eq[r, a * nb + b] = M[ix, a]
            A_eq[r, nlam + r] = -1.0
            A_eq[r, nlam + nres + r] = 1.0
            b_eq[r] = N[ix, b]
    for a in range(na):
        A_eq[nres + a, a * nb : (a + 1) * nb] = 1.0
        b_eq[nres + a] = 1.0
    bounds = [(0.0, 1.0)] * nlam + [(0.0, None)] * (2 * nres)
    res = linprog(c, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if not res.success or res.fun > tol:
        return None
    return res.x[:nlam].reshape(na, nb)


def blackwell_le(
    P: JointDistribution,
    source_a: str | None = None,
    source_b: str | None = None,
    x: str | None = None,
    tol: float = 1e-9,
) -> bool:
    """True iff source_a dominates source_b: b is a garbling of a.

    Equivalent to source_b carrying no unique information about the target
    with respect to source_a.
    """
    return blackwell_witness(P, source_a, source_b, x=x, tol=tol) is not None


# -- multi-source unique information -------------------------------------


def unique_info_multi(
    P: JointDistribution,
    x: str,
    y: str,
    zs: list[str],
    config: SolverConfig | None = None,
) -> float:
    """Unique information of y about x relative to the tuple of zs.

    The z variables are merged into one joint variable (guarded at
    JOINT_SOURCE_GUARD states); nonincreasing as variables are appended.
    """
    if not zs:
        raise ValueError("need at least one conditioning source")
    merged = merge_variables(P.marginal((x, y, *zs)), zs, name="+".join(zs))
    if len(merged.alphabet("+".join(zs))) > JOINT_SOURCE_GUARD:
        raise AlphabetTooLarge(
            f"joint source alphabet exceeds {JOINT_SOURCE_GUARD} states"
        )
    return decompose(merged, x=x, y=y, z="+".join(zs), config=config).ui_y


def merge_variables(P: JointDistribution, names: list[str], name: str) -> JointDistribution:
    """Replace a group of variables by a single product-alphabet variable."""
    if len(names) == 1:
        old = P.variables[P.axis(names[0])]
        reordered = P.reorder([n for n in P.names if n not in names] + list(names))
        return JointDistribution(
            reordered.variables[:-1] + ((name, old[1]),), reordered.mass
        )
    keep = [n for n in P.names if n not in names]
    reordered = P.reorder(keep + list(names))
    sizes = [len(P.alphabet(n)) for n in names]
    labels = []
    for idx in np.ndindex(*sizes):
        labels.append(",".join(P.alphabet(n).labels[i] for n, i in zip(names, idx)))
    mass = reordered.mass.reshape(reordered.mass.shape[: len(keep)] + (-1,))
    variables = reordered.variables[: len(keep)] + ((name, Alphabet(labels)),)
    return JointDistribution(variables, mass)


# -- closed-form shortcuts for structured distributions -------------------


def structured_shortcuts(
    P: JointDistribution,
    x: str | None = None,
    y: str | None = None,
    z: str | None = None,
    tol: float = 1e-10,
) -> Decomposition | None:
    """Closed-form decomposition when P has detectable structure.

    Handles: x independent of z given y; x a faithful copy of (y,z);
    identical pair marginals on matching source alphabets.  Returns None
    when no structure applies.
    """
    x, y, z = _roles(P, x, y, z)
    d = P.reorder((x, y, z))

    def build(si, ui_y, ui_z, ci):
        return Decomposition(
            si=_clamp(si),
            ui_y=_clamp(ui_y),
            ui_z=_clamp(ui_z),
            ci=_clamp(ci),
            mi_xy=d.mutual_info(x, y),
            mi_xz=d.mutual_info(x, z),
            mi_xyz=d.mutual_info(x, (y, z)),
            coi=d.co_information(),
            raw={"si": si, "ui_y": ui_y, "ui_z": ui_z, "ci": ci},
        )

    if d.mutual_info(x, z, y) <= tol:
        return build(d.mutual_info(x, z), d.mutual_info(x, y, z), 0.0, 0.0)

    if d.entropy(x, (y, z)) <= tol and d.entropy((y, z), x) <= tol:
        return build(
            d.mutual_info(y, z), d.entropy(y, z), d.entropy(z, y), 0.0
        )

    if d.alphabet(y).labels == d.alphabet(z).labels:
        pm_y = d.marginal((x, y)).mass
        pm_z = d.marginal((x, z)).mass
        if np.abs(pm_y - pm_z).max() <= tol:
            return build(d.mutual_info(x, y), 0.0, 0.0, d.mutual_info(x, y, z))

    return None
