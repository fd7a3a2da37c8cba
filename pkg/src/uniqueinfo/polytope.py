"""The polytope of joint distributions with fixed (X,Y) and (X,Z) marginals.

Variable order convention throughout: the first variable of a
three-variable distribution is the target X, the second and third are the
sources Y and Z.  The feasible set factors over the target values into
transportation polytopes (fixed row and column sums), one per x with
positive probability.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dist import JointDistribution
from .errors import InfeasibleMarginals, ShapeMismatch, StepTooLarge

STEP_CLAMP = 1e-14


@dataclass(frozen=True)
class GammaDirection:
    """Kernel direction +e(x,y,z) +e(x,y2,z2) -e(x,y2,z) -e(x,y,z2).

    Adding a multiple of this tensor to a joint table leaves both the (X,Y)
    and the (X,Z) marginal unchanged.
    """

    x: int
    y: int
    y2: int
    z: int
    z2: int

    def __post_init__(self):
        if self.y == self.y2 or self.z == self.z2:
            raise ValueError("direction needs two distinct y and z indices")

    def as_array(self, shape: tuple[int, int, int]) -> np.ndarray:
        g = np.zeros(shape)
        g[self.x, self.y, self.z] = 1.0
        g[self.x, self.y2, self.z2] = 1.0
        g[self.x, self.y2, self.z] = -1.0
        g[self.x, self.y, self.z2] = -1.0
        return g


@dataclass(frozen=True)
class SliceSpec:
    """Row/column sums of the transportation polytope at one target value."""

    x: int
    row_sums: np.ndarray
    col_sums: np.ndarray

    def __post_init__(self):
        for s in (self.row_sums, self.col_sums):
            if abs(s.sum() - 1.0) > 1e-12:
                raise InfeasibleMarginals(f"slice sums {s.sum()} != 1")


class FeasiblePoint:
    """A member of the feasible polytope, jointly and in per-x coordinates."""

    def __init__(self, joint: JointDistribution, slices: dict[int, np.ndarray]):
        self.joint = joint
        self.slices = slices

    @classmethod
    def from_joint(cls, joint: JointDistribution) -> "FeasiblePoint":
        p = joint.mass.sum(axis=(1, 2))
        slices = {
            int(x): joint.mass[x] / p[x] for x in np.flatnonzero(p > 0)
        }
        return cls(joint, slices)

    @classmethod
    def from_slices(
        cls, anchor: JointDistribution, slices: dict[int, np.ndarray]
    ) -> "FeasiblePoint":
        p = anchor.mass.sum(axis=(1, 2))
        mass = np.zeros(anchor.shape)
        for x, s in slices.items():
            mass[x] = p[x] * s
        return cls(JointDistribution(anchor.variables, mass), slices)


def basis(P: JointDistribution) -> list[GammaDirection]:
    """Kernel basis anchored at index 0 of the source alphabets.

    Returns nx*(ny-1)*(nz-1) directions; their span is the full kernel of
    the pair-marginal map.
    """
    nx, ny, nz = _shape3(P)
    return [
        GammaDirection(x=x, y=0, y2=y, z=0, z2=z)
        for x in range(nx)
        for y in range(1, ny)
        for z in range(1, nz)
    ]


def slice_decompose(P: JointDistribution) -> list[SliceSpec]:
    """One slice spec per target value with positive probability."""
    _shape3(P)
    p = P.mass.sum(axis=(1, 2))
    specs = []
    for x in np.flatnonzero(p > 0):
        specs.append(
            SliceSpec(
                x=int(x),
                row_sums=P.mass[x].sum(axis=1) / p[x],
                col_sums=P.mass[x].sum(axis=0) / p[x],
            )
        )
    return specs


def product_point(P: JointDistribution) -> FeasiblePoint:
    """The feasible point making the sources conditionally independent.

    Q0(x,y,z) = P(x,y) P(x,z) / P(x) on the support of X, else 0.
    """
    _shape3(P)
    p = P.mass.sum(axis=(1, 2))
    pxy = P.mass.sum(axis=2)
    pxz = P.mass.sum(axis=1)
    mass = np.zeros(P.shape)
    slices = {}
    for x in np.flatnonzero(p > 0):
        s = np.outer(pxy[x] / p[x], pxz[x] / p[x])
        slices[int(x)] = s
        mass[x] = p[x] * s
    return FeasiblePoint(JointDistribution(P.variables, mass), slices)


def membership(Q, P: JointDistribution, tol: float = 1e-9) -> bool:
    """True iff Q shares P's (X,Y) and (X,Z) pair marginals within tol."""
    q = Q.joint if isinstance(Q, FeasiblePoint) else Q
    _shape3(P)
    if q.shape != P.shape or [a for _, a in q.variables] != [a for _, a in P.variables]:
        raise ShapeMismatch(f"shapes {q.shape} vs {P.shape} or alphabets differ")
    dxy = np.abs(q.mass.sum(axis=2) - P.mass.sum(axis=2)).max()
    dxz = np.abs(q.mass.sum(axis=1) - P.mass.sum(axis=1)).max()
    return bool(dxy <= tol and dxz <= tol)


def feasible_steps(Q, gamma: GammaDirection) -> tuple[float, float]:
    """Maximal feasible steps (backward, forward) along a kernel direction.

    Returned as ``(t_min, t_max)`` with ``t_min <= 0 <= t_max``; computed by
    an exact min-ratio test over the entries the step decreases.
    """
    mass = (Q.joint if isinstance(Q, FeasiblePoint) else Q).mass
    pos = (mass[gamma.x, gamma.y2, gamma.z], mass[gamma.x, gamma.y, gamma.z2])
    neg = (mass[gamma.x, gamma.y, gamma.z], mass[gamma.x, gamma.y2, gamma.z2])
    return -min(neg), min(pos)


def apply_direction(Q, gamma: GammaDirection, t: float) -> FeasiblePoint:
    """Shift a feasible point by t along a kernel direction.

    Steps within STEP_CLAMP of the boundary are clamped onto it; anything
    beyond raises StepTooLarge carrying the maximal feasible step.
    """
    joint = Q.joint if isinstance(Q, FeasiblePoint) else Q
    t_min, t_max = feasible_steps(joint, gamma)
    bound = t_max if t >= 0 else t_min
    if abs(t) > abs(bound) + STEP_CLAMP:
        raise StepTooLarge(t, bound)
    t = float(np.clip(t, t_min, t_max))
    mass = joint.mass + t * gamma.as_array(joint.shape)
    return FeasiblePoint.from_joint(JointDistribution(joint.variables, mass))


# -- transportation vertex oracle ---------------------------------------


def transport_vertex(
    spec: SliceSpec, cost: np.ndarray, state: dict | None = None
) -> np.ndarray:
    """A cost-minimizing vertex of the transportation polytope of a slice.

    Exact LP optimum via the transportation simplex: northwest-corner
    start, Dantzig pivoting with a Bland fallback against cycling, leaving
    cell chosen lexicographically on ties.  Deterministic.  When ``state``
    is given, the optimal basis is cached there under the slice's target
    index and reused to warm start the next call (the marginals of a slice
    never change, so a cached basis stays feasible).
    """
    cost = np.asarray(cost, dtype=np.float64)
    row, col = np.asarray(spec.row_sums, float), np.asarray(spec.col_sums, float)
    if cost.shape != (len(row), len(col)) or not np.all(np.isfinite(cost)):
        raise InfeasibleMarginals(f"cost shape {cost.shape} or non-finite entries")
    if row.min(initial=0) < -1e-12 or col.min(initial=0) < -1e-12:
        raise InfeasibleMarginals("negative marginals")
    if abs(row.sum() - col.sum()) > 1e-9:
        raise InfeasibleMarginals(f"row sum {row.sum()} != col sum {col.sum()}")
    start = None if state is None else state.get(spec.x)
    alloc, basic = _transport_simplex(
        np.maximum(row, 0.0), np.maximum(col, 0.0), cost, start
    )
    if state is not None:
        state[spec.x] = (alloc, basic)
    return alloc


def _northwest_corner(row, col):
    m, n = len(row), len(col)
    alloc = np.zeros((m, n))
    basic = []
    a, b = row.copy(), col.copy()
    i = j = 0
    while True:
        q = min(a[i], b[j])
        alloc[i, j] = q
        basic.append((i, j))
        a[i] -= q
        b[j] -= q
        if i == m - 1 and j == n - 1:
            break
        if a[i] <= b[j] and i < m - 1:
            i += 1
        elif j < n - 1:
            j += 1
        else:
            i += 1
    return alloc, basic


def _duals(basic, cost, m, n):
    u = np.full(m, np.nan)
    v = np.full(n, np.nan)
    by_row: dict[int, list] = {}
    by_col: dict[int, list] = {}
    for c in basic:
        by_row.setdefault(c[0], []).append(c)
        by_col.setdefault(c[1], []).append(c)
    remaining = set(basic)
    for seed in basic:  # loop anchors each component of a degenerate tree
        if seed not in remaining:
            continue
        if np.isnan(u[seed[0]]):
            u[seed[0]] = 0.0
        stack = [(seed[0], True)]
        while stack:
            node, is_row = stack.pop()
            for c in by_row.get(node, []) if is_row else by_col.get(node, []):
                if c not in remaining:
                    continue
                remaining.discard(c)
                i, j = c
                if is_row:
                    if np.isnan(v[j]):
                        v[j] = cost[i, j] - u[i]
                    stack.append((j, False))
                else:
                    if np.isnan(u[i]):
                        u[i] = cost[i, j] - v[j]
                    stack.append((i, True))
    return u, v


def _find_cycle(basic, enter):
    """Unique alternating row/column cycle closed by the entering cell.

    Found by pruning leaves: a cell alone in its row or column cannot lie
    on the cycle; afterwards every remaining row and column holds exactly
    two cells and the walk from the entering cell is forced.
    """
    cells = basic + [enter]
    while True:
        rows: dict[int, list] = {}
        cols: dict[int, list] = {}
        for c in cells:
            rows.setdefault(c[0], []).append(c)
            cols.setdefault(c[1], []).append(c)
        keep = [c for c in cells if len(rows[c[0]]) > 1 and len(cols[c[1]]) > 1]
        if len(keep) == len(cells):
            break
        cells = keep
    if enter not in cells:
        raise InfeasibleMarginals("degenerate basis: no pivot cycle found")
    cycle = [enter]
    cur, along_row = enter, True
    while True:
        group = rows[cur[0]] if along_row else cols[cur[1]]
        nxt = next(c for c in group if c != cur)
        if nxt == enter:
            return cycle
        cycle.append(nxt)
        cur, along_row = nxt, not along_row


def _transport_simplex(row, col, cost, start=None):
    m, n = len(row), len(col)
    if start is None:
        alloc, basic = _northwest_corner(row, col)
    else:
        alloc, basic = start[0].copy(), list(start[1])
    tol = 1e-12 * (1.0 + np.abs(cost).max())
    max_pivots = 50 * (m + n) * max(m, n)
    bland_after = 10 * (m + n) * max(m, n)
    for pivot in range(max_pivots):
        u, v = _duals(basic, cost, m, n)
        reduced = cost - u[:, None] - v[None, :]
        for c in basic:
            reduced[c] = 0.0
        if pivot < bland_after:  # Dantzig: steepest improving cell
            enter = np.unravel_index(int(np.argmin(reduced)), reduced.shape)
            if reduced[enter] >= -tol:
                return alloc, basic
            enter = (int(enter[0]), int(enter[1]))
        else:  # Bland's rule: first improving cell, immune to cycling
            cand = np.argwhere(reduced < -tol)
            if len(cand) == 0:
                return alloc, basic
            enter = (int(cand[0][0]), int(cand[0][1]))
        cycle = _find_cycle(basic, enter)
        minus = cycle[1::2]
        theta = min(alloc[c] for c in minus)
        leave = min(c for c in minus if alloc[c] == min(alloc[d] for d in minus))
        for c in cycle[0::2]:
            alloc[c] += theta
        for c in minus:
            alloc[c] -= theta
        alloc[leave] = 0.0
        basic[basic.index(leave)] = enter
    raise InfeasibleMarginals("transportation simplex did not terminate")


def _shape3(P: JointDistribution) -> tuple[int, int, int]:
    if len(P.shape) != 3:
        raise ShapeMismatch(f"need a three-variable distribution, have {P.names}")
    return P.shape
