"""Certified minimization of MI(X:(Y,Z)) over the pair-marginal polytope.

The optimizer is a conditional-gradient (Frank-Wolfe) method with away
steps.  The linear-minimization oracle decomposes over the target values
into small transportation problems; the duality gap it yields is an upper
bound on the distance to the true minimum and is used as the stopping
criterion.  Exact line searches are performed by bisection on the
derivative of the (convex) objective restricted to the step segment.

Variable order convention: (X, Y, Z) with X the target.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import NonlinearConstraint, lsq_linear, minimize

from .dist import JointDistribution
from .errors import DimensionTooLarge
from .polytope import (
    FeasiblePoint,
    GammaDirection,
    SliceSpec,
    basis,
    product_point,
    slice_decompose,
    transport_vertex,
)

LN2 = float(np.log(2.0))


@dataclass
class SolverConfig:
    tol_gap: float = 1e-9  # bits
    max_iters: int = 100000
    grad_floor: float = 1e-12
    interior_mix: float = 1e-12
    restart_from_product_point: bool = True

    def __post_init__(self):
        if self.tol_gap <= 0:
            raise ValueError("tol_gap must be positive")
        if not 0 < self.grad_floor <= 1e-6:
            raise ValueError("grad_floor must lie in (0, 1e-6]")
        if not 0 < self.interior_mix <= 1e-6:
            raise ValueError("interior_mix must lie in (0, 1e-6]")


@dataclass
class SolverResult:
    optimizer: FeasiblePoint
    value: float  # bits
    gap_certificate: float  # bits
    iterations: int
    converged: bool


def objective(Q) -> float:
    """MI(X:(Y,Z)) in bits for a joint distribution or feasible point."""
    mass = (Q.joint if isinstance(Q, FeasiblePoint) else Q).mass
    return _mi_bits(mass)


def _mi_bits(T: np.ndarray) -> float:
    px = T.sum(axis=(1, 2))
    pyz = T.sum(axis=0)
    pos = T > 0
    t = T[pos]
    denom = (px[:, None, None] * pyz[None, :, :])[pos]
    return float(t @ np.log2(t / denom))


def directional_derivative(Q, gamma: GammaDirection, grad_floor: float = 1e-12) -> float:
    """Derivative of the objective along a kernel direction, in bits.

    Entries inside the logarithms are floored at ``grad_floor``, so the
    result is always finite.
    """
    T = (Q.joint if isinstance(Q, FeasiblePoint) else Q).mass
    M = T.sum(axis=0)
    f = grad_floor
    x, y, y2, z, z2 = gamma.x, gamma.y, gamma.y2, gamma.z, gamma.z2
    num = max(T[x, y, z], f) * max(T[x, y2, z2], f) * max(M[y2, z], f) * max(M[y, z2], f)
    den = max(T[x, y2, z], f) * max(T[x, y, z2], f) * max(M[y, z], f) * max(M[y2, z2], f)
    return float(np.log2(num / den))


def _reduced_gradient(T: np.ndarray, floor: float) -> np.ndarray:
    """log Q(x,y,z) - log Q(y,z) in nats, floored.

    Differs from the full gradient of the objective by a constant per x
    slice, which is invisible to the oracle and to feasible directions.
    """
    M = np.maximum(T.sum(axis=0), floor)
    return np.log(np.maximum(T, floor)) - np.log(M)[None, :, :]


def _support_gradient(T: np.ndarray, support: np.ndarray) -> np.ndarray:
    """Exact reduced gradient on the maximal support, zero elsewhere.

    Valid whenever T is strictly positive on the support (every point of
    the polytope vanishes off the support, so those entries never matter).
    """
    M = T.sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.log(T) - np.log(M)[None, :, :]
    return np.where(support, g, 0.0)


LOG_FLOOR = 1e-300


def _dual_bound(
    T: np.ndarray,
    support: np.ndarray,
    Pxy: np.ndarray,
    Pxz: np.ndarray,
    warm: np.ndarray | None = None,
) -> tuple[float, np.ndarray]:
    """Certified lower bound on the minimum objective over the polytope, in bits.

    For potentials alpha(x, y), beta(x, z) with, per column (y, z),
    sum_x exp(alpha + beta) <= 1 over the reachable slices, Gibbs'
    inequality gives Q(:,y,z) . (alpha + beta) <= sum_x Q log(Q / Qcol)
    for every feasible Q; summing columns and using the fixed pair
    marginals shows MI(Q) >= H(X) + <Pxy, alpha> + <Pxz, beta>.
    Maximizing that concave bound is the dual program of the
    minimization, so at an optimizer the bound is tight.  T only seeds
    the search, which keeps the certificate sound even when the solve
    stalls on a degenerate boundary face.
    """
    nx, ny, nz = T.shape
    px = Pxy.sum(axis=1)
    hx = float(-(px[px > 0] * np.log(px[px > 0])).sum())
    M = T.sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.where(support & (T > 0), np.log(T) - np.log(M)[None, :, :], 0.0)

    live = support.any(axis=0)
    ys, zs = np.nonzero(live)
    nA = nx * ny

    def column_logsumexp(v):
        a = v[:nA].reshape(nx, ny)
        b = v[nA:].reshape(nx, nz)
        W = np.where(support, a[:, :, None] + b[:, None, :], -np.inf)
        mx = W.max(axis=0)
        with np.errstate(invalid="ignore"):
            E = np.exp(W - mx[None, :, :])
        E[~support] = 0.0
        return W, mx, E

    def constraint_vals(v):
        _, mx, E = column_logsumexp(v)
        return mx[ys, zs] + np.log(E.sum(axis=0)[ys, zs])

    def constraint_jac(v):
        _, _, E = column_logsumexp(v)
        p = E / np.maximum(E.sum(axis=0), LOG_FLOOR)[None, :, :]
        J = np.zeros((len(ys), v.size))
        for k, (y, z) in enumerate(zip(ys, zs)):
            J[k, y:nA:ny] = p[:, y, z]
            J[k, nA + z::nz] = p[:, y, z]
        return J

    weight = np.concatenate([Pxy.ravel(), Pxz.ravel()])
    if warm is not None:
        v0 = warm.copy()
    else:
        a0 = np.min(np.where(support, g, np.inf), axis=2)
        a0 = np.where(np.isfinite(a0), np.maximum(a0, -50.0), 0.0)
        v0 = np.concatenate([a0.ravel(), np.zeros(nx * nz)])
    shift = max(float(constraint_vals(v0).max(initial=-np.inf)), 0.0)
    v0[:nA] -= shift
    res = minimize(
        lambda v: -float(weight @ v),
        v0,
        jac=lambda v: -weight,
        constraints=[
            NonlinearConstraint(constraint_vals, -np.inf, 0.0, jac=constraint_jac)
        ],
        method="SLSQP",
        options={"maxiter": 200, "ftol": 1e-14},
    )
    v = res.x if res.x is not None else v0
    # re-project onto the feasible cone; a uniform shift of alpha costs
    # exactly its size in the objective, so the bound stays certified
    excess = max(float(constraint_vals(v).max(initial=-np.inf)), 0.0)
    dual = float(weight @ v) - excess
    if float(weight @ v0) > dual:
        dual, v = float(weight @ v0), v0
    return (hx + dual) / LN2, v


def _dual_rescue(
    v: np.ndarray,
    support: np.ndarray,
    Pxy: np.ndarray,
    Pxz: np.ndarray,
) -> np.ndarray | None:
    """Primal point recovered from near-optimal dual potentials.

    Complementary slackness pins the optimizer down as Q = m(y,z) K with
    K = exp(alpha + beta) and m supported on the columns whose Gibbs
    constraint is tight; the column masses follow from the pair marginals
    by nonnegative least squares, and a per-slice Sinkhorn pass restores
    the marginals exactly.  Returns None when the recovery does not reach
    marginal feasibility, which happens when the potentials are still far
    from optimal.
    """
    nx, ny, nz = support.shape
    nA = nx * ny
    a = v[:nA].reshape(nx, ny)
    b = v[nA:].reshape(nx, nz)
    with np.errstate(over="ignore", invalid="ignore"):
        K = np.where(support, np.exp(a[:, :, None] + b[:, None, :]), 0.0)
    cols = np.argwhere(K.sum(axis=0) >= 1.0 - 1e-7)
    if len(cols) == 0:
        return None
    A = np.zeros((nA + nx * nz, len(cols)))
    for k, (y, z) in enumerate(cols):
        A[y:nA:ny, k] += K[:, y, z]
        A[nA + z :: nz, k] += K[:, y, z]
    rhs = np.concatenate([Pxy.ravel(), Pxz.ravel()])
    m = lsq_linear(A, rhs, bounds=(0.0, np.inf), tol=1e-15).x
    Q = np.zeros((nx, ny, nz))
    for k, (y, z) in enumerate(cols):
        Q[:, y, z] = m[k] * K[:, y, z]
    px = Pxy.sum(axis=1)
    for x in range(nx):
        if px[x] <= 0:
            continue
        Sl = Q[x]
        for _ in range(1000):
            rs = Sl.sum(axis=1)
            Sl = Sl * np.where(rs > 0, Pxy[x] / np.where(rs > 0, rs, 1.0), 0.0)[:, None]
            cs = Sl.sum(axis=0)
            Sl = Sl * np.where(cs > 0, Pxz[x] / np.where(cs > 0, cs, 1.0), 0.0)[None, :]
            err = max(
                np.abs(Sl.sum(axis=1) - Pxy[x]).max(),
                np.abs(Sl.sum(axis=0) - Pxz[x]).max(),
            )
            if err < 1e-14:
                break
        Q[x] = Sl
    dxy = np.abs(Q.sum(axis=2) - Pxy).max()
    dxz = np.abs(Q.sum(axis=1) - Pxz).max()
    if max(dxy, dxz) > 1e-11:
        return None
    return np.maximum(Q, 0.0)


def _lmo(
    grad: np.ndarray,
    specs: list[SliceSpec],
    px: np.ndarray,
    state: dict | None = None,
) -> np.ndarray:
    V = np.zeros(grad.shape)
    for spec in specs:
        V[spec.x] = px[spec.x] * transport_vertex(spec, grad[spec.x], state)
    return V


def _line_search(T, Tyz, D, Dyz, t_max, floor, iters=60):
    """Exact minimizer of the objective along T + t*D for t in [0, t_max]."""

    def deriv(t):
        q = np.maximum(T + t * D, floor)
        m = np.maximum(Tyz + t * Dyz, floor)
        return float((D * np.log(q)).sum() - (Dyz * np.log(m)).sum())

    if deriv(0.0) >= 0.0:
        return 0.0
    if deriv(t_max) <= 0.0:
        return t_max
    lo, hi = 0.0, t_max
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if deriv(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def solve(P: JointDistribution, config: SolverConfig | None = None) -> SolverResult:
    """Minimize MI(X:(Y,Z)) over the pair-marginal polytope of P.

    Returns the optimizer with a duality-gap certificate; ``converged`` is
    set honestly and the result is returned even when the iteration budget
    runs out.
    """
    config = config or SolverConfig()
    specs = slice_decompose(P)
    px = P.mass.sum(axis=(1, 2))

    Q0 = product_point(P)
    base = Q0.joint.mass
    # the product point has the maximal support over the polytope, so
    # mixing every vertex atom with it at weight delta keeps all iterates
    # strictly positive there and the exact gradient well defined; the
    # certificate pays for the shrinkage with a delta * MI(Q0) surcharge
    delta = config.interior_mix
    support = base > 0
    bias = delta * _mi_bits(base)

    def mix(V: np.ndarray) -> np.ndarray:
        return (1.0 - delta) * V + delta * base

    Pxy = P.mass.sum(axis=2)
    Pxz = P.mass.sum(axis=1)

    def run(T: np.ndarray) -> tuple[np.ndarray, float, int]:
        # active atoms for the away steps; the start point counts as an atom
        atoms: list[np.ndarray] = [T.copy()]
        weights: list[float] = [1.0]
        keys: dict[bytes, int] = {T.tobytes(): 0}

        gap = np.inf
        iterations = 0
        stall = 0
        warm = None
        bases: dict = {}
        best_bound_gap = np.inf
        stuck = 0
        for iterations in range(1, config.max_iters + 1):
            g = _support_gradient(T, support)
            V = mix(_lmo(g, specs, px, bases))
            gap = float((g * (T - V)).sum()) / LN2 + bias
            if gap > config.tol_gap and (stall >= 3 or iterations % 32 == 0):
                # the plain certificate can stay loose when the iterate sits
                # on a face with empty columns; try the dual one
                bound, warm = _dual_bound(T, support, Pxy, Pxz, warm)
                bound_gap = _mi_bits(T) - bound
                gap = min(gap, bound_gap)
                stuck = stuck + 1 if bound_gap > 0.9 * best_bound_gap else 0
                best_bound_gap = min(best_bound_gap, bound_gap)
                if gap > config.tol_gap and stuck >= 3:
                    break  # certified gap has plateaued; hand over to rescue
            if gap <= config.tol_gap:
                break

            fw_dir = V - T
            fw_slope = float((g * fw_dir).sum())
            scores = [float((g * a).sum()) for a in atoms]
            ai = int(np.argmax(scores))
            aw_dir = T - atoms[ai]
            aw_slope = float((g * aw_dir).sum())

            use_away = aw_slope < fw_slope and weights[ai] < 1.0
            if use_away:
                D = aw_dir
                t_max = weights[ai] / (1.0 - weights[ai])
            else:
                D = fw_dir
                t_max = 1.0

            t = _line_search(T, T.sum(axis=0), D, D.sum(axis=0), t_max, LOG_FLOOR)
            effective = t > 0.0 and t * float(np.abs(D).max()) > 1e-17
            if not effective:
                stall += 1
                if stall >= 25:
                    break
                # drop the offending away atom and retry with a plain FW step
                if use_away and t <= 0.0:
                    t = _line_search(T, T.sum(axis=0), fw_dir, fw_dir.sum(axis=0), 1.0, LOG_FLOOR)
                    D, t_max, use_away = fw_dir, 1.0, False
                if t <= 0.0:
                    continue
            else:
                stall = 0

            if use_away:
                weights = [(1.0 + t) * w for w in weights]
                weights[ai] -= t
            else:
                weights = [(1.0 - t) * w for w in weights]
                key = V.tobytes()
                if key in keys:
                    weights[keys[key]] += t
                else:
                    keys[key] = len(atoms)
                    atoms.append(V)
                    weights.append(t)
            T = T + t * D

            # prune dead atoms and resync the iterate with its atom expansion
            if iterations % 64 == 0 or min(weights) < 1e-15:
                alive = [i for i, w in enumerate(weights) if w > 1e-15]
                atoms = [atoms[i] for i in alive]
                weights = [weights[i] for i in alive]
                total = sum(weights)
                weights = [w / total for w in weights]
                keys = {a.tobytes(): i for i, a in enumerate(atoms)}
                T = sum(w * a for w, a in zip(weights, atoms))

        if gap > config.tol_gap:
            bound, warm = _dual_bound(T, support, Pxy, Pxz, warm)
            gap = min(gap, _mi_bits(T) - bound)
            if gap > config.tol_gap:
                # the conditional-gradient path can jam just above an
                # optimum on a nonsmooth boundary face; recover the
                # optimizer from the dual potentials instead
                Q = _dual_rescue(warm, support, Pxy, Pxz)
                if Q is not None:
                    rescued = _mi_bits(Q) - bound
                    if rescued < gap:
                        T, gap = Q, rescued
        return T, gap, iterations

    # two start points: the conditional-gradient path can jam on a
    # nonsmooth boundary face from one of them while descending cleanly
    # from the other, so on a stall above tolerance we retry once
    vertex_start = mix(_lmo(_support_gradient(base, support), specs, px))
    starts = [base.copy(), vertex_start]
    if not config.restart_from_product_point:
        starts.reverse()

    T, gap, iterations = run(starts[0])
    if gap > config.tol_gap:
        T2, gap2, it2 = run(starts[1])
        iterations += it2
        if gap2 < gap:
            T, gap = T2, gap2

    optimizer = FeasiblePoint.from_joint(
        JointDistribution(P.variables, np.maximum(T, 0.0))
    )
    return SolverResult(
        optimizer=optimizer,
        value=_mi_bits(optimizer.joint.mass),
        gap_certificate=max(gap, 0.0),
        iterations=iterations,
        converged=bool(gap <= config.tol_gap),
    )


def check_critical(Q, P: JointDistribution, tol: float = 1e-8) -> bool:
    """First-order optimality at Q: no feasible kernel direction descends.

    A direction is feasible with positive step when both entries it
    decreases exceed the gradient floor; those floored entries are excluded
    from the scan.
    """
    T = (Q.joint if isinstance(Q, FeasiblePoint) else Q).mass
    floor = 1e-12
    px = T.sum(axis=(1, 2))
    nx, ny, nz = T.shape
    for x in range(nx):
        if px[x] <= 0:
            continue
        for y in range(ny):
            for y2 in range(ny):
                if y2 == y:
                    continue
                for z in range(nz):
                    for z2 in range(nz):
                        if z2 == z:
                            continue
                        if T[x, y2, z] <= floor or T[x, y, z2] <= floor:
                            continue
                        gamma = GammaDirection(x=x, y=y, y2=y2, z=z, z2=z2)
                        if directional_derivative(Q, gamma, floor) < -tol:
                            return False
    return True


def grid_oracle(P: JointDistribution, resolution: float = 1e-2) -> SolverResult:
    """Brute-force minimum over the kernel-basis parametrization.

    Exhaustive grid at the given resolution over the feasible box around
    the product point, then coordinate-wise bisection refinement (including
    pairwise diagonal directions).  Independent of the conditional-gradient
    path; intended as ground truth on small instances.
    """
    Q0 = product_point(P).joint.mass
    shape = Q0.shape
    dirs = []
    for gamma in basis(P):
        g = gamma.as_array(shape)
        lo, hi = _ratio_bounds(Q0, g)
        if hi - lo > 1e-12:
            dirs.append(g)
    dim = len(dirs)
    if dim > 4:
        raise DimensionTooLarge(f"{dim} free directions exceed the oracle guard of 4")

    T = Q0.copy()
    if dim:
        G = np.stack([g.ravel() for g in dirs])
        base = Q0.ravel()

        def feasible_best(C: np.ndarray) -> tuple[float, np.ndarray | None]:
            """Lowest objective over the candidate coefficient rows."""
            out_val, out_c = np.inf, None
            for chunk in np.array_split(C, max(1, len(C) // 20000)):
                Ts = base[None, :] + chunk @ G
                ok = Ts.min(axis=1) >= -1e-12
                if not ok.any():
                    continue
                vals = _mi_bits_batch(np.maximum(Ts[ok], 0.0), shape)
                k = int(np.argmin(vals))
                if vals[k] < out_val:
                    out_val = float(vals[k])
                    out_c = chunk[ok][k]
            return out_val, out_c

        # coarse pass: exhaustive grid over a box around the product point
        # (widened a little, since coordinate-wise bounds underestimate the
        # reach of combined directions)
        axes = []
        for g in dirs:
            lo, hi = _ratio_bounds(Q0, g)
            steps = max(int(np.ceil(1.5 * (hi - lo) / resolution)), 1)
            axes.append(np.linspace(1.5 * lo, 1.5 * hi, steps + 1))
        mesh = np.meshgrid(*axes, indexing="ij")
        best = _mi_bits(Q0)
        best_c = np.zeros(dim)
        val, c = feasible_best(np.stack([m.ravel() for m in mesh], axis=1))
        if val < best:
            best, best_c = val, c

        # refinement: nested grids around the incumbent, radius halved per
        # stage; needs no descent path, so it cannot stall on the steep
        # valleys the objective has along degenerate boundary faces
        cube = np.meshgrid(*([np.linspace(-1.0, 1.0, 9)] * dim), indexing="ij")
        cube = np.stack([m.ravel() for m in cube], axis=1)
        radius = 2.0 * float(resolution)
        while radius > 1e-9:
            val, c = feasible_best(best_c[None, :] + radius * cube)
            if val < best:
                best, best_c = val, c
            radius *= 0.7
        T = np.maximum(base + best_c @ G, 0.0).reshape(shape)

    optimizer = FeasiblePoint.from_joint(JointDistribution(P.variables, T))
    value = _mi_bits(optimizer.joint.mass)
    bound, _ = _dual_bound(
        (1.0 - 1e-12) * optimizer.joint.mass + 1e-12 * Q0,
        Q0 > 0,
        P.mass.sum(axis=2),
        P.mass.sum(axis=1),
    )
    return SolverResult(
        optimizer=optimizer,
        value=value,
        gap_certificate=max(value - bound, 0.0),
        iterations=0,
        converged=True,
    )


def _ratio_bounds(T, g):
    dec = g < 0
    inc = g > 0
    hi = np.min(T[dec] / -g[dec]) if dec.any() else 0.0
    lo = -np.min(T[inc] / g[inc]) if inc.any() else 0.0
    return float(lo), float(hi)


def _mi_bits_batch(Ts: np.ndarray, shape) -> np.ndarray:
    nx, ny, nz = shape
    Ts = Ts.reshape(len(Ts), nx, ny, nz)
    px = Ts.sum(axis=(2, 3))
    pyz = Ts.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = Ts / (px[:, :, None, None] * pyz[:, None, :, :])
        terms = np.where(Ts > 0, Ts * np.log2(np.where(Ts > 0, ratio, 1.0)), 0.0)
    return terms.sum(axis=(1, 2, 3))
