"""Exceptional points: location, winding charge, order, alpha-trajectories,
and the loop-crossing transition.

Charge convention: the charge of a point Z is minus the winding number of
the discriminant's argument along a counter-clockwise circle around Z,
nu(Z) = -(1/2pi) * total d(arg Delta).  With the band and crossing
conventions of the spectral/braid modules this makes the charge equal the
exponent sum of the local eigenvalue braid around Z, and the origin-born
EP2 that moves into the upper-left half plane carries charge +1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import model, spectral
from .braid import BraidWord, tau_to_sigma
from .errors import (ContinuationStalled, EPOnLoop, NonIntegerWinding, NotAnEp,
                     OutOfRange, PhaseStepTooLarge)
from .evolution import density_matrix, fidelity

Region = tuple[tuple[float, float], tuple[float, float]]

_DEFAULT_REGION: Region = ((-2.0, 2.0), (-2.0, 2.0))
_TRACE_REGION: Region = ((-3.5, 3.5), (-3.5, 3.5))
_DEDUP = 1e-6
_RESIDUAL_CAP = 1e-10


@dataclass
class EpRecord:
    """One exceptional point at fixed alpha."""

    alpha: float
    k1: float
    k2: float
    residual: float
    charge: int | None = None
    order: int | None = None
    degenerate_pair: tuple[int, int] | str | None = None

    @property
    def position(self) -> tuple[float, float]:
        return (self.k1, self.k2)


@dataclass
class EpTrajectory:
    """One Delta = 0 branch continued in alpha."""

    label: str
    alphas: np.ndarray
    positions: np.ndarray  # shape (n, 2)
    charge: int | None = None
    created: float | None = None
    annihilated: float | None = None
    merged: float | None = None
    partner: str | None = None

    def radius(self) -> np.ndarray:
        return np.hypot(self.positions[:, 0], self.positions[:, 1])


def _newton_batch(alpha: float, k1: np.ndarray, k2: np.ndarray,
                  iterations: int = 80, bound: float = 50.0):
    """Vectorized 2d Newton on (Re Delta, Im Delta) from seed arrays.

    Returns (k1, k2, |Delta|) after convergence; diverged seeds keep a
    large residual.
    """
    k1 = np.array(k1, dtype=float).ravel().copy()
    k2 = np.array(k2, dtype=float).ravel().copy()
    alive = np.ones(k1.shape, dtype=bool)
    for _ in range(iterations):
        d = model.discriminant_values(alpha, k1, k2)
        absd = np.abs(d)
        alive &= np.isfinite(absd) & (np.hypot(k1, k2) < bound)
        move = alive & (absd > 1e-15)
        if not move.any():
            break
        g1, g2 = model.discriminant_k_gradient(alpha, k1[move], k2[move])
        dm = d[move]
        det = g1.real * g2.imag - g2.real * g1.imag
        ok = np.abs(det) > 1e-300
        step1 = np.where(ok, (dm.real * g2.imag - g2.real * dm.imag) / np.where(ok, det, 1.0), 0.0)
        step2 = np.where(ok, (g1.real * dm.imag - dm.real * g1.imag) / np.where(ok, det, 1.0), 0.0)
        k1[move] -= step1
        k2[move] -= step2
    res = np.abs(model.discriminant_values(alpha, k1, k2))
    res[~alive] = np.inf
    return k1, k2, res


def _dedup_points(alpha: float, k1: np.ndarray, k2: np.ndarray,
                  res: np.ndarray,
                  tol: float = _DEDUP) -> list[tuple[float, float, float]]:
    order = np.argsort(res)
    out: list[tuple[float, float, float]] = []
    for idx in order:
        if not np.isfinite(res[idx]):
            continue
        x, y, r = float(k1[idx]), float(k2[idx]), float(res[idx])
        if all((x - p[0]) ** 2 + (y - p[1]) ** 2 > tol * tol for p in out):
            out.append((x, y, r))
    return _merge_degenerate_clusters(alpha, out)


def _merge_degenerate_clusters(alpha: float, pts, radius: float = 1e-4):
    """Collapse the Newton scatter around a higher-order discriminant zero.

    A multiple zero is flat enough that converged iterates land anywhere in
    a ~1e-5 puddle around it, while between two genuinely separate simple
    zeros |Delta| recovers.  Two points closer than ``radius`` whose
    midpoint still has |Delta| under the residual cap are therefore the
    same degenerate zero; clusters are replaced by their centroid.
    """
    if len(pts) < 2:
        return pts
    merged: list[list] = []
    for x, y, r in pts:
        for cluster in merged:
            cx = sum(p[0] for p in cluster) / len(cluster)
            cy = sum(p[1] for p in cluster) / len(cluster)
            if ((x - cx) ** 2 + (y - cy) ** 2 < radius * radius
                    and abs(model.discriminant_values(
                        alpha, (x + cx) / 2.0, (y + cy) / 2.0)) <= _RESIDUAL_CAP):
                cluster.append((x, y, r))
                break
        else:
            merged.append([(x, y, r)])
    out = []
    for cluster in merged:
        cx = sum(p[0] for p in cluster) / len(cluster)
        cy = sum(p[1] for p in cluster) / len(cluster)
        out.append((cx, cy, min(p[2] for p in cluster)))
    return out


def find_eps(alpha: float, region: Region = _DEFAULT_REGION,
             grid: int = 32) -> list[EpRecord]:
    """All Delta = 0 points in a rectangle, by multistart Newton.

    Seeds on a grid x grid lattice; converged points are deduplicated
    within 1e-6 and reported with their residual |Delta|.  Sorted by
    (k1, k2) for determinism.
    """
    (x0, x1), (y0, y1) = region
    xs, ys = np.meshgrid(np.linspace(x0, x1, grid), np.linspace(y0, y1, grid))
    k1, k2, res = _newton_batch(alpha, xs, ys)
    keep = res <= _RESIDUAL_CAP
    pts = _dedup_points(alpha, k1[keep], k2[keep], res[keep])
    records = [EpRecord(alpha, x, y, r) for x, y, r in pts
               if x0 - 1e-9 <= x <= x1 + 1e-9 and y0 - 1e-9 <= y <= y1 + 1e-9]
    records.sort(key=lambda rec: (rec.k1, rec.k2))
    return records


def refine_ep(alpha: float, point: tuple[float, float],
              capture_radius: float = 0.05) -> tuple[float, float, float]:
    """Polish an approximate EP location to machine residual.

    Seeds a small ring around the input in addition to the input itself
    (the Newton system is singular exactly on the model's symmetry point).
    Raises NotAnEp when nothing converges within the capture radius.
    """
    px, py = point
    seeds = [(px, py)]
    for rad in (1e-3, 1e-2, capture_radius / 2.0):
        for ang in np.linspace(0.0, 2.0 * math.pi, 8, endpoint=False):
            seeds.append((px + rad * math.cos(ang), py + rad * math.sin(ang)))
    sx = np.array([s[0] for s in seeds])
    sy = np.array([s[1] for s in seeds])
    k1, k2, res = _newton_batch(alpha, sx, sy)
    good = res <= _RESIDUAL_CAP
    if not good.any():
        raise NotAnEp(f"no EP reachable from ({px}, {py}) at alpha = {alpha}")
    dist = np.hypot(k1 - px, k2 - py)
    dist[~good] = np.inf
    best = int(np.argmin(dist))
    if dist[best] > capture_radius:
        raise NotAnEp(
            f"nearest EP to ({px}, {py}) at alpha = {alpha} is {dist[best]:.3f} away")
    return float(k1[best]), float(k2[best]), float(res[best])


def charge(alpha: float, center: tuple[float, float], radius: float,
           n_start: int = 512, max_doublings: int = 8) -> int:
    """Winding charge nu = -(1/2pi) d(arg Delta) around a ccw circle.

    The phase is unwrapped on an adaptively doubled sample grid until every
    step is below pi/2.  Raises PhaseStepTooLarge if that never happens,
    NonIntegerWinding if the total deviates from an integer by >= 0.05, and
    EPOnLoop if the discriminant (numerically) vanishes on the circle.
    """
    cx, cy = center
    n = n_start
    for _ in range(max_doublings + 1):
        th = np.linspace(0.0, 2.0 * math.pi, n + 1)
        vals = model.discriminant_values(alpha, cx + radius * np.cos(th),
                                         cy + radius * np.sin(th))
        if np.abs(vals).min() <= 1e-12:
            raise EPOnLoop("discriminant vanishes on the encircling curve")
        raw = np.angle(vals)
        steps = np.angle(np.exp(1j * np.diff(raw)))
        if np.abs(steps).max() < 0.5 * math.pi:
            total = float(steps.sum())
            winding = -total / (2.0 * math.pi)
            rounded = round(winding)
            if abs(winding - rounded) >= 0.05:
                raise NonIntegerWinding(
                    f"winding {winding:.4f} deviates from integer by "
                    f"{abs(winding - rounded):.3f}")
            return int(rounded)
        n *= 2
    raise PhaseStepTooLarge(
        f"phase step >= pi/2 after refining to {n} samples")


@dataclass
class EpOrderResult:
    """Order classification of an EP from eigenvector overlaps."""

    order: int
    degenerate_pair: tuple[int, int] | str
    fidelities: np.ndarray  # 3x3, band labels by descending Re
    eigenvalues: np.ndarray  # labeled by descending Re
    point: tuple[float, float]
    residual: float


def ep_order(alpha: float, point: tuple[float, float],
             refine: bool = True) -> EpOrderResult:
    """Order (2 or 3) and degenerate band pair of an EP.

    The point is first polished to machine |Delta| (refine=True accepts
    inputs quoted to a couple of digits); eigenvalues are clustered at
    1e-6 and a cluster counts as coalesced when all pairwise eigenvector
    fidelities exceed 0.999.  Band labels sort by descending real part.
    Raises NotAnEp when no cluster of size >= 2 exists.
    """
    if refine:
        k1, k2, residual = refine_ep(alpha, point)
    else:
        k1, k2 = point
        residual = abs(model.discriminant_values(alpha, k1, k2))
        if residual > 1e-8:
            raise NotAnEp(f"|Delta| = {residual:.2e} > 1e-8 at {point}")

    spec = spectral.eigensolve(model.hamiltonian(model.ModelParams(alpha, k1, k2)),
                               want_vectors=True)
    order_idx = np.lexsort((-spec.eigenvalues.imag, -spec.eigenvalues.real))
    eigs = spec.eigenvalues[order_idx]
    vecs = spec.eigenvectors[order_idx]

    # Union-find clustering of eigenvalues at 1e-6.
    parent = list(range(3))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    for i in range(3):
        for j in range(i + 1, 3):
            if abs(eigs[i] - eigs[j]) < 1e-6:
                parent[find(j)] = find(i)
    clusters: dict[int, list[int]] = {}
    for i in range(3):
        clusters.setdefault(find(i), []).append(i)

    F = np.zeros((3, 3))
    rhos = [density_matrix(v) for v in vecs]
    for i in range(3):
        for j in range(3):
            F[i, j] = fidelity(rhos[i], rhos[j])

    best_size, best_members = 0, None
    for members in clusters.values():
        if len(members) < 2:
            continue
        candidates = [members]
        if len(members) == 3:
            candidates += [[a, b] for a in members for b in members if a < b]
        for group in candidates:
            if all(F[a, b] > 0.999 for a in group for b in group if a < b):
                if len(group) > best_size:
                    best_size, best_members = len(group), group
                break
    if best_members is None:
        raise NotAnEp("no eigenvalue cluster of size >= 2 with coalescing "
                      "eigenvectors")
    pair = "all" if best_size == 3 else (best_members[0] + 1, best_members[1] + 1)
    return EpOrderResult(best_size, pair, F, eigs, (k1, k2), residual)


# ---------------------------------------------------------------------------
# Continuation of Delta = 0 branches in alpha.


@dataclass
class _Branch:
    alphas: list = field(default_factory=list)
    points: list = field(default_factory=list)
    active: bool = True
    created: float | None = None
    ended: float | None = None
    end_kind: str | None = None
    charge: int | None = None
    label: str = ""
    partner_idx: int | None = None
    failed_steps: int = 0
    last_speed: float = 0.0


def _correct(alpha: float, seed: tuple[float, float]):
    k1, k2, res = _newton_batch(alpha, np.array([seed[0]]), np.array([seed[1]]),
                                iterations=60)
    if res[0] > _RESIDUAL_CAP:
        return None
    return float(k1[0]), float(k2[0])


def _predict(alpha: float, pt: tuple[float, float], dalpha: float):
    g1, g2 = model.discriminant_k_gradient(alpha, pt[0], pt[1])
    da = model.discriminant_alpha_gradient(alpha, pt[0], pt[1])
    det = g1.real * g2.imag - g2.real * g1.imag
    if abs(det) < 1e-300:
        return pt
    rhs1, rhs2 = -da.real * dalpha, -da.imag * dalpha
    dx = (rhs1 * g2.imag - g2.real * rhs2) / det
    dy = (g1.real * rhs2 - rhs1 * g1.imag) / det
    return (pt[0] + dx, pt[1] + dy)


def _locate_near(alpha: float, point: tuple[float, float],
                 radius: float) -> tuple[float, float] | None:
    """Nearest Delta = 0 point within radius of a location, if any."""
    px, py = point
    seeds_x, seeds_y = [px], [py]
    for rad in (radius / 3.0, radius):
        for ang in np.linspace(0.0, 2.0 * math.pi, 8, endpoint=False):
            seeds_x.append(px + rad * math.cos(ang))
            seeds_y.append(py + rad * math.sin(ang))
    k1, k2, res = _newton_batch(alpha, np.array(seeds_x), np.array(seeds_y))
    dist = np.hypot(k1 - px, k2 - py)
    dist[res > _RESIDUAL_CAP] = np.inf
    best = int(np.argmin(dist))
    if dist[best] > radius:
        return None
    return float(k1[best]), float(k2[best])


def _exists_near(alpha: float, point: tuple[float, float], radius: float) -> bool:
    """Is there a Delta = 0 point within radius of the given location?"""
    return _locate_near(alpha, point, radius) is not None


def _bisect_event(alpha_lo: float, alpha_hi: float, point, radius: float,
                  exists_at_lo: bool, tol: float = 1e-6) -> float:
    """Alpha where 'an EP exists within radius of point' flips."""
    lo, hi = alpha_lo, alpha_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _exists_near(mid, point, radius) == exists_at_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _in_region(pt, region: Region, slack: float = 0.2) -> bool:
    (x0, x1), (y0, y1) = region
    return (x0 - slack <= pt[0] <= x1 + slack
            and y0 - slack <= pt[1] <= y1 + slack)


def trace_ep_paths(alpha_range: tuple[float, float] = (0.0, 3.2),
                   step: float = 0.01,
                   region: Region = _TRACE_REGION,
                   grid: int = 24,
                   rescan_every: int = 5) -> list[EpTrajectory]:
    """Continue every Delta = 0 branch across an alpha range.

    Predictor-corrector continuation per branch, with periodic global
    rescans to catch branches created away from the continued set.  Events:

    - creation: two branches born at one point (bisected in alpha),
    - annihilation: two branches meet and no EP survives (order-2 meeting),
    - merge: two branches meet at a surviving higher-order EP (order 3).

    Labels: the creation-born pair is X (+1 charge) / Y (-1); the pair
    alive at the range start that later meets is U (+1) / V (-1); anything
    else gets E1, E2, ...  Raises ContinuationStalled when a corrector
    fails away from any meeting event.
    """
    a_lo, a_hi = alpha_range
    if not (0.0 <= a_lo < a_hi <= 3.5):
        raise OutOfRange(f"alpha range {alpha_range} outside [0, 3.5]")
    alphas = np.arange(a_lo, a_hi + step / 2.0, step)
    alphas[-1] = min(alphas[-1], a_hi)

    branches: list[_Branch] = []
    for rec in find_eps(a_lo, region=region, grid=grid):
        br = _Branch()
        br.alphas.append(a_lo)
        br.points.append(rec.position)
        branches.append(br)

    def active():
        return [b for b in branches if b.active]

    for step_idx, a in enumerate(alphas[1:], start=1):
        a_prev = alphas[step_idx - 1]
        # Continue all active branches.  A failed corrector is tolerated for
        # one step (flagged) because it usually means a collision is in
        # progress; the meeting pass below resolves it.
        for br in active():
            prev = br.points[-1]
            pred = _predict(a_prev, prev, a - a_prev)
            # Trust radius: Newton can hop to a far-away zero, which would
            # silently re-identify the branch.
            max_jump = max(0.25, 6.0 * math.dist(pred, prev))
            corrected = _correct(a, pred)
            if corrected is not None and math.dist(corrected, prev) > max_jump:
                corrected = None
            if corrected is None:
                corrected = _correct(a, prev)
                if corrected is not None and math.dist(corrected, prev) > max_jump:
                    corrected = None
            if corrected is None:
                corrected = _locate_near(float(a), prev, 5.0 * step)
            if corrected is not None and not _in_region(corrected, region):
                br.active = False
                br.ended, br.end_kind = float(a_prev), "left-region"
                continue
            if corrected is None:
                if br.failed_steps >= 1:
                    raise ContinuationStalled(
                        f"corrector failed at alpha = {a:.4f} from "
                        f"{br.points[-1]}")
                br.failed_steps += 1
                corrected = br.points[-1]
            else:
                br.last_speed = math.dist(corrected, prev)
                br.failed_steps = 0
            br.alphas.append(float(a))
            br.points.append(corrected)

        # Pairwise meetings -> annihilation or merge.  Two branches meet when
        # they land on the same point, or when both just lost their zero
        # within collision distance of each other.
        act = active()
        for i in range(len(act)):
            for j in range(i + 1, len(act)):
                bi, bj = act[i], act[j]
                if not (bi.active and bj.active):
                    continue
                dist = math.dist(bi.points[-1], bj.points[-1])
                # Near a collision the pair closes at sqrt speed, so the last
                # resolved samples can still be well apart; allow for the
                # remaining travel based on the latest resolved step sizes.
                allowance = 10.0 * step + 4.0 * (bi.last_speed + bj.last_speed)
                colliding = dist < 1e-4 or (
                    dist < allowance
                    and bi.failed_steps + bj.failed_steps > 0)
                if not colliding:
                    continue
                for br in (bi, bj):
                    while br.failed_steps > 0 and len(br.points) > 1:
                        br.points.pop()
                        br.alphas.pop()
                        br.failed_steps -= 1
                meet = ((bi.points[-1][0] + bj.points[-1][0]) / 2.0,
                        (bi.points[-1][1] + bj.points[-1][1]) / 2.0)
                sep_prev = (math.dist(bi.points[-2], bj.points[-2])
                            if len(bi.points) > 1 and len(bj.points) > 1 else 0.0)
                a_event = _bisect_event(float(a_prev), float(a), meet,
                                        max(2.0 * sep_prev, 1e-3),
                                        exists_at_lo=True)
                a_event = min(max(a_event, float(a_prev)), float(a))
                bi.active = bj.active = False
                bi.ended = bj.ended = a_event
                # Merged (a degeneracy survives the collision, e.g. a
                # higher-order EP) vs annihilated (the pair is simply gone):
                # probe for a zero near the meeting point just after the
                # event.
                survives = _exists_near(a_event + 2.0 * step, meet, 0.3)
                bi.end_kind = bj.end_kind = "merged" if survives else "annihilated"
                bi.partner_idx = branches.index(bj)
                bj.partner_idx = branches.index(bi)

        # Periodic global rescan for creations.  Skip anything close to a
        # live branch, and anything close to a freshly ended one (the
        # leftovers of a collision are not a creation).
        if step_idx % rescan_every == 0 or step_idx == len(alphas) - 1:
            found = find_eps(float(a), region=region, grid=grid)
            known = [b.points[-1] for b in active()]
            recent_dead = [b.points[-1] for b in branches
                           if not b.active and b.ended is not None
                           and b.ended >= float(a) - (rescan_every + 1) * step]
            scan_lo = float(alphas[max(0, step_idx - rescan_every)])
            for rec in found:
                if any(math.dist(rec.position, p) < 5e-3 for p in known):
                    continue
                if any(math.dist(rec.position, p) < 2e-2 for p in recent_dead):
                    continue
                # If a dead branch terminated nearby, widen the existence ball
                # so a pair re-emerging from a collision dates back to it.
                dead_clear = min((math.dist(rec.position, p)
                                  for p in recent_dead), default=math.inf)
                radius = 0.1 + (dead_clear if dead_clear < 0.3 else 0.0)
                a_created = _bisect_event(scan_lo, float(a), rec.position,
                                          radius, exists_at_lo=False)
                br = _Branch()
                br.created = a_created
                br.alphas.append(float(a))
                br.points.append(rec.position)
                branches.append(br)
                known.append(rec.position)

    for br in branches:
        if br.active:
            br.ended, br.end_kind = float(alphas[-1]), "range-end"

    _assign_charges(branches)
    _assign_labels(branches)

    out = []
    for br in branches:
        out.append(EpTrajectory(
            label=br.label,
            alphas=np.array(br.alphas),
            positions=np.array(br.points),
            charge=br.charge,
            created=br.created,
            annihilated=br.ended if br.end_kind == "annihilated" else None,
            merged=br.ended if br.end_kind == "merged" else None,
            partner=branches[br.partner_idx].label if br.partner_idx is not None else None,
        ))
    return out


def _assign_charges(branches: list[_Branch]) -> None:
    for br in branches:
        mid = len(br.alphas) // 2
        best = None
        for k in (mid, len(br.alphas) - 1, 0):
            a, pt = br.alphas[k], br.points[k]
            others = [b.points[min(k, len(b.points) - 1)] for b in branches
                      if b is not br and b.alphas and
                      b.alphas[0] <= a <= b.alphas[-1]]
            clearance = min((math.dist(pt, o) for o in others), default=1.0)
            rad = min(0.3, 0.4 * clearance)
            if rad < 1e-3:
                continue
            try:
                br.charge = charge(a, pt, rad)
                best = True
                break
            except (PhaseStepTooLarge, NonIntegerWinding, EPOnLoop):
                continue
        if best is None:
            br.charge = None


def _assign_labels(branches: list[_Branch]) -> None:
    created = sorted((b for b in branches if b.created is not None),
                     key=lambda b: b.created)
    for b in created:
        if b.charge == 1 and not any(x.label == "X" for x in branches):
            b.label = "X"
        elif b.charge == -1 and not any(x.label == "Y" for x in branches):
            b.label = "Y"
    meeting = [b for b in branches if b.created is None
               and b.end_kind in ("annihilated", "merged")]
    for b in meeting:
        if b.charge == 1 and not any(x.label == "U" for x in branches):
            b.label = "U"
        elif b.charge == -1 and not any(x.label == "V" for x in branches):
            b.label = "V"
    counter = 1
    for b in branches:
        if not b.label:
            b.label = f"E{counter}"
            counter += 1


def transition_alpha(r: float,
                     trajectories: list[EpTrajectory] | None = None,
                     alpha_range: tuple[float, float] = (0.0, 3.2),
                     tol: float = 1e-4) -> float:
    """Alpha at which the inward-moving pair crosses the circle of radius r.

    Solves r_U(alpha)^2 = r^2 by bisection along the traced U trajectory
    (U and V enter simultaneously by the model's central symmetry).
    Raises OutOfRange when r is outside the range swept by r_U.
    """
    if trajectories is None:
        trajectories = trace_ep_paths(alpha_range=alpha_range)
    U = next((t for t in trajectories if t.label == "U"), None)
    if U is None:
        raise OutOfRange("no inward-moving (U) trajectory in this alpha range")
    radii = U.radius()
    f = radii ** 2 - r ** 2
    sign_change = np.nonzero(np.diff(np.sign(f)) != 0)[0]
    if len(sign_change) == 0:
        raise OutOfRange(
            f"r = {r} outside the swept range [{radii.min():.3f}, {radii.max():.3f}]")
    k = int(sign_change[0])
    lo, hi = float(U.alphas[k]), float(U.alphas[k + 1])
    pt_lo = tuple(U.positions[k])
    f_lo = f[k]

    def radius_at(a: float, seed) -> tuple[float, tuple[float, float]]:
        corrected = _correct(a, seed)
        if corrected is None:
            raise ContinuationStalled(f"lost the U branch at alpha = {a:.6f}")
        return math.hypot(*corrected), corrected

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        rad, pt_mid = radius_at(mid, pt_lo)
        if (rad ** 2 - r ** 2 > 0) == (f_lo > 0):
            lo, pt_lo = mid, pt_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def local_braid(alpha: float, center: tuple[float, float], radius: float,
                n_samples: int = 64) -> BraidWord:
    """Braid word of the eigenvalue strands around a local encircling circle."""
    loop = model.Loop(alpha, radius, center)
    path = spectral.track_bands(loop, n_min=n_samples)
    events = spectral.detect_crossings(path)
    return tau_to_sigma(events, strands=3)
