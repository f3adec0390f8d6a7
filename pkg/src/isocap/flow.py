"""Weak inverse mean curvature flow for rotationally symmetric metrics.

The weak flow of a centered sphere stays a centered sphere, and its area
obeys the exponential law area(t) = hull_area * exp(t).  The radius at
time t is therefore the outermost solution of area(rho) = target; the
jump semantics of the weak formulation come out automatically, since the
outermost root skips every neck whose area dips below the current level.
Jumps preserve area: the flow leaves a rising branch at radius s1 and
reappears past the neck at the matching-area radius s2 > s1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import IO, List, Tuple, Union

import numpy as np
import scipy.optimize

from .errors import DomainError, InsufficientData
from .geometry import RadialMetric, SphereData, sphere_data
from .numerics import DEFAULT_CFG, ToleranceConfig, extrapolate_limit, find_root

SIXTEEN_PI = 16.0 * math.pi

_SCAN_POINTS = 8192


@dataclass
class Jump:
    """Instantaneous area-preserving jump of the weak flow."""

    t: float
    rho_before: float
    rho_after: float


@dataclass
class SmoothSegment:
    t_start: float
    t_end: float
    rho_start: float
    rho_end: float


@dataclass
class FlowTrack:
    """Sampled weak inverse mean curvature flow started at rho0."""

    rho0: float
    initial_area: float
    events: List[Union[Jump, SmoothSegment]]
    samples: List[Tuple[float, SphereData]] = field(repr=False)

    @property
    def jumps(self) -> List[Jump]:
        return [e for e in self.events if isinstance(e, Jump)]


@dataclass
class GerochReport:
    monotone: bool
    worst_drop: float
    times: List[float]
    masses: List[float]


def _area_grid(metric: RadialMetric, lo: float, hi: float,
               n: int = _SCAN_POINTS) -> Tuple[np.ndarray, np.ndarray]:
    grid = np.geomspace(max(lo, 1e-12), hi, n)
    grid[0] = lo
    areas = np.array([metric.area(float(r)) for r in grid])
    return grid, areas


def _refine_min(metric: RadialMetric, lo: float, hi: float,
                cfg: ToleranceConfig) -> Tuple[float, float]:
    res = scipy.optimize.minimize_scalar(
        metric.area, bounds=(lo, hi), method="bounded",
        options={"xatol": cfg.root_tol})
    return float(res.x), float(res.fun)


def outward_hull(metric: RadialMetric, rho0: float,
                 cfg: ToleranceConfig = DEFAULT_CFG) -> Tuple[float, float]:
    """Outermost radius minimizing sphere area over [rho0, inf).

    Returns (rho_star, hull_area).  For an area profile that only grows
    this is (rho0, area(rho0)); past a neck it is the bottom of the
    outermost dip at or below area(rho0).
    """
    if rho0 < metric.domain_start - 1e-12:
        raise DomainError(f"rho0={rho0} below domain start {metric.domain_start}")
    hi = min(cfg.cutoff_radius, metric.r_max)
    if hi <= rho0:
        return rho0, metric.area(rho0)
    grid, areas = _area_grid(metric, rho0, hi)
    amin = areas.min()
    near = np.nonzero(areas <= amin * (1.0 + 1e-9))[0]
    i = int(near[-1])
    if i == 0:
        return rho0, float(areas[0])
    lo_b = float(grid[max(i - 1, 0)])
    hi_b = float(grid[min(i + 1, len(grid) - 1)])
    rho_star, hull_area = _refine_min(metric, lo_b, hi_b, cfg)
    base = metric.area(rho0)
    if hull_area >= base * (1.0 - 1e-12):
        return rho0, base
    return rho_star, hull_area


def _outermost_root(metric: RadialMetric, grid: np.ndarray, areas: np.ndarray,
                    target: float, cfg: ToleranceConfig) -> float:
    """Largest radius in the scan range with area(rho) = target."""
    diffs = areas - target
    sign_change = np.nonzero(diffs[:-1] * diffs[1:] <= 0.0)[0]
    if len(sign_change) == 0:
        if abs(diffs[0]) <= 1e-9 * target:
            return float(grid[0])
        raise DomainError(f"no sphere of area {target} in scan range")
    i = int(sign_change[-1])
    if diffs[i] == 0.0 and diffs[i + 1] == 0.0:
        return float(grid[i + 1])
    return find_root(lambda r: metric.area(r) - target,
                     float(grid[i]), float(grid[i + 1]), cfg)


def _find_jumps(metric: RadialMetric, grid: np.ndarray, areas: np.ndarray,
                hull_area: float, t_max: float,
                cfg: ToleranceConfig) -> List[Jump]:
    """Locate necks the outermost-root rule skips, as area-matched jumps."""
    # suffix running minimum: area the flow can still reach going outward
    envelope = np.minimum.accumulate(areas[::-1])[::-1]
    skipped = areas > envelope * (1.0 + 1e-10)
    jumps: List[Jump] = []
    n = len(grid)
    i = 0
    while i < n:
        if not skipped[i]:
            i += 1
            continue
        j = i
        while j < n and skipped[j]:
            j += 1
        # run [i, j): the flow jumps over it; the landing neck bottom sits
        # just past index j-1
        lo_b = float(grid[j - 1])
        hi_b = float(grid[min(j + 1, n - 1)])
        s2, area_j = _refine_min(metric, lo_b, hi_b, cfg)
        t_j = math.log(area_j / hull_area)
        if 0.0 < t_j <= t_max:
            lo_r = float(grid[max(i - 2, 0)])
            hi_r = float(grid[i])
            try:
                s1 = find_root(lambda r: metric.area(r) - area_j, lo_r, hi_r, cfg)
            except Exception:
                s1 = float(grid[i])
            jumps.append(Jump(t=t_j, rho_before=s1, rho_after=s2))
        i = j
    return jumps


def weak_imcf(metric: RadialMetric, rho0: float, t_max: float,
              n_samples: int = 200,
              cfg: ToleranceConfig = DEFAULT_CFG) -> FlowTrack:
    """Run the weak flow from the sphere at rho0 up to time t_max."""
    if t_max <= 0.0:
        raise DomainError(f"t_max must be positive, got {t_max}")
    rho_star, hull_area = outward_hull(metric, rho0, cfg)

    target_max = hull_area * math.exp(t_max)
    hi = max(2.0 * rho_star, 1.0)
    limit = min(cfg.cutoff_radius, metric.r_max)
    while metric.area(hi) < 1.02 * target_max:
        if hi >= limit:
            if metric.area(limit) < target_max:
                raise DomainError(
                    f"metric domain ends before the flow reaches t={t_max}")
            hi = limit
            break
        hi = min(hi * 2.0, limit)

    grid, areas = _area_grid(metric, rho_star, hi)
    jumps = _find_jumps(metric, grid, areas, hull_area, t_max, cfg)

    events: List[Union[Jump, SmoothSegment]] = []
    if rho_star > rho0 * (1.0 + 1e-12) + 1e-12:
        events.append(Jump(t=0.0, rho_before=rho0, rho_after=rho_star))

    def radius_at(t: float) -> float:
        return _outermost_root(metric, grid, areas,
                               hull_area * math.exp(t), cfg)

    bounds = [0.0] + [j.t for j in jumps] + [t_max]
    seg_start_rho = rho_star
    for k, jump in enumerate(jumps):
        events.append(SmoothSegment(t_start=bounds[k], t_end=jump.t,
                                    rho_start=seg_start_rho,
                                    rho_end=jump.rho_before))
        events.append(jump)
        seg_start_rho = jump.rho_after
    events.append(SmoothSegment(t_start=bounds[-2], t_end=t_max,
                                rho_start=seg_start_rho,
                                rho_end=radius_at(t_max)))

    times = np.linspace(0.0, t_max, n_samples)
    samples: List[Tuple[float, SphereData]] = []
    for t in times:
        rho = radius_at(float(t))
        samples.append((float(t), sphere_data(metric, rho, cfg)))
    return FlowTrack(rho0=rho0, initial_area=hull_area,
                     events=events, samples=samples)


def geroch_check(track: FlowTrack,
                 cfg: ToleranceConfig = DEFAULT_CFG) -> GerochReport:
    """Verify Hawking-mass monotonicity along the sampled flow."""
    times = [t for t, _ in track.samples]
    masses = [d.hawking_mass for _, d in track.samples]
    worst = 0.0
    for a, b in zip(masses, masses[1:]):
        worst = max(worst, a - b)
    scale = max(1.0, max(abs(m) for m in masses))
    return GerochReport(monotone=worst <= 1e-8 * scale, worst_drop=worst,
                        times=times, masses=masses)


def willmore_limit(track: FlowTrack, tail_fraction: float = 0.25,
                   cfg: ToleranceConfig = DEFAULT_CFG) -> Tuple[float, float]:
    """Extrapolated limit of the Willmore energy along the flow.

    For an asymptotically flat end the limit is 16*pi.  Returns (limit,
    err_estimate).
    """
    if not 0.0 < tail_fraction <= 1.0:
        raise DomainError(f"tail_fraction must lie in (0, 1], got {tail_fraction}")
    n = len(track.samples)
    k = max(cfg.extrap_terms, math.ceil(tail_fraction * n))
    if n < cfg.extrap_terms:
        raise InsufficientData(f"flow track has only {n} samples")
    tail = track.samples[n - k:]
    seq = [(t, d.willmore) for t, d in tail]
    return extrapolate_limit(seq, cfg)


def flow_to_csv(track: FlowTrack, stream: IO[str]) -> None:
    """Write the sampled flow as CSV.

    Columns: t, rho, area, volume, H, m_H, willmore, R, jump_flag.  The
    jump flag marks the first sample at or after each jump time.
    """
    jump_times = [j.t for j in track.jumps if j.t > 0.0]
    stream.write("t,rho,area,volume,H,m_H,willmore,R,jump_flag\n")
    pending = list(jump_times)
    for t, d in track.samples:
        flag = 0
        while pending and t >= pending[0] - 1e-15:
            flag = 1
            pending.pop(0)
        row = [t, d.rho, d.area, d.volume, d.mean_curvature,
               d.hawking_mass, d.willmore, d.scalar_curvature]
        stream.write(",".join("%.17g" % v for v in row) + f",{flag}\n")
