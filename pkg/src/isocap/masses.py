"""Iso-p-capacitary and isoperimetric quasilocal masses.

The iso-p-capacitary mass of the region inside the sphere at rho compares
its volume with the volume of the Euclidean ball of equal normalized
p-capacity:

    m_p(rho) = (|Omega| - (4pi/3) c^(3/(3-p))) / (2 pi p c^(2/(3-p))),

with c the normalized p-capacity.  At p = 1 the convention
(p-1)^(p-1) = 1 applies and c is the hull area over 4pi.  The p = "iso"
(Huisken) mass replaces the capacity radius by the area radius.  The
total mass of an end is the limit along an exhaustion by centered
spheres, estimated here by extrapolation over a geometric radius grid.
"""

from __future__ import annotations

import csv
import json
import math
import statistics
from dataclasses import dataclass
from typing import IO, List, Optional, Sequence

from .capacity import one_capacity, p_capacity
from .geometry import FOUR_PI, RadialMetric, sphere_data
from .numerics import DEFAULT_CFG, ToleranceConfig, extrapolate_limit
from .specfun import gauss_2f1

SIXTEEN_PI = 16.0 * math.pi

CONVERGED = "CONVERGED"
DIVERGENT = "DIVERGENT"
INDETERMINATE = "INDETERMINATE"


@dataclass
class MassReport:
    """Quasilocal masses along a radius grid and their extrapolated limit."""

    metric: str
    p: Optional[float]  # None marks the Huisken-mass sequence
    radii: List[float]
    quasilocal: List[float]
    extrapolated_mass: float
    err_estimate: float
    verdict: str


@dataclass
class EquivalenceVerdict:
    reports: List[MassReport]
    max_pairwise_gap: float
    tol: float
    passed: bool


@dataclass
class BmxResult:
    rho: float
    p: float
    x: float
    lhs: float
    rhs: float
    slack: float
    passed: bool


@dataclass
class IsoperimetricRow:
    rho: float
    volume: float
    bound: float
    passed: bool


@dataclass
class IsoperimetricReport:
    m_bound: float
    rows: List[IsoperimetricRow]
    threshold: Optional[float]  # smallest grid radius past which all pass


def quasilocal_mass(metric: RadialMetric, rho: float, p: float,
                    cfg: ToleranceConfig = DEFAULT_CFG) -> float:
    """Iso-p-capacitary mass of the sphere at rho; +inf when p-parabolic."""
    if p == 1.0:
        c = one_capacity(metric, rho, cfg).ncap
    else:
        res = p_capacity(metric, rho, p, cfg)
        if res.parabolic:
            return math.inf
        c = res.ncap
    vol = metric.volume(rho, cfg)
    ball = (FOUR_PI / 3.0) * c ** (3.0 / (3.0 - p))
    return (vol - ball) / (2.0 * math.pi * p * c ** (2.0 / (3.0 - p)))


def huisken_mass(metric: RadialMetric, rho: float,
                 cfg: ToleranceConfig = DEFAULT_CFG) -> float:
    """Isoperimetric quasilocal mass of the sphere at rho."""
    area = metric.area(rho)
    vol = metric.volume(rho, cfg)
    return (2.0 / area) * (vol - area ** 1.5 / (6.0 * math.sqrt(math.pi)))


def default_r_grid(metric: RadialMetric, n: int = 6,
                   cfg: ToleranceConfig = DEFAULT_CFG) -> List[float]:
    """Geometric grid, ratio 2, from 50 capacitary radii of the boundary."""
    rho0 = metric.domain_start
    c1 = one_capacity(metric, max(rho0, 1e-3), cfg).ncap
    base = 50.0 * math.sqrt(c1)
    return [base * 2.0 ** k for k in range(n)]


def total_mass(metric: RadialMetric, p: Optional[float],
               r_grid: Optional[Sequence[float]] = None,
               cfg: ToleranceConfig = DEFAULT_CFG,
               report_tol: float = 1e-2) -> MassReport:
    """Extrapolated total mass along an exhaustion; p=None for Huisken."""
    if r_grid is None:
        r_grid = default_r_grid(metric, cfg.extrap_terms, cfg)
    radii = [float(r) for r in r_grid]
    if p is None:
        vals = [huisken_mass(metric, r, cfg) for r in radii]
    else:
        vals = [quasilocal_mass(metric, r, p, cfg) for r in radii]

    label = metric.label
    if any(math.isinf(v) for v in vals):
        return MassReport(metric=label, p=p, radii=radii, quasilocal=vals,
                          extrapolated_mass=math.inf, err_estimate=math.inf,
                          verdict=DIVERGENT)
    half = vals[len(vals) // 2:]
    scale = statistics.median(abs(v) for v in half)
    if abs(vals[-1]) > 10.0 * max(scale, 1e-12) and abs(vals[-1]) > 1.0:
        return MassReport(metric=label, p=p, radii=radii, quasilocal=vals,
                          extrapolated_mass=math.inf, err_estimate=math.inf,
                          verdict=DIVERGENT)
    lim, err = extrapolate_limit(list(zip(radii, vals)), cfg)
    verdict = CONVERGED if err <= report_tol * max(1.0, abs(lim)) else INDETERMINATE
    return MassReport(metric=label, p=p, radii=radii, quasilocal=vals,
                      extrapolated_mass=lim, err_estimate=err, verdict=verdict)


def equivalence_report(metric: RadialMetric, p_grid: Sequence[float],
                       r_grid: Optional[Sequence[float]] = None,
                       tol: float = 5e-3,
                       cfg: ToleranceConfig = DEFAULT_CFG) -> EquivalenceVerdict:
    """Compare extrapolated masses over a p-grid plus the Huisken sequence."""
    reports = [total_mass(metric, p, r_grid, cfg) for p in p_grid]
    reports.append(total_mass(metric, None, r_grid, cfg))
    limits = [r.extrapolated_mass for r in reports]
    if any(not math.isfinite(v) for v in limits):
        gap = math.inf
    else:
        gap = max(limits) - min(limits)
    return EquivalenceVerdict(reports=reports, max_pairwise_gap=gap, tol=tol,
                              passed=gap <= tol)


def bmx_bound_check(metric: RadialMetric, rho: float, p: float,
                    cfg: ToleranceConfig = DEFAULT_CFG) -> BmxResult:
    """Capacity upper bound from area and Willmore energy.

    ncap_p <= (area/4pi)^((3-p)/2) * F(1/2, (3-p)/(p-1), 2/(p-1); x)^(1-p)
    with x = 1 - willmore/16pi.  Equality on round spheres in Schwarzschild
    at p = 2 and everywhere on flat space.
    """
    data = sphere_data(metric, rho, cfg)
    x = 1.0 - data.willmore / SIXTEEN_PI
    lhs = p_capacity(metric, rho, p, cfg).ncap
    f = gauss_2f1(p, x, cfg)
    rhs = (data.area / FOUR_PI) ** ((3.0 - p) / 2.0) * f ** (1.0 - p)
    return BmxResult(rho=rho, p=p, x=x, lhs=lhs, rhs=rhs, slack=rhs - lhs,
                     passed=lhs <= rhs * (1.0 + 1e-8))


def asymptotic_isoperimetric_check(metric: RadialMetric, m_bound: float,
                                   r_grid: Sequence[float],
                                   cfg: ToleranceConfig = DEFAULT_CFG
                                   ) -> IsoperimetricReport:
    """Check |Omega| <= |S|^(3/2)/(6 sqrt(pi)) + (m/2)|S| on large spheres."""
    rows: List[IsoperimetricRow] = []
    for rho in r_grid:
        area = metric.area(float(rho))
        vol = metric.volume(float(rho), cfg)
        bound = area ** 1.5 / (6.0 * math.sqrt(math.pi)) + 0.5 * m_bound * area
        rows.append(IsoperimetricRow(rho=float(rho), volume=vol, bound=bound,
                                     passed=vol <= bound * (1.0 + 1e-12)))
    threshold: Optional[float] = None
    for row in reversed(rows):
        if not row.passed:
            break
        threshold = row.rho
    return IsoperimetricReport(m_bound=m_bound, rows=rows, threshold=threshold)


def _num(v: float):
    if math.isinf(v):
        return "+inf" if v > 0 else "-inf"
    return v


def mass_report_to_json(report: MassReport) -> str:
    obj = {
        "metric": report.metric,
        "p": report.p,
        "radii": report.radii,
        "quasilocal": [_num(v) for v in report.quasilocal],
        "extrapolated": _num(report.extrapolated_mass),
        "err": _num(report.err_estimate),
        "verdict": report.verdict,
    }
    return json.dumps(obj, indent=2, sort_keys=False)


def mass_report_to_csv(report: MassReport, stream: IO[str]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["metric", "p", "radius", "quasilocal",
                "extrapolated", "err", "verdict"])
    pstr = "" if report.p is None else "%.17g" % report.p
    for r, q in zip(report.radii, report.quasilocal):
        w.writerow([report.metric, pstr, "%.17g" % r,
                    "%.17g" % q if math.isfinite(q) else _num(q),
                    "%.17g" % report.extrapolated_mass
                    if math.isfinite(report.extrapolated_mass)
                    else _num(report.extrapolated_mass),
                    "%.17g" % report.err_estimate
                    if math.isfinite(report.err_estimate)
                    else _num(report.err_estimate),
                    report.verdict])
