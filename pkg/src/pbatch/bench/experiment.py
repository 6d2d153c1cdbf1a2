"""Experiment harness: run groups of generated instances and write CSV reports.

Two CSV files are produced.  The detail file has one row per instance
(``DETAIL_FIELDS``); the summary file has one row per ``(n, sigma, C, m)``
group (``SUMMARY_FIELDS``, the fields of :class:`ReportRow`).  Every summary
aggregate is recomputable from the detail rows of its group.
"""

from __future__ import annotations

import csv
import logging
import math
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from ..bounds import pr_bound
from ..colgen import CgConfig, price_and_branch
from .generate import GenSpec, generate_instance

logger = logging.getLogger(__name__)

RATIO_TOL = 1e-9


@dataclass(frozen=True)
class DetailRow:
    n: int
    sigma: int
    C: int
    m: int
    seed: int
    replica: int
    cg_lb: float | None
    cg_ub: int | None
    pr: float | None
    gap: float | None
    ratio: float | None
    certified: bool
    converged: bool
    ub_limit_hit: bool
    lb_seconds: float | None
    ub_seconds: float | None
    iterations: int | None
    columns: int | None
    bnb_nodes: int | None
    error: str


@dataclass(frozen=True)
class ReportRow:
    n: int
    sigma: int
    C: int
    m: int
    replicas: int
    lb_seconds: float | None
    ub_seconds: float | None
    gap_avg: float | None
    gap_worst: float | None
    gap_best: float | None
    ratio_avg: float | None
    ratio_min: float | None
    ratio_max: float | None
    opt_count: int
    ratio_violations: int
    partial: bool


DETAIL_FIELDS = [f.name for f in fields(DetailRow)]
SUMMARY_FIELDS = [f.name for f in fields(ReportRow)]


@dataclass
class ExperimentReport:
    summary: list[ReportRow]
    detail: list[DetailRow]

    @property
    def ratio_violations(self) -> int:
        return sum(row.ratio_violations for row in self.summary)


def run_instance(spec: GenSpec, replica: int, config: CgConfig) -> DetailRow:
    """One pipeline end to end; failures are captured in the ``error`` column."""
    base = dict(n=spec.n, sigma=spec.sigma, C=spec.capacity, m=spec.machines, seed=spec.seed, replica=replica)
    try:
        inst = generate_instance(spec, replica)
        pr = pr_bound(inst).value
        res = price_and_branch(inst, config)
    except Exception as exc:  # noqa: BLE001 - recorded, group marked partial
        logger.error("instance %s failed: %s", base, exc)
        logger.debug(traceback.format_exc())
        return DetailRow(**base, cg_lb=None, cg_ub=None, pr=None, gap=None, ratio=None, certified=False,
                         converged=False, ub_limit_hit=False, lb_seconds=None, ub_seconds=None,
                         iterations=None, columns=None, bnb_nodes=None, error=f"{type(exc).__name__}: {exc}")
    ratio = res.cg_lb / pr if res.cg_lb is not None else None
    return DetailRow(**base, cg_lb=res.cg_lb, cg_ub=res.cg_ub, pr=pr, gap=res.gap_percent, ratio=ratio,
                     certified=res.certified_optimal, converged=res.converged, ub_limit_hit=res.ub_limit_hit,
                     lb_seconds=res.lb_seconds, ub_seconds=res.ub_seconds, iterations=res.iterations,
                     columns=res.columns_generated, bnb_nodes=res.bnb_nodes, error="")


def _mean(xs):
    return math.fsum(xs) / len(xs) if xs else None


def summarize(spec: GenSpec, rows: list[DetailRow]) -> ReportRow:
    ok = [r for r in rows if not r.error]
    gaps = [r.gap for r in ok if r.gap is not None]
    ratios = [r.ratio for r in ok if r.ratio is not None]
    violations = sum(1 for x in ratios if x < 1.0 - RATIO_TOL)
    return ReportRow(
        n=spec.n, sigma=spec.sigma, C=spec.capacity, m=spec.machines, replicas=spec.replicas,
        lb_seconds=_mean([r.lb_seconds for r in ok]),
        ub_seconds=_mean([r.ub_seconds for r in ok]),
        gap_avg=_mean(gaps), gap_worst=max(gaps, default=None), gap_best=min(gaps, default=None),
        ratio_avg=_mean(ratios), ratio_min=min(ratios, default=None), ratio_max=max(ratios, default=None),
        opt_count=sum(1 for r in ok if r.certified),
        ratio_violations=violations,
        partial=len(ok) < spec.replicas or len(gaps) < len(ok),
    )


def _run_job(args):
    spec, replica, config = args
    return run_instance(spec, replica, config)


def run_experiment(specs, config: CgConfig | None = None, workers: int = 1, out_dir=None) -> ExperimentReport:
    """Run every replica of every spec; write ``summary.csv`` and ``detail.csv`` to ``out_dir`` if given.

    A ratio CG-LB/PR below 1 is logged as an error and counted in
    ``ratio_violations``; the caller decides how to fail.
    """
    specs = list(specs)
    config = config or CgConfig()
    jobs = [(spec, r, config) for spec in specs for r in range(spec.replicas)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_job, jobs))
    else:
        results = [_run_job(job) for job in jobs]

    detail: list[DetailRow] = []
    summary: list[ReportRow] = []
    pos = 0
    for spec in specs:
        rows = results[pos: pos + spec.replicas]
        pos += spec.replicas
        detail.extend(rows)
        row = summarize(spec, rows)
        if row.ratio_violations:
            logger.error("CG-LB/PR below 1 on %d instance(s) of group n=%d sigma%d C=%d m=%d",
                         row.ratio_violations, spec.n, spec.sigma, spec.capacity, spec.machines)
        summary.append(row)

    report = ExperimentReport(summary, detail)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_csv(out / "summary.csv", SUMMARY_FIELDS, summary)
        write_csv(out / "detail.csv", DETAIL_FIELDS, detail)
    return report


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return value


def write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            d = asdict(row)
            writer.writerow([_cell(d[name]) for name in header])


def load_specs(data) -> tuple[list[GenSpec], dict]:
    """Parse a bench spec document: ``{"groups": [...], "config": {...}}`` or a bare list of groups."""
    if isinstance(data, list):
        groups, cfg = data, {}
    else:
        groups, cfg = data.get("groups", []), data.get("config", {})
    specs = []
    for g in groups:
        g = dict(g)
        if "C" in g:
            g["capacity"] = g.pop("C")
        if "m" in g:
            g["machines"] = g.pop("m")
        specs.append(GenSpec(**g))
    return specs, cfg
