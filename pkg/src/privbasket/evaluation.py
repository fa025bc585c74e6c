"""Accuracy and efficiency metrics for reconstructed mining runs.

An experiment mines a database exactly, distorts it, mines the
distortion with reconstruction, and compares outputs: support error
(rho), spurious and missing identity errors (sigma+ / sigma-), their
per-level breakdown, privacy estimates, and the wall-clock slowdown.
Undefined metrics stay None and are emitted as absent fields, never 0.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field
from typing import IO

import numpy as np

from . import apriori
from .corpus import TransactionDatabase, _open, compute_stats
from .distortion import DistortionParams, distort_database
from .errors import ConfigError
from .privacy import basic_privacy, reinterrogated_privacy
from .recon import mine_distorted


def support_error(
    actual: apriori.FrequentLattice, recon: apriori.FrequentLattice
) -> float | None:
    """Mean percentage gap between reconstructed and actual support,
    over itemsets found by both. None when the intersection is empty."""
    act = actual.support_map()
    rec = recon.support_map()
    common = act.keys() & rec.keys()
    if not common:
        return None
    return 100.0 * sum(abs(rec[t] - act[t]) / act[t] for t in common) / len(common)


def identity_errors(
    actual: apriori.FrequentLattice, recon: apriori.FrequentLattice
) -> tuple[float | None, float | None]:
    """(sigma+, sigma-): spurious and missing itemsets as a percentage
    of the actual frequent count. (None, None) when nothing is frequent."""
    f = actual.all_itemsets()
    r = recon.all_itemsets()
    if not f:
        return None, None
    return (
        100.0 * len(r - f) / len(f),
        100.0 * len(f - r) / len(f),
    )


@dataclass(eq=False)
class LevelRow:
    level: int
    f_count: int
    sigma_plus: float
    sigma_minus: float
    rho: float | None


def per_level_breakdown(
    actual: apriori.FrequentLattice, recon: apriori.FrequentLattice
) -> list[LevelRow]:
    """One row per level where the actual lattice is non-empty."""
    act_sup = actual.support_map()
    rec_sup = recon.support_map()
    rows = []
    for level in sorted(actual.levels):
        f = set(actual.levels[level])
        if not f:
            continue
        r = set(recon.levels.get(level, {}))
        common = f & r
        rho = (
            100.0 * sum(abs(rec_sup[t] - act_sup[t]) / act_sup[t] for t in common) / len(common)
            if common
            else None
        )
        rows.append(
            LevelRow(
                level=level,
                f_count=len(f),
                sigma_plus=100.0 * len(r - f) / len(f),
                sigma_minus=100.0 * len(f - r) / len(f),
                rho=rho,
            )
        )
    return rows


def slowdown(t_recon: float, t_exact: float) -> float:
    if t_recon <= 0.0 or t_exact <= 0.0:
        raise ConfigError("timings must be positive")
    return t_recon / t_exact


def _variance(values: list[float]) -> float | None:
    if not values:
        return None
    return float(np.var(values))  # population variance across levels


@dataclass(eq=False)
class ExperimentReport:
    p: float
    q: float
    seed: int
    sup_min: float
    dbsize: int
    num_items: int
    bp: float
    rp: float | None
    t_exact: float
    t_recon: float
    delta: float
    sigma_plus: float | None
    sigma_minus: float | None
    rho: float | None
    var_sigma_plus: float | None
    var_sigma_minus: float | None
    var_rho: float | None
    actual_count: int
    recon_count: int
    per_level: list[LevelRow] = field(default_factory=list)

    CSV_HEADER = "p,q,bp,rp,delta,sigma_plus,sigma_minus,rho,var_sigma_plus,var_sigma_minus,var_rho"

    def summary_csv_row(self) -> str:
        def fmt(x, digits=4):
            return "" if x is None else f"{x:.{digits}f}"

        return ",".join(
            [
                f"{self.p:g}",
                f"{self.q:g}",
                fmt(self.bp),
                fmt(self.rp),
                fmt(self.delta),
                fmt(self.sigma_plus),
                fmt(self.sigma_minus),
                fmt(self.rho),
                fmt(self.var_sigma_plus),
                fmt(self.var_sigma_minus),
                fmt(self.var_rho),
            ]
        )

    def write_summary_csv(self, sink: str | IO) -> None:
        with _open(sink, "w") as fh:
            fh.write(self.CSV_HEADER + "\n")
            fh.write(self.summary_csv_row() + "\n")

    def write_levels_csv(self, sink: str | IO) -> None:
        with _open(sink, "w") as fh:
            fh.write("level,f_count,sigma_plus,sigma_minus,rho\n")
            for row in self.per_level:
                rho = "" if row.rho is None else f"{row.rho:.4f}"
                fh.write(
                    f"{row.level},{row.f_count},{row.sigma_plus:.4f},"
                    f"{row.sigma_minus:.4f},{rho}\n"
                )

    def write_flat(self, sink: str | IO) -> None:
        """Key-value dump; timing-derived fields are not byte-stable."""
        pairs = [
            ("p", f"{self.p:g}"),
            ("q", f"{self.q:g}"),
            ("seed", str(self.seed)),
            ("sup_min", f"{self.sup_min:.8f}"),
            ("dbsize", str(self.dbsize)),
            ("num_items", str(self.num_items)),
            ("actual_frequent", str(self.actual_count)),
            ("recon_frequent", str(self.recon_count)),
            ("bp", _flat(self.bp)),
            ("rp", _flat(self.rp)),
            ("sigma_plus", _flat(self.sigma_plus)),
            ("sigma_minus", _flat(self.sigma_minus)),
            ("rho", _flat(self.rho)),
            ("var_sigma_plus", _flat(self.var_sigma_plus)),
            ("var_sigma_minus", _flat(self.var_sigma_minus)),
            ("var_rho", _flat(self.var_rho)),
            ("t_exact_seconds", f"{self.t_exact:.6f}"),
            ("t_recon_seconds", f"{self.t_recon:.6f}"),
            ("delta", f"{self.delta:.4f}"),
        ]
        with _open(sink, "w") as fh:
            for k, v in pairs:
                fh.write(f"{k}\t{v}\n")


def _flat(x) -> str:
    return "absent" if x is None else f"{x:.6f}"


def _timed_mine(fn, repeats: int):
    """Median wall-clock over `repeats` identical runs; returns the
    lattice of the last run (all runs are deterministic)."""
    times = []
    lattice = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        lattice = fn()
        times.append(time.perf_counter() - t0)
    return lattice, float(statistics.median(times))


def run_experiment(
    db: TransactionDatabase,
    params: DistortionParams,
    sup_min: float,
    timing_repeats: int = 3,
    privacy_mode: str = "simplified",
) -> ExperimentReport:
    """Full comparison run; deterministic apart from the timing fields.

    Timing wraps only the two mining calls (never I/O or distortion),
    and the timed miners always run single-threaded so slowdowns stay
    comparable.
    """
    if timing_repeats < 1:
        raise ConfigError("timing_repeats must be >= 1")
    stats = compute_stats(db)
    actual, t_exact = _timed_mine(lambda: apriori.mine(db, sup_min), timing_repeats)
    distorted = distort_database(db, params)
    recon, t_recon = _timed_mine(
        lambda: mine_distorted(distorted, params.p, params.q, sup_min),
        timing_repeats,
    )
    bp = basic_privacy(params.p, params.q, stats, mode=privacy_mode)
    rp = reinterrogated_privacy(db, distorted, recon, bp)
    sp, sm = identity_errors(actual, recon)
    rho = support_error(actual, recon)
    levels = per_level_breakdown(actual, recon)
    return ExperimentReport(
        p=params.p,
        q=params.q,
        seed=params.seed,
        sup_min=sup_min,
        dbsize=db.dbsize,
        num_items=db.num_items,
        bp=bp,
        rp=rp,
        t_exact=t_exact,
        t_recon=t_recon,
        delta=slowdown(t_recon, t_exact),
        sigma_plus=sp,
        sigma_minus=sm,
        rho=rho,
        var_sigma_plus=_variance([r.sigma_plus for r in levels]),
        var_sigma_minus=_variance([r.sigma_minus for r in levels]),
        var_rho=_variance([r.rho for r in levels if r.rho is not None]),
        actual_count=len(actual),
        recon_count=len(recon),
        per_level=levels,
    )
