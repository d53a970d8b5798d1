"""Data and performance profiles over solver evaluation histories.

A problem counts as solved by a solver once its best-so-far value crosses
f_L + tau*(f(x0) - f_L), where f_L is the best value any compared solver
reached on that problem. Data profiles scale the first-hit evaluation count
by n_p + 1; performance profiles compare it against the best solver's.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

DEFAULT_TAUS = (1e-1, 1e-3, 1e-5)
DEFAULT_KAPPAS = tuple(range(0, 101))
DEFAULT_IOTAS = tuple(np.logspace(0.0, 6.0, num=25, base=2.0))


@dataclass(frozen=True)
class RunRecord:
    """One solver's run on one problem: best-so-far value after each evaluation."""

    problem_id: str
    solver_id: str
    n_p: int
    history: np.ndarray
    f0: float

    def __post_init__(self):
        hist = np.asarray(self.history, dtype=float)
        if hist.ndim != 1 or len(hist) == 0:
            raise ValueError("history must be a nonempty 1-d array")
        if np.any(np.diff(hist) > 0.0):
            raise ValueError("best-so-far history must be non-increasing")
        object.__setattr__(self, "history", hist)

    @property
    def best(self) -> float:
        return float(self.history[-1])


def convergence_threshold(f0: float, f_low: float, tau: float) -> float:
    """The accuracy target f_low + tau*(f0 - f_low)."""
    if f_low > f0:
        raise ValueError(f"f_low={f_low} exceeds f0={f0}")
    if not (0.0 < tau < 1.0):
        raise ValueError(f"tau must be in (0, 1), got {tau}")
    return f_low + tau * (f0 - f_low)


def first_hit_evals(history: np.ndarray, threshold: float) -> Optional[int]:
    """1-based index of the first history entry <= threshold; None when unsolved."""
    hits = np.flatnonzero(np.asarray(history, dtype=float) <= threshold)
    if len(hits) == 0:
        return None
    return int(hits[0]) + 1


def _solve_table(records: Sequence[RunRecord], tau: float):
    """t[problem][solver] = first-hit evaluation count (None if unsolved)."""
    problems = sorted({r.problem_id for r in records})
    solvers = sorted({r.solver_id for r in records})
    by_key = {(r.problem_id, r.solver_id): r for r in records}
    if len(by_key) != len(records):
        raise ValueError("duplicate (problem, solver) record")
    for p in problems:
        for s in solvers:
            if (p, s) not in by_key:
                raise ValueError(f"missing record for problem {p!r}, solver {s!r}")
    table: Dict[str, Dict[str, Optional[int]]] = {}
    dims: Dict[str, int] = {}
    for p in problems:
        f_low = min(by_key[(p, s)].best for s in solvers)
        f0 = by_key[(p, solvers[0])].f0
        threshold = convergence_threshold(f0, f_low, tau)
        table[p] = {
            s: first_hit_evals(by_key[(p, s)].history, threshold) for s in solvers
        }
        dims[p] = by_key[(p, solvers[0])].n_p
    return problems, solvers, table, dims


def data_profile(
    records: Sequence[RunRecord],
    tau: float,
    kappas: Sequence[float] = DEFAULT_KAPPAS,
) -> Dict[str, np.ndarray]:
    """d_s(kappa) = fraction of problems solved within kappa*(n_p+1) evaluations."""
    problems, solvers, table, dims = _solve_table(records, tau)
    curves = {}
    for s in solvers:
        curve = np.zeros(len(kappas))
        for gi, kappa in enumerate(kappas):
            solved = sum(
                1
                for p in problems
                if table[p][s] is not None and table[p][s] <= kappa * (dims[p] + 1)
            )
            curve[gi] = solved / len(problems)
        curves[s] = curve
    return curves


def performance_profile(
    records: Sequence[RunRecord],
    tau: float,
    iotas: Sequence[float] = DEFAULT_IOTAS,
) -> Dict[str, np.ndarray]:
    """rho_s(iota) = fraction of problems where t_{p,s} <= iota * best solver's t."""
    problems, solvers, table, _ = _solve_table(records, tau)
    curves = {}
    for s in solvers:
        ratios = []
        for p in problems:
            hits = [table[p][s2] for s2 in solvers if table[p][s2] is not None]
            if not hits or table[p][s] is None:
                ratios.append(np.inf)  # unsolved by s (or by everyone): never counted
            else:
                ratios.append(table[p][s] / min(hits))
        ratios = np.array(ratios)
        curves[s] = np.array([np.mean(ratios <= iota) for iota in iotas])
    return curves


# --- CSV interfaces ----------------------------------------------------------

LONG_HEADER = ("problem_id", "solver_id", "n_p", "eval_index", "best_f")


def write_records_csv(path, records: Iterable[RunRecord]) -> None:
    """Long-format dump: one row per (run, evaluation)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(LONG_HEADER)
        for r in records:
            for idx, best in enumerate(r.history, start=1):
                writer.writerow([r.problem_id, r.solver_id, r.n_p, idx, f"{best:.17g}"])


def read_records_csv(path) -> List[RunRecord]:
    """Rebuild run records from the long-format CSV."""
    rows: Dict[tuple, list] = {}
    dims: Dict[tuple, int] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != LONG_HEADER:
            raise ValueError(f"{path}: expected header {','.join(LONG_HEADER)}")
        for line_no, row in enumerate(reader, start=2):
            try:
                key = (row["problem_id"], row["solver_id"])
                idx = int(row["eval_index"])
                best = float(row["best_f"])
                dims[key] = int(row["n_p"])
            except (KeyError, ValueError) as exc:
                raise ValueError(f"{path}: bad row {line_no}: {exc}") from exc
            rows.setdefault(key, []).append((idx, best))
    records = []
    for key, entries in rows.items():
        entries.sort()
        history = np.array([best for _, best in entries])
        records.append(
            RunRecord(
                problem_id=key[0],
                solver_id=key[1],
                n_p=dims[key],
                history=history,
                f0=float(history[0]),
            )
        )
    return records


def write_curves_csv(path, curves: Dict[str, np.ndarray], grid: Sequence[float]) -> None:
    """Per-solver curve dump: (solver_id, grid_value, curve_value) rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["solver_id", "grid_value", "curve_value"])
        for solver in sorted(curves):
            for g_val, c_val in zip(grid, curves[solver]):
                writer.writerow([solver, f"{g_val:.17g}", f"{c_val:.17g}"])
