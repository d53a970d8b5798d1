"""Outer optimize/refine/drop loop over growing-and-shrinking atom subsets.

Each outer iteration approximately minimizes over the hull of the current
atom subset (barycentric direct search), then tries to add one atom that
yields sufficient decrease along the segment toward it, then removes
zero-weight atoms, optionally filtered by a sample-based gradient sign test.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, List, Optional, Sequence, Set, Tuple

import numpy as np

from .core import (
    AtomSet,
    BudgetExhausted,
    DropRule,
    OrdConfig,
    SimplexWeights,
    ZERO_TOL,
)
from .dfsimplex import StopReason as InnerStop
from .dfsimplex import df_simplex_solve


class PoisednessFailure(Exception):
    """The sample set does not span enough directions for a gradient estimate."""


class OrdStop(Enum):
    CONVERGED = "converged"
    BUDGET = "budget"
    STALLED = "stalled"  # all atoms active and nothing droppable


@dataclass
class RefineOutcome:
    """Result of one refine sweep over the inactive atoms."""

    atom_id: Optional[int]
    mu: float
    x_next: Optional[np.ndarray]
    f_next: float
    candidates_tried: int
    budget_exhausted: bool = False

    @property
    def found(self) -> bool:
        return self.atom_id is not None


@dataclass(frozen=True)
class OrdTraceRecord:
    k: int
    active_size: int
    f_bar: float
    refined: bool
    dropped: int
    evals: int
    active_ids: tuple
    x_bar: np.ndarray
    y_bar: np.ndarray
    mu_hat: float


@dataclass
class OrdResult:
    x: np.ndarray
    f: float
    weights: SimplexWeights
    evals: int
    iterations: int
    trace: List[OrdTraceRecord]
    stop: OrdStop

    @property
    def active_ids(self) -> tuple:
        return self.weights.ids


def refine_phase(
    f: Callable[[np.ndarray], float],
    x_bar: np.ndarray,
    f_bar: float,
    atoms: AtomSet,
    active_ids: Sequence[int],
    mu_hat: float,
    gamma: float,
    rng: np.random.Generator,
) -> RefineOutcome:
    """Try inactive atoms in seeded random order, one evaluation per candidate.

    A candidate a is accepted when f(x_bar + mu_hat*(a - x_bar)) improves on
    f_bar by at least gamma*mu_hat**2; the first success wins.
    """
    active = set(int(i) for i in active_ids)
    candidates = [i for i in range(atoms.m) if i not in active]
    if not candidates:
        return RefineOutcome(None, 0.0, None, f_bar, 0)
    order = rng.permutation(len(candidates))
    tried = 0
    for idx in order:
        atom_id = candidates[idx]
        trial = x_bar + mu_hat * (atoms.atoms[atom_id] - x_bar)
        try:
            f_trial = f(trial)
        except BudgetExhausted:
            return RefineOutcome(None, 0.0, None, f_bar, tried, budget_exhausted=True)
        tried += 1
        if f_trial <= f_bar - gamma * mu_hat * mu_hat:
            return RefineOutcome(atom_id, mu_hat, trial, f_trial, tried)
    return RefineOutcome(None, 0.0, None, f_bar, tried)


def simplex_gradient(
    samples: Sequence[Tuple[np.ndarray, float]],
    y_bar: np.ndarray,
    f_bar: float,
    eps: float,
    phi: Callable[[np.ndarray], float],
) -> np.ndarray:
    """Least-squares gradient estimate from the final-iteration sample set.

    One extra point y_bar - eps*(sqrt(2)/m)*e is evaluated to make the set
    poised; it lies outside the simplex, which is fine since the objective is
    defined on all of R^n. Raises PoisednessFailure when the rows do not span
    R^m even with the extra point.
    """
    y_bar = np.asarray(y_bar, dtype=float)
    m = len(y_bar)
    extra = y_bar - eps * (np.sqrt(2.0) / m) * np.ones(m)
    f_extra = phi(extra)
    points = [p for p, _ in samples] + [extra]
    values = [v for _, v in samples] + [f_extra]
    S_t = np.array([p - y_bar for p in points])  # rows s_i - y_bar
    b = np.array(values) - f_bar
    rank = np.linalg.matrix_rank(S_t)
    if rank < m:
        raise PoisednessFailure(f"{len(points)} sample points span rank {rank} < {m}")
    g, *_ = np.linalg.lstsq(S_t, b, rcond=None)
    return g


def drop_phase(
    active_ids: Sequence[int],
    y_bar: np.ndarray,
    rule: DropRule,
    g: Optional[np.ndarray] = None,
) -> Set[int]:
    """Atom ids to remove: zero-weight atoms, optionally gradient-filtered.

    The filtered rule keeps a zero-weight atom h when g^T (e_h - y_bar) < 0,
    i.e. when the gradient estimate still points at it as a descent candidate.
    Atoms with positive weight are never dropped.
    """
    y_bar = np.asarray(y_bar, dtype=float)
    zero_positions = [h for h in range(len(y_bar)) if y_bar[h] <= ZERO_TOL]
    if rule is DropRule.ZERO_WEIGHT:
        to_drop = zero_positions
    elif rule is DropRule.GRADIENT_FILTERED:
        if g is None:
            raise ValueError("gradient-filtered drop needs a gradient estimate")
        g = np.asarray(g, dtype=float)
        if len(g) != len(y_bar):
            raise ValueError("gradient length does not match the weight vector")
        to_drop = [h for h in zero_positions if g[h] - g @ y_bar >= 0.0]
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unknown drop rule {rule!r}")
    return {int(active_ids[h]) for h in to_drop}


def reexpress_weights(
    y_bar: np.ndarray,
    active_ids: Sequence[int],
    refine: Optional[Tuple[int, float]],
    drop: Set[int],
) -> Tuple[List[int], np.ndarray]:
    """Weights over the updated subset: kept atoms scaled by (1-mu), new atom at mu.

    Dropping an atom with positive weight is a structural error. The kept
    weights are renormalized so the result sums to one exactly (the dropped
    mass is below ZERO_TOL by construction).
    """
    y_bar = np.asarray(y_bar, dtype=float)
    active_ids = [int(i) for i in active_ids]
    kept = []
    for h, atom_id in enumerate(active_ids):
        if atom_id in drop:
            if y_bar[h] > ZERO_TOL:
                raise ValueError(f"cannot drop atom {atom_id} with weight {y_bar[h]}")
        else:
            kept.append(h)
    new_ids = [active_ids[h] for h in kept]
    w = y_bar[kept].copy()
    if refine is not None:
        atom_id, mu = refine
        if atom_id in active_ids:
            raise ValueError(f"refine atom {atom_id} is already active")
        w = np.append(w * (1.0 - mu), mu)
        new_ids.append(int(atom_id))
    total = w.sum()
    if total <= 0.0:
        raise ValueError("re-expressed weights sum to zero")
    return new_ids, w / total


def ord_solve(
    f: Callable[[np.ndarray], float],
    atoms: AtomSet,
    cfg: OrdConfig,
    start_atom_id: int = 0,
    sink: Optional[Callable[[OrdTraceRecord], None]] = None,
) -> OrdResult:
    """Run the outer loop from a single starting atom.

    Stops on budget exhaustion (returning the best point reached), or, once
    the tolerance schedule has bottomed out, at the first iteration where the
    refine test fails and mu_hat has decayed below stop_factor / max distance
    to an inactive atom; with every atom active the run instead ends at the
    first floor-tolerance iteration that changes nothing.
    """
    if not (0 <= start_atom_id < atoms.m):
        raise ValueError(f"start atom id {start_atom_id} out of range [0, {atoms.m})")
    rng = np.random.default_rng(cfg.rng_seed)

    evals = 0

    def f_counted(x):
        nonlocal evals
        value = f(x)
        evals += 1
        return value

    if cfg.memoize:
        cache: dict = {}

        def objective(x):
            # cache hits do not touch the budget or the evaluation count
            key = x.tobytes()
            if key not in cache:
                cache[key] = f_counted(x)
            return cache[key]

    else:
        objective = f_counted

    active: List[int] = [int(start_atom_id)]
    y = np.array([1.0])
    f_x = objective(atoms.atoms[start_atom_id].copy())
    mu_hat = cfg.mu0
    trace: List[OrdTraceRecord] = []

    def result(x_out, f_out, ids, w, k, stop):
        # long runs accumulate ~ulp-per-accepted-step drift in the weight sum;
        # renormalizing here keeps the returned weights exactly on the simplex
        w = np.asarray(w, dtype=float)
        weights = SimplexWeights(w / w.sum(), tuple(ids))
        return OrdResult(
            x=np.asarray(x_out, dtype=float),
            f=float(f_out),
            weights=weights,
            evals=evals,
            iterations=k,
            trace=trace,
            stop=stop,
        )

    k = 0
    while True:
        eps_k = cfg.eps_at(k)
        A_k = atoms.subset(active)
        phi = lambda yv: objective(yv @ A_k)  # noqa: E731 - rebound every iteration
        inner_cfg = replace(cfg.inner, epsilon=eps_k)
        inner = df_simplex_solve(phi, y, inner_cfg, f0=f_x)
        y_bar, f_bar = inner.y, inner.f
        x_bar = y_bar @ A_k
        if inner.stop is InnerStop.BUDGET:
            return result(x_bar, f_bar, active, y_bar, k, OrdStop.BUDGET)

        refine = refine_phase(
            objective, x_bar, f_bar, atoms, active, mu_hat, cfg.gamma, rng
        )

        gradient = None
        if cfg.drop_rule is DropRule.GRADIENT_FILTERED:
            try:
                gradient = simplex_gradient(inner.samples, y_bar, f_bar, eps_k, phi)
            except (PoisednessFailure, BudgetExhausted):
                gradient = None  # fall back to the plain zero-weight rule
        rule = DropRule.ZERO_WEIGHT if gradient is None else cfg.drop_rule
        dropped = drop_phase(active, y_bar, rule, gradient)

        refine_pair = (refine.atom_id, refine.mu) if refine.found else None
        new_active, y_next = reexpress_weights(y_bar, active, refine_pair, dropped)

        record = OrdTraceRecord(
            k=k,
            active_size=len(active),
            f_bar=float(f_bar),
            refined=refine.found,
            dropped=len(dropped),
            evals=evals,
            active_ids=tuple(active),
            x_bar=x_bar,
            y_bar=y_bar,
            mu_hat=mu_hat,
        )
        trace.append(record)
        if sink is not None:
            sink(record)

        if refine.found:
            x_next, f_next = refine.x_next, refine.f_next
            mu_next = mu_hat
        else:
            x_next, f_next = x_bar, f_bar
            mu_next = cfg.theta * mu_hat
            if refine.budget_exhausted:
                return result(x_next, f_next, new_active, y_next, k + 1, OrdStop.BUDGET)
            inactive = [i for i in range(atoms.m) if i not in set(active)]
            if not inactive:
                # Every atom is active: nothing to refine toward, so the run
                # is a fixpoint only once the tolerance schedule has bottomed
                # out, nothing is droppable, and the inner solve at the floor
                # tolerance accepted no move.
                if not dropped and eps_k <= cfg.eps_min and f_bar == f_x:
                    return result(x_next, f_next, new_active, y_next, k + 1, OrdStop.STALLED)
            elif eps_k <= cfg.eps_min:
                # A converged verdict must carry the final-tolerance inner
                # certificate, so the mu_hat rule only applies once the
                # tolerance schedule has bottomed out.
                max_dist = max(
                    float(np.linalg.norm(atoms.atoms[i] - x_bar)) for i in inactive
                )
                # max_dist == 0 means every inactive atom sits at x_bar already
                if max_dist == 0.0 or mu_hat <= cfg.stop_factor / max_dist:
                    return result(
                        x_next, f_next, new_active, y_next, k + 1, OrdStop.CONVERGED
                    )

        active, y, f_x, mu_hat = new_active, y_next, f_next, mu_next
        k += 1
