"""Shared domain types: atom sets, simplex points, budgeted objectives, solver configs."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

# Simplex membership: tolerance on the weight sum; non-negativity is kept exact
# by clamping rounding noise in (NEG_CLAMP, 0) back to 0 after each two-coordinate
# exchange update.
SUM_TOL = 1e-12
NEG_CLAMP = -1e-15

# Weights at or below this threshold count as zero everywhere (drop rules,
# active-zero sets, sparsity measurements).
ZERO_TOL = 1e-12


class BudgetExhausted(Exception):
    """An evaluation was requested beyond the objective's budget."""


class NonFiniteValue(ValueError):
    """The black box returned NaN or an infinity."""


@dataclass(frozen=True)
class AtomSet:
    """A finite set of points in R^n whose convex hull is the feasible set.

    Atoms are rows of ``atoms``; the row index is the atom's id and is stable
    for the lifetime of the set (working subsets reference these ids, so
    dropping an atom from a subset never renumbers anything).
    """

    atoms: np.ndarray  # (m, n)

    def __post_init__(self):
        arr = np.asarray(self.atoms, dtype=float)
        if arr.ndim != 2:
            raise ValueError(f"atoms must be a 2-d array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"need m >= 1 atoms of dimension n >= 1, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("atoms must be finite")
        object.__setattr__(self, "atoms", arr)

    @property
    def m(self) -> int:
        return self.atoms.shape[0]

    @property
    def n(self) -> int:
        return self.atoms.shape[1]

    def subset(self, ids: Sequence[int]) -> np.ndarray:
        """Matrix of the atoms with the given ids, one per row, in id-list order."""
        idx = np.asarray(list(ids), dtype=int)
        if idx.size and (idx.min() < 0 or idx.max() >= self.m):
            raise IndexError(f"atom id out of range [0, {self.m})")
        return self.atoms[idx]

    def __len__(self) -> int:
        return self.m


@dataclass(frozen=True)
class SimplexWeights:
    """A point of the unit simplex paired with the atom ids it weights."""

    w: np.ndarray
    ids: tuple

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float).copy()
        ids = tuple(int(i) for i in self.ids)
        if w.ndim != 1 or len(w) != len(ids):
            raise ValueError(f"weights of length {len(w)} cannot pair with {len(ids)} ids")
        if len(set(ids)) != len(ids):
            raise ValueError("atom ids must be unique")
        w[(w > NEG_CLAMP) & (w < 0.0)] = 0.0
        if np.any(w < 0.0):
            raise ValueError(f"negative weight: min={w.min()}")
        if abs(w.sum() - 1.0) > SUM_TOL:
            raise ValueError(f"weights sum to {w.sum()!r}, not 1")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "ids", ids)

    @classmethod
    def vertex(cls, ids: Sequence[int], position: int = 0) -> "SimplexWeights":
        ids = tuple(ids)
        w = np.zeros(len(ids))
        w[position] = 1.0
        return cls(w, ids)

    def point(self, atoms: AtomSet) -> np.ndarray:
        return combine(atoms.subset(self.ids), self.w)

    def __len__(self) -> int:
        return len(self.w)


def combine(atom_matrix: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Convex combination sum_i w_i a_i of the rows of ``atom_matrix``.

    Plain linear combination; no normalization is applied.
    """
    atom_matrix = np.asarray(atom_matrix, dtype=float)
    w = np.asarray(w, dtype=float)
    if atom_matrix.ndim != 2 or w.ndim != 1 or atom_matrix.shape[0] != len(w):
        raise ValueError(
            f"cannot combine {atom_matrix.shape} atom matrix with {w.shape} weights"
        )
    return w @ atom_matrix


def feasible_step_bound(z: np.ndarray, i: int, j: int) -> float:
    """Largest step a >= 0 with z + a*(e_i - e_j) still in the simplex.

    Only coordinate j decreases and the sum is preserved, so the bound is z_j.
    """
    if i == j:
        raise ValueError("exchange direction needs i != j")
    return float(z[j])


def exchange_point(z: np.ndarray, sign: int, i: int, j: int, step: float) -> np.ndarray:
    """The point z + step*sign*(e_i - e_j), with rounding noise clamped to 0."""
    out = np.array(z, dtype=float)
    out[i] += sign * step
    out[j] -= sign * step
    for h in (i, j):
        if out[h] < 0.0:
            if out[h] <= NEG_CLAMP:
                raise ValueError(f"infeasible exchange step {step} at coordinate {h}")
            out[h] = 0.0
    return out


def is_simplex_point(w: np.ndarray, sum_tol: float = SUM_TOL) -> bool:
    w = np.asarray(w, dtype=float)
    return bool(np.all(w >= 0.0) and abs(w.sum() - 1.0) <= sum_tol)


class BudgetedObjective:
    """A black-box objective with evaluation counting and budget enforcement.

    Every call increments ``eval_count`` by exactly one and appends
    ``(eval_index, f_value, best_so_far)`` to ``trace``. A call beyond the
    budget raises :class:`BudgetExhausted` without consulting the black box;
    a NaN/inf value raises :class:`NonFiniteValue`. One instance belongs to
    one solver run at a time.
    """

    def __init__(self, func: Callable[[np.ndarray], float], budget: Optional[int] = None):
        if budget is not None and budget < 1:
            raise ValueError(f"budget must be positive, got {budget}")
        self.func = func
        self.budget = budget
        self.eval_count = 0
        self.trace: list = []
        self._best = np.inf

    def __call__(self, x: np.ndarray) -> float:
        if self.budget is not None and self.eval_count >= self.budget:
            raise BudgetExhausted(f"budget of {self.budget} evaluations exhausted")
        value = float(self.func(x))
        if not np.isfinite(value):
            raise NonFiniteValue(f"objective returned {value} at x={x!r}")
        self.eval_count += 1
        if value < self._best:
            self._best = value
        self.trace.append((self.eval_count, value, self._best))
        return value

    @property
    def best_f(self) -> float:
        return self._best

    @property
    def remaining(self) -> Optional[int]:
        if self.budget is None:
            return None
        return self.budget - self.eval_count

    def history(self) -> np.ndarray:
        """Best-so-far value after each evaluation (non-increasing)."""
        return np.array([best for (_, _, best) in self.trace])


@dataclass(frozen=True)
class DfSimplexConfig:
    """Parameters of the direct-search simplex solver.

    epsilon is both the stepsize floor and the stopping tolerance; alpha0 is
    broadcast to every coordinate's initial stepsize.
    """

    tau: float = 1.0
    theta: float = 0.5
    gamma: float = 1e-6
    delta: float = 0.5
    alpha0: float = 1.0
    epsilon: float = 1e-4
    shuffle_directions: bool = False
    rng_seed: Optional[int] = None

    def __post_init__(self):
        if not (0.0 < self.tau <= 1.0):
            raise ValueError(f"tau must be in (0, 1], got {self.tau}")
        if not (0.0 < self.theta < 1.0):
            raise ValueError(f"theta must be in (0, 1), got {self.theta}")
        if self.gamma <= 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not (0.0 < self.delta < 1.0):
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        if self.alpha0 <= 0.0:
            raise ValueError(f"alpha0 must be positive, got {self.alpha0}")
        if self.epsilon <= 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")


class DropRule(Enum):
    ZERO_WEIGHT = "zero_weight"
    GRADIENT_FILTERED = "gradient_filtered"


@dataclass(frozen=True)
class OrdConfig:
    """Parameters of the outer optimize/refine/drop loop.

    The inner-solver tolerance follows eps_k = max(eps_min, eps0 * eps_decay**k).
    gamma and theta are independent of the inner solver's. The default drop
    rule filters zero-weight atoms through a simplex-gradient sign test.
    """

    # A slow decay beats aggressive tightening under tight budgets: early
    # inner solves stay loose and the saved evaluations go to refine sweeps.
    eps0: float = 1e-1
    eps_decay: float = 0.85
    eps_min: float = 1e-4
    mu0: float = 0.5
    gamma: float = 1e-6
    theta: float = 0.5
    drop_rule: DropRule = DropRule.GRADIENT_FILTERED
    stop_factor: float = 1e-4
    rng_seed: Optional[int] = None
    memoize: bool = False
    inner: DfSimplexConfig = field(default_factory=DfSimplexConfig)

    def __post_init__(self):
        if self.eps0 <= 0.0 or self.eps_min <= 0.0:
            raise ValueError("tolerances must be positive")
        if not (0.0 < self.eps_decay < 1.0):
            raise ValueError(f"eps_decay must be in (0, 1), got {self.eps_decay}")
        if self.eps_min > self.eps0:
            raise ValueError("eps_min cannot exceed eps0")
        if not (0.0 < self.mu0 < 1.0):
            raise ValueError(f"mu0 must be in (0, 1), got {self.mu0}")
        if self.gamma <= 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not (0.0 < self.theta < 1.0):
            raise ValueError(f"theta must be in (0, 1), got {self.theta}")
        if self.stop_factor <= 0.0:
            raise ValueError(f"stop_factor must be positive, got {self.stop_factor}")

    def eps_at(self, k: int) -> float:
        return max(self.eps_min, self.eps0 * self.eps_decay**k)
