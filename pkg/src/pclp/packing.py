"""Packing-side template: decreasing weights against violated rows.

The structure mirrors the covering solvers with every inequality flipped:
weights shrink when a row is whacked, a phase closes when the weight total
falls by a (1 - eps/2) factor, and the fast scan enforces rows whose
anchored value exceeds 1 + eps/2. The fast primal is reported as
x_hat / W, which keeps both the sum and the row bounds inside the
plain (1 +/- eps) band.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .certificates import Outcome
from .instances import PackingInstanceView
from .whack_static import PreconditionViolated, total_rounds

_RESCALE_BELOW = 1e-120


def whack_packing(instance: PackingInstanceView, i: int, x_hat: np.ndarray) -> np.ndarray:
    """One multiplicative down-weighting of x_hat against packing row i."""
    out = x_hat.copy()
    cols, vals = instance.P.row(i)
    if len(cols):
        out[cols] *= 1.0 - instance.eps * vals / instance.lam
    return out


def step_size_packing(instance: PackingInstanceView, i: int, t: int,
                      x_hat: np.ndarray, W: float, T: int) -> int:
    """Smallest d with (P z^d / W)_i <= 1, capped at T - t."""
    if t >= T:
        raise PreconditionViolated(f"no rounds left: t={t} >= T={T}")
    cols, vals = instance.P.row(i)
    budget = T - t
    if len(cols) == 0:
        raise PreconditionViolated(f"row {i} is empty and cannot be violated")
    base = vals * x_hat[cols]
    if float(base.sum()) <= (1.0 + instance.eps / 2.0) * W:
        raise PreconditionViolated(f"row {i} already near-satisfied")
    decay = np.log1p(-instance.eps * vals / instance.lam)

    def resid(d: int) -> float:
        return float(base @ np.exp(d * decay))

    if resid(budget) > W:
        return budget
    hi = 1
    while resid(hi) > W:
        hi *= 2
    hi = min(hi, budget)
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if resid(mid) <= W:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass
class PackingStats:
    phases: int = 0
    enforcements: int = 0
    whacks: int = 0
    outcome: str = ""
    min_weight: float = math.inf  # smallest true coordinate seen, for underflow audit
    trace: list[tuple[int, int]] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"phases": self.phases, "enforcements": self.enforcements,
                "whacks": self.whacks, "outcome": self.outcome}


def solve_packing_basic(instance: PackingInstanceView,
                        pick=None) -> tuple[Outcome, list[int]]:
    """T-round packing template; whacks rows with (P x)_i > 1."""
    P, lam, eps = instance.P, instance.lam, instance.eps
    n, m = instance.n, instance.m
    T = total_rounds(lam, n, eps)
    x_hat = np.ones(n)
    counts = np.zeros(m, dtype=np.int64)
    sequence: list[int] = []
    for t in range(T):
        x = x_hat / x_hat.sum()
        load = P.matvec(x)
        if np.all(load <= 1.0 + eps):
            return Outcome.packing_primal(x), sequence
        if pick is not None:
            i = pick(load, t)
        else:
            i = int(np.argmax(load > 1.0))
        if not load[i] > 1.0:
            raise PreconditionViolated(f"round {t}: row {i} is not violated")
        cols, vals = P.row(i)
        x_hat[cols] *= 1.0 - eps * vals / lam
        counts[i] += 1
        sequence.append(i)
    return Outcome.covering_dual(counts / float(T)), sequence


def solve_packing_fast(instance: PackingInstanceView) -> tuple[Outcome, PackingStats]:
    """Phase-anchored packing run mirroring the covering implementation."""
    P, lam, eps = instance.P, instance.lam, instance.eps
    n, m = instance.n, instance.m
    T = total_rounds(lam, n, eps)
    x_hat = np.ones(n)
    log_scale = 0.0
    t = 0
    counts = np.zeros(m, dtype=np.int64)
    stats = PackingStats()

    def note_min() -> None:
        low = math.log(float(x_hat.min())) + log_scale
        stats.min_weight = min(stats.min_weight, math.exp(max(low, -745.0)))

    while True:
        stats.phases += 1
        W = float(x_hat.sum())
        row_dots = P.matvec(x_hat)
        broke = False
        for i in range(m):
            if row_dots[i] > (1.0 + eps / 2.0) * W:
                delta = step_size_packing(instance, i, t, x_hat, W, T)
                cols, vals = P.row(i)
                old = x_hat[cols].copy()
                x_hat[cols] = old * np.exp(delta * np.log1p(-eps * vals / lam))
                dx = x_hat[cols] - old
                for idx in range(len(cols)):
                    rows_r, vals_r = P.col(int(cols[idx]))
                    row_dots[rows_r] += vals_r * dx[idx]
                row_dots[i] = P.dot_row(i, x_hat)
                counts[i] += delta
                t += delta
                stats.enforcements += 1
                stats.whacks = t
                note_min()
                if float(x_hat.min()) < _RESCALE_BELOW:
                    peak = float(x_hat.max())
                    x_hat /= peak
                    W /= peak
                    row_dots /= peak
                    log_scale += math.log(peak)
                if t >= T:
                    stats.outcome = "covering_dual"
                    return Outcome.covering_dual(counts / float(T)), stats
                if float(x_hat.sum()) < (1.0 - eps / 2.0) * W:
                    broke = True
                    break
        if not broke:
            stats.outcome = "packing_primal"
            return Outcome.packing_primal(x_hat / W), stats
