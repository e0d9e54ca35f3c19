"""Desk-scale exact ground truth in rational arithmetic.

The oracle answers three kinds of questions, all with Fraction arithmetic
so results are reproducible bit-for-bit:

* exact optima of small covering/packing LPs (two-phase simplex with
  Bland's rule, plus an independent vertex-enumeration path used to
  cross-check the simplex on tiny instances);
* exact feasibility of a mixed positive system P x <= (1+s) 1, C x >= 1;
* brute-force scans for the discrete step sizes used by the approximate
  solvers (whack step size, boost increment).

Float inputs are rationalized exactly from their binary representation.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .sparse import SparseNonnegMatrix


class TooLarge(ValueError):
    pass


#: simplex is exact at any size, but callers promise desk scale
MAX_DIM = 24


@dataclass(frozen=True)
class ExactLPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction | None = None
    x: tuple[Fraction, ...] | None = None

    def value_float(self) -> float:
        assert self.value is not None
        return float(self.value)


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    return Fraction(float(v))


def _frac_matrix(mat) -> list[list[Fraction]]:
    if isinstance(mat, SparseNonnegMatrix):
        dense = mat.to_dense()
    else:
        dense = np.asarray(mat, dtype=float)
    return [[_frac(dense[i, j]) for j in range(dense.shape[1])]
            for i in range(dense.shape[0])]


# ---------------------------------------------------------------------------
# exact simplex
# ---------------------------------------------------------------------------

def _pivot(tab: list[list[Fraction]], basis: list[int], row: int, col: int) -> None:
    piv = tab[row][col]
    inv = Fraction(1) / piv
    tab[row] = [v * inv for v in tab[row]]
    for r, line in enumerate(tab):
        if r != row and line[col] != 0:
            factor = line[col]
            prow = tab[row]
            tab[r] = [v - factor * p for v, p in zip(line, prow)]
    basis[row] = col


def _simplex_phase(tab: list[list[Fraction]], basis: list[int], cost: list[Fraction],
                   ncols: int) -> tuple[str, Fraction]:
    """Minimize cost over the current tableau; Bland's rule, so it terminates.

    ``ncols`` limits which columns may enter; the RHS is always the last
    tableau column.
    """
    m = len(tab)
    rhs = len(tab[0]) - 1
    while True:
        # reduced costs z_j = c_j - c_B B^-1 A_j
        red = list(cost)
        for r in range(m):
            cb = cost[basis[r]]
            if cb != 0:
                row = tab[r]
                for j in range(ncols):
                    if row[j] != 0:
                        red[j] -= cb * row[j]
        enter = -1
        for j in range(ncols):
            if red[j] < 0:
                enter = j
                break
        if enter < 0:
            obj = Fraction(0)
            for r in range(m):
                obj += cost[basis[r]] * tab[r][rhs]
            return "optimal", obj
        leave = -1
        best: Fraction | None = None
        for r in range(m):
            a = tab[r][enter]
            if a > 0:
                ratio = tab[r][rhs] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    best = ratio
                    leave = r
        if leave < 0:
            return "unbounded", Fraction(0)
        _pivot(tab, basis, leave, enter)


def _solve_standard_min(A: list[list[Fraction]], b: list[Fraction],
                        c: list[Fraction]) -> ExactLPResult:
    """min c^T z  s.t.  A z = b, z >= 0. Rows with negative b are flipped."""
    m = len(A)
    nv = len(c)
    A = [list(row) for row in A]
    b = list(b)
    for r in range(m):
        if b[r] < 0:
            A[r] = [-v for v in A[r]]
            b[r] = -b[r]
    ncols = nv + m  # artificials appended
    tab = [A[r] + [Fraction(1) if k == r else Fraction(0) for k in range(m)] + [b[r]]
           for r in range(m)]
    basis = [nv + r for r in range(m)]
    phase1 = [Fraction(0)] * nv + [Fraction(1)] * m
    status, obj = _simplex_phase(tab, basis, phase1, ncols)
    assert status == "optimal"  # phase 1 is bounded below by zero
    if obj > 0:
        return ExactLPResult("infeasible")
    # drive leftover artificials out of the basis, dropping redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= nv:
            enter = next((j for j in range(nv) if tab[r][j] != 0), -1)
            if enter < 0:
                continue  # redundant constraint
            _pivot(tab, basis, r, enter)
        keep.append(r)
    tab = [tab[r] for r in keep]
    basis = [basis[r] for r in keep]
    phase2 = list(c) + [Fraction(0)] * m
    status, obj = _simplex_phase(tab, basis, phase2, nv)
    if status == "unbounded":
        return ExactLPResult("unbounded")
    x = [Fraction(0)] * nv
    for r, bvar in enumerate(basis):
        if bvar < nv:
            x[bvar] = tab[r][-1]
    return ExactLPResult("optimal", obj, tuple(x))


# ---------------------------------------------------------------------------
# covering / packing optima
# ---------------------------------------------------------------------------

def solve_covering_exact(C, a=None, b=None) -> ExactLPResult:
    """Exact optimum of min a^T x  s.t.  C x >= b, x >= 0 (defaults a=b=1)."""
    Cf = _frac_matrix(C)
    m, n = len(Cf), len(Cf[0])
    if m > MAX_DIM or n > MAX_DIM:
        raise TooLarge(f"{m}x{n} exceeds oracle scale {MAX_DIM}")
    af = [_frac(v) for v in (a if a is not None else [1] * n)]
    bf = [_frac(v) for v in (b if b is not None else [1] * m)]
    # C x - s = b with surplus variables s
    A = [Cf[i] + [Fraction(-1) if k == i else Fraction(0) for k in range(m)]
         for i in range(m)]
    c = af + [Fraction(0)] * m
    res = _solve_standard_min(A, bf, c)
    if res.status != "optimal":
        return ExactLPResult(res.status)
    return ExactLPResult("optimal", res.value, res.x[:n])


def solve_packing_exact(C, a=None, b=None) -> ExactLPResult:
    """Exact optimum of max b^T y  s.t.  C^T y <= a, y >= 0 (defaults a=b=1)."""
    Cf = _frac_matrix(C)
    m, n = len(Cf), len(Cf[0])
    if m > MAX_DIM or n > MAX_DIM:
        raise TooLarge(f"{m}x{n} exceeds oracle scale {MAX_DIM}")
    af = [_frac(v) for v in (a if a is not None else [1] * n)]
    bf = [_frac(v) for v in (b if b is not None else [1] * m)]
    # rows of the standard form are the n constraints C^T y + s = a
    A = [[Cf[i][j] for i in range(m)] + [Fraction(1) if k == j else Fraction(0) for k in range(n)]
         for j in range(n)]
    c = [-v for v in bf] + [Fraction(0)] * n
    res = _solve_standard_min(A, af, c)
    if res.status != "optimal":
        return ExactLPResult(res.status)
    return ExactLPResult("optimal", -res.value, res.x[:m])


def solve_covering_exact_vertex(C, a=None, b=None) -> ExactLPResult:
    """Vertex enumeration over tight-constraint subsets; independent of simplex.

    Only for tiny instances: C(m+n, n) subsets are solved exactly.
    """
    Cf = _frac_matrix(C)
    m, n = len(Cf), len(Cf[0])
    if math.comb(m + n, n) > 4000:
        raise TooLarge(f"vertex enumeration over {m + n} choose {n} subsets")
    af = [_frac(v) for v in (a if a is not None else [1] * n)]
    bf = [_frac(v) for v in (b if b is not None else [1] * m)]
    # constraint rows: first m are C_i x = b_i, last n are x_j = 0
    best: Fraction | None = None
    best_x: tuple[Fraction, ...] | None = None
    for subset in itertools.combinations(range(m + n), n):
        rows = []
        rhs = []
        for s in subset:
            if s < m:
                rows.append(list(Cf[s]))
                rhs.append(bf[s])
            else:
                rows.append([Fraction(1) if k == s - m else Fraction(0) for k in range(n)])
                rhs.append(Fraction(0))
        x = _gauss_solve(rows, rhs)
        if x is None:
            continue
        if any(v < 0 for v in x):
            continue
        if any(sum(Cf[i][j] * x[j] for j in range(n)) < bf[i] for i in range(m)):
            continue
        val = sum(af[j] * x[j] for j in range(n))
        if best is None or val < best:
            best = val
            best_x = tuple(x)
    if best is None:
        return ExactLPResult("infeasible")
    return ExactLPResult("optimal", best, best_x)


def _gauss_solve(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    n = len(rows)
    aug = [list(rows[r]) + [rhs[r]] for r in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), -1)
        if piv < 0:
            return None  # singular
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = Fraction(1) / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * p for v, p in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


# ---------------------------------------------------------------------------
# positive feasibility
# ---------------------------------------------------------------------------

def positive_feasible_exact(P, C, slack=0) -> tuple[bool, tuple[Fraction, ...] | None]:
    """Decide exactly whether some x >= 0 has P x <= (1+slack) 1 and C x >= 1."""
    Pf = _frac_matrix(P)
    Cf = _frac_matrix(C)
    mp, n = len(Pf), len(Pf[0])
    mc = len(Cf)
    if n > MAX_DIM or mp + mc > 2 * MAX_DIM:
        raise TooLarge(f"{mp}+{mc} x {n} exceeds oracle scale")
    s = Fraction(1) + _frac(slack)
    # P x + u = (1+slack) 1 ; C x - v = 1, via phase-1 feasibility only
    nv = n + mp + mc
    A = []
    rhs = []
    for i in range(mp):
        A.append(Pf[i]
                 + [Fraction(1) if k == i else Fraction(0) for k in range(mp)]
                 + [Fraction(0)] * mc)
        rhs.append(s)
    for j in range(mc):
        A.append(Cf[j]
                 + [Fraction(0)] * mp
                 + [Fraction(-1) if k == j else Fraction(0) for k in range(mc)])
        rhs.append(Fraction(1))
    res = _solve_standard_min(A, rhs, [Fraction(0)] * nv)
    if res.status != "optimal":
        return (False, None)
    return (True, res.x[:n])


# ---------------------------------------------------------------------------
# brute-force scan oracles
# ---------------------------------------------------------------------------

def brute_force_step_size(row_vals: Sequence[float], x_hat: Sequence[float],
                          lam: float, eps: float, W: float, budget: int) -> int:
    """Smallest integer d in [1, budget] with sum_j v_j (1+eps v_j/lam)^d xh_j >= W.

    Linear scan with iterated multiplication, capped at ``budget`` when even
    the full power falls short (the all-zero-row case ends up here too).
    """
    vals = np.asarray(row_vals, dtype=float)
    z = np.asarray(x_hat, dtype=float).copy()
    factors = 1.0 + eps * vals / lam
    for d in range(1, budget + 1):
        z = z * factors
        if float(vals @ z) >= W:
            return d
    return budget


def brute_force_delta(P: SparseNonnegMatrix, C: SparseNonnegMatrix,
                      x: Sequence[float], k: int, eps: float, eta: float,
                      ext_col: Sequence[float] | None = None) -> float:
    """Exact boost increment: largest d with every binding entry's move <= eps/eta.

    Binding entries are the packing column and the covering column restricted
    to rows with C_j x < 2. Returns inf when nothing binds.
    """
    xv = np.asarray(x, dtype=float)
    top = 0.0
    _, pvals = P.col(k)
    if len(pvals):
        top = float(pvals.max())
    crows, cvals = C.col(k)
    for j, v in zip(crows, cvals):
        if C.dot_row(int(j), xv) < 2.0 and v > top:
            top = float(v)
    if top == 0.0:
        return math.inf
    return (eps / eta) / top
