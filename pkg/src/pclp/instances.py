"""Problem instances and their validation.

Four instance kinds are shared by every solver in the package:

* :class:`NormalizedCoveringInstance` -- covering feasibility in standard
  form (min 1^T x, C x >= 1) with entries bounded by ``lam``.
* :class:`PackingInstanceView` -- the mirrored packing feasibility problem
  over the same matrix shape.
* :class:`GeneralInstance` -- a covering LP with arbitrary positive
  objective ``a`` and RHS ``b``.
* :class:`PositiveInstance` -- mixed packing/covering feasibility
  (P x <= 1, C x >= 1) after RHS scaling.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sparse import SparseNonnegMatrix


@dataclass(frozen=True)
class ValidationError:
    code: str
    detail: str

    def __str__(self) -> str:
        return f"{self.code}: {self.detail}"


@dataclass
class NormalizedCoveringInstance:
    C: SparseNonnegMatrix
    lam: float
    eps: float

    @property
    def m(self) -> int:
        return self.C.m

    @property
    def n(self) -> int:
        return self.C.n


@dataclass
class PackingInstanceView:
    """Packing feasibility over P in [0, lam]^{m x n}: 1^T x = 1, P x <= (1+eps) 1."""

    P: SparseNonnegMatrix
    lam: float
    eps: float

    @property
    def m(self) -> int:
        return self.P.m

    @property
    def n(self) -> int:
        return self.P.n


@dataclass
class GeneralInstance:
    """min a^T x  s.t.  C x >= b, x >= 0, with nonzero data in [L, U]."""

    C: SparseNonnegMatrix
    a: np.ndarray
    b: np.ndarray
    L: float
    U: float

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        if self.a.shape != (self.C.n,):
            raise ValueError(f"a must have length n={self.C.n}")
        if self.b.shape != (self.C.m,):
            raise ValueError(f"b must have length m={self.C.m}")

    @property
    def m(self) -> int:
        return self.C.m

    @property
    def n(self) -> int:
        return self.C.n


@dataclass
class PositiveInstance:
    """Mixed feasibility P x <= 1, C x >= 1 (RHS already scaled to ones)."""

    P: SparseNonnegMatrix
    C: SparseNonnegMatrix
    L: float
    U: float
    eps: float

    def __post_init__(self):
        if self.P.n != self.C.n:
            raise ValueError("P and C must agree on the number of variables")

    @property
    def m_p(self) -> int:
        return self.P.m

    @property
    def m_c(self) -> int:
        return self.C.m

    @property
    def n(self) -> int:
        return self.P.n


def _matrix_errors(mat: SparseNonnegMatrix, lam: float | None, name: str) -> list[ValidationError]:
    errors = []
    if mat.m < 1 or mat.n < 1:
        errors.append(ValidationError("EmptyMatrix", f"{name} is {mat.m}x{mat.n}"))
    for i, j, v in mat.entries():
        if v < 0:
            errors.append(ValidationError("NegativeEntry", f"{name}[{i},{j}]={v}"))
        elif lam is not None and v > lam:
            errors.append(
                ValidationError("EntryAboveLambda", f"{name}[{i},{j}]={v} > {lam}"))
    return errors


def validate(instance) -> list[ValidationError]:
    """Check every type invariant; returns one entry per violation (empty = ok)."""
    errors: list[ValidationError] = []
    if isinstance(instance, NormalizedCoveringInstance):
        errors += _matrix_errors(instance.C, instance.lam, "C")
        if not (0 < instance.eps < 0.5):
            errors.append(ValidationError(
                "EpsOutOfRange", f"eps={instance.eps} outside (0, 1/2)"))
        if instance.lam <= 0:
            errors.append(ValidationError("EntryAboveLambda", f"lambda={instance.lam} <= 0"))
    elif isinstance(instance, PackingInstanceView):
        errors += _matrix_errors(instance.P, instance.lam, "P")
        if not (0 < instance.eps < 0.5):
            errors.append(ValidationError(
                "EpsOutOfRange", f"eps={instance.eps} outside (0, 1/2)"))
    elif isinstance(instance, GeneralInstance):
        errors += _matrix_errors(instance.C, None, "C")
        if instance.L > instance.U:
            errors.append(ValidationError("EpsOutOfRange", f"L={instance.L} > U={instance.U}"))
        for name, vec in (("a", instance.a), ("b", instance.b)):
            for idx, v in enumerate(vec):
                if v <= 0:
                    errors.append(ValidationError(
                        "NegativeEntry", f"{name}[{idx}]={v} must be positive"))
                elif not (instance.L <= v <= instance.U):
                    errors.append(ValidationError(
                        "EntryAboveLambda", f"{name}[{idx}]={v} outside [{instance.L},{instance.U}]"))
        for i, j, v in instance.C.entries():
            if not (instance.L <= v <= instance.U):
                errors.append(ValidationError(
                    "EntryAboveLambda", f"C[{i},{j}]={v} outside [{instance.L},{instance.U}]"))
    elif isinstance(instance, PositiveInstance):
        errors += _matrix_errors(instance.P, None, "P")
        errors += _matrix_errors(instance.C, None, "C")
        if not (0 < instance.eps <= 1 / 200):
            errors.append(ValidationError(
                "EpsOutOfRange", f"eps={instance.eps} outside (0, 1/200]"))
        for name, mat in (("P", instance.P), ("C", instance.C)):
            for i, j, v in mat.entries():
                if not (instance.L <= v <= instance.U):
                    errors.append(ValidationError(
                        "EntryAboveLambda",
                        f"{name}[{i},{j}]={v} outside [{instance.L},{instance.U}]"))
    else:
        raise TypeError(f"unknown instance type {type(instance)!r}")
    return errors
