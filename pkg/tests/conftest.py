import numpy as np
import pytest

from pclp.instances import (
    NormalizedCoveringInstance,
    PackingInstanceView,
    PositiveInstance,
)
from pclp.sparse import SparseNonnegMatrix


def covering(dense, lam=1.0, eps=0.1) -> NormalizedCoveringInstance:
    return NormalizedCoveringInstance(SparseNonnegMatrix.from_dense(dense), lam, eps)


def packing(dense, lam=1.0, eps=0.1) -> PackingInstanceView:
    return PackingInstanceView(SparseNonnegMatrix.from_dense(dense), lam, eps)


def positive(Pd, Cd, eps=1 / 200) -> PositiveInstance:
    P = SparseNonnegMatrix.from_dense(Pd)
    C = SparseNonnegMatrix.from_dense(Cd)
    vals = [v for _, _, v in P.entries()] + [v for _, _, v in C.entries()]
    lo = min(vals) if vals else 1.0
    hi = max(vals) if vals else 1.0
    return PositiveInstance(P=P, C=C, L=lo, U=hi, eps=eps)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
