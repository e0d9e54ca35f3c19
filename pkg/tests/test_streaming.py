import numpy as np
import pytest

from conftest import covering
from pclp.certificates import OutcomeTag
from pclp.generate import random_covering
from pclp.streaming import (
    PassKind,
    StreamCursor,
    StreamMode,
    StreamSolverState,
    StreamExhaustedMidRow,
    run_pass,
    solve_stream,
)
from pclp.whack_static import solve_fast


def test_unit_instance_one_pass_primal():
    inst = covering([[1.0]], eps=0.1)
    cursor = StreamCursor.from_instance(inst, StreamMode.FULL_DUAL)
    state = StreamSolverState(cursor, 0.1)
    result = run_pass(cursor, state)
    assert result.kind is PassKind.PASS_COMPLETE
    outcome, stats = solve_stream(StreamCursor.from_instance(inst, StreamMode.FULL_DUAL), 0.1)
    assert outcome.tag is OutcomeTag.COVERING_PRIMAL
    assert np.allclose(outcome.vector, [1.0])
    assert stats.passes == 1


def test_primal_only_returns_null_at_budget():
    inst = covering([[0.4]], eps=0.1)
    outcome, _ = solve_stream(StreamCursor.from_instance(inst, StreamMode.PRIMAL_ONLY), 0.1)
    assert outcome.tag is OutcomeTag.NULL
    assert outcome.vector is None


def test_full_dual_returns_dual_at_budget():
    inst = covering([[0.4]], eps=0.1)
    outcome, _ = solve_stream(StreamCursor.from_instance(inst, StreamMode.FULL_DUAL), 0.1)
    assert outcome.tag is OutcomeTag.PACKING_DUAL
    assert np.allclose(outcome.vector, [1.0])


def test_pass_count_equals_fast_phase_count(rng):
    for _ in range(15):
        m, n = int(rng.integers(1, 9)), int(rng.integers(1, 9))
        eps = float(rng.choice([0.1, 0.2]))
        inst = random_covering(rng, m, n, eps=eps, density=0.5)
        outcome_f, stats_f = solve_fast(inst)
        outcome_s, stats_s = solve_stream(
            StreamCursor.from_instance(inst, StreamMode.FULL_DUAL), eps)
        assert stats_s.passes == stats_f.phases
        assert outcome_s.tag is outcome_f.tag
        if outcome_f.vector is not None:
            assert np.allclose(outcome_s.vector, outcome_f.vector, atol=1e-9)


def test_big_sparse_instance_pass_cap(rng):
    import math
    from pclp.whack_static import weight_cap

    eps = 0.2
    inst = random_covering(rng, 50, 50, eps=eps, density=0.15, nonempty_rows=False)
    _, stats = solve_stream(StreamCursor.from_instance(inst, StreamMode.FULL_DUAL), eps)
    cap = math.ceil(weight_cap(50, eps) / -math.log(1 - eps / 2)) + 1
    assert stats.passes <= cap


def test_live_words_bounds():
    inst = covering(np.ones((7, 4)).tolist(), eps=0.1)
    full = StreamSolverState(StreamCursor.from_instance(inst, StreamMode.FULL_DUAL), 0.1)
    lean = StreamSolverState(StreamCursor.from_instance(inst, StreamMode.PRIMAL_ONLY), 0.1)
    a, b = 2, 32
    assert full.live_words() <= a * (7 + 4) + b
    assert lean.live_words() <= a * 4 + b
    assert lean.live_words() < full.live_words()


def test_malformed_row_raises():
    cursor = StreamCursor(lambda: iter([42]), 1, 1, 1.0, StreamMode.FULL_DUAL)
    state = StreamSolverState(cursor, 0.1)
    with pytest.raises(StreamExhaustedMidRow):
        run_pass(cursor, state)


def test_unsorted_columns_accepted():
    inst = covering([[0.5, 0.7, 0.6]], eps=0.1)

    def shuffled():
        cols, vals = inst.C.row(0)
        order = [2, 0, 1]
        yield 0, cols[order], vals[order]

    cursor = StreamCursor(shuffled, 1, 3, 1.0, StreamMode.FULL_DUAL)
    outcome, _ = solve_stream(cursor, 0.1)
    assert outcome.tag in (OutcomeTag.COVERING_PRIMAL, OutcomeTag.PACKING_DUAL)
