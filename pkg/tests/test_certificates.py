import numpy as np

from conftest import covering, positive
from pclp.certificates import CertificateSlack, Outcome, check_certificate


def test_primal_ok_on_unit_instance():
    inst = covering([[1.0]], eps=0.1)
    report = check_certificate(inst, Outcome.covering_primal([1.0]),
                               CertificateSlack.whack_static(0.1))
    assert report.ok


def test_dual_ok_within_pack_bound():
    inst = covering([[0.4]], eps=0.1)
    report = check_certificate(inst, Outcome.packing_dual([1.0]),
                               CertificateSlack.whack_static(0.1))
    assert report.ok


def test_primal_violation_reports_worst_row():
    inst = covering([[1.0]], eps=0.1)
    report = check_certificate(inst, Outcome.covering_primal([0.5]),
                               CertificateSlack.whack_static(0.1))
    assert not report.ok
    worst = report.worst()
    assert worst.kind == "RowBelowCover" and worst.index == 0


def test_dynamic_slack_allows_anchored_sum():
    inst = covering([[1.0]], eps=0.1)
    x = np.array([1.04])  # sum above 1 but below 1+eps
    assert not check_certificate(inst, Outcome.covering_primal(x),
                                 CertificateSlack.whack_static(0.1)).ok
    assert check_certificate(inst, Outcome.covering_primal(x),
                             CertificateSlack.whack_dynamic(0.1)).ok


def test_positive_solution_bounds():
    inst = positive([[1.0]], [[1.0]])
    slack = CertificateSlack.greedy_positive(inst.eps)
    assert check_certificate(inst, Outcome.positive_solution([1.5]), slack).ok
    assert not check_certificate(inst, Outcome.positive_solution([0.5]), slack).ok
    assert not check_certificate(inst, Outcome.positive_solution([2.5]), slack).ok


def test_null_and_infeasible_are_vacuous():
    inst = covering([[1.0]])
    slack = CertificateSlack.whack_static(0.1)
    assert check_certificate(inst, Outcome.null(), slack).ok
    assert check_certificate(inst, Outcome.infeasible(), slack).ok


def test_wrong_length_is_rejected():
    inst = covering([[1.0, 1.0]])
    report = check_certificate(inst, Outcome.covering_primal([1.0]),
                               CertificateSlack.whack_static(0.1))
    assert not report.ok and report.violations[0].kind == "BadLength"
