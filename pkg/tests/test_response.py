import math

import numpy as np
import pytest

from udwrm import (
    DetectorParams,
    HistoryRecord,
    ResponseModel,
    WightmanKernel,
    accelerated,
    calQ,
    default_schedule,
    inertial,
    q_closed_accelerated,
    q_closed_inertial,
    q_direct,
)
from udwrm.response import QuadratureError


def test_q_closed_inertial_value(detector):
    r = q_closed_inertial(detector, 1.0)
    assert r.value == pytest.approx(5.4530039131486545e-06, rel=1e-12)
    assert r.value > 0


def test_q_closed_inertial_scaling(detector):
    # lambda^2 prefactor
    strong = DetectorParams(omega=detector.omega, lam=2 * detector.lam)
    assert q_closed_inertial(strong, 1.0).value == pytest.approx(
        4 * q_closed_inertial(detector, 1.0).value
    )


def test_q_closed_inertial_gap_suppression(detector):
    wide = DetectorParams(omega=1.0, lam=detector.lam)
    assert q_closed_inertial(wide, 1.0).value < q_closed_inertial(detector, 1.0).value


def test_q_closed_accelerated_thermal_enhancement(detector):
    qi = q_closed_inertial(detector, 1.0).value
    qa = q_closed_accelerated(detector, 1.0, 0.1).value
    assert qa > qi  # thermal bath adds excitations
    assert qa == pytest.approx(qi, rel=1e-2)


def test_q_closed_accelerated_small_alpha_limit(detector):
    qi = q_closed_inertial(detector, 1.0).value
    qa = q_closed_accelerated(detector, 1.0, 1e-4).value
    assert qa == pytest.approx(qi, rel=1e-7)


def test_q_closed_accelerated_truncation_error_flagged(detector):
    with pytest.raises(QuadratureError):
        q_closed_accelerated(detector, 1.0, 0.1, n_max=1)


def test_q_direct_matches_closed_form(inertial_kernel, schedule, detector):
    r = q_direct(inertial_kernel, schedule, detector, truncated=False)
    ref = q_closed_inertial(detector, 1.0).value
    assert abs(r.value - ref) / ref < 1e-8


def test_q_direct_truncated_mode_close(inertial_kernel, schedule, detector):
    r = q_direct(inertial_kernel, schedule, detector)
    ref = q_closed_inertial(detector, 1.0).value
    # window truncation shifts the value at the 1e-5 relative level
    assert abs(r.value - ref) / ref < 1e-4


def test_calq_strips_coupling(inertial_kernel, schedule, detector):
    q = calQ(inertial_kernel, schedule, detector)
    assert q * detector.lam**2 == pytest.approx(
        q_closed_inertial(detector, 1.0).value, rel=1e-10
    )


def test_history_record_validation():
    h = HistoryRecord(excitations=(0, 2), query=5)
    assert h.order == 3
    with pytest.raises(ValueError):
        HistoryRecord(excitations=(2, 0), query=5)
    with pytest.raises(ValueError):
        HistoryRecord(excitations=(0, 2), query=2)


def test_first_window_is_unconditioned(fast_model):
    r = fast_model.conditional_excitation(HistoryRecord(excitations=(), query=0))
    assert r.value == fast_model.q
    assert r.abs_error == 0.0


def test_f_fraction_translation_invariance(fast_model):
    a, _ = fast_model.f_fraction((0, 1))
    b, _ = fast_model.f_fraction((3, 4))
    assert a == b  # stationary schedule: only gaps matter


def test_f_fraction_gap_decay(fast_model):
    near = abs(fast_model.f_fraction((0, 1))[0])
    far = abs(fast_model.f_fraction((0, 5))[0])
    assert far < near


def test_f_fraction_pair_is_positive(fast_model):
    # two-interval cross terms factor into squared magnitudes
    val, _ = fast_model.f_fraction((0, 1))
    assert val > 0


def test_f_fraction_triple_is_negative(fast_model):
    val, _ = fast_model.f_fraction((0, 1, 2))
    assert val < 0


def test_conditional_excitation_near_q(fast_model):
    r = fast_model.conditional_excitation(HistoryRecord(excitations=(0,), query=1))
    assert r.value == pytest.approx(fast_model.q, rel=1e-3)
    assert r.value != fast_model.q


def test_correction_ratio_small(fast_model):
    ratio, err = fast_model.correction_ratio(HistoryRecord(excitations=(0,), query=1))
    assert abs(ratio) < 1e-3
    assert err >= 0.0


def test_qmc_seed_determinism(inertial_kernel, schedule, detector):
    kwargs = dict(qmc_points=1 << 10, seed=42)
    m1 = ResponseModel(inertial_kernel, schedule, detector, **kwargs)
    m2 = ResponseModel(inertial_kernel, schedule, detector, **kwargs)
    assert m1.f_fraction((0, 1, 3)) == m2.f_fraction((0, 1, 3))


def test_strong_coupling_warns(inertial_kernel, schedule):
    with pytest.warns(UserWarning):
        DetectorParams(omega=0.2, lam=0.5)
