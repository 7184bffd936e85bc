import math

import numpy as np
import pytest

from deadbeat.nonlinear import (
    HOMOGENEOUS,
    WITH_INPUT,
    DomainError,
    dilation_apply,
    get_example,
    homog_f,
    homog_f_inverse,
    homog_h,
    homog_observer_step,
    in_positive_orthant,
    input_class_intersection,
    input_f,
    input_f_preimage,
    input_observer_step,
    run_observer,
)
from systems import positive_point

R2 = math.sqrt(2)
C2 = 2 ** (1 / 3)


def rel_err(a, b):
    return np.linalg.norm(np.asarray(a) - np.asarray(b)) / max(1.0, np.linalg.norm(b))


# ---------------------------------------------------------------------------
# homogeneous example


def test_homog_f_examples():
    np.testing.assert_allclose(homog_f([1, 1, 1]), [1, 1, 2], rtol=0, atol=1e-15)
    np.testing.assert_array_equal(homog_f([0, 0, 0]), [0, 0, 0])
    np.testing.assert_allclose(homog_f([1, 1, 2]), [1, C2, 2], rtol=0, atol=1e-15)


def test_homog_f_inverse_examples():
    np.testing.assert_allclose(homog_f_inverse([1, 1, 2]), [1, 1, 1], atol=1e-15)
    np.testing.assert_array_equal(homog_f_inverse([0, 0, 0]), [0, 0, 0])


def test_homog_round_trip_random():
    rng = np.random.default_rng(20)
    for _ in range(100):
        x = rng.standard_normal(3) * 3
        assert rel_err(homog_f(homog_f_inverse(x)), x) <= 1e-10
        assert rel_err(homog_f_inverse(homog_f(x)), x) <= 1e-10


def test_cube_root_keeps_sign():
    x = np.array([-1.0, -2.0, -8.0])
    np.testing.assert_allclose(homog_f(x), [-2.0, -2.0, -9.0])
    np.testing.assert_allclose(homog_f_inverse(homog_f(x)), x, atol=1e-14)
    rng = np.random.default_rng(21)
    for _ in range(100):
        x = -np.abs(rng.standard_normal(3)) * 5
        assert rel_err(homog_f_inverse(homog_f(x)), x) <= 1e-10


def test_homog_observer_examples():
    np.testing.assert_allclose(homog_observer_step([0, 0, 0], 1.0), [0, 1, 1])
    np.testing.assert_allclose(homog_observer_step([0, 1, 1], 1.0), [1, C2, 2], atol=1e-15)
    x = np.array([0.4, -1.3, 2.2])
    np.testing.assert_allclose(homog_observer_step(x, homog_h(x)), homog_f(x), atol=1e-15)


def test_homog_observer_is_f_of_class_point():
    rng = np.random.default_rng(22)
    for _ in range(100):
        xhat, y = rng.standard_normal(3), rng.standard_normal()
        point = HOMOGENEOUS.class_intersection(xhat, y)
        assert point[0] == y
        assert rel_err(homog_observer_step(xhat, y), homog_f(point)) <= 1e-14


def test_dilation_examples():
    x = np.array([0.3, -0.7, 1.1])
    np.testing.assert_array_equal(dilation_apply(1.0, x), x)
    np.testing.assert_array_equal(dilation_apply(0.0, x), [0, 0, 0])
    np.testing.assert_array_equal(dilation_apply(2.0, [1, 1, 1]), [2, 2, 8])


def test_homogeneity_plant_and_observer():
    rng = np.random.default_rng(23)
    for _ in range(200):
        lam = rng.uniform(-3, 3)
        x, xhat, y = rng.standard_normal(3), rng.standard_normal(3), rng.standard_normal()
        assert rel_err(homog_f(dilation_apply(lam, x)), dilation_apply(lam, homog_f(x))) <= 1e-9
        assert homog_h(dilation_apply(lam, x)) == pytest.approx(lam * homog_h(x), rel=1e-12)
        lhs = homog_observer_step(dilation_apply(lam, xhat), lam * y)
        rhs = dilation_apply(lam, homog_observer_step(xhat, y))
        assert rel_err(lhs, rhs) <= 1e-9


# ---------------------------------------------------------------------------
# example with input


def test_input_f_examples():
    np.testing.assert_allclose(input_f([1, 2, 1], 4), [2, 1, 2 * R2], rtol=1e-15)
    np.testing.assert_allclose(input_f([1, 1, 1], 1), [1, 1, 1])


def test_input_preimage_identity_random():
    rng = np.random.default_rng(24)
    for _ in range(100):
        x, u = positive_point(rng), positive_point(rng, 1)[0]
        eta = input_f_preimage(x, u)
        assert in_positive_orthant(eta)
        np.testing.assert_allclose(input_f(eta, u), x, rtol=1e-12)


def test_input_observer_examples():
    np.testing.assert_allclose(input_observer_step([1, 1, 1], 1.0, 4.0), [1, 1, 2])
    np.testing.assert_allclose(input_observer_step([1, 1, 2], 2.0, 4.0), [4, 2, 2])
    np.testing.assert_allclose(input_observer_step([4, 2, 2], 4 * R2, 4.0),
                               [16 * R2, 0.5, 4 * R2], rtol=1e-15)


def test_input_observer_is_f_of_class_point():
    rng = np.random.default_rng(25)
    for _ in range(100):
        xhat, y, u = positive_point(rng), *positive_point(rng, 2)
        point = input_class_intersection(xhat, y)
        assert rel_err(input_observer_step(xhat, y, u), input_f(point, u)) <= 1e-14


def test_input_domain_errors():
    with pytest.raises(DomainError, match=r"x\[1\]=-1.0"):
        input_f([1.0, -1.0, 1.0], 1.0)
    with pytest.raises(DomainError, match="u=0.0"):
        input_f([1.0, 1.0, 1.0], 0.0)
    with pytest.raises(DomainError):
        input_observer_step([1.0, 1.0, 1.0], -2.0, 1.0)
    with pytest.raises(DomainError):
        input_f([1.0, np.nan, 1.0], 1.0)
    assert not in_positive_orthant([1.0, 0.0, 1.0])
    assert not in_positive_orthant([1.0, 1e-310, 1.0])


# ---------------------------------------------------------------------------
# singleton class at the true state, and the deadbeat property


@pytest.mark.parametrize("system", [HOMOGENEOUS, WITH_INPUT], ids=lambda s: s.name)
def test_class_intersection_of_true_state_is_itself(system):
    rng = np.random.default_rng(26)
    for _ in range(200):
        x = positive_point(rng) if system is WITH_INPUT else rng.standard_normal(3) * 3
        assert rel_err(system.class_intersection(x, system.output(x)), x) <= 1e-12


def test_homogeneous_hand_trace():
    tr = run_observer(HOMOGENEOUS, [1, 1, 1], [0, 0, 0], steps=5)
    np.testing.assert_allclose(tr.observer_states[1], [0, 1, 1], atol=1e-15)
    np.testing.assert_allclose(tr.observer_states[2], [1, C2, 2], rtol=0, atol=1e-12)
    np.testing.assert_allclose(tr.plant_states[2], [1, C2, 2], rtol=0, atol=1e-12)
    assert tr.deadbeat_horizon == 2
    assert np.all(tr.errors[2:] <= 1e-12)


def test_input_hand_trace():
    tr = run_observer(WITH_INPUT, [1, 2, 1], [1, 1, 1], inputs=[4.0] * 5)
    phi3 = [16 * R2, 0.5, 4 * R2]
    np.testing.assert_allclose(tr.plant_states[3], phi3, rtol=0, atol=1e-12)
    np.testing.assert_allclose(tr.observer_states[3], phi3, rtol=0, atol=1e-12)
    assert tr.deadbeat_horizon <= 3
    assert len(tr.plant_states) == len(tr.observer_states) == len(tr.errors) == 6


def test_exact_start_has_zero_error():
    x0 = np.array([0.5, -1.0, 2.0])
    tr = run_observer(HOMOGENEOUS, x0, x0, steps=4)
    assert np.all(tr.errors == 0.0)
    tr = run_observer(WITH_INPUT, [1, 2, 3], [1, 2, 3], inputs=[2.0] * 4)
    assert np.all(tr.errors == 0.0)


def test_homogeneous_deadbeat_random():
    rng = np.random.default_rng(27)
    for _ in range(100):
        x0, xhat0 = rng.standard_normal(3) * 2, rng.standard_normal(3) * 2
        tr = run_observer(HOMOGENEOUS, x0, xhat0, steps=6)
        for k in range(3, 7):
            assert rel_err(tr.observer_states[k], tr.plant_states[k]) <= 1e-8


def test_input_deadbeat_random():
    rng = np.random.default_rng(28)
    for _ in range(100):
        x0, xhat0 = positive_point(rng), positive_point(rng)
        # inputs near 1 keep six steps of products inside float range
        inputs = 10.0 ** rng.uniform(-0.5, 0.5, size=6)
        tr = run_observer(WITH_INPUT, x0, xhat0, inputs=inputs)
        assert tr.deadbeat_horizon is not None and tr.deadbeat_horizon <= 3
        for k in range(3, 7):
            assert rel_err(tr.observer_states[k], tr.plant_states[k]) <= 1e-8


def test_plant_stays_positive():
    rng = np.random.default_rng(29)
    for _ in range(100):
        x, u = positive_point(rng), positive_point(rng, 1)[0]
        assert in_positive_orthant(input_f(x, u))


# ---------------------------------------------------------------------------
# runner errors


def test_run_observer_rejects_bad_start():
    with pytest.raises(DomainError, match=r"x0\[2\]=-1.0"):
        run_observer(WITH_INPUT, [1, 1, -1], [1, 1, 1], inputs=[1.0])
    with pytest.raises(DomainError, match=r"xhat0\[0\]"):
        run_observer(WITH_INPUT, [1, 1, 1], [0, 1, 1], inputs=[1.0])
    with pytest.raises(DomainError):
        run_observer(HOMOGENEOUS, [np.inf, 0, 0], [0, 0, 0], steps=1)


def test_run_observer_mid_run_input_error_names_step():
    with pytest.raises(DomainError, match="step 2"):
        run_observer(WITH_INPUT, [1, 2, 1], [1, 1, 1], inputs=[4.0, 4.0, -1.0])


def test_run_observer_argument_errors():
    with pytest.raises(ValueError, match="input"):
        run_observer(WITH_INPUT, [1, 1, 1], [1, 1, 1], steps=2)
    with pytest.raises(ValueError, match="steps"):
        run_observer(HOMOGENEOUS, [1, 1, 1], [1, 1, 1])
    with pytest.raises(ValueError):
        run_observer(WITH_INPUT, [1, 1, 1], [1, 1, 1], inputs=[1.0], steps=3)
    with pytest.raises(ValueError):
        run_observer(HOMOGENEOUS, [1, 1], [1, 1], steps=1)
    with pytest.raises(ValueError, match="unknown example"):
        get_example("lorenz")
