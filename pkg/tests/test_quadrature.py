import math

import numpy as np
import pytest

from sectlap.contour import build_nodes
from sectlap.quadrature import (
    EvaluationError,
    TransformEvaluator,
    apply_shift,
    invert_at,
    invert_grid,
    perturb_evaluator,
    value_norm,
    weight,
)
from sectlap.tuning import ContourConfig, derive_params

TWO_PI = 2.0 * math.pi


def setup_run(theta=0.5, n=40, Lambda=5.0, t0=1.0, alpha=0.7, d=0.6, s=None, mu=1.0):
    cfg = ContourConfig(alpha=alpha, d=d, theta=theta, n=n, t0=t0, Lambda=Lambda, s=s)
    der = derive_params(cfg, mu)
    nodes = build_nodes(alpha, der, n)
    return cfg, der, nodes


def exp_evaluator(symmetric=True):
    return TransformEvaluator(fn=lambda z: 1.0 / (1.0 + z), dim=1,
                              conjugate_symmetric=symmetric)


def log_grid(t0, t1, m=9):
    return np.exp(np.linspace(math.log(t0), math.log(t1), m))


# ---------------------------------------------------------------- weight

def test_weight_conjugate_symmetry():
    _, der, nodes = setup_run()
    for k in (1, 7, 40):
        assert weight(1.3, -k, der, nodes) == weight(1.3, k, der, nodes).conjugate()


def test_weight_center_modulus_factorwise():
    # |w_0(1)| = (lam h / 2 pi) * e^(lam (1-sin a)) * cos(a)
    _, der, nodes = setup_run()
    w0 = weight(1.0, 0, der, nodes)
    ref = (der.lam * der.h / TWO_PI) * math.exp(der.lam * (1.0 - math.sin(0.7))) * math.cos(0.7)
    assert abs(abs(w0) - ref) <= 1e-13 * ref


def test_weight_sum_is_inversion():
    _, der, nodes = setup_run(n=25)
    U = exp_evaluator()
    t = 2.0
    acc = 0j
    for k in range(25, 0, -1):
        acc += (weight(t, k, der, nodes) * complex(U(nodes.point(k))[0])
                + weight(t, -k, der, nodes) * complex(U(nodes.point(-k))[0]))
    acc += weight(t, 0, der, nodes) * complex(U(nodes.point(0))[0])
    got = invert_at(t, U, nodes, der)[0]
    assert abs(acc - got) <= 1e-13 * abs(got)


def test_weight_overflow_guard():
    _, der, nodes = setup_run(Lambda=1.0)  # lam t0 ~ 42
    with pytest.raises(OverflowError):
        weight(50.0, 0, der, nodes)
    with pytest.raises(OverflowError):
        invert_at(50.0, exp_evaluator(), nodes, der)


def test_weight_rejects_nonpositive_time():
    _, der, nodes = setup_run()
    with pytest.raises(ValueError):
        weight(0.0, 0, der, nodes)


# ---------------------------------------------------------------- invert_at

def test_invert_constant_transform():
    # U(z) = 1/z is the transform of u(t) = 1; pinned by a reference run
    _, der, nodes = setup_run(theta=0.5, n=40, Lambda=1.0)
    U = TransformEvaluator(fn=lambda z: 1.0 / z, conjugate_symmetric=True)
    assert abs(invert_at(1.0, U, nodes, der)[0] - 1.0) <= 1e-10


def test_invert_exp_decay_spectral():
    _, der, nodes = setup_run(theta=0.5, n=40, Lambda=5.0)
    got = invert_at(1.0, exp_evaluator(), nodes, der)[0]
    assert abs(got - math.exp(-1.0)) <= 1e-12


def test_imaginary_part_cancels_for_symmetric_transform():
    _, der, nodes = setup_run()
    v = invert_at(2.0, exp_evaluator(), nodes, der)[0]
    assert abs(v.imag) <= 1e-13 * (1.0 + abs(v))


def test_symmetric_pair_sum_matches_full_sum():
    # real-pair form: w_0 U_0 + sum_k 2 Re(w_k U_k)
    _, der, nodes = setup_run(n=30)
    U = exp_evaluator()
    t = 1.7
    acc = 0.0
    for k in range(30, 0, -1):
        acc += 2.0 * (weight(t, k, der, nodes) * complex(U(nodes.point(k))[0])).real
    acc += (weight(t, 0, der, nodes) * complex(U(nodes.point(0))[0])).real
    got = invert_at(t, U, nodes, der)[0]
    assert abs(acc - got.real) <= 1e-13 * abs(acc)


# ---------------------------------------------------------------- invert_grid

def test_grid_single_time_equals_invert_at():
    _, der, nodes = setup_run()
    U = exp_evaluator()
    res = invert_grid([1.0], U, nodes, der)
    v = invert_at(1.0, U, nodes, der)
    assert np.array_equal(res.values[0], v)


def test_grid_matches_per_time_calls_bitwise():
    _, der, nodes = setup_run()
    U = exp_evaluator()
    ts = log_grid(1.0, 5.0)
    res = invert_grid(ts, U, nodes, der)
    for i, t in enumerate(ts):
        assert np.array_equal(res.values[i], invert_at(float(t), U, nodes, der))


def counting_evaluator(fn, dim=1, symmetric=False, concurrency="serial"):
    calls = []

    def wrapped(z):
        calls.append(z)
        return fn(z)

    return TransformEvaluator(fn=wrapped, dim=dim, conjugate_symmetric=symmetric,
                              concurrency=concurrency), calls


def test_grid_evaluation_counts():
    _, der, nodes = setup_run(n=40)
    ts = log_grid(1.0, 5.0, 9)
    U, calls = counting_evaluator(lambda z: 1.0 / (1.0 + z))
    res = invert_grid(ts, U, nodes, der)
    assert len(calls) == 2 * 40 + 1
    assert res.evaluations == 2 * 40 + 1
    Usym, calls_sym = counting_evaluator(lambda z: 1.0 / (1.0 + z), symmetric=True)
    res2 = invert_grid(ts, Usym, nodes, der)
    assert len(calls_sym) == 40 + 1
    assert res2.evaluations == 40 + 1
    assert np.allclose(res.values, res2.values, rtol=1e-14)


def test_grid_no_reuse_same_values_more_evaluations():
    _, der, nodes = setup_run(n=20)
    ts = log_grid(1.0, 5.0, 4)
    U, calls = counting_evaluator(lambda z: 1.0 / (1.0 + z))
    res_reuse = invert_grid(ts, U, nodes, der, reuse=True)
    del calls[:]
    res_again = invert_grid(ts, U, nodes, der, reuse=False)
    assert len(calls) == 4 * (2 * 20 + 1)
    assert np.array_equal(res_reuse.values, res_again.values)


def test_concurrent_evaluation_is_deterministic():
    _, der, nodes = setup_run(n=40)
    ts = log_grid(1.0, 5.0)
    U = TransformEvaluator(fn=lambda z: 1.0 / (1.0 + z), dim=1,
                           concurrency="concurrent")
    serial = invert_grid(ts, U, nodes, der)
    threaded = invert_grid(ts, U, nodes, der, workers=4)
    rerun = invert_grid(ts, U, nodes, der, workers=4)
    assert np.array_equal(serial.values, threaded.values)
    assert np.array_equal(threaded.values, rerun.values)


def test_grid_rejects_empty_and_nonpositive_times():
    _, der, nodes = setup_run()
    with pytest.raises(ValueError):
        invert_grid([], exp_evaluator(), nodes, der)
    with pytest.raises(ValueError):
        invert_grid([1.0, -1.0], exp_evaluator(), nodes, der)


# ---------------------------------------------------------------- guard

def test_underflow_guard_skips_and_preserves_result():
    _, der, nodes = setup_run(theta=0.5, n=300, Lambda=1.0)
    U = exp_evaluator()
    # t outside the tuned window drives tail terms below the normal range
    on = invert_grid([2.5], U, nodes, der, guard=True)
    off = invert_grid([2.5], U, nodes, der, guard=False)
    assert int(on.skipped[0]) > 0
    assert int(on.skipped[0]) <= 2 * 300 + 1
    assert int(off.skipped[0]) == 0
    diff = value_norm(on.values[0] - off.values[0])
    assert diff <= 1e-15 * value_norm(off.values[0])


# ---------------------------------------------------------------- shift

def test_apply_shift_identity():
    _, der, nodes = setup_run()
    res = invert_grid([1.0, 2.0], exp_evaluator(), nodes, der)
    assert apply_shift(0.0, res) is res


def test_apply_shift_scales_componentwise():
    _, der, nodes = setup_run()
    res = invert_grid([1.0], exp_evaluator(), nodes, der)
    shifted = apply_shift(1.0, res)
    assert np.array_equal(shifted.values[0], res.values[0] * math.e)
    assert np.array_equal(shifted.skipped, res.skipped)


def test_shift_composition_against_closed_form():
    # u(t) = e^(0.5 t) e^(-t): invert 1/(1+z) then shift, vs direct 1/(0.5+z)
    _, der, nodes = setup_run(theta=0.5, n=40, Lambda=2.0)
    ts = log_grid(1.0, 2.0, 5)
    base = invert_grid(ts, exp_evaluator(), nodes, der)
    shifted = apply_shift(0.5, base)
    direct = invert_grid(
        ts, TransformEvaluator(fn=lambda z: 1.0 / (0.5 + z), conjugate_symmetric=True),
        nodes, der)
    for i, t in enumerate(ts):
        exact = math.exp(-0.5 * float(t))
        assert abs(shifted.values[i][0] - exact) <= 1e-10
        assert abs(direct.values[i][0] - exact) <= 1e-10


def test_apply_shift_overflow():
    _, der, nodes = setup_run()
    res = invert_grid([1.0, 5.0], exp_evaluator(), nodes, der)
    with pytest.raises(OverflowError):
        apply_shift(1000.0, res)


# ---------------------------------------------------------------- perturbation

def test_perturb_zero_rho_is_identity():
    _, der, nodes = setup_run(n=15)
    U = exp_evaluator()
    for mode, kw in (("random", {"seed": 7}), ("worst_case", {"t0": 1.0, "derived": der})):
        pert = perturb_evaluator(U, mode, 0.0, nodes=nodes, **kw)
        for k in (-15, -2, 0, 3, 15):
            z = nodes.point(k)
            assert pert(z)[0] == U(z)[0]


def test_perturb_random_is_reproducible():
    _, der, nodes = setup_run(n=15)
    U = exp_evaluator()
    p1 = perturb_evaluator(U, "random", 1e-4, nodes=nodes, seed=42)
    p2 = perturb_evaluator(U, "random", 1e-4, nodes=nodes, seed=42)
    p3 = perturb_evaluator(U, "random", 1e-4, nodes=nodes, seed=43)
    zs = [nodes.point(k) for k in range(-15, 16)]
    e1 = [p1(z)[0] - U(z)[0] for z in zs]
    e2 = [p2(z)[0] - U(z)[0] for z in zs]
    e3 = [p3(z)[0] - U(z)[0] for z in zs]
    assert e1 == e2
    assert e1 != e3
    assert all(abs(e) <= 1e-4 for e in e1)
    assert not p1.conjugate_symmetric


def test_perturb_worst_case_has_common_phase_at_t0():
    _, der, nodes = setup_run(n=20)
    U = exp_evaluator()
    pert = perturb_evaluator(U, "worst_case", 1e-4, nodes=nodes, t0=1.0, derived=der)
    for k in range(-20, 21):
        z = nodes.point(k)
        eta = pert(z)[0] - U(z)[0]
        contrib = weight(1.0, k, der, nodes) * eta
        assert abs(math.atan2(contrib.imag, contrib.real)) <= 1e-8
        # eta recovered through U + eta - U carries |U|*eps rounding
        assert abs(abs(eta) - 1e-4) <= 1e-15


def test_perturb_worst_case_rejects_vectors():
    _, der, nodes = setup_run(n=5)
    U = TransformEvaluator(fn=lambda z: np.array([1.0 / z, 1.0 / (1.0 + z)]), dim=2)
    with pytest.raises(ValueError):
        perturb_evaluator(U, "worst_case", 1e-4, nodes=nodes, t0=1.0, derived=der)


def test_perturb_rejects_bad_mode_and_rho():
    _, der, nodes = setup_run(n=5)
    U = exp_evaluator()
    with pytest.raises(ValueError):
        perturb_evaluator(U, "systematic", 1e-4, nodes=nodes)
    with pytest.raises(ValueError):
        perturb_evaluator(U, "random", -1e-4, nodes=nodes, seed=1)


def test_perturb_passthrough_off_nodes():
    _, der, nodes = setup_run(n=5)
    U = exp_evaluator()
    pert = perturb_evaluator(U, "random", 1e-4, nodes=nodes, seed=3)
    z = 10.0 + 3.0j
    assert pert(z)[0] == U(z)[0]


# ---------------------------------------------------------------- convergence

def test_spectral_convergence_slope():
    ts = log_grid(1.0, 5.0)
    errs = []
    ns = list(range(5, 36, 5))
    for n in ns:
        _, der, nodes = setup_run(theta=0.5, n=n, Lambda=5.0)
        res = invert_grid(ts, exp_evaluator(), nodes, der)
        errs.append(max(abs(res.values[i][0] - math.exp(-float(t)))
                        for i, t in enumerate(ts)))
    slope = np.polyfit(ns, np.log(errs), 1)[0]
    cfg = ContourConfig(alpha=0.7, d=0.6, theta=0.5, n=1, t0=1.0, Lambda=5.0)
    a = derive_params(cfg).a
    assert slope <= -0.5 * TWO_PI * 0.6 / a * 0.8


# ---------------------------------------------------------------- errors

def test_evaluator_failure_carries_node_index():
    _, der, nodes = setup_run(n=5)

    def bad(z):
        if abs(z - nodes.point(3)) < 1e-12:
            raise RuntimeError("boom")
        return 1.0 / (1.0 + z)

    U = TransformEvaluator(fn=bad)
    with pytest.raises(EvaluationError, match=r"node k=3"):
        invert_at(1.0, U, nodes, der)


def test_dimension_mismatch_rejected():
    _, der, nodes = setup_run(n=5)
    U = TransformEvaluator(fn=lambda z: np.array([1.0 / z, 1.0 / z]), dim=1)
    with pytest.raises(EvaluationError):
        invert_at(1.0, U, nodes, der)


def test_evaluator_validation():
    with pytest.raises(ValueError):
        TransformEvaluator(fn=lambda z: z, dim=0)
    with pytest.raises(ValueError):
        TransformEvaluator(fn=lambda z: z, concurrency="parallel")
