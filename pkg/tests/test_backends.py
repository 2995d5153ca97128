import math
import subprocess
import sys

import numpy as np
import pytest

from sectlap import _kernels_py
from sectlap._backend import backend_name
from sectlap.contour import build_nodes
from sectlap.quadrature import LOG_GUARD_CUTOFF
from sectlap.tuning import ContourConfig, derive_params

try:
    from sectlap import _kernels
except ImportError:
    _kernels = None

needs_compiled = pytest.mark.skipif(_kernels is None, reason="compiled kernel unavailable")


def run_kernel(kernel, times, nodes, values, guard=True):
    out = np.empty((len(times), values.shape[1]), dtype=np.complex128)
    skipped = np.zeros(len(times), dtype=np.int64)
    kernel.quad_sum(np.ascontiguousarray(times, dtype=np.float64),
                    nodes.x, nodes.tprime, values, nodes.lam, nodes.h,
                    math.sin(nodes.alpha), math.cos(nodes.alpha), guard,
                    LOG_GUARD_CUTOFF, out, skipped)
    return out, skipped


def make_case(n=60, dim=1, Lambda=50.0, theta=None, seed=0):
    theta = 1.0 - 1.0 / n if theta is None else theta
    cfg = ContourConfig(alpha=0.7, d=0.6, theta=theta, n=n, t0=1.0, Lambda=Lambda)
    der = derive_params(cfg)
    nodes = build_nodes(cfg.alpha, der, n)
    rng = np.random.default_rng(seed)
    values = (rng.normal(size=(2 * n + 1, dim))
              + 1j * rng.normal(size=(2 * n + 1, dim))).astype(np.complex128)
    times = np.exp(np.linspace(0.0, math.log(Lambda), 17))
    return times, nodes, values


def test_backend_name_is_known():
    assert backend_name() in ("compiled", "python")


@needs_compiled
@pytest.mark.parametrize("dim", [1, 3])
def test_backends_agree_bitwise(dim):
    times, nodes, values = make_case(dim=dim, seed=dim)
    op, sp = run_kernel(_kernels_py, times, nodes, values)
    oc, sc = run_kernel(_kernels, times, nodes, values)
    assert np.array_equal(op, oc)
    assert np.array_equal(sp, sc)


@needs_compiled
def test_backends_agree_with_guard_activity():
    # deep tail underflow: many skipped terms, still identical results
    cfg = ContourConfig(alpha=0.7, d=0.6, theta=0.5, n=300, t0=1.0, Lambda=1.0)
    der = derive_params(cfg)
    nodes = build_nodes(cfg.alpha, der, 300)
    values = (1.0 / (1.0 + nodes.z))[:, None]
    times = np.asarray([2.5])
    op, sp = run_kernel(_kernels_py, times, nodes, values)
    oc, sc = run_kernel(_kernels, times, nodes, values)
    assert sp[0] > 0
    assert np.array_equal(sp, sc)
    assert np.array_equal(op, oc)


@needs_compiled
def test_backends_agree_guard_disabled():
    times, nodes, values = make_case(n=40, seed=5)
    op, _ = run_kernel(_kernels_py, times, nodes, values, guard=False)
    oc, _ = run_kernel(_kernels, times, nodes, values, guard=False)
    assert np.array_equal(op, oc)


def test_env_var_selects_python_backend():
    code = "import sectlap; print(sectlap.backend_name())"
    out = subprocess.run([sys.executable, "-c", code],
                         env={"SECTLAP_BACKEND": "python", "PATH": "/usr/bin:/bin"},
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.strip() == "python"


def test_env_var_rejects_unknown_backend():
    code = "import sectlap"
    out = subprocess.run([sys.executable, "-c", code],
                         env={"SECTLAP_BACKEND": "fortran", "PATH": "/usr/bin:/bin"},
                         capture_output=True, text=True)
    assert out.returncode != 0
    assert "SECTLAP_BACKEND" in out.stderr
