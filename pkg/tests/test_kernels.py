"""The accelerated and fallback kernel builds must agree."""

import os
import subprocess
import sys

import numpy as np
import numpy.testing as npt
import pytest

from wdje.ot._simplex import (
    STATUS_OPTIMAL,
    transport_simplex_numba,
    transport_simplex_python,
)


@pytest.mark.skipif(transport_simplex_numba is None, reason="numba unavailable")
def test_simplex_builds_bitwise_identical(rng):
    for _ in range(15):
        n = int(rng.integers(2, 15))
        m = int(rng.integers(2, 15))
        a = rng.uniform(0.1, 1.0, n)
        a /= a.sum()
        b = rng.uniform(0.1, 1.0, m)
        b /= b.sum()
        cost = np.abs(rng.normal(size=(n, m)))
        tol = 1e-12 * (1.0 + cost.max())
        flow_py, piv_py, status_py = transport_simplex_python(
            a.copy(), b.copy(), cost, tol, 100_000
        )
        flow_nb, piv_nb, status_nb = transport_simplex_numba(
            a.copy(), b.copy(), cost, tol, 100_000
        )
        assert status_py == status_nb == STATUS_OPTIMAL
        assert piv_py == piv_nb
        npt.assert_array_equal(flow_py, flow_nb)


def test_env_flag_selects_fallback():
    code = (
        "import wdje\n"
        "from wdje.ot import _simplex\n"
        "import wdje.ot.entropic as sk_mod\n"
        "assert not wdje.NUMBA_ENABLED\n"
        "assert _simplex.transport_simplex is _simplex.transport_simplex_python\n"
        "assert sk_mod._default_loop is sk_mod.sinkhorn_loop_numpy\n"
        "import numpy as np\n"
        "u = wdje.empirical_measure([[0.0], [1.0]])\n"
        "v = wdje.empirical_measure([[2.0], [3.0]])\n"
        "C = wdje.ground_cost(u, v, 'absolute', 1.0)\n"
        "assert abs(wdje.emd_exact(u, v, C).distance - 2.0) < 1e-12\n"
        "print('fallback ok')\n"
    )
    env = dict(os.environ, WDJE_NUMBA="0")
    result = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert result.returncode == 0, result.stderr
    assert "fallback ok" in result.stdout
