import importlib
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from halfheat import _kernels_py, kernels
from halfheat.series import _product_table, monomials

compiled = pytest.importorskip("halfheat._kernels")


@pytest.mark.parametrize("nvars, order", [(1, 8), (2, 5), (3, 6)])
@given(seed=st.integers(0, 2 ** 31))
def test_backends_agree(nvars, order, seed):
    rng = np.random.default_rng(seed)
    n = len(monomials(nvars, order))
    p, q, r = _product_table(nvars, order)
    a, b = rng.normal(size=n), rng.normal(size=n)
    t = rng.normal(size=order + 1)
    assert np.allclose(compiled.mul(a, b, p, q, r, n), _kernels_py.mul(a, b, p, q, r, n), atol=1e-13)
    a[0] = 0.0
    assert np.allclose(compiled.horner(a, t, p, q, r, n), _kernels_py.horner(a, t, p, q, r, n), atol=1e-12)


def test_default_backend_is_compiled():
    assert kernels.BACKEND == "cython"


def test_environment_forces_fallback():
    env = dict(os.environ, HALFHEAT_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from halfheat import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
