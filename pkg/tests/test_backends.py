"""The numba kernels and the pure-numpy fallbacks must agree numerically."""

import subprocess
import sys

import numpy as np
import pytest

from gweyl import _accel
from gweyl._kernels import (
    _bargmann_pair_table_numpy,
    _chain_contract_numpy,
    _hermite_table_numpy,
    _wigner_pair_table_numpy,
    bargmann_pair_table,
    chain_contract,
    chain_contract_termloop,
    hermite_table,
    sqrt_factorials,
    wigner_pair_table,
)

needs_numba = pytest.mark.skipif(not _accel.JIT_ENABLED,
                                 reason="numba backend disabled")


@needs_numba
def test_hermite_table_backends_agree(rng):
    t = rng.normal(size=500) * 3
    a = hermite_table(t, 24)
    b = _hermite_table_numpy(t, 24)
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-13)


@needs_numba
def test_wigner_table_backends_agree(rng):
    s = rng.normal(size=300) + 1j * rng.normal(size=300)
    a = wigner_pair_table(s, 12)
    b = _wigner_pair_table_numpy(s, 12)
    # the alternating m-sum amplifies reassociation noise beyond eps*scale
    scale = np.abs(b).max()
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-8 * scale)


@needs_numba
def test_bargmann_table_backends_agree(rng):
    tau = rng.normal(size=300) + 1j * rng.normal(size=300)
    a = bargmann_pair_table(tau, 12)
    b = _bargmann_pair_table_numpy(tau, 12)
    scale = np.abs(b).max()
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-12 * scale)


@needs_numba
def test_chain_contract_staged_vs_termloop(rng):
    D, nmax, d = 3, 4, 3
    moff = 2 * nmax
    U = rng.normal(size=(D, 2 * moff + 1, d, d)) \
        + 1j * rng.normal(size=(D, 2 * moff + 1, d, d))
    a = rng.normal(size=(D - 1, 2 * nmax + 1)) \
        + 1j * rng.normal(size=(D - 1, 2 * nmax + 1))
    staged = chain_contract(U, a, moff, nmax)
    looped = chain_contract_termloop(U, a, moff, nmax)
    scale = np.abs(staged).max()
    np.testing.assert_allclose(staged, looped, rtol=0, atol=1e-11 * scale)
    direct = _chain_contract_numpy(U, a, moff, nmax)
    np.testing.assert_allclose(staged, direct, rtol=0, atol=0)


def test_tables_match_quadrature_definition():
    # the closed-form pair table equals the direct oscillatory quadrature
    import math

    from gweyl import HermiteBasis, PhasePoint, basis_element, wigner_gauss

    h = 0.5
    basis = HermiteBasis(1, h, 5)
    Z = PhasePoint([0.7], [-0.4])
    s = np.array([math.sqrt(2 / h) * (Z.x[0] + 1j * Z.xi[0])])
    W = wigner_pair_table(s, 5)
    for k, l in [(0, 0), (1, 3), (4, 2)]:
        direct = wigner_gauss(basis_element(basis, [k]),
                              basis_element(basis, [l]), Z)
        assert abs(direct - W[k, l, 0]) < 1e-10


def test_numpy_fallback_import():
    # the package must import and run with the accelerated path disabled
    code = (
        "import numpy as np\n"
        "from gweyl import _accel, HermiteBasis, make_exponential\n"
        "from gweyl.quantize import weyl_matrix, oracle_U, operator_norm\n"
        "assert not _accel.JIT_ENABLED\n"
        "b = HermiteBasis(1, 0.5, 8)\n"
        "M = weyl_matrix(make_exponential([1.1], [0.4]), b)\n"
        "U = oracle_U([1.1], [0.4], 0.5, b)\n"
        "resid = operator_norm(M.entries - U.entries)\n"
        "assert resid < 1e-6, resid\n"
        "print('fallback ok', resid)\n"
    )
    import os

    env = dict(os.environ, GW_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
    assert "fallback ok" in out.stdout


def test_sqrt_factorials():
    sf = sqrt_factorials(5)
    import math

    np.testing.assert_allclose(sf, [math.sqrt(math.factorial(k))
                                    for k in range(6)], rtol=1e-14)
