"""Numba kernels against their numpy fallbacks (and external oracles)."""

import json
import os
import subprocess
import sys

import numpy as np
from scipy.linalg import expm

from groupquant import _kernels as K
from groupquant.wigner import su2_generator

_PROBE = """
import json
import numpy as np
from groupquant import _kernels as K
beta = np.linspace(0.001, 3.14, 37)
h = np.concatenate([[0.0, 1e-8], np.linspace(0.01, 6.0, 25)])
p = np.linspace(-3, 9, 41)
out = {
 "wig": K.wigner_d_grid(9, beta).tolist(),
 "itn": K.itn_denominator(p, 1.7, 30).tolist(),
 "norm": K.su2_norm_series(h, 0.6, 50).tolist(),
 "numba": K.USE_NUMBA,
}
print(json.dumps(out))
"""


def _run(no_numba):
    env = dict(os.environ)
    env["QG_NO_NUMBA"] = "1" if no_numba else "0"
    res = subprocess.run([sys.executable, "-c", _PROBE], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def test_paths_agree():
    a = _run(False)
    b = _run(True)
    assert b["numba"] is False
    for key in ("wig", "itn", "norm"):
        x, y = np.asarray(a[key]), np.asarray(b[key])
        assert np.abs(x - y).max() < 1e-13 * max(1.0, np.abs(x).max())


def test_wigner_kernel_oracle():
    beta = np.array([0.0, 0.31, 1.2, np.pi])
    for twoj in (1, 2, 5, 12):
        d = K.wigner_d_grid(twoj, beta)
        for i, b in enumerate(beta):
            ref = expm(b * su2_generator(twoj, 1)).real
            assert np.abs(d[i] - ref).max() < 1e-12


def test_itn_denominator_oracle():
    p = np.array([0.4, 1.7])
    t, mmax = 1.3, 25
    ref = np.array([sum(m * np.exp(-(pp - t * m / 2.0) ** 2 / t)
                        for m in range(-mmax, mmax + 1)) for pp in p])
    assert np.abs(K.itn_denominator(p, t, mmax) - ref).max() < 1e-14


def test_norm_series_oracle():
    h, t, nmax = 1.3, 0.8, 40
    ref = sum(n * np.exp(-t * (n * n - 1) / 4.0)
              * np.sinh(n * h) / np.sinh(h) for n in range(1, nmax + 1))
    val = K.su2_norm_series(np.array([h]), t, nmax)[0]
    assert abs(val - ref) < 1e-12 * ref
    # stable small-h limit: value n^2-weighted sum
    v0 = K.su2_norm_series(np.array([0.0]), t, nmax)[0]
    ref0 = sum(n * n * np.exp(-t * (n * n - 1) / 4.0)
               for n in range(1, nmax + 1))
    assert abs(v0 - ref0) < 1e-12 * ref0
