import cmath
import math

import numpy as np
import pytest

from tubetheta import kernels

BACKENDS = ["python"] + (["compiled"] if kernels.compiled is not None else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def theta_1d_oracle(z, u, scale=1, terms=40):
    """Direct sum over the dual of scale*Z, i.e. l in Z/scale."""
    return sum(cmath.exp(1j * math.pi * (z * (k / scale) ** 2 + 2 * u * k / scale)) for k in range(-terms, terms + 1))


def theta_box_oracle(psi_z, rho, dual_basis, u, r=12):
    """Brute-force sum over dual coefficients in a box, numpy only."""
    n = dual_basis.shape[0]
    axes = [np.arange(-r, r + 1)] * n
    ks = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    ls = ks @ dual_basis.T
    q = np.einsum("ni,ij,jk,nk->n", ls, rho, psi_z, ls) + 2 * ls @ rho @ u
    return complex(np.sum(np.exp(1j * math.pi * q)))
