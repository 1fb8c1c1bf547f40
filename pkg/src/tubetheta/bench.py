"""Timing of summation strategies and kernel backends."""
from __future__ import annotations

import time

import numpy as np

from . import kernels
from .jordan import HermComplex, SymReal
from .lattice import Lattice
from .representation import natural_representation
from .theta import theta_eval

TOL_SWEEP = (1e-4, 1e-6, 1e-8, 1e-10, 1e-12)

COLUMNS = ("config", "strategy", "kernel", "tol", "terms", "seconds", "achieved_bound", "value_re", "value_im")


def configurations():
    """(label, rep, lattice, z, u) used by the benchmark."""
    s2 = natural_representation(SymReal(2))
    h2 = natural_representation(HermComplex(2))
    return [
        ("SymReal(2)/Z^2", s2, Lattice.standard(2, rho=s2.rho),
         np.array([0.1 + 0.6j, 0.05 + 0.2j, -0.2 + 0.5j]), np.array([0.3, 0.1 + 0.05j])),
        ("HermComplex(2)/Z^4", h2, Lattice.standard(4, rho=h2.rho),
         np.array([0.1 + 0.7j, 0.1j, 0.05j, 0.2 + 0.6j]), np.array([0.2, 0.1, 0.0, 0.3])),
    ]


def _time(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return out, best


def run(tols=TOL_SWEEP, strategies=("ellipsoid", "box"), backends=None, repeat=3):
    """Rows of the timing table, one per configuration x strategy x backend x tol."""
    if backends is None:
        backends = ["python"] + (["compiled"] if kernels.compiled is not None else [])
    rows = []
    for label, rep, lat, z, u in configurations():
        for strategy in strategies:
            for backend in backends:
                for tol in tols:
                    ev, secs = _time(lambda: theta_eval(rep, lat, z, u, tol, strategy=strategy, kernel=backend), repeat)
                    rows.append({
                        "config": label, "strategy": strategy, "kernel": backend, "tol": f"{tol:.0e}",
                        "terms": ev.points_summed, "seconds": f"{secs:.6f}",
                        "achieved_bound": f"{ev.tail_bound:.3e}",
                        "value_re": f"{ev.value.real:.17g}", "value_im": f"{ev.value.imag:.17g}",
                    })
    return rows
