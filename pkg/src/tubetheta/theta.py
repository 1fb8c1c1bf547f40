"""Certified evaluation of theta series.

The series ``theta(z, u) = sum over l in Lambda^rho of
exp(pi i rho(psi(z) l + 2u, l))`` is summed over an ellipsoid in the dual
lattice whose radius comes from an explicit tail bound:

* every term with ``|l|_rho = r`` has modulus at most
  ``g(r) = exp(-pi lam r^2 + 2 pi m r)``, where ``lam`` is the smallest
  eigenvalue of psi(Im z) and ``m`` the rho-norm of Im u;
* the number of lattice points with ``|l| <= r`` is at most
  ``(2r/mu + 1)^n`` by a packing argument, ``mu`` being a lower bound on
  the shortest vector (the smallest Gram-Schmidt norm);
* summing the count times the supremum of g over shells of width mu/2, with
  a geometric remainder once the shell ratio drops below 1/2, bounds the
  tail beyond any shell boundary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.special

from . import kernels
from .errors import BudgetExceeded, DomainError, UnsupportedConfiguration
from .lattice import (
    Lattice,
    dual_lattice,
    enumerate_coefficients,
    min_norm_lower_bound,
    norm_lex_order,
    outer_range,
)
from .representation import CONE_EPS, RepresentationConfig, _coords

DEFAULT_BUDGET = 10**7
STREAM_THRESHOLD = 2 * 10**6
FOURIER_GRID = 256

_MAX_SHELLS = 10**7


@dataclass(frozen=True)
class ThetaEvaluation:
    value: complex
    tail_bound: float
    points_summed: int
    radius_used: float
    min_eigenvalue: float = field(default=float("nan"), compare=False)
    strategy: str = field(default="ellipsoid", compare=False)

    def to_dict(self) -> dict:
        return {
            "value": [repr(self.value.real), repr(self.value.imag)],
            "tail_bound": f"{self.tail_bound:.6e}",
            "points_summed": self.points_summed,
            "radius_used": repr(self.radius_used),
        }


@dataclass(frozen=True)
class TailPlan:
    radius: float
    bound: float
    shell_width: float


def _log_shell_term(k, h, lam, m, n, mu):
    a, b = k * h, (k + 1) * h
    rstar = m / lam
    rc = min(max(rstar, a), b)
    return n * math.log(2 * b / mu + 1) - math.pi * lam * rc * rc + 2 * math.pi * m * rc


def _exp(x):
    return math.exp(min(x, 700.0))


def plan_tail(lam: float, m: float, n: int, mu: float, tol: float) -> TailPlan:
    """Smallest shell radius whose certified tail is at most ``tol``."""
    if not lam > 0:
        raise DomainError("smallest eigenvalue of psi(Im z) must be positive", min_eigenvalue=lam)
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    h = mu / 2
    rstar = m / lam
    logs = []
    k = 0
    while True:
        lt = _log_shell_term(k, h, lam, m, n, mu)
        logs.append(lt)
        if k * h > rstar:
            q = _exp(_log_shell_term(k + 1, h, lam, m, n, mu) - lt)
            if q < 0.5 and _exp(lt) / (1 - q) <= (tol * 1e-3 if math.isfinite(tol) else math.inf):
                break
        k += 1
        if k > _MAX_SHELLS:
            raise BudgetExceeded("tail bound needs too many shells", math.inf, k * h)
    K = len(logs) - 1
    suffix = [0.0] * (K + 1)
    suffix[K] = _exp(logs[K]) / (1 - q)
    for j in range(K - 1, -1, -1):
        suffix[j] = _exp(logs[j]) + suffix[j + 1]
    k0 = next(j for j in range(K + 1) if suffix[j] <= tol)
    return TailPlan(k0 * h, suffix[k0], h)


def _tail_at_radius(lam, m, n, mu, radius):
    """Certified tail beyond the largest shell boundary not exceeding radius."""
    h = mu / 2
    k0 = int(math.floor(radius / h + 1e-12))
    total, k = 0.0, k0
    while True:
        lt = _log_shell_term(k, h, lam, m, n, mu)
        if k * h > m / lam:
            q = _exp(_log_shell_term(k + 1, h, lam, m, n, mu) - lt)
            if q < 0.5:
                return total + _exp(lt) / (1 - q)
        total += _exp(lt)
        k += 1
        if k > k0 + _MAX_SHELLS:
            return math.inf


def _min_im_eigenvalue(GM: np.ndarray, rho: np.ndarray) -> float:
    Y = np.imag(GM)
    Y = (Y + Y.T) / 2
    return float(scipy.linalg.eigh(Y, rho, eigvals_only=True)[0])


def _ball_volume(n, r):
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1) * r**n


def _estimate_count(n, radius, covol):
    return _ball_volume(n, radius) / covol + 2**n


def gauss_lattice_sum(
    lat: Lattice,
    M: np.ndarray,
    w=None,
    tol: float = 1e-12,
    *,
    budget: int = DEFAULT_BUDGET,
    strategy: str = "ellipsoid",
    kernel: str | None = None,
    stream_threshold: int = STREAM_THRESHOLD,
) -> ThetaEvaluation:
    """Sum ``exp(pi i rho(M l + 2w, l))`` over all l in ``lat``.

    ``M`` is a rho-symmetric complex endomorphism whose imaginary part is
    positive definite; ``rho`` is the lattice's Gram matrix.
    """
    rho = lat.rho
    n = lat.dim
    M = np.asarray(M, complex)
    w = np.zeros(n, complex) if w is None else np.asarray(w, complex)
    GM = rho @ M
    lam = _min_im_eigenvalue(GM, rho)
    if not lam > 0:
        raise DomainError(
            "imaginary part is not positive definite: the series diverges",
            min_eigenvalue=lam, boundary=abs(lam) < 1e-12,
        )
    wi = np.imag(w)
    m = math.sqrt(max(float(wi @ rho @ wi), 0.0))
    gram = lat.gram
    mu = min_norm_lower_bound(gram)
    plan = plan_tail(lam, m, n, mu, tol)
    R = plan.radius
    covol = math.sqrt(np.linalg.det(gram))
    if _estimate_count(n, R, covol) > budget:
        r_ok = R
        while r_ok > 0 and _estimate_count(n, r_ok, covol) > budget:
            r_ok -= plan.shell_width
        achieved = _tail_at_radius(lam, m, n, mu, max(r_ok, 0.0))
        raise BudgetExceeded(
            f"tolerance {tol:g} needs radius {R:.4g}, beyond the point budget {budget}",
            achieved, max(r_ok, 0.0),
        )
    B = lat.basis
    A = B.T @ GM @ B
    A = (A + A.T) / 2
    b = 2 * (B.T @ rho @ w)
    kern = kernels.get(kernel)
    bound = R * R
    if strategy == "box":
        ks, norms = _box_points(gram, R, budget)
        value = _sorted_sum(kern, ks, norms, A, b)
        count = ks.shape[0]
    elif strategy != "ellipsoid":
        raise ValueError(f"unknown strategy {strategy!r}")
    elif _estimate_count(n, R, covol) > stream_threshold:
        lo, hi = outer_range(gram, bound)
        partial, count = [], 0
        for c in range(lo, hi + 1):
            ks, norms = _enumerate(gram, bound, budget, kernel, (c, c))
            partial.append(_sorted_sum(kern, ks, norms, A, b))
            count += ks.shape[0]
        value = complex(math.fsum(p.real for p in partial), math.fsum(p.imag for p in partial))
    else:
        ks, norms = _enumerate(gram, bound, budget, kernel)
        value = _sorted_sum(kern, ks, norms, A, b)
        count = ks.shape[0]
    return ThetaEvaluation(value, plan.bound, count, R, lam, strategy)


def _enumerate(gram, bound, budget, kernel, outer=None):
    try:
        return enumerate_coefficients(gram, bound, budget, kernel, outer)
    except OverflowError:
        raise BudgetExceeded("enumeration exceeded the point budget", math.inf, math.sqrt(bound)) from None


def _sorted_sum(kern, ks, norms, A, b):
    order = norm_lex_order(ks, norms)
    return kern.gauss_sum(np.ascontiguousarray(ks[order]), A, b)


def _box_points(gram, R, budget):
    """All coefficient vectors in the bounding box of the ellipsoid."""
    n = gram.shape[0]
    half = np.floor(R * np.sqrt(np.diag(np.linalg.inv(gram))) + 1e-9).astype(np.int64)
    size = int(np.prod(2 * half + 1))
    if size > budget:
        raise BudgetExceeded("box enumeration exceeded the point budget", math.inf, R)
    axes = [np.arange(-h, h + 1) for h in half]
    ks = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    kf = ks.astype(float)
    norms = np.einsum("ni,ij,nj->n", kf, gram, kf)
    return ks, norms


# -- public entry points -----------------------------------------------------------


def _check_domain(rep: RepresentationConfig, z):
    y = np.imag(_coords(z)).astype(float)
    lo, hi = rep.spectrum_bounds(y)
    if not lo > CONE_EPS * max(abs(lo), abs(hi)):
        raise DomainError(
            "Im z is not in the open cone: the series diverges",
            min_eigenvalue=lo, boundary=abs(lo) <= CONE_EPS * max(abs(lo), abs(hi), 1e-300),
        )
    return lo


def tail_radius(rep: RepresentationConfig, z, u=None, tol: float = 1e-12, lattice: Lattice | None = None) -> float:
    """Summation radius (rho-norm in the dual lattice) certified for ``tol``.

    ``lattice`` defaults to the standard lattice of U_hat.
    """
    lam = _check_domain(rep, z)
    lat = lattice if lattice is not None else Lattice.standard(rep.dim_U, rho=rep.rho)
    dual = dual_lattice(lat, rep.rho)
    u = np.zeros(rep.dim_U) if u is None else np.asarray(u, complex)
    ui = np.imag(u)
    m = math.sqrt(max(float(ui @ rep.rho @ ui), 0.0))
    mu = min_norm_lower_bound(dual.gram)
    return plan_tail(lam, m, rep.dim_U, mu, tol).radius


def theta_eval(
    rep: RepresentationConfig,
    lattice: Lattice,
    z,
    u=None,
    tol: float = 1e-12,
    **options,
) -> ThetaEvaluation:
    """theta_Lambda(z, u) with a certified absolute truncation bound <= tol.

    ``options`` are passed to :func:`gauss_lattice_sum` (budget, strategy,
    kernel, stream_threshold).
    """
    _check_domain(rep, z)
    u = np.zeros(rep.dim_U, complex) if u is None else np.asarray(u, complex)
    if u.shape != (rep.dim_U,):
        raise ValueError(f"u must have {rep.dim_U} coordinates")
    dual = dual_lattice(lattice, rep.rho)
    return gauss_lattice_sum(dual, rep.psi(z), u, tol, **options)


def theta_eval_many(rep, lattice, z, us, tol: float = 1e-12, kernel=None, budget=DEFAULT_BUDGET):
    """theta at a fixed z for many u; returns (values, common tail bound)."""
    _check_domain(rep, z)
    us = np.atleast_2d(np.asarray(us, complex))
    dual = dual_lattice(lattice, rep.rho)
    rho, n = dual.rho, dual.dim
    GM = rho @ rep.psi(z)
    lam = _min_im_eigenvalue(GM, rho)
    im = np.imag(us)
    m = math.sqrt(max(float(np.max(np.einsum("ni,ij,nj->n", im, rho, im))), 0.0))
    gram = dual.gram
    plan = plan_tail(lam, m, n, min_norm_lower_bound(gram), tol)
    ks, norms = _enumerate(gram, plan.radius**2, budget, kernel)
    ks = np.ascontiguousarray(ks[norm_lex_order(ks, norms)])
    B = dual.basis
    A = B.T @ GM @ B
    bs = 2 * us @ (rho @ B)
    return kernels.get(kernel).gauss_sum_many(ks, (A + A.T) / 2, bs), plan.bound


def fourier_coefficient(
    rep: RepresentationConfig,
    lattice: Lattice,
    z,
    l,
    grid: int = FOURIER_GRID,
    tol: float = 1e-13,
    kernel=None,
) -> complex:
    """Fourier coefficient of u -> theta(z, u) at the dual vector ``l``.

    Trapezoidal rule on ``grid`` points per axis over the fundamental cell
    ``{B t : t in [0, 1)^n}``; only for dim U_hat <= 2.
    """
    n = rep.dim_U
    if n > 2:
        raise UnsupportedConfiguration("Fourier coefficient extraction supports dim U_hat <= 2 only")
    l = np.asarray(l, float)
    B = lattice.basis
    t1 = np.arange(grid) / grid
    ts = np.stack(np.meshgrid(*([t1] * n), indexing="ij"), axis=-1).reshape(-1, n)
    us = ts @ B.T
    vals, _ = theta_eval_many(rep, lattice, z, us, tol, kernel)
    phase = np.exp(-2j * math.pi * (us @ rep.rho @ l))
    return complex(np.mean(vals * phase))
