"""Numerical checks of the identities satisfied by theta series.

Every check returns an :class:`IdentityCheck` with

``residual = |lhs - rhs| / max(1, |lhs|, |rhs|)``

(for matrices the entrywise maximum replaces the modulus). Theta values
entering a check are evaluated with absolute truncation error at most a
hundredth of the tolerance, and a check only passes if the certified tails,
normalised like the residual, stay below the tolerance.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.integrate
import scipy.linalg

from . import jordan
from .errors import DomainError, NotInvertibleError, TubeThetaError, UnsupportedConfiguration
from .lattice import Lattice, covolume, dual_lattice, enumerate_coefficients, period_lattice
from .representation import (
    CONE_EPS,
    RepresentationConfig,
    _coords,
    basepoint_u_map,
    normalize_basepoint,
    realify,
    s_form,
)
from .theta import fourier_coefficient, gauss_lattice_sum, theta_eval

#: Default tolerances per identity tag.
DEFAULT_TOLERANCES = {
    "theta1": 1e-9,
    "theta2": 1e-9,
    "theta3": 1e-9,
    "linearSiegel": 1e-12,
    "S-equivariance": 1e-12,
    "cone-preservation": 0.0,
    "lineartheta": 1e-9,
    "gaussian": 1e-8,
    "inverseid": 1e-12,
    "partialthetaid": 1e-8,
    "theta-transformation": 1e-8,
    "c-constancy": 1e-8,
    "c-covolume": 1e-8,
    "Hnorm": 1e-12,
    "H-square": 1e-10,
    "jordan-inverse": 1e-11,
    "jordan-hom": 1e-11,
    "jordan-identity": 1e-12,
    "trace-associativity": 1e-12,
    "S-linearity": 1e-12,
    "S-hermitian": 1e-12,
    "S-cone": 0.0,
    "S-definite": 0.0,
    "S-spanning": 0.0,
    "basepoint": 1e-9,
    "fourier": 1e-6,
    "evenness": 1e-12,
    "tail-stability": None,  # the evaluation tolerance itself
}

#: Fraction of a check's tolerance granted to each theta evaluation.
EVAL_FRACTION = 0.01


class MembershipError(TubeThetaError, ValueError):
    """A shift vector is not in the lattice the identity requires."""


@dataclass(frozen=True)
class IdentityCheck:
    tag: str
    inputs: dict
    lhs: object
    rhs: object
    residual: float
    tolerance: float
    tail_bounds: tuple = ()
    passed: bool = False
    note: str = ""
    extra: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {
            "tag": self.tag,
            "inputs": _jsonable(self.inputs),
            "lhs": _jsonable(self.lhs),
            "rhs": _jsonable(self.rhs),
            "residual": f"{self.residual:.6e}",
            "tolerance": f"{self.tolerance:.6e}",
            "tail_bounds": [f"{t:.6e}" for t in self.tail_bounds],
            "pass": bool(self.passed),
            **({"note": self.note} if self.note else {}),
            **({"extra": _jsonable(self.extra)} if self.extra else {}),
        }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [repr(float(x.real)), repr(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def residual(lhs, rhs) -> float:
    """|lhs - rhs| / max(1, |lhs|, |rhs|); entrywise maxima for arrays."""
    a, b = np.asarray(lhs), np.asarray(rhs)
    diff = float(np.max(np.abs(a - b))) if a.size else 0.0
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 0.0, float(np.max(np.abs(b))) if b.size else 0.0)
    return diff / scale


def make_check(tag, inputs, lhs, rhs, tolerance=None, tails=(), note="", absolute=False, extra=None):
    tol = DEFAULT_TOLERANCES.get(tag) if tolerance is None else tolerance
    if absolute:
        res = float(np.max(np.abs(np.asarray(lhs) - np.asarray(rhs))))
        denom = 1.0
    else:
        res = residual(lhs, rhs)
        denom = max(1.0, float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))))
    tails = tuple(float(t) for t in tails)
    ok = res <= tol
    if tails and not sum(tails) / denom < max(tol, np.finfo(float).tiny):
        ok = False
        note = (note + "; " if note else "") + "tail bounds exceed tolerance"
    return IdentityCheck(tag, dict(inputs), lhs, rhs, res, tol, tails, bool(ok), note, extra or {})


def _eval_tol(tolerance):
    return EVAL_FRACTION * tolerance


def _vec(x, n=None):
    v = np.asarray(_coords(x), complex).reshape(-1)
    if n is not None and v.shape != (n,):
        raise ValueError(f"expected a vector with {n} entries")
    return v


def _simplify(v):
    v = np.asarray(v)
    return v.real if np.iscomplexobj(v) and not np.any(v.imag) else v


# -- periodicities -------------------------------------------------------------------


def check_periodicity_u(rep, lattice, z, u, m, tolerance=None) -> IdentityCheck:
    """theta(z, u + m) = theta(z, u) for m in Lambda."""
    tol = DEFAULT_TOLERANCES["theta1"] if tolerance is None else tolerance
    u, m = _vec(u, rep.dim_U), np.asarray(m, float)
    if not lattice.contains(m):
        raise MembershipError(f"shift {m.tolist()} is not in the lattice")
    a = theta_eval(rep, lattice, z, u + m, _eval_tol(tol))
    b = theta_eval(rep, lattice, z, u, _eval_tol(tol))
    return make_check("theta1", {"z": _vec(z), "u": u, "m": m}, a.value, b.value, tol,
                      (a.tail_bound, b.tail_bound))


def check_quasiperiodicity(rep, lattice, z, u, n, tolerance=None) -> IdentityCheck:
    """theta(z, u + psi(z) n) = exp(-pi i rho(psi(z) n + 2u, n)) theta(z, u) for n in the dual."""
    tol = DEFAULT_TOLERANCES["theta2"] if tolerance is None else tolerance
    u, n = _vec(u, rep.dim_U), np.asarray(n, float)
    if not dual_lattice(lattice, rep.rho).contains(n):
        raise MembershipError(f"shift {n.tolist()} is not in the dual lattice")
    P = rep.psi(z)
    factor = cmath.exp(-1j * math.pi * complex((P @ n + 2 * u) @ rep.rho @ n))
    a = theta_eval(rep, lattice, z, u + P @ n, _eval_tol(tol))
    b = theta_eval(rep, lattice, z, u, _eval_tol(tol) / max(1.0, abs(factor)))
    return make_check("theta2", {"z": _vec(z), "u": u, "n": n}, a.value, factor * b.value, tol,
                      (a.tail_bound, abs(factor) * b.tail_bound))


def check_periodicity_z(rep, lattice, z, u, k, tolerance=None, period=None) -> IdentityCheck:
    """theta(z + k, u) = theta(z, u) for k in the period lattice."""
    tol = DEFAULT_TOLERANCES["theta3"] if tolerance is None else tolerance
    u, k = _vec(u, rep.dim_U), np.asarray(k, float)
    pl = period if period is not None else period_lattice(rep, lattice)
    if not pl.contains(k):
        raise MembershipError(f"shift {k.tolist()} is not in the period lattice")
    z = _vec(z, rep.dim_V)
    a = theta_eval(rep, lattice, z + k, u, _eval_tol(tol))
    b = theta_eval(rep, lattice, z, u, _eval_tol(tol))
    return make_check("theta3", {"z": z, "u": u, "k": k}, a.value, b.value, tol,
                      (a.tail_bound, b.tail_bound))


def check_evenness(rep, lattice, z, u, tolerance=None) -> IdentityCheck:
    tol = DEFAULT_TOLERANCES["evenness"] if tolerance is None else tolerance
    u = _vec(u, rep.dim_U)
    a = theta_eval(rep, lattice, z, u, _eval_tol(tol))
    b = theta_eval(rep, lattice, z, -u, _eval_tol(tol))
    return make_check("evenness", {"z": _vec(z), "u": u}, a.value, b.value, tol,
                      (a.tail_bound, b.tail_bound))


# -- linear substitutions --------------------------------------------------------------


def rho_adjoint(rep, M):
    return np.linalg.solve(rep.rho, np.asarray(M).T @ rep.rho)


def induced_map(rep: RepresentationConfig, W_hat):
    """W on V with psi(W x) = W_hat psi(x) W_hat^rho, by least squares.

    Returns ``(W, fit_residual)``; a large residual means W_hat does not
    normalise the image of psi.
    """
    W_hat = np.asarray(W_hat, float)
    adj = rho_adjoint(rep, W_hat)
    A = rep.psi_basis.reshape(rep.dim_V, -1).T
    targets = np.array([W_hat @ P @ adj for P in rep.psi_basis]).reshape(rep.dim_V, -1).T
    W, *_ = np.linalg.lstsq(A, targets, rcond=None)
    fit = residual(A @ W, targets)
    return W, fit


def _lift_gl2(rep, g):
    """W_hat for g in GL_2 (complex for HermComplex) if the kind allows it."""
    desc = rep.descriptor

    def lift(d, g):
        if d.kind == "RealLine":
            return None
        if d.kind == "SymReal":
            if np.iscomplexobj(g) and np.any(np.imag(g)):
                return None
            out = np.eye(d.n)
            out[:2, :2] = np.real(g)
            return out
        if d.kind == "HermComplex":
            out = np.eye(d.n, dtype=complex)
            out[:2, :2] = g
            return realify(out)
        if d.kind == "SpinFactor" and d.n == 3:
            if np.iscomplexobj(g) and np.any(np.imag(g)):
                return None
            return np.real(g).astype(float)
        return None

    if desc.kind == "DirectSum":
        blocks = []
        for p in desc.parts:
            b = lift(p, g)
            if b is None:
                b = np.eye(_natural_size(p))
            blocks.append(b)
        return scipy.linalg.block_diag(*blocks)
    return lift(desc, g)


def _natural_size(d):
    from .representation import _natural_psi

    return _natural_psi(d).shape[1]


_GL2_SAMPLES = [
    np.array([[1, 1], [0, 1]]),
    np.array([[1, 0], [-1, 1]]),
    np.array([[1, 0], [0, -1]]),
    np.array([[2, 1], [1, 1]]),
    np.array([[2, 0], [0, 1]]),
    np.array([[1, 1j], [0, 1]]),
    np.array([[1j, 0], [0, 1]]),
]

_SCALAR_SAMPLES = [-1, 2, -2, 3, 5]


def integer_pairs(rep: RepresentationConfig, count: int = 5):
    """Up to ``count`` integer matrices W_hat (shears and diagonals) with induced W."""
    n = rep.dim_U
    cands = []
    for g in _GL2_SAMPLES:
        if rep.descriptor.kind == "HermComplex" or not np.any(np.imag(g)):
            W_hat = _lift_gl2(rep, g) if rep.descriptor.kind != "Custom" else None
            if W_hat is not None and W_hat.shape == (n, n):
                cands.append(W_hat)
    if rep.descriptor.kind == "DirectSum":
        for s in _SCALAR_SAMPLES:
            D = np.eye(n)
            D[0, 0] = s
            cands.append(D)
    for s in _SCALAR_SAMPLES:
        cands.append(s * np.eye(n))
    for i in range(n):
        for j in range(n):
            if i != j:
                E = np.eye(n)
                E[i, j] = 1
                cands.append(E)
    out = []
    for W_hat in cands:
        W_hat = np.rint(W_hat)
        if abs(np.linalg.det(W_hat)) < 0.5:
            continue
        W, fit = induced_map(rep, W_hat)
        if fit < 1e-12 and abs(np.linalg.det(W)) > 1e-9 and not any(np.array_equal(W_hat, o) for o in out):
            out.append(W_hat)
        if len(out) == count:
            break
    return out


def scaling_pair(rep, t):
    """(t I, sqrt(t) I) as (W, W_hat)."""
    return t * np.eye(rep.dim_V), math.sqrt(t) * np.eye(rep.dim_U)


def _transform_lattice(lattice: Lattice, W_hat):
    W_hat = np.asarray(W_hat, float)
    exact = None
    if lattice.is_exact and np.all(W_hat == np.rint(W_hat)):
        from .lattice import to_fraction_matrix

        exact = to_fraction_matrix(W_hat.astype(int).tolist())
    return lattice.transform(W_hat, exact_map=exact)


def check_linear_pair(rep, lattice, W, W_hat, samples, tolerances=None, seed=0) -> list:
    """Checks for a pair (W, W_hat): linearSiegel, S-equivariance,
    cone-preservation and lineartheta at each sample (z, u)."""
    tols = dict(DEFAULT_TOLERANCES)
    tols.update(tolerances or {})
    W = np.asarray(W, float)
    W_hat = np.asarray(W_hat, float)
    for M, name in ((W, "W"), (W_hat, "W_hat")):
        if abs(np.linalg.det(M)) < 1e-12:
            raise NotInvertibleError(f"{name} is singular", float(np.linalg.det(M)))
    adj = rho_adjoint(rep, W_hat)
    W_sigma = np.linalg.solve(rep.sigma, W.T @ rep.sigma)
    rng = np.random.default_rng(seed)
    base = {"W": W, "W_hat": W_hat}
    out = []
    for idx, (z, u) in enumerate(samples):
        z = _vec(z, rep.dim_V)
        u = _vec(u, rep.dim_U)
        out.append(make_check("linearSiegel", {**base, "z": z, "sample": idx},
                              rep.psi(W @ z), W_hat @ rep.psi(z) @ adj, tols["linearSiegel"]))
        a = rng.standard_normal(rep.dim_U) + 1j * rng.standard_normal(rep.dim_U)
        b = rng.standard_normal(rep.dim_U) + 1j * rng.standard_normal(rep.dim_U)
        out.append(make_check("S-equivariance", {**base, "u": a, "v": b, "sample": idx},
                              s_form(rep, adj @ a, adj @ b), W_sigma @ s_form(rep, a, b),
                              tols["S-equivariance"]))
    # cone preservation: images of e and random cone points stay inside
    pts = [rep.base_point] + [_random_cone_point(rep, rng) for _ in range(8)]
    inside = [rep.spectrum_bounds(W @ p)[0] > 0 for p in pts]
    inside += [rep.spectrum_bounds(np.linalg.solve(W, p))[0] > 0 for p in pts]
    frac = sum(inside) / len(inside)
    out.append(make_check("cone-preservation", {**base, "points": len(inside)}, frac, 1.0,
                          tols["cone-preservation"]))
    target = _transform_lattice(lattice, W_hat)
    t = tols["lineartheta"]
    for idx, (z, u) in enumerate(samples):
        z = _vec(z, rep.dim_V)
        u = _vec(u, rep.dim_U)
        lhs = theta_eval(rep, target, W @ z, W_hat @ u, _eval_tol(t))
        rhs = theta_eval(rep, lattice, z, u, _eval_tol(t))
        out.append(make_check("lineartheta", {**base, "z": z, "u": u, "sample": idx},
                              lhs.value, rhs.value, t, (lhs.tail_bound, rhs.tail_bound)))
    return out


def _random_cone_point(rep, rng):
    """e plus a random perturbation scaled to stay in the cone."""
    x = rng.standard_normal(rep.dim_V)
    lo, hi = rep.spectrum_bounds(x)
    span = max(abs(lo), abs(hi), 1e-300)
    e_lo, _ = rep.spectrum_bounds(rep.base_point)
    return rep.base_point + 0.9 * e_lo * x / span


# -- analytic identities-------------------------------------------------------------------


def sqrt_det_minus_i_psi(rep, z) -> complex:
    """det(-i psi(z))^(1/2) via the sum of principal logs of the eigenvalues."""
    _require_domain(rep, z)
    ev = np.linalg.eigvals(-1j * rep.psi(z))
    return cmath.exp(0.5 * complex(np.sum(np.log(ev.astype(complex)))))


def _require_domain(rep, z):
    y = np.imag(_vec(z, rep.dim_V)).astype(float)
    lo, hi = rep.spectrum_bounds(y)
    if not lo > CONE_EPS * max(abs(lo), abs(hi)):
        raise DomainError("Im z is not in the open cone", min_eigenvalue=lo,
                          boundary=abs(lo) <= CONE_EPS * max(abs(lo), abs(hi), 1e-300))


def gaussian_integral_check(rep, z, w=None, tolerance=None) -> IdentityCheck:
    """Quadrature of exp(i pi rho(psi(z)(v + w), v + w)) over U_hat against
    det(-i psi(z))^(-1/2); dim U_hat <= 2."""
    n = rep.dim_U
    tol = (1e-8 if n == 1 else 1e-6) if tolerance is None else tolerance
    if n > 2:
        raise UnsupportedConfiguration("the Gaussian integral check supports dim U_hat <= 2 only")
    _require_domain(rep, z)
    w = np.zeros(n, complex) if w is None else _vec(w, n)
    GP = rep.rho @ rep.psi(z)
    lam = rep.spectrum_bounds(np.imag(_vec(z)).astype(float))[0]

    def f(*v):
        x = np.asarray(v) + w
        return np.exp(1j * math.pi * (x @ GP @ x))

    # the integrand is below 1e-30 outside this box around -Re w
    half = math.sqrt(70.0 / (math.pi * lam) / float(np.min(np.linalg.eigvalsh(rep.rho)))) \
        + float(np.max(np.abs(w.imag))) * 2
    c = -w.real
    opts = dict(epsabs=1e-13, epsrel=1e-12, limit=400)
    if n == 1:
        re = scipy.integrate.quad(lambda v: f(v).real, c[0] - half, c[0] + half, **opts)[0]
        im = scipy.integrate.quad(lambda v: f(v).imag, c[0] - half, c[0] + half, **opts)[0]
    else:
        rng2 = [(c[0] - half, c[0] + half), (c[1] - half, c[1] + half)]
        o2 = {"epsabs": 1e-11, "epsrel": 1e-10, "limit": 100}
        re = scipy.integrate.nquad(lambda a, b: f(a, b).real, rng2, opts=o2)[0]
        im = scipy.integrate.nquad(lambda a, b: f(a, b).imag, rng2, opts=o2)[0]
    lhs = complex(re, im) * math.sqrt(np.linalg.det(rep.rho))
    rhs = 1 / sqrt_det_minus_i_psi(rep, z)
    return make_check("gaussian", {"z": _vec(z), "w": w}, lhs, rhs, tol)


def check_square_completion(rep, y, x, v, tolerance=None) -> IdentityCheck:
    """rho(psi(y)(x + psi(y)^-1 v), x + psi(y)^-1 v) - rho(psi(y)^-1 v, v) = rho(psi(y) x + 2v, x)."""
    y = np.asarray(_coords(y))
    if rep.spectrum_bounds(np.real(y))[0] <= 0 or np.any(np.imag(y)):
        raise DomainError("y must lie in the open cone")
    P = rep.psi(np.real(y))
    x, v = _vec(x, rep.dim_U), _vec(v, rep.dim_U)
    Pv = np.linalg.solve(P, v)
    s = x + Pv
    G = rep.rho
    lhs = (P @ s) @ G @ s - Pv @ G @ v
    rhs = (P @ x + 2 * v) @ G @ x
    return make_check("inverseid", {"y": y, "x": x, "v": v}, complex(lhs), complex(rhs), tolerance)


def h_factor(rep, z, u=None) -> complex:
    """H(z, u) = det(-i psi(z))^(1/2) exp(i pi rho(psi(z)^-1 u, u))."""
    root = sqrt_det_minus_i_psi(rep, z)
    if u is None:
        return root
    u = _vec(u, rep.dim_U)
    Pu = np.linalg.solve(rep.psi(z), u)
    return root * cmath.exp(1j * math.pi * complex(Pu @ rep.rho @ u))


def check_h_normalization(rep, tolerance=None) -> IdentityCheck:
    e = np.asarray(rep.base_point, float)
    return make_check("Hnorm", {"z": 1j * e}, h_factor(rep, 1j * e, None), 1.0, tolerance)


def check_h_square(rep, z, tolerance=None) -> IdentityCheck:
    h = h_factor(rep, z, None)
    d = complex(np.linalg.det(-1j * rep.psi(z)))
    return make_check("H-square", {"z": _vec(z)}, h * h, d, tolerance)


def check_partial_transformation(rep, lattice, z, u, tolerance=None) -> IdentityCheck:
    """Sum over the dual lattice against C_Lambda times the Poisson-transformed sum over Lambda."""
    tol = DEFAULT_TOLERANCES["partialthetaid"] if tolerance is None else tolerance
    u = _vec(u, rep.dim_U)
    lhs = theta_eval(rep, lattice, z, u, _eval_tol(tol))
    P = rep.psi(z)
    Pinv = np.linalg.inv(P)
    C = covolume(lattice, rep.rho)
    pre = C / sqrt_det_minus_i_psi(rep, z) * cmath.exp(-1j * math.pi * complex((Pinv @ u) @ rep.rho @ u))
    lat = lattice.with_rho(rep.rho)
    s = gauss_lattice_sum(lat, -Pinv, Pinv @ u, _eval_tol(tol) / max(abs(pre), 1e-300))
    return make_check("partialthetaid", {"z": _vec(z), "u": u, "C": C}, lhs.value, pre * s.value, tol,
                      (lhs.tail_bound, abs(pre) * s.tail_bound))


def concrete_inverse(rep, z) -> np.ndarray:
    """Coordinates of j(z) = -z^-1 in the complexified algebra.

    Uses the Jordan inverse when the descriptor has a product and otherwise
    solves psi(z') = -psi(z)^-1 by least squares. Either way the result is
    checked against psi.
    """
    z = _vec(z, rep.dim_V)
    target = -np.linalg.inv(rep.psi(z))
    if rep.descriptor.has_product:
        zp = -jordan.inverse(jordan.AlgebraElement(rep.descriptor, z)).coords
    else:
        A = rep.psi_basis.reshape(rep.dim_V, -1).T
        zp = np.linalg.lstsq(A.astype(complex), target.reshape(-1), rcond=None)[0]
    if residual(rep.psi(zp), target) > 1e-9:
        raise UnsupportedConfiguration("psi(-z^-1) differs from -psi(z)^-1: psi is not a Jordan homomorphism here")
    return np.asarray(zp, complex)


def _require_normalized(rep):
    if not rep.is_normalized:
        raise UnsupportedConfiguration("the full transformation formula needs psi(e) = I; normalize the base point first")


def check_full_transformation(rep, lattice, z, u, tolerance=None) -> IdentityCheck:
    """theta_{dual}(-z^-1, psi(z)^-1 u) = c H(z, u) theta(z, u) with c = 1/covolume.

    The ratio estimate of c is stored in ``extra["c_estimate"]``.
    """
    tol = DEFAULT_TOLERANCES["theta-transformation"] if tolerance is None else tolerance
    _require_normalized(rep)
    _require_domain(rep, z)
    u = _vec(u, rep.dim_U)
    zp = concrete_inverse(rep, z)
    Pinv = np.linalg.inv(rep.psi(z))
    dual = dual_lattice(lattice, rep.rho)
    H = h_factor(rep, z, u)
    c = 1 / covolume(lattice, rep.rho)
    lhs = theta_eval(rep, dual, zp, Pinv @ u, _eval_tol(tol))
    base = theta_eval(rep, lattice, z, u, _eval_tol(tol) / max(abs(c * H), 1.0))
    rhs = c * H * base.value
    est = lhs.value / (H * base.value)
    return make_check("theta-transformation", {"z": _vec(z), "u": u, "c": c}, lhs.value, rhs, tol,
                      (lhs.tail_bound, abs(c * H) * base.tail_bound), extra={"c_estimate": est})


def estimate_c_lambda(rep, lattice, samples, tolerance=None):
    """Ratio estimates of c_Lambda at each sample; returns (checks, estimates)."""
    checks = [check_full_transformation(rep, lattice, z, u, tolerance) for z, u in samples]
    return checks, np.array([c.extra["c_estimate"] for c in checks])


def check_c_lambda(rep, lattice, samples, tolerance=None) -> list:
    """Constancy of the c_Lambda estimates and c_Lambda * C_Lambda = 1."""
    _, est = estimate_c_lambda(rep, lattice, samples, tolerance)
    C = covolume(lattice, rep.rho)
    spread = complex(est[np.argmax(np.abs(est - est[0]))])
    inputs = {"samples": len(samples), "estimates": est}
    mean = complex(np.mean(est))
    return [
        make_check("c-constancy", inputs, spread, complex(est[0]), tolerance),
        make_check("c-covolume", {"C": C, "c": mean}, mean * C, 1.0, tolerance),
    ]


# -- algebraic structure ----------------------------------------------------------------


def check_jordan_hom(rep, samples, tolerance=None) -> list:
    """psi(x^-1) = psi(x)^-1 and 2 psi(a b) = psi(a) psi(b) + psi(b) psi(a)."""
    desc = rep.descriptor
    if not desc.has_product:
        raise UnsupportedConfiguration(f"{desc} has no Jordan product")
    out = []
    samples = [np.asarray(_coords(s)) for s in samples]
    for i, x in enumerate(samples):
        X = jordan.AlgebraElement(desc, x)
        try:
            xi = jordan.inverse(X).coords
        except NotInvertibleError:
            continue
        out.append(make_check("jordan-inverse", {"x": x}, rep.psi(xi), np.linalg.inv(rep.psi(x)), tolerance))
        y = samples[(i + 1) % len(samples)]
        ab = jordan.jordan_product(X, jordan.AlgebraElement(desc, y)).coords
        A, B = rep.psi(x), rep.psi(y)
        out.append(make_check("jordan-hom", {"a": x, "b": y}, 2 * rep.psi(ab), A @ B + B @ A, tolerance))
    return out


def check_jordan_axioms(desc, samples, tolerance=None) -> list:
    """Jordan identity (x y)(x x) = x (y (x x)) and trace-form associativity."""
    E = lambda c: jordan.AlgebraElement(desc, np.asarray(c))  # noqa: E731
    P = jordan.jordan_product
    out = []
    samples = [np.asarray(_coords(s)) for s in samples]
    for i, x in enumerate(samples):
        y = samples[(i + 1) % len(samples)]
        w = samples[(i + 2) % len(samples)]
        X, Y, Wd = E(x), E(y), E(w)
        xx = P(X, X)
        out.append(make_check("jordan-identity", {"x": x, "y": y},
                              P(P(X, Y), xx).coords, P(X, P(Y, xx)).coords, tolerance))
        out.append(make_check("trace-associativity", {"x": x, "y": y, "w": w},
                              jordan.trace_form(P(X, Y), Wd), jordan.trace_form(X, P(Y, Wd)), tolerance))
    return out


def check_s_properties(rep, lattice, sample_size=1000, seed=0, tolerance=None) -> list:
    """Linearity, Hermitian symmetry, cone values, definiteness and spanning of S."""
    rng = np.random.default_rng(seed)
    n = rep.dim_U
    out = []

    def cvec():
        return rng.standard_normal(n) + 1j * rng.standard_normal(n)

    a, b, c = cvec(), cvec(), cvec()
    s, t = complex(rng.standard_normal(), rng.standard_normal()), rng.standard_normal()
    out.append(make_check("S-linearity", {"u": a, "v": b, "w": c},
                          s_form(rep, s * a + t * b, c), s * s_form(rep, a, c) + t * s_form(rep, b, c), tolerance))
    out.append(make_check("S-hermitian", {"u": a, "v": b}, s_form(rep, a, b), np.conj(s_form(rep, b, a)), tolerance))
    closed, positive = 0, 0
    for _ in range(sample_size):
        u = cvec()
        S = np.real(s_form(rep, u, u))
        lo, hi = rep.spectrum_bounds(S)
        closed += lo >= -1e-10 * max(abs(hi), 1.0)
        # sigma(S(u, u), e) = rho(psi(e) u, conj u) is positive unless u = 0
        positive += float(S @ rep.sigma @ rep.base_point) > 0
    out.append(make_check("S-cone", {"samples": sample_size}, closed / sample_size, 1.0, tolerance))
    out.append(make_check("S-definite", {"samples": sample_size}, positive / sample_size, 1.0, tolerance))
    dual = dual_lattice(lattice, rep.rho)
    ks = _box(n, 2)
    vals = np.array([np.real(s_form(rep, dual.basis @ k, dual.basis @ k)) for k in ks])
    rank = int(np.linalg.matrix_rank(vals, tol=1e-9 * max(1.0, float(np.max(np.abs(vals))))))
    out.append(make_check("S-spanning", {"radius": 2}, float(rank), float(rep.dim_V), tolerance))
    return out


def _box(n, r):
    axes = [np.arange(-r, r + 1)] * n
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n).astype(float)


def check_basepoint_invariance(rep, lattice, z, u, tolerance=None) -> IdentityCheck:
    """theta(z, u) equals the normalized theta at (z, psi(e)^-1 u)."""
    tol = DEFAULT_TOLERANCES["basepoint"] if tolerance is None else tolerance
    u = _vec(u, rep.dim_U)
    nrep, nlat = normalize_basepoint(rep, lattice)
    a = theta_eval(rep, lattice, z, u, _eval_tol(tol))
    b = theta_eval(nrep, nlat, z, basepoint_u_map(rep) @ u, _eval_tol(tol))
    return make_check("basepoint", {"z": _vec(z), "u": u}, a.value, b.value, tol, (a.tail_bound, b.tail_bound))


def check_fourier(rep, lattice, z, k, tolerance=None) -> IdentityCheck:
    """Quadrature Fourier coefficient at l = D k (D the dual basis) against
    exp(i pi rho(psi(z) l, l)); the grid-doubling difference is in ``extra``."""
    tol = DEFAULT_TOLERANCES["fourier"] if tolerance is None else tolerance
    l = dual_lattice(lattice, rep.rho).basis @ np.asarray(k, float)
    coarse = fourier_coefficient(rep, lattice, z, l, 256)
    fine = fourier_coefficient(rep, lattice, z, l, 512)
    expected = cmath.exp(1j * math.pi * complex((rep.psi(z) @ l) @ rep.rho @ l))
    return make_check("fourier", {"z": _vec(z), "k": np.asarray(k)}, coarse, expected, tol,
                      extra={"richardson": abs(fine - coarse)})


def check_tail_stability(rep, lattice, z, u, tol: float) -> IdentityCheck:
    """|theta(tol) - theta(tol / 100)| <= tol."""
    a = theta_eval(rep, lattice, z, u, tol)
    b = theta_eval(rep, lattice, z, u, tol / 100)
    return make_check("tail-stability", {"z": _vec(z), "u": _vec(u), "tol": tol}, a.value, b.value, tol,
                      absolute=True, extra={"points": [a.points_summed, b.points_summed]})


def lattice_points(lattice: Lattice, bound: float, limit: int = 10**5) -> np.ndarray:
    """Lattice vectors with rho-norm squared at most ``bound``, lexicographic."""
    ks, _ = enumerate_coefficients(lattice.gram, bound, limit)
    return ks.astype(float) @ lattice.basis.T
