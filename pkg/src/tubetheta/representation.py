"""Representation data (rho, psi, e), its normalisations, and the S map.

A representation fixes a real space U_hat with a positive definite Gram
matrix ``rho`` and a linear map ``psi`` from V into the rho-self-adjoint
endomorphisms of U_hat, stored as one matrix per coordinate direction of V.
Everything extends complex-linearly to V^C and U = U_hat^C.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from . import jordan
from .errors import DomainError, UnsupportedConfiguration
from .jordan import AlgebraDescriptor, AlgebraElement, ConeStatus

#: Relative cushion separating the open cone from its boundary.
CONE_EPS = 1e-10

_SYM_TOL = 1e-12


def _coords(z) -> np.ndarray:
    if isinstance(z, AlgebraElement):
        return z.coords
    return np.asarray(z)


def clifford_generators(k: int) -> list:
    """``k`` real symmetric matrices with ``G_i G_j + G_j G_i = 2 delta_ij I``.

    Built recursively: ``[s_z, s_x]`` for k <= 2, then
    ``{g (x) s_z : g in gens(k-1)} + {I (x) s_x}`` which doubles the size.
    """
    sz = np.array([[1.0, 0.0], [0.0, -1.0]])
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    if k <= 0:
        return []
    if k <= 2:
        return [sz, sx][:k]
    prev = clifford_generators(k - 1)
    size = prev[0].shape[0]
    return [np.kron(g, sz) for g in prev] + [np.kron(np.eye(size), sx)]


def realify(M: np.ndarray) -> np.ndarray:
    """Real 2n x 2n matrix of a complex n x n matrix acting on (Re w, Im w)."""
    A, B = M.real, M.imag
    return np.block([[A, -B], [B, A]])


@dataclass(frozen=True, eq=False)
class RepresentationConfig:
    """The data (rho, psi, e) with psi self-adjoint and injective.

    ``psi_basis[k]`` is psi of the k-th coordinate basis vector of V.
    ``sigma`` is the Gram matrix of the trace form used for the S map.
    ``psi(e)`` need not be the identity; see :func:`normalize_basepoint`.
    """

    descriptor: AlgebraDescriptor
    rho: np.ndarray
    psi_basis: np.ndarray
    base_point: np.ndarray
    sigma: np.ndarray = field(default=None)
    name: str = ""

    def __post_init__(self):
        desc = self.descriptor
        rho = np.array(self.rho, dtype=float)
        psi = np.array(self.psi_basis, dtype=float)
        e = np.array(_coords(self.base_point), dtype=float)
        sigma = jordan.trace_gram(desc) if self.sigma is None else np.array(self.sigma, float)
        m = rho.shape[0]
        if rho.shape != (m, m):
            raise ValueError("rho must be square")
        if psi.shape != (desc.dim, m, m):
            raise ValueError(f"psi_basis must have shape {(desc.dim, m, m)}, got {psi.shape}")
        if e.shape != (desc.dim,):
            raise ValueError("base point has the wrong number of coordinates")
        if sigma.shape != (desc.dim, desc.dim):
            raise ValueError("sigma Gram has the wrong shape")
        scale = max(1.0, float(np.max(np.abs(rho))))
        if np.max(np.abs(rho - rho.T)) > _SYM_TOL * scale:
            raise ValueError("rho is not symmetric")
        try:
            np.linalg.cholesky(rho)
        except np.linalg.LinAlgError:
            raise ValueError("rho is not positive definite") from None
        np.linalg.cholesky(sigma)
        for k, P in enumerate(psi):
            GP = rho @ P
            if np.max(np.abs(GP - GP.T)) > _SYM_TOL * max(1.0, float(np.max(np.abs(GP)))):
                raise ValueError(f"psi of basis vector {k} is not rho-self-adjoint")
        if np.linalg.matrix_rank(psi.reshape(desc.dim, -1)) < desc.dim:
            raise ValueError("psi is not injective; reduce the domain first")
        for name, arr in (("rho", rho), ("psi_basis", psi), ("base_point", e), ("sigma", sigma)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        lo, _ = self.spectrum_bounds(e)
        if lo <= 0:
            raise ValueError("psi(e) is not positive definite; the cone is empty at e")

    # -- basic maps --------------------------------------------------------

    @property
    def dim_V(self) -> int:
        return self.descriptor.dim

    @property
    def dim_U(self) -> int:
        return self.rho.shape[0]

    @property
    def is_normalized(self) -> bool:
        return bool(np.allclose(self.psi(self.base_point), np.eye(self.dim_U), atol=1e-12, rtol=0))

    def psi(self, z) -> np.ndarray:
        """psi(z) as a matrix; complex-linear in the coordinates of z."""
        c = _coords(z)
        if c.shape != (self.dim_V,):
            raise ValueError(f"expected {self.dim_V} coordinates, got shape {c.shape}")
        return np.tensordot(c, self.psi_basis, axes=1)

    def rho_form(self, u, v):
        """Complex bilinear extension of rho."""
        return np.asarray(u) @ self.rho @ np.asarray(v)

    def adjoint(self, M: np.ndarray) -> np.ndarray:
        """rho-adjoint ``rho^-1 M^T rho`` of an endomorphism of U."""
        return np.linalg.solve(self.rho, M.T @ self.rho)

    def element(self, coords) -> AlgebraElement:
        return AlgebraElement(self.descriptor, np.asarray(coords))

    @property
    def unit(self) -> AlgebraElement:
        return AlgebraElement(self.descriptor, self.base_point)

    def spectrum(self, x) -> np.ndarray:
        """Eigenvalues of the rho-self-adjoint map psi(x), ascending."""
        P = self.psi(np.real(_coords(x)))
        M = self.rho @ P
        return scipy.linalg.eigh((M + M.T) / 2, self.rho, eigvals_only=True)

    def spectrum_bounds(self, x):
        w = self.spectrum(x)
        return float(w[0]), float(w[-1])

    @cached_property
    def _sigma_factor(self):
        return scipy.linalg.cho_factor(self.sigma)

    def to_dict(self) -> dict:
        return {
            "descriptor": self.descriptor.to_dict(),
            "rho": self.rho.tolist(),
            "psi_basis": self.psi_basis.tolist(),
            "base_point": self.base_point.tolist(),
            "sigma": self.sigma.tolist(),
        }


def natural_representation(desc: AlgebraDescriptor) -> RepresentationConfig:
    """The standard special representation of a Jordan algebra kind.

    RealLine on R, SymReal(n) on R^n, HermComplex(n) on the realification
    R^2n, SpinFactor(d) through real Clifford generators, direct sums
    blockwise. All satisfy psi(e) = I with rho the standard inner product.
    """
    psi = _natural_psi(desc)
    m = psi.shape[1]
    return RepresentationConfig(
        desc, np.eye(m), psi, jordan.unit(desc).coords, name=f"natural {desc}"
    )


def _natural_psi(desc):
    k = desc.kind
    if k == "RealLine":
        return np.ones((1, 1, 1))
    if k == "SymReal":
        E, _ = jordan._matrix_basis(desc)
        return E.real.copy()
    if k == "HermComplex":
        E, _ = jordan._matrix_basis(desc)
        return np.array([realify(e) for e in E])
    if k == "SpinFactor":
        gens = clifford_generators(desc.n - 1)
        size = gens[0].shape[0]
        return np.array([np.eye(size)] + gens)
    if k == "DirectSum":
        blocks = [_natural_psi(p) for p in desc.parts]
        m = sum(b.shape[1] for b in blocks)
        out = np.zeros((desc.dim, m, m))
        row, col = 0, 0
        for b in blocks:
            d, s = b.shape[0], b.shape[1]
            out[row:row + d, col:col + s, col:col + s] = b
            row += d
            col += s
        return out
    raise UnsupportedConfiguration(f"no natural representation for {desc}")


def custom_representation(psi_basis, rho, base_point, sigma=None, name="custom"):
    psi_basis = np.asarray(psi_basis, float)
    desc = jordan.Custom(psi_basis.shape[0])
    return RepresentationConfig(desc, rho, psi_basis, base_point, sigma=sigma, name=name)


def psi_apply(rep: RepresentationConfig, z) -> np.ndarray:
    return rep.psi(z)


# -- normalisations ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RawRepresentation:
    """Unvalidated (rho, psi, e) as it may come from a user: psi need not be
    self-adjoint or injective."""

    rho: np.ndarray
    psi_basis: np.ndarray
    base_point: np.ndarray

    def psi(self, z):
        return np.tensordot(_coords(z), np.asarray(self.psi_basis, float), axes=1)


def symmetrize_psi(raw_psi, rho) -> np.ndarray:
    """Replace each psi(x) by the average of itself and its rho-adjoint.

    The quadratic forms rho(psi(x)u, u) are unchanged; skew parts drop out.
    """
    raw_psi = np.asarray(raw_psi, float)
    rho = np.asarray(rho, float)
    adj = np.array([np.linalg.solve(rho, P.T @ rho) for P in raw_psi])
    return (raw_psi + adj) / 2


def reduce_domain(raw: RawRepresentation, tol: float = 1e-10) -> RepresentationConfig:
    """Symmetrize psi and quotient V by ker(psi).

    The kernel is exactly the lineality space of the cone, so the result has
    injective psi and a regular cone. The quotient is realised on the
    orthogonal complement of the kernel (in coordinates), with each new basis
    vector sign-normalised so that its largest entry is positive; the result
    uses a Custom descriptor.
    """
    rho = np.asarray(raw.rho, float)
    psi = symmetrize_psi(raw.psi_basis, rho)
    dim = psi.shape[0]
    A = psi.reshape(dim, -1).T
    _, s, Vt = np.linalg.svd(A)
    scale = s[0] if s.size and s[0] > 0 else 1.0
    r = int(np.sum(s > tol * scale))
    if r == 0:
        raise UnsupportedConfiguration("psi vanishes identically: the reduced space V is trivial")
    if r == dim:
        basis = np.eye(dim)
    else:
        basis = Vt[:r].T
        for j in range(r):
            col = basis[:, j]
            if col[np.argmax(np.abs(col))] < 0:
                basis[:, j] = -col
        basis[np.abs(basis) < 1e-15] = 0.0
    new_psi = np.tensordot(basis.T, psi, axes=1)
    e = np.asarray(raw.base_point, float)
    new_e = np.linalg.lstsq(basis, e, rcond=None)[0]
    return custom_representation(new_psi, rho, new_e, name="reduced")


def normalize_basepoint(rep: RepresentationConfig, lattice):
    """Rescale so that psi(e) becomes the identity.

    With ``P = psi(e) = T^rho T`` the new data are ``rho'(u, v) = rho(Tu, Tv)``
    (Gram ``rho P``), ``psi'(z) = P^-1 psi(z)`` and lattice ``P^-1 Lambda``.
    Theta values are preserved as ``theta'(z, P^-1 u) = theta(z, u)``; use
    :func:`basepoint_u_map` to move u across.
    """
    P = rep.psi(rep.base_point)
    lo, _ = rep.spectrum_bounds(rep.base_point)
    if lo <= 0:
        raise DomainError("psi(e) is not positive definite", min_eigenvalue=lo)
    Pinv = np.linalg.inv(P)
    new_rho = rep.rho @ P
    new_rho = (new_rho + new_rho.T) / 2
    new_psi = np.array([Pinv @ M for M in rep.psi_basis])
    new_rep = RepresentationConfig(
        rep.descriptor, new_rho, new_psi, rep.base_point, sigma=rep.sigma,
        name=(rep.name + " normalized").strip(),
    )
    new_lattice = lattice.transform(Pinv, rho=new_rho, exact_map=_exact_inverse_or_none(P))
    return new_rep, new_lattice


def basepoint_u_map(rep: RepresentationConfig) -> np.ndarray:
    """Linear map taking u of the raw configuration to u of the normalized one."""
    return np.linalg.inv(rep.psi(rep.base_point))


def _exact_inverse_or_none(P):
    from .lattice import exact_inverse, try_fraction_matrix

    F = try_fraction_matrix(P)
    return None if F is None else exact_inverse(F)


# -- the S map and domain membership ------------------------------------------


def s_form(rep: RepresentationConfig, u, v) -> np.ndarray:
    """Coordinates of S(u, v), defined by sigma(S(u, v), x) = rho(psi(x)u, conj v)."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    # rho(P u, w) = (P u)^T rho w
    rhs = np.einsum("kij,j,il,l->k", rep.psi_basis, u, rep.rho, np.conj(v))
    return scipy.linalg.cho_solve(rep._sigma_factor, rhs)


def _im_minus_s(rep, z, u):
    y = np.imag(_coords(z)).astype(float)
    if u is not None:
        y = y - np.real(s_form(rep, u, u))
    return rep.element(y)


def siegel_status(rep: RepresentationConfig, z, u, eps: float = CONE_EPS) -> ConeStatus:
    """Membership of Im z - S(u, u) in the (self-dual, normalized) cone."""
    return jordan.cone_status(_im_minus_s(rep, z, u), rep, eps)


def siegel_contains(rep: RepresentationConfig, z, u, eps: float = CONE_EPS) -> bool:
    return siegel_status(rep, z, u, eps).inside


def tube_status(rep: RepresentationConfig, z, eps: float = CONE_EPS) -> ConeStatus:
    return jordan.cone_status(_im_minus_s(rep, z, None), rep, eps)


def tube_contains(rep: RepresentationConfig, z, eps: float = CONE_EPS) -> bool:
    return tube_status(rep, z, eps).inside
