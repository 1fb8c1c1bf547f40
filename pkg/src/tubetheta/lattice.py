"""Lattices in U_hat and V.

Bases are stored column-wise. Whenever the basis and the Gram matrix are
rational, an exact copy (tuples of :class:`fractions.Fraction`) is kept and
all integrality statements (dual lattices, membership, the period lattice)
are decided in exact arithmetic. Floats are accepted as rationals only when
they round-trip through a fraction with denominator at most ``10**9``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

import numpy as np

from . import kernels
from .errors import NotInvertibleError, UnsupportedConfiguration

MAX_DENOMINATOR = 10**6

Matrix = tuple  # tuple of row tuples of Fraction


# -- exact helpers -------------------------------------------------------------


def to_fraction(x) -> Fraction:
    """Exact rational for ints, Fractions, rational strings and clean floats."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise UnsupportedConfiguration(f"not a rational number: {x!r}") from None
    if isinstance(x, (complex, np.complexfloating)):
        if x.imag != 0:
            raise UnsupportedConfiguration(f"complex entry {x!r} in a real lattice datum")
        x = x.real
    xf = float(x)
    if not math.isfinite(xf):
        raise UnsupportedConfiguration(f"non-finite entry {x!r}")
    fr = Fraction(xf).limit_denominator(MAX_DENOMINATOR)
    if abs(float(fr) - xf) > 4 * np.finfo(float).eps * max(1.0, abs(xf)):
        raise UnsupportedConfiguration(f"entry {x!r} is not recognisably rational")
    return fr


def to_fraction_matrix(M) -> Matrix:
    if isinstance(M, tuple) and M and isinstance(M[0], tuple) and M[0] and isinstance(M[0][0], Fraction):
        return M
    M = M.tolist() if isinstance(M, np.ndarray) else M
    return tuple(tuple(to_fraction(x) for x in row) for row in M)


def try_fraction_matrix(M) -> Optional[Matrix]:
    try:
        return to_fraction_matrix(M)
    except UnsupportedConfiguration:
        return None


def mat_float(M: Matrix) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in M], dtype=float)


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    Bt = tuple(zip(*B))
    return tuple(tuple(sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in Bt) for row in A)


def mat_t(A: Matrix) -> Matrix:
    return tuple(zip(*A))


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def exact_inverse(A: Matrix) -> Matrix:
    """Gauss-Jordan inverse over Q."""
    n = len(A)
    M = [list(row) + list(e) for row, e in zip(A, identity(n))]
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            raise NotInvertibleError("singular matrix", Fraction(0))
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [x / piv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return tuple(tuple(row[n:]) for row in M)


def exact_det(A: Matrix) -> Fraction:
    n = len(A)
    M = [list(r) for r in A]
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            if M[r][c] != 0:
                f = M[r][c] / M[c][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return det


def is_integral(A: Matrix) -> bool:
    return all(x.denominator == 1 for row in A for x in row)


def hnf_rows(rows) -> list:
    """Row Hermite normal form of an integer matrix; returns the nonzero rows.

    The rows of the result form a basis of the Z-span of the input rows,
    upper triangular with positive pivots and reduced entries above them.
    """
    A = [[int(x) for x in r] for r in rows]
    if not A:
        return []
    m, n = len(A), len(A[0])
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if A[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[p] = A[p], A[r]
            clean = True
            for i in range(r + 1, m):
                if A[i][c]:
                    q = A[i][c] // A[r][c]
                    A[i] = [x - q * y for x, y in zip(A[i], A[r])]
                    if A[i][c]:
                        clean = False
            if clean:
                break
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-x for x in A[r]]
        for i in range(r):
            q = A[i][c] // A[r][c]
            if q:
                A[i] = [x - q * y for x, y in zip(A[i], A[r])]
        r += 1
    return A[:r]


def rational_row_basis(rows) -> list:
    """Basis (HNF) of the Z-module spanned by rational row vectors."""
    rows = [[to_fraction(x) for x in r] for r in rows]
    den = 1
    for r in rows:
        for x in r:
            den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [[int(x * den) for x in r] for r in rows]
    return [[Fraction(x, den) for x in r] for r in hnf_rows(ints)]


# -- lattices --------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Lattice:
    """Full-rank lattice with basis columns in ambient coordinates.

    ``rho`` is the Gram matrix of the ambient bilinear form, used for duals,
    covolumes and default enumeration norms.
    """

    basis: np.ndarray
    rho: np.ndarray
    exact_basis: Optional[Matrix] = None
    exact_rho: Optional[Matrix] = None

    def __post_init__(self):
        B = np.array(self.basis, dtype=float)
        R = np.array(self.rho, dtype=float)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise ValueError("lattice basis must be square")
        if R.shape != B.shape:
            raise ValueError("rho Gram has the wrong dimension")
        if self.exact_basis is not None:
            if exact_det(self.exact_basis) == 0:
                raise NotInvertibleError("lattice basis is singular", Fraction(0))
        elif abs(np.linalg.det(B)) <= 1e-14 * max(1.0, float(np.max(np.abs(B)))) ** B.shape[0]:
            raise NotInvertibleError("lattice basis is singular", float(np.linalg.det(B)))
        np.linalg.cholesky(B.T @ R @ B)
        for name, arr in (("basis", B), ("rho", R)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_columns(cls, basis, rho=None) -> "Lattice":
        """Build from a square array whose columns are the basis vectors.

        Entries may be ints, floats, Fractions or rational strings such as
        ``"3/2"``; ``rho`` defaults to the identity.
        """
        raw = np.array(basis, dtype=object)
        if raw.size == 1:
            raw = raw.reshape(1, 1)
        n = raw.shape[0]
        if rho is None:
            rho = identity(n)
        eb = try_fraction_matrix(raw.tolist())
        er = try_fraction_matrix(rho if isinstance(rho, tuple) else np.array(rho, dtype=object).tolist())
        fb = mat_float(eb) if eb is not None else np.array(raw, dtype=float)
        fr = mat_float(er) if er is not None else np.array(rho, dtype=float)
        return cls(fb, fr, eb, er)

    @classmethod
    def from_rows(cls, vectors, rho=None) -> "Lattice":
        """Build from a list of basis vectors."""
        arr = np.array(vectors, dtype=object)
        return cls.from_columns(arr.T, rho)

    @classmethod
    def standard(cls, n: int, scale=1, rho=None) -> "Lattice":
        s = to_fraction(scale)
        return cls.from_columns(tuple(tuple(s if i == j else Fraction(0) for j in range(n)) for i in range(n)), rho)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def is_exact(self) -> bool:
        return self.exact_basis is not None and self.exact_rho is not None

    @property
    def gram(self) -> np.ndarray:
        """rho-Gram matrix of the basis, ``B^T rho B``."""
        if self.is_exact:
            return mat_float(self.exact_gram)
        G = self.basis.T @ self.rho @ self.basis
        return (G + G.T) / 2

    @property
    def exact_gram(self) -> Matrix:
        B = self.exact_basis
        return mat_mul(mat_mul(mat_t(B), self.exact_rho), B)

    def with_rho(self, rho) -> "Lattice":
        er = try_fraction_matrix(np.array(rho, dtype=object).tolist()) if not isinstance(rho, tuple) else rho
        fr = mat_float(er) if er is not None else np.array(rho, float)
        return Lattice(self.basis, fr, self.exact_basis, er)

    def coordinates(self, v) -> np.ndarray:
        """Coefficients of v in the basis (floats)."""
        return np.linalg.solve(self.basis, np.asarray(v))

    def contains(self, v, tol: float = 1e-9) -> bool:
        """Membership test; exact when both the lattice and ``v`` are rational."""
        if self.exact_basis is not None:
            try:
                ev = tuple((to_fraction(x),) for x in np.asarray(v, dtype=object).ravel().tolist())
            except UnsupportedConfiguration:
                ev = None
            if ev is not None:
                return is_integral(mat_mul(exact_inverse(self.exact_basis), ev))
        c = self.coordinates(np.asarray(v, dtype=float))
        return bool(np.all(np.abs(c - np.round(c)) <= tol))

    def canonical_basis(self) -> Matrix:
        """Basis in column Hermite normal form (exact lattices only)."""
        if self.exact_basis is None:
            raise UnsupportedConfiguration("canonical bases need an exact lattice")
        rows = rational_row_basis(mat_t(self.exact_basis))
        return mat_t(tuple(tuple(r) for r in rows))

    def same_as(self, other: "Lattice", tol: float = 1e-9) -> bool:
        """Equality as point sets: the change of basis is unimodular."""
        if self.dim != other.dim:
            return False
        if self.exact_basis is not None and other.exact_basis is not None:
            T = mat_mul(exact_inverse(self.exact_basis), other.exact_basis)
            return is_integral(T) and abs(exact_det(T)) == 1
        T = np.linalg.solve(self.basis, other.basis)
        return bool(np.all(np.abs(T - np.round(T)) <= tol) and abs(abs(np.linalg.det(np.round(T))) - 1) < 0.5)

    def transform(self, M, rho=None, exact_map: Optional[Matrix] = None) -> "Lattice":
        """Image ``M Lambda``, optionally re-equipped with a new Gram ``rho``."""
        new_rho = self.rho if rho is None else np.asarray(rho, float)
        exact_rho = self.exact_rho if rho is None else try_fraction_matrix(np.asarray(rho, dtype=object).tolist())
        if exact_map is None and self.exact_basis is not None:
            exact_map = try_fraction_matrix(np.asarray(M, dtype=object).tolist())
        if exact_map is not None and self.exact_basis is not None:
            eb = mat_mul(exact_map, self.exact_basis)
            return Lattice(mat_float(eb), new_rho if exact_rho is None else mat_float(exact_rho), eb, exact_rho)
        return Lattice(np.asarray(M, float) @ self.basis, new_rho, None, exact_rho)

    def scaled(self, t) -> "Lattice":
        """The lattice ``t * Lambda``."""
        return self.transform(np.eye(self.dim) * float(t))

    def to_dict(self) -> dict:
        if self.exact_basis is not None:
            cols = [[str(self.exact_basis[i][j]) for i in range(self.dim)] for j in range(self.dim)]
        else:
            cols = [[repr(float(self.basis[i, j])) for i in range(self.dim)] for j in range(self.dim)]
        return {"basis_vectors": cols}


def dual_lattice(lat: Lattice, rho=None) -> Lattice:
    """All x with rho(lat, x) in Z; basis ``D = rho^-1 B^-T`` so ``D^T rho B = I``."""
    if rho is not None:
        lat = lat.with_rho(rho)
    if lat.is_exact:
        B, R = lat.exact_basis, lat.exact_rho
        D = mat_mul(exact_inverse(R), mat_t(exact_inverse(B)))
        return Lattice(mat_float(D), lat.rho, D, R)
    D = np.linalg.solve(lat.rho, np.linalg.inv(lat.basis).T)
    return Lattice(D, lat.rho, None, lat.exact_rho)


def rho_adjoint(M, rho):
    """``rho^-1 M^T rho``; exact when both are exact matrices."""
    if isinstance(M, tuple) and isinstance(rho, tuple):
        return mat_mul(exact_inverse(rho), mat_mul(mat_t(M), rho))
    M = np.asarray(M, float)
    return np.linalg.solve(np.asarray(rho, float), M.T @ np.asarray(rho, float))


def transform_lattice(lat: Lattice, M) -> Lattice:
    """The image lattice ``M Lambda`` (same rho)."""
    Mf = np.asarray(mat_float(M) if isinstance(M, tuple) else M, float)
    if abs(np.linalg.det(Mf)) < 1e-14:
        raise NotInvertibleError("transformation is singular", float(np.linalg.det(Mf)))
    return lat.transform(Mf, exact_map=M if isinstance(M, tuple) else None)


def check_dual_transform(lat: Lattice, M) -> bool:
    """Verify ``(M Lambda)^rho == (M^rho)^-1 Lambda^rho`` as lattices."""
    left = dual_lattice(transform_lattice(lat, M))
    exact = lat.is_exact and (isinstance(M, tuple) or try_fraction_matrix(np.asarray(M, dtype=object).tolist()) is not None)
    if exact:
        EM = M if isinstance(M, tuple) else to_fraction_matrix(np.asarray(M, dtype=object).tolist())
        adj_inv = exact_inverse(rho_adjoint(EM, lat.exact_rho))
        right = transform_lattice(dual_lattice(lat), adj_inv)
    else:
        adj = rho_adjoint(mat_float(M) if isinstance(M, tuple) else M, lat.rho)
        right = transform_lattice(dual_lattice(lat), np.linalg.inv(adj))
    return left.same_as(right)


def covolume(lat: Lattice, rho=None) -> float:
    """Volume of a fundamental cell in rho-orthonormal coordinates."""
    if rho is not None:
        lat = lat.with_rho(rho)
    if lat.is_exact:
        return math.sqrt(exact_det(lat.exact_gram))
    return float(math.sqrt(np.linalg.det(lat.gram)))


def min_norm_lower_bound(gram: np.ndarray) -> float:
    """Lower bound on the shortest nonzero vector length: min Gram-Schmidt norm."""
    R = np.linalg.cholesky(gram).T
    return float(np.min(np.abs(np.diag(R))))


# -- enumeration ------------------------------------------------------------------


@dataclass(frozen=True)
class EnumerationResult:
    coeffs: np.ndarray  # integer coefficient vectors, one per row
    points: np.ndarray  # ambient coordinates, one per row
    norms: np.ndarray   # Q(point)

    def __len__(self):
        return self.coeffs.shape[0]


def lex_order(coeffs: np.ndarray) -> np.ndarray:
    if coeffs.shape[0] == 0:
        return np.zeros(0, int)
    return np.lexsort(coeffs.T[::-1])


def norm_lex_order(coeffs: np.ndarray, norms: np.ndarray) -> np.ndarray:
    """Ascending norm, ties broken lexicographically in the coefficients."""
    if coeffs.shape[0] == 0:
        return np.zeros(0, int)
    return np.lexsort(tuple(coeffs.T[::-1]) + (norms,))


def enumerate_coefficients(gram, bound, max_points=10**7, kernel=None, outer=None):
    """Integer vectors k with ``k^T gram k <= bound`` in lexicographic order.

    Returns ``(coeffs, norms)``. Raises :class:`OverflowError` beyond
    ``max_points``.
    """
    gram = np.asarray(gram, float)
    n = gram.shape[0]
    if bound < 0:
        return np.zeros((0, n), np.int64), np.zeros(0)
    R = np.linalg.cholesky(gram).T
    k = kernels.get(kernel)
    if outer is None:
        lo, hi = -(2**62), 2**62
    else:
        lo, hi = outer
    ks, norms, overflow = k.enumerate_points(gram, R, float(bound), int(lo), int(hi), int(max_points))
    if overflow:
        raise OverflowError(f"more than {max_points} lattice points")
    order = lex_order(ks)
    return ks[order], norms[order]


def outer_range(gram, bound):
    """Range of the last coefficient over the ellipsoid ``k^T gram k <= bound``."""
    gram = np.asarray(gram, float)
    n = gram.shape[0]
    w = math.sqrt(max(bound, 0.0) * np.linalg.inv(gram)[n - 1, n - 1])
    return -int(math.floor(w + 1e-9)), int(math.floor(w + 1e-9))


def enumerate_ellipsoid(lat: Lattice, Q=None, bound: float = 1.0, max_points=10**7, kernel=None) -> EnumerationResult:
    """Lattice points l with ``l^T Q l <= bound``; Q defaults to rho.

    Each point appears once, in lexicographic order of its coefficients.
    """
    Q = lat.rho if Q is None else np.asarray(Q, float)
    gram = lat.basis.T @ Q @ lat.basis
    gram = (gram + gram.T) / 2
    if lat.exact_basis is not None:
        eq = try_fraction_matrix(np.asarray(Q, dtype=object).tolist())
        if eq is not None:
            gram = mat_float(mat_mul(mat_mul(mat_t(lat.exact_basis), eq), lat.exact_basis))
    ks, norms = enumerate_coefficients(gram, bound, max_points, kernel)
    pts = ks.astype(float) @ lat.basis.T
    return EnumerationResult(ks, pts, norms)


def iter_ellipsoid(lat: Lattice, Q=None, bound: float = 1.0, kernel=None) -> Iterator[EnumerationResult]:
    """Stream :func:`enumerate_ellipsoid` one slab (last coefficient) at a time.

    Concatenating the slabs gives every point exactly once; slabs come in
    ascending order of the last coefficient.
    """
    Q = lat.rho if Q is None else np.asarray(Q, float)
    gram = lat.basis.T @ Q @ lat.basis
    gram = (gram + gram.T) / 2
    lo, hi = outer_range(gram, bound)
    for c in range(lo, hi + 1):
        ks, norms = enumerate_coefficients(gram, bound, kernel=kernel, outer=(c, c))
        if ks.shape[0]:
            yield EnumerationResult(ks, ks.astype(float) @ lat.basis.T, norms)


# -- period lattice ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PeriodLattice:
    """The lattice of real translations z -> z + k leaving theta invariant.

    ``basis`` holds exact basis columns in V coordinates, ``functionals``
    the rational row vectors whose values on x must be integers.
    """

    basis: Matrix
    rank: int
    functionals: tuple

    @property
    def float_basis(self) -> np.ndarray:
        return mat_float(self.basis)

    @property
    def vectors(self) -> list:
        """Basis vectors as lists of Fractions."""
        return [list(col) for col in mat_t(self.basis)]

    def contains(self, x) -> bool:
        ex = [to_fraction(v) for v in np.asarray(x, dtype=object).ravel().tolist()]
        return all(sum((f * v for f, v in zip(row, ex)), Fraction(0)).denominator == 1 for row in self.functionals)

    def to_dict(self) -> dict:
        return {"rank": self.rank, "basis_vectors": [[str(x) for x in v] for v in self.vectors]}


def period_lattice(rep, lat: Lattice, verify_radius: int = 2) -> PeriodLattice:
    """{x in V : rho(psi(x) l, l) in 2Z for all l in the rho-dual of lat}.

    With dual basis b_i the condition reads ``f_ii(x) / 2 in Z`` and
    ``f_ij(x) in Z`` for ``f_ij(x) = rho(psi(x) b_i, b_j)``. The Z-span of
    these functionals is put in Hermite normal form; the period lattice is
    its dual under the coordinate pairing. Membership is re-verified exactly
    on all l with dual coefficients bounded by ``verify_radius``.
    """
    psi = [to_fraction_matrix(P) for P in np.asarray(rep.psi_basis)]
    rho = to_fraction_matrix(np.asarray(rep.rho))
    lat = lat.with_rho(rho)
    if not lat.is_exact:
        raise UnsupportedConfiguration("period lattice needs a rational lattice basis")
    D = dual_lattice(lat).exact_basis
    cols = mat_t(D)
    n = len(cols)
    dim_v = len(psi)

    def f(i, j):
        bi = tuple((x,) for x in cols[i])
        bj = tuple((x,) for x in cols[j])
        return [mat_mul(mat_t(bj), mat_mul(rho, mat_mul(P, bi)))[0][0] for P in psi]

    rows = []
    for i in range(n):
        rows.append([x / 2 for x in f(i, i)])
        for j in range(i + 1, n):
            rows.append(f(i, j))
    span = rational_row_basis(rows)
    if len(span) < dim_v:
        raise UnsupportedConfiguration("psi is not injective: translation periods form a subspace")
    Minv = exact_inverse(tuple(tuple(r) for r in span))
    # canonical form of the result
    canon = mat_t(tuple(tuple(r) for r in rational_row_basis(mat_t(Minv))))
    result = PeriodLattice(canon, dim_v, tuple(tuple(r) for r in span))
    _verify_period_lattice(result, psi, rho, cols, verify_radius)
    return result


def _verify_period_lattice(pl, psi, rho, dual_cols, radius):
    import itertools

    n = len(dual_cols)
    for x in pl.vectors:
        P = tuple(
            tuple(sum((xk * Pk[a][b] for xk, Pk in zip(x, psi)), Fraction(0)) for b in range(n))
            for a in range(n)
        )
        for c in itertools.product(range(-radius, radius + 1), repeat=n):
            l = tuple((sum((ci * col[a] for ci, col in zip(c, dual_cols)), Fraction(0)),) for a in range(n))
            val = mat_mul(mat_t(l), mat_mul(rho, mat_mul(P, l)))[0][0]
            if val.denominator != 1 or val.numerator % 2:
                raise AssertionError(f"period lattice vector {x} fails at l={c}: {val}")
