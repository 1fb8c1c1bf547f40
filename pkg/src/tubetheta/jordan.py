"""Euclidean Jordan algebras in coordinates.

Supported kinds
---------------
RealLine
    The reals with the ordinary product.
SymReal(n)
    Real symmetric n x n matrices, ``a o b = (ab + ba)/2``.
HermComplex(n)
    Complex Hermitian n x n matrices, same product.
SpinFactor(d)
    ``R x R^(d-1)`` with ``(l, v) o (m, w) = (lm + <v, w>, lw + mv)``.
DirectSum(...)
    Componentwise structure.
Custom(dim)
    Bare coordinate space without a product, for explicitly given
    representations.

Complexified elements use the same coordinate layout with complex scalars,
so every operation below is the complex-bilinear extension of the real one.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DescriptorMismatch, NotInvertibleError, UnsupportedConfiguration

KINDS = ("RealLine", "SymReal", "HermComplex", "SpinFactor", "DirectSum", "Custom")

#: Relative threshold on the Jordan determinant for invertibility.
INVERTIBILITY_THRESHOLD = 1e-12


@dataclass(frozen=True)
class AlgebraDescriptor:
    kind: str
    n: int = 1
    parts: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown algebra kind {self.kind!r}")
        if self.kind == "DirectSum":
            if not self.parts:
                raise ValueError("DirectSum needs at least one summand")
        elif self.kind == "SpinFactor" and self.n < 2:
            raise ValueError("SpinFactor(d) needs d >= 2")
        elif self.n < 1:
            raise ValueError(f"{self.kind} needs a positive size parameter")

    @property
    def dim(self) -> int:
        k, n = self.kind, self.n
        if k == "RealLine":
            return 1
        if k == "SymReal":
            return n * (n + 1) // 2
        if k == "HermComplex":
            return n * n
        if k in ("SpinFactor", "Custom"):
            return n
        return sum(p.dim for p in self.parts)

    @property
    def rank(self) -> int:
        k = self.kind
        if k == "RealLine":
            return 1
        if k in ("SymReal", "HermComplex"):
            return self.n
        if k == "SpinFactor":
            return 2
        if k == "Custom":
            raise UnsupportedConfiguration("Custom descriptors carry no Jordan structure")
        return sum(p.rank for p in self.parts)

    @property
    def has_product(self) -> bool:
        if self.kind == "DirectSum":
            return all(p.has_product for p in self.parts)
        return self.kind != "Custom"

    @property
    def labels(self) -> tuple:
        k, n = self.kind, self.n
        if k == "RealLine":
            return ("x",)
        if k == "SymReal":
            return tuple(f"x{i + 1}{j + 1}" for i in range(n) for j in range(i, n))
        if k == "HermComplex":
            out = []
            for i in range(n):
                for j in range(i, n):
                    if i == j:
                        out.append(f"x{i + 1}{i + 1}")
                    else:
                        out += [f"re{i + 1}{j + 1}", f"im{i + 1}{j + 1}"]
            return tuple(out)
        if k == "SpinFactor":
            return ("lambda",) + tuple(f"v{i + 1}" for i in range(n - 1))
        if k == "Custom":
            return tuple(f"c{i + 1}" for i in range(n))
        return tuple(f"s{p}.{lab}" for p, d in enumerate(self.parts) for lab in d.labels)

    def slices(self):
        """Coordinate slices of the summands (a single slice for simple kinds)."""
        if self.kind != "DirectSum":
            return [slice(0, self.dim)]
        out, start = [], 0
        for p in self.parts:
            out.append(slice(start, start + p.dim))
            start += p.dim
        return out

    def to_dict(self) -> dict:
        if self.kind == "DirectSum":
            return {"kind": "DirectSum", "parts": [p.to_dict() for p in self.parts]}
        if self.kind == "RealLine":
            return {"kind": "RealLine"}
        key = "d" if self.kind == "SpinFactor" else ("dim" if self.kind == "Custom" else "n")
        return {"kind": self.kind, key: self.n}

    def __str__(self):
        if self.kind == "RealLine":
            return "RealLine"
        if self.kind == "DirectSum":
            return "DirectSum(" + ", ".join(map(str, self.parts)) + ")"
        return f"{self.kind}({self.n})"


def RealLine() -> AlgebraDescriptor:
    return AlgebraDescriptor("RealLine")


def SymReal(n: int) -> AlgebraDescriptor:
    return AlgebraDescriptor("SymReal", n)


def HermComplex(n: int) -> AlgebraDescriptor:
    return AlgebraDescriptor("HermComplex", n)


def SpinFactor(d: int) -> AlgebraDescriptor:
    return AlgebraDescriptor("SpinFactor", d)


def DirectSum(*parts: AlgebraDescriptor) -> AlgebraDescriptor:
    return AlgebraDescriptor("DirectSum", 1, tuple(parts))


def Custom(dim: int) -> AlgebraDescriptor:
    return AlgebraDescriptor("Custom", dim)


def descriptor_from_dict(table: dict) -> AlgebraDescriptor:
    kind = table.get("kind")
    if kind == "RealLine":
        return RealLine()
    if kind in ("SymReal", "HermComplex"):
        return AlgebraDescriptor(kind, int(table["n"]))
    if kind == "SpinFactor":
        return SpinFactor(int(table["d"]))
    if kind == "Custom":
        return Custom(int(table["dim"]))
    if kind == "DirectSum":
        return DirectSum(*(descriptor_from_dict(p) for p in table["parts"]))
    raise ValueError(f"unknown algebra kind {kind!r}")


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """An element of V (real coordinates) or of its complexification."""

    descriptor: AlgebraDescriptor
    coords: np.ndarray = field(repr=True)

    def __post_init__(self):
        c = np.asarray(self.coords)
        if c.ndim != 1 or c.shape[0] != self.descriptor.dim:
            raise DescriptorMismatch(
                f"{self.descriptor} needs {self.descriptor.dim} coordinates, got shape {c.shape}"
            )
        if np.iscomplexobj(c):
            c = c.astype(complex)
            if not np.any(c.imag):
                c = c.real.copy()
        else:
            c = c.astype(float)
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.coords)

    @property
    def real(self) -> "AlgebraElement":
        return AlgebraElement(self.descriptor, self.coords.real)

    @property
    def imag(self) -> "AlgebraElement":
        return AlgebraElement(self.descriptor, np.imag(self.coords))

    def _check(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        if other.descriptor != self.descriptor:
            raise DescriptorMismatch(f"{self.descriptor} vs {other.descriptor}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return AlgebraElement(self.descriptor, self.coords + other.coords)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return AlgebraElement(self.descriptor, self.coords - other.coords)

    def __neg__(self):
        return AlgebraElement(self.descriptor, -self.coords)

    def __mul__(self, scalar):
        if isinstance(scalar, AlgebraElement):
            return NotImplemented
        return AlgebraElement(self.descriptor, self.coords * scalar)

    __rmul__ = __mul__

    def __repr__(self):
        return f"AlgebraElement({self.descriptor}, {self.coords.tolist()})"


def element(descriptor: AlgebraDescriptor, coords) -> AlgebraElement:
    return AlgebraElement(descriptor, np.asarray(coords))


# -- matrix realisations -----------------------------------------------------


@lru_cache(maxsize=None)
def _matrix_basis(desc: AlgebraDescriptor):
    """Basis matrices E_k and coordinate functionals F_k for a matrix kind.

    ``X(c) = sum_k c_k E_k`` and ``c_k = sum_ij F_k[i, j] X[i, j]``, both
    complex linear, so complex coordinates map onto all of M_n(C).
    """
    n = desc.n
    E, F = [], []
    for i in range(n):
        for j in range(i, n):
            if i == j:
                e = np.zeros((n, n), complex)
                e[i, i] = 1
                E.append(e)
                F.append(e.copy())
                continue
            e = np.zeros((n, n), complex)
            e[i, j] = e[j, i] = 1
            f = np.zeros((n, n), complex)
            f[i, j] = f[j, i] = 0.5
            E.append(e)
            F.append(f)
            if desc.kind == "HermComplex":
                e = np.zeros((n, n), complex)
                e[i, j], e[j, i] = 1j, -1j
                f = np.zeros((n, n), complex)
                f[i, j], f[j, i] = -0.5j, 0.5j
                E.append(e)
                F.append(f)
    E, F = np.array(E), np.array(F)
    E.setflags(write=False)
    F.setflags(write=False)
    return E, F


def to_matrix(desc: AlgebraDescriptor, coords) -> np.ndarray:
    if desc.kind not in ("SymReal", "HermComplex"):
        raise UnsupportedConfiguration(f"{desc} is not a matrix kind")
    E, _ = _matrix_basis(desc)
    M = np.tensordot(np.asarray(coords), E, axes=1)
    if desc.kind == "SymReal" and not np.iscomplexobj(coords):
        return M.real
    return M


def from_matrix(desc: AlgebraDescriptor, M) -> np.ndarray:
    if desc.kind not in ("SymReal", "HermComplex"):
        raise UnsupportedConfiguration(f"{desc} is not a matrix kind")
    _, F = _matrix_basis(desc)
    c = np.einsum("kij,ij->k", F, np.asarray(M, dtype=complex))
    return c


def _realify_if_possible(c, *inputs):
    if all(not np.iscomplexobj(x) for x in inputs):
        return np.real(c)
    return c


def _same(a: AlgebraElement, b: AlgebraElement):
    if a.descriptor != b.descriptor:
        raise DescriptorMismatch(f"{a.descriptor} vs {b.descriptor}")
    if not a.descriptor.has_product:
        raise UnsupportedConfiguration(f"{a.descriptor} has no Jordan product")


def _product_coords(desc, x, y):
    k = desc.kind
    if k == "RealLine":
        return x * y
    if k in ("SymReal", "HermComplex"):
        X, Y = to_matrix(desc, x), to_matrix(desc, y)
        return _realify_if_possible(from_matrix(desc, (X @ Y + Y @ X) / 2), x, y)
    if k == "SpinFactor":
        lam, v = x[0], x[1:]
        mu, w = y[0], y[1:]
        return np.concatenate([[lam * mu + v @ w], lam * w + mu * v])
    return np.concatenate(
        [_product_coords(p, x[s], y[s]) for p, s in zip(desc.parts, desc.slices())]
    )


def jordan_product(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    _same(a, b)
    return AlgebraElement(a.descriptor, _product_coords(a.descriptor, a.coords, b.coords))


def _unit_coords(desc):
    k = desc.kind
    if k == "RealLine":
        return np.ones(1)
    if k in ("SymReal", "HermComplex"):
        return from_matrix(desc, np.eye(desc.n)).real
    if k == "SpinFactor":
        out = np.zeros(desc.n)
        out[0] = 1.0
        return out
    if k == "Custom":
        raise UnsupportedConfiguration("Custom descriptors have no unit")
    return np.concatenate([_unit_coords(p) for p in desc.parts])


def unit(desc: AlgebraDescriptor) -> AlgebraElement:
    return AlgebraElement(desc, _unit_coords(desc))


def _det_coords(desc, x):
    k = desc.kind
    if k == "RealLine":
        return x[0]
    if k in ("SymReal", "HermComplex"):
        d = np.linalg.det(to_matrix(desc, x))
        return d.real if not np.iscomplexobj(x) else d
    if k == "SpinFactor":
        return x[0] * x[0] - x[1:] @ x[1:]
    if k == "Custom":
        raise UnsupportedConfiguration("Custom descriptors have no determinant")
    out = 1.0
    for p, s in zip(desc.parts, desc.slices()):
        out = out * _det_coords(p, x[s])
    return out


def determinant(a: AlgebraElement):
    """Jordan determinant (generic norm); multiplicative over direct sums."""
    return _det_coords(a.descriptor, a.coords)


def _inverse_coords(desc, x, threshold):
    k = desc.kind
    scale = max(float(np.max(np.abs(x))), np.finfo(float).tiny)
    if k == "DirectSum":
        return np.concatenate(
            [_inverse_coords(p, x[s], threshold) for p, s in zip(desc.parts, desc.slices())]
        )
    det = _det_coords(desc, x)
    if abs(det) <= threshold * scale ** desc.rank:
        raise NotInvertibleError(f"element of {desc} is not invertible (det={det!r})", det)
    if k == "RealLine":
        return 1.0 / x
    if k in ("SymReal", "HermComplex"):
        inv = np.linalg.inv(to_matrix(desc, x))
        return _realify_if_possible(from_matrix(desc, inv), x)
    # spin factor: (l, v)^-1 = (l, -v) / (l^2 - <v, v>)
    return np.concatenate([[x[0]], -x[1:]]) / det


def inverse(a: AlgebraElement, threshold: float = INVERTIBILITY_THRESHOLD) -> AlgebraElement:
    if not a.descriptor.has_product:
        raise UnsupportedConfiguration(f"{a.descriptor} has no Jordan product")
    return AlgebraElement(a.descriptor, _inverse_coords(a.descriptor, a.coords, threshold))


@lru_cache(maxsize=None)
def trace_gram(desc: AlgebraDescriptor) -> np.ndarray:
    """Gram matrix of the trace form in the coordinate basis.

    Matrix kinds use ``trace(XY)``, the spin factor ``2(lm + <v, w>)``,
    Custom descriptors the Euclidean coordinate product.
    """
    k = desc.kind
    if k == "RealLine":
        G = np.ones((1, 1))
    elif k in ("SymReal", "HermComplex"):
        E, _ = _matrix_basis(desc)
        G = np.einsum("aij,bji->ab", E, E).real
    elif k == "SpinFactor":
        G = 2.0 * np.eye(desc.n)
    elif k == "Custom":
        G = np.eye(desc.n)
    else:
        G = np.zeros((desc.dim, desc.dim))
        for p, s in zip(desc.parts, desc.slices()):
            G[s, s] = trace_gram(p)
    G.setflags(write=False)
    return G


def trace_form(a: AlgebraElement, b: AlgebraElement):
    """The associative trace form sigma(a, b), complex bilinear."""
    if a.descriptor != b.descriptor:
        raise DescriptorMismatch(f"{a.descriptor} vs {b.descriptor}")
    out = a.coords @ trace_gram(a.descriptor) @ b.coords
    return out


@dataclass(frozen=True)
class ConeStatus:
    """Outcome of a positivity test of psi(x).

    ``inside`` means strictly inside with margin; ``boundary`` flags points
    whose smallest eigenvalue is within the relative cushion of zero.
    """

    inside: bool
    boundary: bool
    min_eigenvalue: float
    max_eigenvalue: float


def cone_status(x: AlgebraElement, rep, eps: float = 0.0) -> ConeStatus:
    if not x.is_real:
        raise ValueError("cone membership is defined for real elements only")
    lo, hi = rep.spectrum_bounds(x.coords)
    cushion = eps * max(abs(lo), abs(hi))
    inside = lo > cushion
    boundary = abs(lo) <= cushion
    return ConeStatus(bool(inside), bool(boundary), float(lo), float(hi))


def cone_contains(x: AlgebraElement, rep, eps: float = 0.0) -> bool:
    """True iff psi(x) is positive definite with relative margin ``eps``."""
    return cone_status(x, rep, eps).inside
