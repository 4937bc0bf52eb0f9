"""
Ternary Cubic Forms
Exact polarization algebra for ternary cubics and the Hesse family F_k.

A cubic is stored by its ten coefficients in the fixed order
x^3, x^2y, x^2z, xy^2, xyz, xz^2, y^3, y^2z, yz^2, z^3 and carries the
symmetric trilinear form T with T(D,D,D) = F(D).
"""

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import permutations, product
from typing import List, Sequence, Tuple

import numpy as np
from scipy import optimize

from .exceptions import DegenerateParameter, DomainError, RankError
from .tolerances import DEFAULT_TOLERANCES, Tolerances

EXPONENTS: Tuple[Tuple[int, int, int], ...] = (
    (3, 0, 0), (2, 1, 0), (2, 0, 1), (1, 2, 0), (1, 1, 1),
    (1, 0, 2), (0, 3, 0), (0, 2, 1), (0, 1, 2), (0, 0, 3),
)
MULTINOMIAL: Tuple[int, ...] = tuple(
    math.factorial(3) // (math.factorial(a) * math.factorial(b) * math.factorial(c))
    for a, b, c in EXPONENTS
)

# (x, y, z) -> (u, v, w) = (x, y, z - x - y)
HESSE_FRAME = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-1.0, -1.0, 1.0]])

_LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _l in permutations(range(3)):
    _LEVI_CIVITA[_i, _j, _l] = np.linalg.det(np.eye(3)[[_i, _j, _l]])


def _exponent_index(triple: Sequence[int]) -> int:
    counts = (triple.count(0), triple.count(1), triple.count(2))
    return EXPONENTS.index(counts)


_TRIPLE_TO_EXPONENT = {t: _exponent_index(t) for t in product(range(3), repeat=3)}


def _as_array(D) -> np.ndarray:
    if isinstance(D, (RayVector, LinearForm3)):
        return D.array
    return np.asarray(D, dtype=float)


def _canonical_orientation(v: np.ndarray) -> np.ndarray:
    """Flip v so that its first largest-magnitude coordinate is positive."""
    mags = np.abs(v)
    lead = int(np.argmax(mags >= (1.0 - 1e-9) * mags.max()))
    return -v if v[lead] < 0 else v


# ---------------------------------------------------------------------------------
# Value types
# ---------------------------------------------------------------------------------

@dataclass(frozen=True)
class RayVector:
    """An oriented nonzero vector of R^3; only positive rescaling is ever applied."""

    coords: Tuple[float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(float(c) for c in self.coords))
        if len(self.coords) != 3:
            raise ValueError(f"RayVector needs 3 coordinates, got {len(self.coords)}")

    @classmethod
    def of(cls, values) -> "RayVector":
        return cls(tuple(np.asarray(values, dtype=float).tolist()))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords)

    @property
    def sup_norm(self) -> float:
        return max(abs(c) for c in self.coords)

    def is_zero(self) -> bool:
        return self.sup_norm == 0.0

    def normalized(self) -> "RayVector":
        """Positive rescaling to unit sup-norm."""
        n = self.sup_norm
        if n == 0.0:
            raise DomainError("zero vector has no ray")
        return RayVector(tuple(c / n for c in self.coords))

    def canonical(self) -> "RayVector":
        """Projective representative: unit sup-norm, leading coordinate positive."""
        v = self.normalized().array
        return RayVector.of(_canonical_orientation(v))

    def scaled(self, factor: float) -> "RayVector":
        return RayVector(tuple(factor * c for c in self.coords))

    def is_affine(self, eps: float = 1e-12) -> bool:
        return abs(self.coords[2]) > eps * self.sup_norm

    def affine(self) -> Tuple[float, float]:
        """Affine chart coordinates (x/z, y/z)."""
        x, y, z = self.coords
        if z == 0.0:
            raise DomainError("ray lies on the line at infinity")
        return x / z, y / z

    def __neg__(self) -> "RayVector":
        return RayVector(tuple(-c for c in self.coords))

    def __add__(self, other: "RayVector") -> "RayVector":
        return RayVector(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def to_list(self) -> List[float]:
        return list(self.coords)


B1 = RayVector((0.0, 1.0, 0.0))
B2 = RayVector((1.0, 0.0, 0.0))
B3 = RayVector((1.0, -1.0, 0.0))
CENTROID = RayVector((1.0 / 3.0, 1.0 / 3.0, 1.0))
ORIGIN_POINT = RayVector((0.0, 0.0, 1.0))


@dataclass(frozen=True)
class LinearForm3:
    """A covector; l(D) = covector . D."""

    covector: Tuple[float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "covector", tuple(float(c) for c in self.covector))

    @classmethod
    def of(cls, values) -> "LinearForm3":
        return cls(tuple(np.asarray(values, dtype=float).tolist()))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.covector)

    def __call__(self, D) -> float:
        return float(self.array @ _as_array(D))

    def normalized(self) -> "LinearForm3":
        n = max(abs(c) for c in self.covector)
        if n == 0.0:
            raise DomainError("zero covector")
        return LinearForm3(tuple(c / n for c in self.covector))

    def is_proportional(self, other: "LinearForm3", tol: float = 1e-9, positive: bool = False) -> bool:
        a = self.array / np.linalg.norm(self.array)
        b = other.array / np.linalg.norm(other.array)
        if np.linalg.norm(np.cross(a, b)) > tol:
            return False
        return (a @ b > 0) if positive else True

    def to_list(self) -> List[float]:
        return list(self.covector)


@dataclass(frozen=True)
class QuadraticForm3:
    """Symmetric 3x3 form; Q(D) = D^T M D."""

    matrix: Tuple[Tuple[float, float, float], ...]

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        m = 0.5 * (m + m.T)
        object.__setattr__(self, "matrix", tuple(tuple(row) for row in m.tolist()))

    @classmethod
    def of(cls, m) -> "QuadraticForm3":
        return cls(tuple(tuple(row) for row in np.asarray(m, dtype=float).tolist()))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.matrix)

    def __call__(self, D) -> float:
        d = _as_array(D)
        return float(d @ self.array @ d)

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        return np.einsum("ni,ij,nj->n", points, self.array, points)

    def __neg__(self) -> "QuadraticForm3":
        return QuadraticForm3.of(-self.array)

    def to_list(self) -> List[List[float]]:
        return [list(row) for row in self.matrix]


class SymTrilinear:
    """Symmetric 3x3x3 tensor with T(A,B,C) = sum T[i,j,l] A_i B_j C_l."""

    def __init__(self, tensor: np.ndarray):
        t = np.asarray(tensor, dtype=float)
        self._tensor = sum(np.transpose(t, p) for p in permutations(range(3))) / 6.0
        self._tensor.setflags(write=False)

    @property
    def tensor(self) -> np.ndarray:
        return self._tensor

    def __call__(self, A, B, C) -> float:
        return float(np.einsum("ijl,i,j,l->", self._tensor, _as_array(A), _as_array(B), _as_array(C)))

    def contract_one(self, A) -> np.ndarray:
        """The matrix T(A,.,.)."""
        return np.einsum("ijl,i->jl", self._tensor, _as_array(A))

    def contract_two(self, A, B) -> np.ndarray:
        """The covector T(A,B,.)."""
        return np.einsum("ijl,i,j->l", self._tensor, _as_array(A), _as_array(B))


@dataclass(frozen=True)
class TernaryCubic:
    """Degree-3 homogeneous form in x, y, z."""

    coeffs: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if len(self.coeffs) != 10:
            raise ValueError(f"TernaryCubic needs 10 coefficients, got {len(self.coeffs)}")

    @classmethod
    def from_tensor(cls, tensor: np.ndarray) -> "TernaryCubic":
        t = SymTrilinear(tensor).tensor
        coeffs = []
        for e, mult in zip(EXPONENTS, MULTINOMIAL):
            rep = tuple([0] * e[0] + [1] * e[1] + [2] * e[2])
            coeffs.append(t[rep] * mult)
        return cls(tuple(coeffs))

    @cached_property
    def trilinear(self) -> SymTrilinear:
        t = np.zeros((3, 3, 3))
        for triple, idx in _TRIPLE_TO_EXPONENT.items():
            t[triple] = self.coeffs[idx] / MULTINOMIAL[idx]
        return SymTrilinear(t)

    @cached_property
    def _coeff_array(self) -> np.ndarray:
        return np.array(self.coeffs)

    @property
    def scale(self) -> float:
        """Largest coefficient magnitude (at least 1); residuals are measured against it."""
        return max(1.0, max(abs(c) for c in self.coeffs))

    def evaluate(self, D) -> float:
        return float(self.evaluate_many(np.atleast_2d(_as_array(D)))[0])

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, dtype=float))
        x, y, z = p[:, 0], p[:, 1], p[:, 2]
        monomials = np.stack(
            [x ** a * y ** b * z ** c for a, b, c in EXPONENTS], axis=1
        )
        return monomials @ self._coeff_array

    def gradient(self, D) -> np.ndarray:
        return 3.0 * self.trilinear.contract_two(D, D)

    def gradient_many(self, points: np.ndarray) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, dtype=float))
        return 3.0 * np.einsum("ijl,nj,nl->ni", self.trilinear.tensor, p, p)

    def normalized_value(self, D) -> float:
        """Value at the sup-norm normalized representative, relative to the coefficient scale."""
        d = _as_array(D)
        return self.evaluate(d / np.max(np.abs(d))) / self.scale

    def contains(self, D, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
        return abs(self.normalized_value(D)) < tol.on_curve_abs

    def scaled(self, factor: float) -> "TernaryCubic":
        return TernaryCubic(tuple(factor * c for c in self.coeffs))

    def __add__(self, other: "TernaryCubic") -> "TernaryCubic":
        return TernaryCubic(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def to_list(self) -> List[float]:
        return list(self.coeffs)


# ---------------------------------------------------------------------------------
# Family constructors and parameter maps
# ---------------------------------------------------------------------------------

def _check_k(k: float, allow_degenerate: bool, tol: Tolerances):
    if not allow_degenerate and abs(k - 1.0) <= tol.degenerate_k_band:
        raise DegenerateParameter(f"k={k} is within {tol.degenerate_k_band} of 1; the cubic splits")


def hesse_normal_cubic(k: float) -> TernaryCubic:
    """-x^3 - y^3 - z^3 + 3k xyz."""
    t = np.zeros((3, 3, 3))
    for i in range(3):
        t[i, i, i] = -1.0
    for p in permutations(range(3)):
        t[p] = k / 2.0
    return TernaryCubic.from_tensor(t)


@lru_cache(maxsize=256)
def _hesse_cubic_cached(k: float) -> TernaryCubic:
    g = hesse_normal_cubic(k).trilinear.tensor
    m = HESSE_FRAME
    return TernaryCubic.from_tensor(np.einsum("ijl,ia,jb,lc->abc", g, m, m, m))


def hesse_cubic(k: float, allow_degenerate: bool = False,
                tol: Tolerances = DEFAULT_TOLERANCES) -> TernaryCubic:
    """
    The cubic F_k = -x^3 - y^3 - (z-x-y)^3 + 3k xy(z-x-y), fully expanded.

    Args:
        k: Hesse parameter
        allow_degenerate: Accept k inside the band around 1
        tol: Tolerances

    Returns:
        TernaryCubic of F_k

    Raises:
        DegenerateParameter: If k is within the band around 1 and the flag is unset
    """
    _check_k(k, allow_degenerate, tol)
    return _hesse_cubic_cached(float(k))


def evaluate(C: TernaryCubic, D) -> float:
    """Value of C at the un-normalized coordinates of D."""
    return C.evaluate(D)


def trilinear(C: TernaryCubic) -> SymTrilinear:
    return C.trilinear


def polar_quadric(C: TernaryCubic, A) -> QuadraticForm3:
    """G_A(D) = T(A,D,D)."""
    return QuadraticForm3.of(C.trilinear.contract_one(A))


def second_polar(C: TernaryCubic, U) -> LinearForm3:
    """l(D) = T(U,U,D) = (1/3) grad C(U) . D."""
    return LinearForm3.of(C.trilinear.contract_two(U, U))


@lru_cache(maxsize=256)
def hessian_cubic(C: TernaryCubic) -> TernaryCubic:
    """
    Determinant of the matrix of second partials, as a cubic.

    The second partials at D are 6 T(D,.,.), so the determinant is
    216 det T(D,.,.), a cubic whose tensor is read off from the Levi-Civita
    expansion of the determinant.
    """
    t = C.trilinear.tensor
    u = np.einsum("abc,al,bm,cn->lmn", _LEVI_CIVITA, t[0], t[1], t[2])
    return TernaryCubic.from_tensor(216.0 * u)


def hessian_parameter(k: float, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """k' = (4 - k^3) / (3k^2), so that H_k = -54 k^2 F_{k'}."""
    if abs(k) <= tol.degenerate_k_band:
        raise DegenerateParameter("k=0: the Hessian is a triple of lines")
    return (4.0 - k ** 3) / (3.0 * k ** 2)


def hesse_hessian(k: float, tol: Tolerances = DEFAULT_TOLERANCES) -> TernaryCubic:
    """Hessian cubic H_k of F_k."""
    return hessian_cubic(hesse_cubic(k, allow_degenerate=True, tol=tol))


# ---------------------------------------------------------------------------------
# Root isolation
# ---------------------------------------------------------------------------------

def real_cubic_roots(coeffs: Sequence[float], rel_tol: float = 1e-9,
                     merge_tol: float = 1e-6) -> List[Tuple[float, int]]:
    """
    Real roots of a*t^3 + b*t^2 + c*t + d with multiplicities.

    Roots are bracketed between the critical points and refined with brentq;
    a critical point where the cubic vanishes (relative to rel_tol) is a
    multiple root.

    Args:
        coeffs: (a, b, c, d) with a != 0
        rel_tol: Relative vanishing threshold at critical points
        merge_tol: Roots closer than this (relative) are merged

    Returns:
        Sorted list of (root, multiplicity)
    """
    a, b, c, d = (float(x) for x in coeffs)
    if a == 0.0:
        raise ValueError("leading coefficient vanishes")
    b, c, d = b / a, c / a, d / a

    def f(t: float) -> float:
        return ((t + b) * t + c) * t + d

    def vanishes(t: float) -> bool:
        size = abs(t) ** 3 + abs(b) * t * t + abs(c) * abs(t) + abs(d)
        return abs(f(t)) <= rel_tol * max(size, 1e-300)

    bound = 1.0 + max(abs(b), abs(c), abs(d))

    def solve(lo: float, hi: float) -> float:
        return optimize.brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)

    roots: List[Tuple[float, int]] = []
    disc = b * b - 3.0 * c
    if disc > 0.0:
        s = math.sqrt(disc)
        t1, t2 = (-b - s) / 3.0, (-b + s) / 3.0
        z1, z2 = vanishes(t1), vanishes(t2)
        if z1 and z2:
            roots.append((0.5 * (t1 + t2), 3))
        elif z1:
            roots += [(t1, 2), (solve(t2, bound), 1)]
        elif z2:
            roots += [(solve(-bound, t1), 1), (t2, 2)]
        else:
            f1, f2 = f(t1), f(t2)
            if f1 > 0.0 > f2:
                roots += [(solve(-bound, t1), 1), (solve(t1, t2), 1), (solve(t2, bound), 1)]
            elif f2 > 0.0:
                roots.append((solve(-bound, t1), 1))
            else:
                roots.append((solve(t2, bound), 1))
    else:
        t0 = -b / 3.0
        if vanishes(t0):
            roots.append((t0, 3))
        else:
            roots.append((solve(-bound, bound), 1))

    roots.sort()
    merged: List[Tuple[float, int]] = []
    for r, m in roots:
        if merged and abs(r - merged[-1][0]) <= merge_tol * (1.0 + abs(r)):
            r0, m0 = merged[-1]
            merged[-1] = ((r0 * m0 + r * m) / (m0 + m), m0 + m)
        else:
            merged.append((r, m))
    return merged


def siblings(k_prime: float, allow_boundary: bool = False) -> Tuple[float, float, float]:
    """
    The three k with hessian_parameter(k) = k_prime, i.e. roots of k^3 + 3k'k^2 - 4.

    Args:
        k_prime: Parameter of the Hessian curve, > 1
        allow_boundary: Accept k_prime = 1, where the roots are -2, -2, 1

    Returns:
        Roots sorted ascending

    Raises:
        DomainError: If k_prime <= 1 (or = 1 without the flag)
    """
    if k_prime < 1.0 or (k_prime == 1.0 and not allow_boundary):
        raise DomainError(f"k'={k_prime}: three real siblings need k' > 1")
    roots = real_cubic_roots((1.0, 3.0 * k_prime, 0.0, -4.0))
    expanded = [r for r, m in roots for _ in range(m)]
    if len(expanded) != 3:
        raise DomainError(f"k'={k_prime}: expected three real roots, found {expanded}")
    return tuple(sorted(expanded))


# ---------------------------------------------------------------------------------
# Conics
# ---------------------------------------------------------------------------------

def signature(Q: QuadraticForm3, tol: Tolerances = DEFAULT_TOLERANCES) -> Tuple[int, int, int]:
    """(positive, negative, zero) eigenvalue counts; zero is relative to the spectral radius."""
    eig = np.linalg.eigvalsh(Q.array)
    radius = float(np.max(np.abs(eig)))
    if radius == 0.0:
        return (0, 0, 3)
    thr = tol.kernel_rank_rel * radius
    return (int(np.sum(eig > thr)), int(np.sum(eig < -thr)), int(np.sum(np.abs(eig) <= thr)))


def conic_singular_point(Q: QuadraticForm3, tol: Tolerances = DEFAULT_TOLERANCES) -> RayVector:
    """Kernel generator of a rank-2 conic, largest-magnitude coordinate positive."""
    sig = signature(Q, tol)
    if sig[2] != 1:
        raise RankError(f"conic has rank {3 - sig[2]}, expected 2")
    _, _, vh = np.linalg.svd(Q.array)
    return RayVector.of(vh[-1]).canonical()


def split_line_pair(Q: QuadraticForm3,
                    tol: Tolerances = DEFAULT_TOLERANCES) -> Tuple[LinearForm3, LinearForm3]:
    """
    Factor a real line pair Q = l1 * l2 (indefinite, rank 2).

    Returns:
        The two lines as sup-norm normalized covectors

    Raises:
        RankError: If Q is not a real line pair
    """
    if signature(Q, tol) != (1, 1, 1):
        raise RankError(f"conic with signature {signature(Q, tol)} is not a real line pair")
    m = Q.array
    _, _, vh = np.linalg.svd(m)
    kernel, basis = vh[-1], vh[:2].T
    eig, vec = np.linalg.eigh(basis.T @ m @ basis)
    lam_neg, lam_pos = eig[0], eig[1]
    lines = []
    for sign in (1.0, -1.0):
        r = math.sqrt(-lam_neg) * vec[:, 1] + sign * math.sqrt(lam_pos) * vec[:, 0]
        lines.append(LinearForm3.of(np.cross(kernel, basis @ r)).normalized())
    return lines[0], lines[1]


# ---------------------------------------------------------------------------------
# Small vector helpers
# ---------------------------------------------------------------------------------

def projective_gap(A, B) -> float:
    """Sine of the angle between the lines spanned by A and B."""
    a = _as_array(A)
    b = _as_array(B)
    return float(np.linalg.norm(np.cross(a / np.linalg.norm(a), b / np.linalg.norm(b))))


def same_point(A, B, tol: float = 1e-9) -> bool:
    return projective_gap(A, B) <= tol
