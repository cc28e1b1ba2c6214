"""Real harmonic bases and the constant quadratic form on the sphere.

For any basis {p_i} of the degree-n harmonic polynomials there is a symmetric
rational matrix C with sum_ij C_ij p_i p_j = ||x||^(2n), i.e. the form is the
constant 1 on the unit sphere.  The matrix is produced exactly from the weight
ladder via q* = sum_k (-1)^(n+k) p_k p_(2n-k) and an exact change of basis.

Spherical harmonics live here too, as a purely numeric cross-check of the same
fact through the addition theorem; they are deliberately kept out of the exact
core.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np

from .exactlinalg import RowSpan, solve_exact
from .polynomials import CRational, Poly, X1, X2, X3, monomial_basis
from .representation import apply_field, poly_to_vec, weight_ladder


@dataclass(frozen=True)
class HarmonicBasis:
    """2n+1 real harmonic polynomials of degree n, exactly independent."""

    n: int
    polys: tuple[Poly, ...]
    provenance: str = "user-supplied"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if len(self.polys) != 2 * self.n + 1:
            raise ValueError(
                f"H_{self.n} basis needs {2 * self.n + 1} elements, got {len(self.polys)}"
            )
        monos = monomial_basis(self.n)
        span = RowSpan()
        for p in self.polys:
            if not p.is_real:
                raise ValueError("basis elements must be real")
            if p.homogeneous_degree != self.n or not p.is_harmonic:
                raise ValueError("basis elements must be harmonic of the stated degree")
            if not span.add(poly_to_vec(p, monos)):
                raise ValueError("basis elements are linearly dependent")


def real_harmonic_basis(n: int) -> HarmonicBasis:
    """Ladder-derived real basis: p_n first, then Re/Im of p_0..p_(n-1).

    Each element is scaled to coprime integer coefficients (sign preserved).
    """
    lad = weight_ladder(n)
    half = CRational(Fraction(1, 2))
    half_i = CRational(0, Fraction(-1, 2))  # 1/(2i)
    polys = [lad.vectors[n].primitive()]
    for k in range(0, n):
        p = lad.vectors[k]
        conj = p.conjugate()
        polys.append(((p + conj).scale(half)).primitive())
        polys.append(((p - conj).scale(half_i)).primitive())
    return HarmonicBasis(n, tuple(polys), provenance="ladder-derived")


def example_basis(n: int) -> HarmonicBasis:
    """The hard-coded low-degree bases used for golden reproduction."""
    if n == 1:
        polys = (X1, X2, X3)
    elif n == 2:
        polys = (
            X1 * X1 - X2 * X2,
            X2 * X2 - X3 * X3,
            X1 * X2,
            X1 * X3,
            X2 * X3,
        )
    elif n == 3:
        def rad(a, b, c):
            return Poly({(2, 0, 0): a, (0, 2, 0): b, (0, 0, 2): c})

        polys = (
            X1 * rad(2, -3, -3),
            X2 * rad(-3, 2, -3),
            X3 * rad(-3, -3, 2),
            X1 * (X2 * X2 - X3 * X3),
            X2 * (X1 * X1 - X3 * X3),
            X3 * (X1 * X1 - X2 * X2),
            X1 * X2 * X3,
        )
    else:
        raise ValueError("example bases exist for n = 1, 2, 3 only")
    return HarmonicBasis(n, polys, provenance="paper-example")


@dataclass(frozen=True)
class QuadraticIdentity:
    """Symmetric rational matrix C with sum_ij C_ij p_i p_j = ||x||^(2n)."""

    basis: HarmonicBasis
    coeffs: tuple[tuple[Fraction, ...], ...]


@lru_cache(maxsize=None)
def _q_star(n: int) -> Poly:
    lad = weight_ladder(n)
    q = Poly.zero()
    for k in range(0, 2 * n + 1):
        sign = -1 if (n + k) % 2 else 1
        q = q + (lad.vectors[k] * lad.vectors[2 * n - k]).scale(sign)
    return q


def casimir_normalizer(n: int) -> Fraction:
    """The constant c with q* = c ||x||^(2n); equals (n!)^2 4^n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    q = _q_star(n)
    if not q.is_real:
        raise AssertionError("q* must be real")
    c = q.coefficient((2 * n, 0, 0)).re
    if q != Poly.norm_sq().__pow__(n).scale(c):
        raise AssertionError("q* is not a multiple of ||x||^(2n)")
    return c


def constant_quadratic_form(basis: HarmonicBasis) -> QuadraticIdentity:
    """Exact symmetric coefficients of ||x||^(2n) over products of the basis.

    The expansion is found by an exact linear solve over the degree-2n
    monomial coefficients; if the products are dependent the solver picks the
    representative with vanishing free coordinates.  The result is verified by
    exact re-expansion before it is returned.
    """
    n = basis.n
    m = 2 * n + 1
    monos = monomial_basis(2 * n)
    pairs = [(i, j) for i in range(m) for j in range(i, m)]
    columns = []
    for i, j in pairs:
        prod = basis.polys[i] * basis.polys[j]
        columns.append([c.re for c in poly_to_vec(prod, monos)])
    target = Poly.norm_sq() ** n
    rhs = [c.re for c in poly_to_vec(target, monos)]
    matrix = [[columns[c][r] for c in range(len(pairs))] for r in range(len(monos))]
    sol = solve_exact(matrix, rhs, Fraction(0))
    if sol is None:
        raise AssertionError("||x||^(2n) is not in the span of basis products")
    coeffs = [[Fraction(0)] * m for _ in range(m)]
    for (i, j), c in zip(pairs, sol):
        if i == j:
            coeffs[i][i] = c
        else:
            coeffs[i][j] = c / 2
            coeffs[j][i] = c / 2
    identity = QuadraticIdentity(basis, tuple(tuple(row) for row in coeffs))
    if not verify_quadratic_identity(identity):
        raise AssertionError("exact verification of the quadratic identity failed")
    return identity


def verify_quadratic_identity(identity: QuadraticIdentity) -> bool:
    """Exact check that sum_ij C_ij p_i p_j - ||x||^(2n) is the zero polynomial."""
    basis = identity.basis
    total = Poly.zero()
    for i, row in enumerate(identity.coeffs):
        for j, c in enumerate(row):
            if c:
                total = total + (basis.polys[i] * basis.polys[j]).scale(c)
    return total == Poly.norm_sq() ** basis.n


def rebase_quadratic_identity(
    identity: QuadraticIdentity, new_basis: HarmonicBasis
) -> QuadraticIdentity:
    """Re-express an identity in another basis via an exact change of basis."""
    if new_basis.n != identity.basis.n:
        raise ValueError("bases have different degrees")
    n = new_basis.n
    m = 2 * n + 1
    monos = monomial_basis(n)
    matrix = [
        [poly_to_vec(new_basis.polys[j], monos)[r].re for j in range(m)]
        for r in range(len(monos))
    ]
    rows = []
    for p in identity.basis.polys:
        rhs = [c.re for c in poly_to_vec(p, monos)]
        s = solve_exact(matrix, rhs, Fraction(0))
        if s is None:
            raise AssertionError("change of basis is not solvable")
        rows.append(s)
    old = identity.coeffs
    coeffs = [[Fraction(0)] * m for _ in range(m)]
    for a in range(m):
        for b in range(m):
            if not old[a][b]:
                continue
            for i in range(m):
                if not rows[a][i]:
                    continue
                for j in range(m):
                    coeffs[i][j] += old[a][b] * rows[a][i] * rows[b][j]
    out = QuadraticIdentity(new_basis, tuple(tuple(r) for r in coeffs))
    if not verify_quadratic_identity(out):
        raise AssertionError("rebased identity failed exact verification")
    return out


def s2_closure_check(basis: HarmonicBasis) -> bool:
    """Each field maps every basis product back into the exact product span."""
    m = len(basis.polys)
    monos = monomial_basis(2 * basis.n)
    span = RowSpan()
    products = []
    for i in range(m):
        for j in range(i, m):
            prod = basis.polys[i] * basis.polys[j]
            products.append(prod)
            span.add(poly_to_vec(prod, monos))
    for f in (0, 1, 2):
        for prod in products:
            img = apply_field(f, prod)
            if img.is_zero:
                continue
            if not span.contains(poly_to_vec(img, monos)):
                return False
    return True


# --- spherical harmonics (numeric cross-check only) ------------------------


@dataclass(frozen=True)
class SphericalHarmonicValue:
    n: int
    k: int
    theta: float
    phi: float
    value: complex

    def __post_init__(self):
        if abs(self.k) > self.n:
            raise ValueError("|k| must be <= n")


@lru_cache(maxsize=None)
def _diff_poly_x2m1(n: int, order: int) -> tuple[Fraction, ...]:
    """Exact coefficients of d^order/dx^order (x^2 - 1)^n."""
    coeffs = [Fraction(0)] * (2 * n + 1)
    for j in range(n + 1):
        coeffs[2 * j] = Fraction(math.comb(n, j) * (-1) ** (n - j))
    for _ in range(order):
        coeffs = [Fraction(k) * coeffs[k] for k in range(1, len(coeffs))] or [Fraction(0)]
    return tuple(coeffs)


def assoc_legendre(n: int, k: int, t: float) -> float:
    """Associated Legendre value via exact pre-differentiation of (x^2-1)^n."""
    if abs(k) > n:
        raise ValueError("|k| must be <= n")
    if not -1.0 <= t <= 1.0:
        raise ValueError("t must lie in [-1, 1]")
    if k != 0 and t in (-1.0, 1.0):
        return 0.0
    coeffs = _diff_poly_x2m1(n, n + k)
    value = 0.0
    power = 1.0
    for c in coeffs:
        if c:
            value += float(c) * power
        power *= t
    pref = ((-1) ** k) / (2**n * factorial(n))
    return pref * (1 - t * t) ** (k / 2) * value


def spherical_harmonic(n: int, k: int, theta: float, phi: float) -> complex:
    if abs(k) > n:
        raise ValueError("|k| must be <= n")
    norm = math.sqrt(
        (2 * n + 1) / (4 * math.pi) * factorial(n - k) / factorial(n + k)
    )
    return (
        ((-1) ** k)
        * norm
        * assoc_legendre(n, k, math.cos(theta))
        * complex(math.cos(k * phi), math.sin(k * phi))
    )


def spherical_harmonic_sample(
    n: int, k: int, theta: float, phi: float
) -> SphericalHarmonicValue:
    return SphericalHarmonicValue(n, k, theta, phi, spherical_harmonic(n, k, theta, phi))


def addition_theorem_residual(n: int, sample_count: int = 100, seed: int = 0) -> float:
    """max over random sphere points of |sum_k |Y_n^k|^2 - (2n+1)/(4 pi)|."""
    if n < 0:
        raise ValueError("n must be >= 0")
    rng = np.random.default_rng(seed)
    expected = (2 * n + 1) / (4 * math.pi)
    worst = 0.0
    for _ in range(sample_count):
        theta = math.acos(rng.uniform(-1.0, 1.0))
        phi = rng.uniform(0.0, 2.0 * math.pi)
        total = sum(
            abs(spherical_harmonic(n, k, theta, phi)) ** 2 for k in range(-n, n + 1)
        )
        worst = max(worst, abs(total - expected))
    return worst
