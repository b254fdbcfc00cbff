"""Constructors, predicates, and samplers for pairwise-commuting matrix families.

Six families are supported, each closed under mutual commutation:

* tropical polynomials of one fixed base matrix,
* circulants of one dimension,
* upper-t-circulants sharing the same t,
* lower-s-circulants sharing the same s,
* deformations of one fixed Jones matrix (max-plus),
* Linde-de la Puente style matrices: constant diagonal k <= 0 and
  off-diagonal entries in [r, 2r] with r >= 0 (min-plus; the analogous
  max-plus statement fails for this parameter contract, so it is rejected).

A FamilySpec value identifies one such family together with the data a
sampler needs to draw a random member from it.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .matrix import Matrix, make_matrix, make_poly, mat_mul, poly_eval
from .semiring import Scalar, SemiringKind, as_scalar, is_finite, s_le, s_max, s_mul


def make_circulant(kind: SemiringKind, values) -> Matrix:
    """Circulant whose first row is `values`; each later row is the previous
    one shifted cyclically one step right."""
    vals = [as_scalar(v) for v in values]
    n = len(vals)
    if n == 0:
        raise ValueError("circulant needs at least one value")
    return Matrix(
        kind, tuple(tuple(vals[(j - i) % n] for j in range(n)) for i in range(n))
    )


def make_upper_t_circulant(kind: SemiringKind, t, values) -> Matrix:
    """Circulant with every entry strictly above the diagonal scaled by t."""
    t = as_scalar(t)
    vals = [as_scalar(v) for v in values]
    n = len(vals)
    if n == 0:
        raise ValueError("circulant needs at least one value")
    return Matrix(
        kind,
        tuple(
            tuple(
                s_mul(t, vals[(j - i) % n]) if j > i else vals[(j - i) % n]
                for j in range(n)
            )
            for i in range(n)
        ),
    )


def make_lower_s_circulant(kind: SemiringKind, s, values) -> Matrix:
    """Circulant with every entry strictly below the diagonal scaled by s."""
    s = as_scalar(s)
    vals = [as_scalar(v) for v in values]
    n = len(vals)
    if n == 0:
        raise ValueError("circulant needs at least one value")
    return Matrix(
        kind,
        tuple(
            tuple(
                s_mul(s, vals[(j - i) % n]) if j < i else vals[(j - i) % n]
                for j in range(n)
            )
            for i in range(n)
        ),
    )


def is_jones(a: Matrix) -> bool:
    """Max-plus test: a_ij + a_jk <= a_ik + a_jj for all i, j, k.

    The inequalities must hold with plain addition (the semiring product).
    Reading them with entrywise max instead admits matrices whose
    deformations do not commute, e.g. [[5, 4, -5], [4, 4, 1], [-5, -2, -5]],
    so that reading is rejected here.
    """
    if a.kind is not SemiringKind.MAX_PLUS:
        raise TypeError("Jones matrices live over max-plus")
    n = a.dim
    r = a.rows
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if not s_le(s_mul(r[i][j], r[j][k]), s_mul(r[i][k], r[j][j])):
                    return False
    return True


def deform(a: Matrix, alpha) -> Matrix:
    """Deformation of a Jones matrix: b_ij = a_ij + (alpha - 1) * max(a_ii, a_jj).

    alpha must be a rational in [0, 1].  Deformations of one base commute
    with each other; deform(a, 1) is a itself.
    """
    if isinstance(alpha, (int, Fraction)) and not isinstance(alpha, bool):
        alpha = Fraction(alpha)
    else:
        raise TypeError("alpha must be an exact rational")
    if not (0 <= alpha <= 1):
        raise ValueError("alpha outside [0, 1]")
    if not is_jones(a):
        raise ValueError("deformation requires a Jones matrix")
    n = a.dim
    diag = [a.rows[i][i] for i in range(n)]
    if not all(is_finite(d) for d in diag):
        raise ValueError("deformation requires finite diagonal entries")
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            m = s_max(diag[i], diag[j])
            row.append(s_mul(a.rows[i][j], as_scalar((alpha - 1) * m)))
        out.append(tuple(row))
    return Matrix(a.kind, tuple(out))


def is_ldp(a: Matrix, r, k) -> bool:
    """Constant diagonal k <= 0, off-diagonal entries within [r, 2r], r >= 0."""
    r = as_scalar(r)
    k = as_scalar(k)
    _check_ldp_params(a.kind, r, k)
    hi = r + r  # plain doubling: the interval bound is numeric, not r "+" 2
    n = a.dim
    for i in range(n):
        for j in range(n):
            x = a.rows[i][j]
            if i == j:
                if x != k:
                    return False
            elif not (s_le(r, x) and s_le(x, hi)):
                return False
    return True


def sample_ldp(r: int, k: int, dim: int, rng: random.Random) -> Matrix:
    """Random member: diagonal pinned to k, off-diagonals uniform in [r, 2r]."""
    _check_ldp_params(SemiringKind.MIN_PLUS, as_scalar(r), as_scalar(k))
    if not isinstance(r, int) or not isinstance(k, int):
        raise TypeError("integer parameters expected")
    rows = tuple(
        tuple(k if i == j else rng.randint(r, 2 * r) for j in range(dim))
        for i in range(dim)
    )
    return make_matrix(SemiringKind.MIN_PLUS, rows)


def _check_ldp_params(kind: SemiringKind, r: Scalar, k: Scalar) -> None:
    if kind is not SemiringKind.MIN_PLUS:
        raise TypeError(
            "this family's commutation contract holds over min-plus only"
        )
    if not (is_finite(r) and is_finite(k)):
        raise ValueError("parameters must be finite")
    if not s_le(0, r):
        raise ValueError("r must be >= 0")
    if not s_le(k, 0):
        raise ValueError("k must be <= 0")


def commute_check(a: Matrix, b: Matrix) -> bool:
    return mat_mul(a, b) == mat_mul(b, a)


# --------------------------------------------------------------------------
# Family specifications and sampling


@dataclass(frozen=True)
class PolyFamily:
    """Tropical polynomials of `base` with degree <= max_degree and integer
    coefficients drawn uniformly from [coeff_lo, coeff_hi]."""

    base: Matrix
    max_degree: int
    coeff_lo: int
    coeff_hi: int

    def __post_init__(self):
        if self.max_degree < 0 or self.coeff_lo > self.coeff_hi:
            raise ValueError("bad polynomial family parameters")


@dataclass(frozen=True)
class CirculantFamily:
    kind: SemiringKind
    dim: int
    lo: int
    hi: int


@dataclass(frozen=True)
class UpperTCirculantFamily:
    kind: SemiringKind
    dim: int
    t: Scalar
    lo: int
    hi: int


@dataclass(frozen=True)
class LowerSCirculantFamily:
    kind: SemiringKind
    dim: int
    s: Scalar
    lo: int
    hi: int


@dataclass(frozen=True)
class JonesDeformFamily:
    """Deformations of one Jones base; alpha is drawn as a random fraction
    num/den with den uniform in [1, max_denominator] and num in [0, den],
    restricted to [alpha_lo, alpha_hi]."""

    base: Matrix
    alpha_lo: Fraction = Fraction(0)
    alpha_hi: Fraction = Fraction(1)
    max_denominator: int = 12

    def __post_init__(self):
        if not is_jones(self.base):
            raise ValueError("base must be a Jones matrix")
        if not (0 <= self.alpha_lo <= self.alpha_hi <= 1):
            raise ValueError("alpha range must sit inside [0, 1]")


@dataclass(frozen=True)
class LdpFamily:
    dim: int
    r: int
    k: int

    def __post_init__(self):
        _check_ldp_params(SemiringKind.MIN_PLUS, as_scalar(self.r), as_scalar(self.k))


FamilySpec = Union[
    PolyFamily,
    CirculantFamily,
    UpperTCirculantFamily,
    LowerSCirculantFamily,
    JonesDeformFamily,
    LdpFamily,
]


def family_kind(spec: FamilySpec) -> SemiringKind:
    if isinstance(spec, (PolyFamily, JonesDeformFamily)):
        return spec.base.kind
    if isinstance(spec, LdpFamily):
        return SemiringKind.MIN_PLUS
    return spec.kind


def family_dim(spec: FamilySpec) -> int:
    if isinstance(spec, (PolyFamily, JonesDeformFamily)):
        return spec.base.dim
    return spec.dim


def sample_family_member(spec: FamilySpec, rng: random.Random) -> Matrix:
    """Draw one random family member.

    Members drawn from the same spec always commute pairwise; that is the
    whole point of these families and is covered by property tests.
    """
    if isinstance(spec, PolyFamily):
        deg = rng.randint(0, spec.max_degree)
        coeffs = [rng.randint(spec.coeff_lo, spec.coeff_hi) for _ in range(deg + 1)]
        return poly_eval(make_poly(spec.base.kind, coeffs), spec.base)
    if isinstance(spec, CirculantFamily):
        vals = [rng.randint(spec.lo, spec.hi) for _ in range(spec.dim)]
        return make_circulant(spec.kind, vals)
    if isinstance(spec, UpperTCirculantFamily):
        vals = [rng.randint(spec.lo, spec.hi) for _ in range(spec.dim)]
        return make_upper_t_circulant(spec.kind, spec.t, vals)
    if isinstance(spec, LowerSCirculantFamily):
        vals = [rng.randint(spec.lo, spec.hi) for _ in range(spec.dim)]
        return make_lower_s_circulant(spec.kind, spec.s, vals)
    if isinstance(spec, JonesDeformFamily):
        den = rng.randint(1, spec.max_denominator)
        lo_num = math.ceil(spec.alpha_lo * den)
        hi_num = math.floor(spec.alpha_hi * den)
        if lo_num > hi_num:
            alpha = spec.alpha_lo
        else:
            alpha = Fraction(rng.randint(lo_num, hi_num), den)
        return deform(spec.base, alpha)
    if isinstance(spec, LdpFamily):
        return sample_ldp(spec.r, spec.k, spec.dim, rng)
    raise TypeError(f"not a family spec: {spec!r}")


def sample_jones(dim: int, lo: int, hi: int, rng: random.Random) -> Matrix:
    """Random Jones matrix.

    Primary construction: entries u_i + v_j - e_ij, where e is nonnegative
    with zero diagonal and closed under the triangle inequality (a
    shortest-path pass enforces that).  The defining inequalities then
    reduce to exactly e_ik <= e_ij + e_jk, so membership is guaranteed.
    A short rejection loop on freely drawn matrices runs first so that the
    output is not always of the closed-slack shape.
    """
    for _ in range(8):
        m = make_matrix(
            SemiringKind.MAX_PLUS,
            [[rng.randint(lo, hi) for _ in range(dim)] for _ in range(dim)],
        )
        if is_jones(m):
            return m
    half_lo, half_hi = -(-lo // 2), hi // 2
    if half_lo > half_hi:
        half_lo = half_hi = (lo + hi) // 2
    u = [rng.randint(half_lo, half_hi) for _ in range(dim)]
    v = [rng.randint(half_lo, half_hi) for _ in range(dim)]
    spread = max(1, hi - lo)
    e = [
        [0 if i == j else rng.randint(0, spread) for j in range(dim)]
        for i in range(dim)
    ]
    for k in range(dim):
        for i in range(dim):
            for j in range(dim):
                if e[i][k] + e[k][j] < e[i][j]:
                    e[i][j] = e[i][k] + e[k][j]
    m = make_matrix(
        SemiringKind.MAX_PLUS,
        [[u[i] + v[j] - e[i][j] for j in range(dim)] for i in range(dim)],
    )
    assert is_jones(m)
    return m
