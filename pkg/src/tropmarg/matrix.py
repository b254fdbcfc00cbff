"""Dense square tropical matrices and polynomials, immutable and exact.

A Matrix pins down its semiring kind; mixing kinds in one operation is a
TypeError, not a silent reinterpretation.  Entries are exact scalars.  A
min-plus matrix may contain +inf (its additive neutral) but never -inf, and
symmetrically for max-plus; the constructor enforces this so that products
can never hit the undefined +inf + -inf case.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .semiring import (
    NEG_INF,
    POS_INF,
    MUL_NEUTRAL,
    Scalar,
    SemiringKind,
    add_neutral,
    as_scalar,
    is_finite,
    s_add,
    s_mul,
    s_neg,
)


@dataclass(frozen=True)
class Matrix:
    kind: SemiringKind
    rows: tuple[tuple[Scalar, ...], ...]

    def __post_init__(self):
        n = len(self.rows)
        if n == 0:
            raise ValueError("empty matrix")
        bad_inf = NEG_INF if self.kind is SemiringKind.MIN_PLUS else POS_INF
        for row in self.rows:
            if len(row) != n:
                raise ValueError("matrix must be square")
            for x in row:
                if x is bad_inf:
                    raise ValueError(f"{bad_inf!r} entry not allowed over {self.kind}")

    @property
    def dim(self) -> int:
        return len(self.rows)

    def entry(self, i: int, j: int) -> Scalar:
        return self.rows[i][j]

    def __getitem__(self, i: int) -> tuple[Scalar, ...]:
        return self.rows[i]

    def is_finite(self) -> bool:
        return all(is_finite(x) for row in self.rows for x in row)

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in row) for row in self.rows)
        return f"Matrix({self.kind}, [{body}])"


def make_matrix(kind: SemiringKind, rows: Iterable[Iterable]) -> Matrix:
    """Build a Matrix from nested iterables, normalizing every entry."""
    return Matrix(kind, tuple(tuple(as_scalar(x) for x in row) for row in rows))


def identity(kind: SemiringKind, n: int) -> Matrix:
    """Multiplicative identity: 0 on the diagonal, additive neutral elsewhere."""
    o = add_neutral(kind)
    return Matrix(
        kind,
        tuple(
            tuple(MUL_NEUTRAL if i == j else o for j in range(n)) for i in range(n)
        ),
    )


def neutral_matrix(kind: SemiringKind, n: int) -> Matrix:
    """Additive neutral: every entry is the semiring's infinity."""
    o = add_neutral(kind)
    return Matrix(kind, tuple(tuple(o for _ in range(n)) for _ in range(n)))


def _check_same(a: Matrix, b: Matrix) -> None:
    if a.kind is not b.kind:
        raise TypeError(f"semiring mismatch: {a.kind} vs {b.kind}")
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    """Entrywise semiring sum (min or max)."""
    _check_same(a, b)
    k = a.kind
    return Matrix(
        k,
        tuple(
            tuple(s_add(k, x, y) for x, y in zip(ra, rb))
            for ra, rb in zip(a.rows, b.rows)
        ),
    )


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    """Tropical product: (a ⊗ b)_ij = sum-reduce over l of a_il + b_lj."""
    _check_same(a, b)
    k = a.kind
    n = a.dim
    cols = tuple(zip(*b.rows))
    out = []
    for i in range(n):
        ra = a.rows[i]
        out_row = []
        for j in range(n):
            cb = cols[j]
            acc = s_mul(ra[0], cb[0])
            for l in range(1, n):
                acc = s_add(k, acc, s_mul(ra[l], cb[l]))
            out_row.append(acc)
        out.append(tuple(out_row))
    return Matrix(k, tuple(out))


def mat_pow(a: Matrix, e: int) -> Matrix:
    """e-fold tropical power; e = 0 gives the identity."""
    if e < 0:
        raise ValueError("negative power")
    acc = identity(a.kind, a.dim)
    for _ in range(e):
        acc = mat_mul(acc, a)
    return acc


def scalar_mul(c, a: Matrix) -> Matrix:
    """Scale every entry by the scalar c (tropically: add c)."""
    c = as_scalar(c)
    return Matrix(a.kind, tuple(tuple(s_mul(c, x) for x in row) for row in a.rows))


def mat_prod(kind: SemiringKind, n: int, factors: Sequence[Matrix]) -> Matrix:
    """Product of a possibly empty sequence of matrices (empty = identity)."""
    acc = identity(kind, n)
    for f in factors:
        acc = mat_mul(acc, f)
    return acc


def dual(a: Matrix) -> Matrix:
    """Entrywise negation into the opposite semiring.

    Satisfies dual(a ⊗ b) = dual(a) ⊗ dual(b) and swaps min-plus with
    max-plus; the marginal machinery uses it to run max-plus inputs through
    the min-plus code path.
    """
    return Matrix(
        a.kind.dual, tuple(tuple(s_neg(x) for x in row) for row in a.rows)
    )


@dataclass(frozen=True)
class TropPolynomial:
    """Tropical polynomial by coefficient list; index = power of the argument.

    Coefficients are scalars of the intended semiring; a coefficient equal to
    the additive neutral contributes nothing.  Evaluation at a square matrix A
    is coeffs[0] ⊗ I  ⊕  coeffs[1] ⊗ A  ⊕ ... ⊕ coeffs[d] ⊗ A^⊗d.
    """

    kind: SemiringKind
    coeffs: tuple[Scalar, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("polynomial needs at least one coefficient")
        bad = NEG_INF if self.kind is SemiringKind.MIN_PLUS else POS_INF
        for c in self.coeffs:
            if c is bad:
                raise ValueError("coefficient from the wrong semiring")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def make_poly(kind: SemiringKind, coeffs: Iterable) -> TropPolynomial:
    return TropPolynomial(kind, tuple(as_scalar(c) for c in coeffs))


def poly_eval(p: TropPolynomial, a: Matrix) -> Matrix:
    if p.kind is not a.kind:
        raise TypeError("polynomial and matrix live in different semirings")
    acc = scalar_mul(p.coeffs[0], identity(a.kind, a.dim))
    power = identity(a.kind, a.dim)
    for c in p.coeffs[1:]:
        power = mat_mul(power, a)
        acc = mat_add(acc, scalar_mul(c, power))
    return acc
