"""Marginal tuples and sets: verification, residuation, covers, samplers.

A word template is a sum of products over fixed constant matrices,
multiplicative slots (filled by identity under neutral substitution) and
additive slots (filled by the all-infinity matrix).  A tuple of matrices is
marginal for the template when substituting it leaves the word's value at
exactly the neutral-substitution value.

The samplers below generate marginal sets for the word shapes the protocols
need: A⊗□, □⊗A, □⊗A⊗□, A⊗□⊗B⊗□⊗C, longer chains, and A⊕◯.  They are
deterministic given their random generator and verify every tuple before
returning it.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .constraints import ConstraintSystem, Infeasible, VarId, solve_feasible_min
from .matrix import (
    Matrix,
    dual,
    identity,
    mat_add,
    mat_mul,
    mat_prod,
    neutral_matrix,
)
from .semiring import (
    Scalar,
    SemiringKind,
    as_scalar,
    s_lt,
    s_max,
    s_min,
    s_mul,
    s_sub,
)

RETRY_BUDGET = 64


class SamplerExhausted(RuntimeError):
    """Raised when a sampler's retry budget runs out."""


# --------------------------------------------------------------------------
# Word templates


@dataclass(frozen=True)
class Const:
    index: int


@dataclass(frozen=True)
class Box:
    slot: int


@dataclass(frozen=True)
class Circle:
    slot: int


Atom = Union[Const, Box, Circle]


@dataclass(frozen=True)
class WordTemplate:
    kind: SemiringKind
    dim: int
    constants: tuple[Matrix, ...]
    summands: tuple[tuple[Atom, ...], ...]

    def __post_init__(self):
        boxes, circles = [], []
        for c in self.constants:
            if c.kind is not self.kind or c.dim != self.dim:
                raise ValueError("constant matrix does not fit the template")
        if not self.summands:
            raise ValueError("template needs at least one summand")
        for summand in self.summands:
            if not summand:
                raise ValueError("empty summand")
            for atom in summand:
                if isinstance(atom, Const):
                    if not 0 <= atom.index < len(self.constants):
                        raise ValueError("constant index out of range")
                elif isinstance(atom, Box):
                    boxes.append(atom.slot)
                elif isinstance(atom, Circle):
                    if len(summand) != 1:
                        raise ValueError("an additive slot must stand alone")
                    circles.append(atom.slot)
                else:
                    raise TypeError(f"not an atom: {atom!r}")
        if sorted(boxes) != list(range(len(boxes))):
            raise ValueError("box slots must be 0..n-1, each used once")
        if sorted(circles) != list(range(len(circles))):
            raise ValueError("circle slots must be 0..n-1, each used once")

    @property
    def n_box(self) -> int:
        return sum(
            1 for s in self.summands for a in s if isinstance(a, Box)
        )

    @property
    def n_circle(self) -> int:
        return sum(
            1 for s in self.summands for a in s if isinstance(a, Circle)
        )

    @property
    def arity(self) -> int:
        return self.n_box + self.n_circle

    def evaluate(self, values: Sequence[Matrix]) -> Matrix:
        """Value of the word with box slots, then circle slots, filled from
        `values` in order."""
        if len(values) != self.arity:
            raise ValueError(f"expected {self.arity} matrices, got {len(values)}")
        for v in values:
            if v.kind is not self.kind or v.dim != self.dim:
                raise ValueError("tuple matrix does not fit the template")
        n_box = self.n_box

        def resolve(atom: Atom) -> Matrix:
            if isinstance(atom, Const):
                return self.constants[atom.index]
            if isinstance(atom, Box):
                return values[atom.slot]
            return values[n_box + atom.slot]

        total = None
        for summand in self.summands:
            term = mat_prod(self.kind, self.dim, [resolve(a) for a in summand])
            total = term if total is None else mat_add(total, term)
        return total

    def neutral_value(self) -> Matrix:
        """Word value with identity in every box and all-infinity in every
        circle slot."""
        e = identity(self.kind, self.dim)
        o = neutral_matrix(self.kind, self.dim)
        return self.evaluate([e] * self.n_box + [o] * self.n_circle)


def right_word(a: Matrix) -> WordTemplate:
    """A ⊗ □"""
    return WordTemplate(a.kind, a.dim, (a,), ((Const(0), Box(0)),))


def left_word(a: Matrix) -> WordTemplate:
    """□ ⊗ A"""
    return WordTemplate(a.kind, a.dim, (a,), ((Box(0), Const(0)),))


def sandwich_word(a: Matrix) -> WordTemplate:
    """□ ⊗ A ⊗ □"""
    return WordTemplate(a.kind, a.dim, (a,), ((Box(0), Const(0), Box(1)),))


def five_factor_word(a: Matrix, b: Matrix, c: Matrix) -> WordTemplate:
    """A ⊗ □ ⊗ B ⊗ □ ⊗ C"""
    return WordTemplate(
        a.kind,
        a.dim,
        (a, b, c),
        ((Const(0), Box(0), Const(1), Box(1), Const(2)),),
    )


def chain_word(constants: Sequence[Matrix]) -> WordTemplate:
    """A₁ ⊗ □ ⊗ A₂ ⊗ □ ⊗ ... ⊗ □ ⊗ A_{n+1} (n slots between n+1 constants)."""
    if len(constants) < 2:
        raise ValueError("chain needs at least two constants")
    atoms: list[Atom] = [Const(0)]
    for t in range(1, len(constants)):
        atoms.append(Box(t - 1))
        atoms.append(Const(t))
    first = constants[0]
    return WordTemplate(first.kind, first.dim, tuple(constants), (tuple(atoms),))


def additive_word(a: Matrix) -> WordTemplate:
    """A ⊕ ◯"""
    return WordTemplate(a.kind, a.dim, (a,), ((Const(0),), (Circle(0),)))


MarginalTuple = tuple[Matrix, ...]


def _as_tuple(value) -> MarginalTuple:
    if isinstance(value, Matrix):
        return (value,)
    return tuple(value)


def verify_marginal(word: WordTemplate, value) -> bool:
    """Exact test: substituted word value equals neutral-substituted value."""
    return word.evaluate(list(_as_tuple(value))) == word.neutral_value()


@dataclass(frozen=True)
class MarginalSet:
    word: WordTemplate
    tuples: tuple[MarginalTuple, ...]

    def __post_init__(self):
        for t in self.tuples:
            if not verify_marginal(self.word, t):
                raise ValueError("non-marginal tuple in marginal set")

    def __len__(self) -> int:
        return len(self.tuples)


def make_marginal_set(word: WordTemplate, tuples: Iterable) -> MarginalSet:
    """Marginal set from raw tuples: normalized, deduplicated by value in
    first-seen order, each verified at insertion."""
    seen: dict[MarginalTuple, None] = {}
    for t in tuples:
        seen.setdefault(_as_tuple(t))
    return MarginalSet(word, tuple(seen))


# --------------------------------------------------------------------------
# One-sided residuation (A⊗X = A and X⊗A = A)


@dataclass(frozen=True)
class RightResidual:
    """Principal solution of A⊗X = A.

    Over min-plus, X* is the least solution: X solves iff X >= X* and the
    tight positions cover the equation grid.  Over max-plus the order flips
    (X <= X*).  The diagonal of X* is always zero and pinning it keeps any
    X inside the box a solution.
    """

    source: Matrix
    x_star: Matrix


@dataclass(frozen=True)
class LeftResidual:
    source: Matrix
    x_star: Matrix


def _require_finite(a: Matrix, op: str) -> None:
    if not a.is_finite():
        raise ValueError(f"{op} requires finite entries")


def residual_right(a: Matrix) -> RightResidual:
    """x*_ij = extreme over l of (a_lj - a_li); max for min-plus, min for
    max-plus."""
    _require_finite(a, "residuation")
    n = a.dim
    pick = s_max if a.kind is SemiringKind.MIN_PLUS else s_min
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            best = None
            for l in range(n):
                d = s_sub(a.rows[l][j], a.rows[l][i])
                best = d if best is None else pick(best, d)
            row.append(best)
        rows.append(tuple(row))
    return RightResidual(a, Matrix(a.kind, tuple(rows)))


def residual_left(a: Matrix) -> LeftResidual:
    """x*_ij = extreme over l of (a_il - a_jl)."""
    _require_finite(a, "residuation")
    n = a.dim
    pick = s_max if a.kind is SemiringKind.MIN_PLUS else s_min
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            best = None
            for l in range(n):
                d = s_sub(a.rows[i][l], a.rows[j][l])
                best = d if best is None else pick(best, d)
            row.append(best)
        rows.append(tuple(row))
    return LeftResidual(a, Matrix(a.kind, tuple(rows)))


def cover_check(a: Matrix, x: Matrix, side: str) -> bool:
    """Tight-position cover test, equivalent to the direct product equality.

    side is "right" (A⊗X = A) or "left" (X⊗A = A).  Requires X inside the
    principal box (X >= X* over min-plus, X <= X* over max-plus); positions
    where x equals x* contribute their attainment sets, and the check passes
    iff those sets jointly cover every scalar equation of the system.
    """
    if side == "right":
        star = residual_right(a).x_star
    elif side == "left":
        star = residual_left(a).x_star
    else:
        raise ValueError("side must be 'right' or 'left'")
    n = a.dim
    minplus = a.kind is SemiringKind.MIN_PLUS
    for i in range(n):
        for j in range(n):
            lo, hi = (star.rows[i][j], x.rows[i][j])
            if not minplus:
                lo, hi = hi, lo
            if s_lt(hi, lo):
                raise ValueError("X escapes the principal solution's bound")
    covered = set()
    for i in range(n):
        for j in range(n):
            if x.rows[i][j] != star.rows[i][j]:
                continue
            for l in range(n):
                if side == "right":
                    d = s_sub(a.rows[l][j], a.rows[l][i])
                    if d == star.rows[i][j]:
                        covered.add((l, j))
                else:
                    d = s_sub(a.rows[i][l], a.rows[j][l])
                    if d == star.rows[i][j]:
                        covered.add((i, l))
    return len(covered) == n * n


def diagonal_pairs(n: int) -> frozenset[tuple[int, int]]:
    return frozenset((i, i) for i in range(n))


def max_possible_matrix(t_set, x_star: Matrix, l) -> Matrix:
    """Outer corner of the sampling box: x* on the pinned positions, the cap
    l pushed against x* elsewhere (max over min-plus, min over max-plus)."""
    l = as_scalar(l)
    pinned = set(t_set)
    push = s_max if x_star.kind is SemiringKind.MIN_PLUS else s_min
    n = x_star.dim
    rows = tuple(
        tuple(
            x_star.rows[i][j] if (i, j) in pinned else push(l, x_star.rows[i][j])
            for j in range(n)
        )
        for i in range(n)
    )
    return Matrix(x_star.kind, rows)


def _box_draw(kind: SemiringKind, star: Scalar, outer: Scalar, rng: random.Random) -> Scalar:
    """Uniform integer step from x* toward the outer corner (inclusive).

    For integer bounds this is the uniform integer draw on [x*, x̂]; for
    rational bounds the step count is floor of the gap so tightness at x*
    stays reachable.
    """
    gap = s_sub(outer, star) if kind is SemiringKind.MIN_PLUS else s_sub(star, outer)
    span = int(gap) if isinstance(gap, int) else int(gap.numerator // gap.denominator)
    if span <= 0:
        return star
    step = rng.randint(0, span)
    return s_mul(star, step) if kind is SemiringKind.MIN_PLUS else s_sub(star, step)


def _sample_one_sided(
    a: Matrix, n: int, l, rng: random.Random, side: str
) -> MarginalSet:
    if n < 1:
        raise ValueError("need n >= 1 tuples")
    table = residual_right(a) if side == "right" else residual_left(a)
    star = table.x_star
    outer = max_possible_matrix(diagonal_pairs(a.dim), star, l)
    tuples: dict[MarginalTuple, None] = {}
    for _ in range(n):
        for _attempt in range(RETRY_BUDGET):
            rows = tuple(
                tuple(
                    _box_draw(a.kind, star.rows[i][j], outer.rows[i][j], rng)
                    for j in range(a.dim)
                )
                for i in range(a.dim)
            )
            x = Matrix(a.kind, rows)
            if side == "right":
                assert mat_mul(a, x) == a
            else:
                assert mat_mul(x, a) == a
            if (x,) not in tuples:
                tuples.setdefault((x,))
                break
        else:
            break  # box too small for n distinct tuples; return what exists
    word = right_word(a) if side == "right" else left_word(a)
    return MarginalSet(word, tuple(tuples))


def sample_right_marginal(a: Matrix, n: int, l, rng: random.Random) -> MarginalSet:
    """n random solutions of A⊗X = A, entrywise uniform over [X*, X̂] with
    the diagonal pinned at x* (which alone already covers the system)."""
    return _sample_one_sided(a, n, l, rng, "right")


def sample_left_marginal(a: Matrix, n: int, l, rng: random.Random) -> MarginalSet:
    """n random solutions of X⊗A = A; mirror of sample_right_marginal."""
    return _sample_one_sided(a, n, l, rng, "left")


# --------------------------------------------------------------------------
# Two-sided systems (X⊗A⊗Y = A)


@dataclass(frozen=True)
class TwoSidedResidual:
    """Bounds tensor for X⊗A⊗Y = A: entry [i][p][q][j] bounds x_ip + y_qj.

    Over min-plus the constraints read x_ip + y_qj >= a_ij - a_pq, plus a
    tightness cover; over max-plus the inequality flips.
    """

    source: Matrix
    bounds: tuple

    def bound(self, i: int, p: int, q: int, j: int) -> Scalar:
        return self.bounds[i][p][q][j]


def two_sided_residual(a: Matrix) -> TwoSidedResidual:
    _require_finite(a, "residuation")
    n = a.dim
    bounds = tuple(
        tuple(
            tuple(
                tuple(s_sub(a.rows[i][j], a.rows[p][q]) for j in range(n))
                for q in range(n)
            )
            for p in range(n)
        )
        for i in range(n)
    )
    return TwoSidedResidual(a, bounds)


def render_two_sided_constraints(a: Matrix) -> tuple[str, ...]:
    """The constraint list as displayed for the 2x2 worked instance: one line
    per (x_ip, y_qj) pair, with the always-tight diagonal pairs shown as
    equalities."""
    table = two_sided_residual(a)
    n = a.dim
    lines = []
    for i in range(n):
        for p in range(n):
            for q in range(n):
                for j in range(n):
                    lhs = f"x{i + 1}{p + 1} + y{q + 1}{j + 1}"
                    if i == p and q == j:
                        lines.append(f"{lhs} = 0")
                    else:
                        lines.append(f"{lhs} >= {table.bound(i, p, q, j)}")
    return tuple(lines)


def _two_sided_system(
    table: TwoSidedResidual, r: list[list[int]], s: list[list[int]]
) -> ConstraintSystem:
    """Feasibility system of the two-slot sampler: the full inequality grid,
    the diagonal equalities, and the drawn lower bounds."""
    n = table.source.dim
    sys = ConstraintSystem(negated_tags=("y",))
    for i in range(n):
        for p in range(n):
            for q in range(n):
                for j in range(n):
                    sys.add_sum_ge(
                        VarId("x", i, p), VarId("y", q, j), table.bound(i, p, q, j)
                    )
    for i in range(n):
        for j in range(n):
            sys.add_sum_eq(VarId("x", i, i), VarId("y", j, j), 0)
    for i in range(n):
        for j in range(n):
            sys.set_lower(VarId("x", i, j), r[i][j])
            sys.set_lower(VarId("y", i, j), s[i][j])
    return sys


def _assignment_to_pair(assignment: dict, n: int) -> tuple[Matrix, Matrix]:
    x = Matrix(
        SemiringKind.MIN_PLUS,
        tuple(
            tuple(assignment[VarId("x", i, j)] for j in range(n)) for i in range(n)
        ),
    )
    y = Matrix(
        SemiringKind.MIN_PLUS,
        tuple(
            tuple(assignment[VarId("y", i, j)] for j in range(n)) for i in range(n)
        ),
    )
    return x, y


def sample_sandwich_marginal(
    a: Matrix, n: int, l1: int, l2: int, rng: random.Random
) -> MarginalSet:
    """n pairs (X, Y) with X⊗A⊗Y = A.

    Per draw: a pin value d and off-diagonal lower bounds come uniformly from
    [l1, l2]; the diagonal bounds force x_ii = d and y_jj = -d; the canonical
    solver turns the bounds into a feasible pair.  Infeasible draws retry
    within the budget.  Max-plus inputs run through the min-plus reduction by
    negation, with l1..l2 read in the reduced coordinates.
    """
    if l1 > l2:
        raise ValueError("empty bound range")
    if n < 1:
        raise ValueError("need n >= 1 tuples")
    if a.kind is SemiringKind.MAX_PLUS:
        inner = sample_sandwich_marginal(dual(a), n, l1, l2, rng)
        return make_marginal_set(
            sandwich_word(a),
            [(dual(x), dual(y)) for (x, y) in inner.tuples],
        )
    table = two_sided_residual(a)
    k = a.dim
    tuples: dict[MarginalTuple, None] = {}
    for _ in range(n):
        for _attempt in range(RETRY_BUDGET):
            d = rng.randint(l1, l2)
            r = [[0] * k for _ in range(k)]
            s = [[0] * k for _ in range(k)]
            for i in range(k):
                for j in range(k):
                    if i != j:
                        r[i][j] = rng.randint(l1, l2)
                        s[i][j] = rng.randint(l1, l2)
                    else:
                        r[i][j] = d
                        s[i][j] = -d
            solved = solve_feasible_min(_two_sided_system(table, r, s))
            if isinstance(solved, Infeasible):
                continue
            pair = _assignment_to_pair(solved, k)
            assert mat_mul(mat_mul(pair[0], a), pair[1]) == a
            if pair not in tuples:
                tuples.setdefault(pair)
                break
        else:
            if not tuples:
                raise SamplerExhausted("two-slot sampler retry budget exhausted")
            break
    return MarginalSet(sandwich_word(a), tuple(tuples))


# --------------------------------------------------------------------------
# Five-factor systems (A⊗X⊗B⊗Y⊗C = A⊗B⊗C)


@dataclass(frozen=True)
class FiveFactorResidual:
    """Bounds tensor for A⊗X⊗B⊗Y⊗C = A⊗B⊗C.

    bounds[p][q][r][s] constrains x_pq + y_rs.  zero_pairs collects the
    (p, r) with bounds[p][p][r][r] = 0 (0-based); px and py are its
    projections.  Every diagonal-pair bound is <= 0, and each scalar
    equation has a zero pair attaining it, which is what makes the
    equality-pinned sampler always feasible.
    """

    product: Matrix
    bounds: tuple
    zero_pairs: frozenset[tuple[int, int]]
    px: frozenset[int]
    py: frozenset[int]

    def bound(self, p: int, q: int, r: int, s: int) -> Scalar:
        return self.bounds[p][q][r][s]

    def block_matrix(self) -> tuple[tuple[Scalar, ...], ...]:
        """Flatten to the k^2 x k^2 layout with blocks indexed by (p, q) and
        positions inside a block by (r, s)."""
        k = self.product.dim
        return tuple(
            tuple(self.bounds[big_i // k][big_j // k][big_i % k][big_j % k]
                  for big_j in range(k * k))
            for big_i in range(k * k)
        )


def five_factor_residual(a: Matrix, b: Matrix, c: Matrix) -> FiveFactorResidual:
    for m in (b, c):
        if m.kind is not a.kind or m.dim != a.dim:
            raise ValueError("chain matrices must share kind and dimension")
    _require_finite(a, "residuation")
    _require_finite(b, "residuation")
    _require_finite(c, "residuation")
    if a.kind is SemiringKind.MAX_PLUS:
        inner = five_factor_residual(dual(a), dual(b), dual(c))
        k = a.dim
        neg = tuple(
            tuple(
                tuple(
                    tuple(-inner.bounds[p][q][r][s] for s in range(k))
                    for r in range(k)
                )
                for q in range(k)
            )
            for p in range(k)
        )
        return FiveFactorResidual(
            dual(inner.product), neg, inner.zero_pairs, inner.px, inner.py
        )
    k = a.dim
    d = mat_mul(mat_mul(a, b), c)
    bounds = []
    for p in range(k):
        bp = []
        for q in range(k):
            bq = []
            for r in range(k):
                br = []
                for s in range(k):
                    best = None
                    for i in range(k):
                        for j in range(k):
                            v = (
                                d.rows[i][j]
                                - a.rows[i][p]
                                - b.rows[q][r]
                                - c.rows[s][j]
                            )
                            if best is None or v > best:
                                best = v
                    br.append(best)
                bq.append(tuple(br))
            bp.append(tuple(bq))
        bounds.append(tuple(bp))
    zero_pairs = frozenset(
        (p, r)
        for p in range(k)
        for r in range(k)
        if bounds[p][p][r][r] == 0
    )
    px = frozenset(p for p, _ in zero_pairs)
    py = frozenset(r for _, r in zero_pairs)
    return FiveFactorResidual(d, tuple(bounds), zero_pairs, px, py)


def _five_factor_system(
    table: FiveFactorResidual, r: list[list[int]], s: list[list[int]]
) -> ConstraintSystem:
    k = table.product.dim
    sys = ConstraintSystem(negated_tags=("y",))
    for p in range(k):
        for q in range(k):
            for rr in range(k):
                for ss in range(k):
                    sys.add_sum_ge(
                        VarId("x", p, q), VarId("y", rr, ss), table.bound(p, q, rr, ss)
                    )
    for p, rr in sorted(table.zero_pairs):
        sys.add_sum_eq(VarId("x", p, p), VarId("y", rr, rr), 0)
    for i in range(k):
        for j in range(k):
            sys.set_lower(VarId("x", i, j), r[i][j])
            sys.set_lower(VarId("y", i, j), s[i][j])
    return sys


def sample_five_factor_marginal(
    a: Matrix, b: Matrix, c: Matrix, n: int, l1: int, l2: int, rng: random.Random
) -> MarginalSet:
    """n pairs (X, Y) with A⊗X⊗B⊗Y⊗C = A⊗B⊗C.

    A pin value h and the free lower bounds are drawn from [l1, l2]; rows of
    the zero-pair projections get their diagonal bounds pinned to h and -h,
    the zero pairs themselves become equalities, and the canonical solver
    produces the pair.  Always feasible, but a retry budget guards the loop.
    """
    if l1 > l2:
        raise ValueError("empty bound range")
    if n < 1:
        raise ValueError("need n >= 1 tuples")
    if a.kind is SemiringKind.MAX_PLUS:
        inner = sample_five_factor_marginal(dual(a), dual(b), dual(c), n, l1, l2, rng)
        return make_marginal_set(
            five_factor_word(a, b, c),
            [(dual(x), dual(y)) for (x, y) in inner.tuples],
        )
    table = five_factor_residual(a, b, c)
    k = a.dim
    d_full = table.product
    tuples: dict[MarginalTuple, None] = {}
    for _ in range(n):
        for _attempt in range(RETRY_BUDGET):
            h = rng.randint(l1, l2)
            r = [[0] * k for _ in range(k)]
            s = [[0] * k for _ in range(k)]
            for i in range(k):
                for j in range(k):
                    if i == j:
                        r[i][j] = h if i in table.px else rng.randint(l1, l2)
                        s[i][j] = -h if i in table.py else rng.randint(l1, l2)
                    else:
                        r[i][j] = rng.randint(l1, l2)
                        s[i][j] = rng.randint(l1, l2)
            solved = solve_feasible_min(_five_factor_system(table, r, s))
            if isinstance(solved, Infeasible):
                continue
            pair = _assignment_to_pair(solved, k)
            chain = mat_prod(a.kind, k, [a, pair[0], b, pair[1], c])
            assert chain == d_full
            if pair not in tuples:
                tuples.setdefault(pair)
                break
        else:
            if not tuples:
                raise SamplerExhausted("five-factor sampler retry budget exhausted")
            break
    return MarginalSet(five_factor_word(a, b, c), tuple(tuples))


# --------------------------------------------------------------------------
# General chains (A₁⊗X₁⊗A₂⊗...⊗Xₙ⊗A₍ₙ₊₁₎ = A₁⊗...⊗A₍ₙ₊₁₎)


@dataclass(frozen=True)
class NFactorResidual:
    """Bounds tensor for an n-slot chain; index order (p₁,q₁,...,pₙ,qₙ)
    nests left to right, constraining x₁_{p₁q₁} + ... + xₙ_{pₙqₙ}."""

    product: Matrix
    bounds: tuple
    n_slots: int

    def bound(self, index: tuple[int, ...]) -> Scalar:
        node = self.bounds
        for i in index:
            node = node[i]
        return node


def n_factor_residual(chain: Sequence[Matrix]) -> NFactorResidual:
    chain = list(chain)
    if len(chain) < 2:
        raise ValueError("chain needs at least two matrices")
    first = chain[0]
    for m in chain:
        if m.kind is not first.kind or m.dim != first.dim:
            raise ValueError("chain matrices must share kind and dimension")
        _require_finite(m, "residuation")
    if first.kind is SemiringKind.MAX_PLUS:
        inner = n_factor_residual([dual(m) for m in chain])

        def negate(node):
            if isinstance(node, tuple):
                return tuple(negate(x) for x in node)
            return -node

        return NFactorResidual(dual(inner.product), negate(inner.bounds), inner.n_slots)
    n = len(chain) - 1
    k = first.dim
    d = mat_prod(first.kind, k, chain)

    def tensor(prefix: tuple[int, ...]):
        if len(prefix) == 2 * n:
            best = None
            for i in range(k):
                for j in range(k):
                    v = d.rows[i][j] - chain[0].rows[i][prefix[0]]
                    for t in range(1, n):
                        v -= chain[t].rows[prefix[2 * t - 1]][prefix[2 * t]]
                    v -= chain[n].rows[prefix[-1]][j]
                    if best is None or v > best:
                        best = v
            return best
        return tuple(tensor(prefix + (x,)) for x in range(k))

    return NFactorResidual(d, tensor(()), n)


def sample_n_factor_marginal(
    chain: Sequence[Matrix], n_tuples: int, l1: int, l2: int, rng: random.Random
) -> MarginalSet:
    """n_tuples tuples (X₁..Xₙ) leaving the chain product unchanged.

    Construction: split a zero sum h₁+...+hₙ = 0 with h₁..hₙ₋₁ uniform in
    [l1, l2] and pin every diagonal of Xₜ to hₜ; off-diagonal entries start
    at uniform lower bounds and one monotone repair pass lifts the first
    off-diagonal position of each violated tensor constraint.  All-diagonal
    index tuples sum to zero, which meets their bounds (those are never
    positive) and realizes the tightness cover through the product's argmin
    chains, so the repaired tuple always verifies.
    """
    if l1 > l2:
        raise ValueError("empty bound range")
    if n_tuples < 1:
        raise ValueError("need n >= 1 tuples")
    chain = list(chain)
    first = chain[0]
    if first.kind is SemiringKind.MAX_PLUS:
        inner = sample_n_factor_marginal(
            [dual(m) for m in chain], n_tuples, l1, l2, rng
        )
        return make_marginal_set(
            chain_word(chain),
            [tuple(dual(x) for x in t) for t in inner.tuples],
        )
    table = n_factor_residual(chain)
    n = table.n_slots
    k = first.dim
    d = table.product
    tuples: dict[MarginalTuple, None] = {}
    for _ in range(n_tuples):
        for _attempt in range(RETRY_BUDGET):
            hs = [rng.randint(l1, l2) for _ in range(n - 1)]
            hs.append(-sum(hs))
            mats = [
                [
                    [hs[t] if i == j else rng.randint(l1, l2) for j in range(k)]
                    for i in range(k)
                ]
                for t in range(n)
            ]
            for index in itertools.product(range(k), repeat=2 * n):
                need = table.bound(index)
                have = sum(mats[t][index[2 * t]][index[2 * t + 1]] for t in range(n))
                if have < need:
                    for t in range(n):
                        if index[2 * t] != index[2 * t + 1]:
                            mats[t][index[2 * t]][index[2 * t + 1]] += need - have
                            break
                    else:
                        raise AssertionError("all-diagonal constraint violated")
            xs = tuple(
                Matrix(first.kind, tuple(tuple(row) for row in m)) for m in mats
            )
            factors: list[Matrix] = [chain[0]]
            for t in range(n):
                factors.append(xs[t])
                factors.append(chain[t + 1])
            assert mat_prod(first.kind, k, factors) == d
            if xs not in tuples:
                tuples.setdefault(xs)
                break
        else:
            break
    return MarginalSet(chain_word(chain), tuple(tuples))


# --------------------------------------------------------------------------
# Additive slots (A ⊕ ◯ = A)


def additive_marginal_bound(a: Matrix) -> Matrix:
    """The bound matrix itself: X is (A ⊕ ◯)-marginal iff X >= A over
    min-plus (iff X <= A over max-plus)."""
    return a


def sample_additive_marginal(a: Matrix, n: int, l: int, rng: random.Random) -> MarginalSet:
    """n matrices A ⊕ X = A: nonnegative offsets up to l away from A, pushed
    in the direction the semiring order allows."""
    if l < 0:
        raise ValueError("offset cap must be >= 0")
    if n < 1:
        raise ValueError("need n >= 1 tuples")
    sign = 1 if a.kind is SemiringKind.MIN_PLUS else -1
    tuples: dict[MarginalTuple, None] = {}
    for _ in range(n):
        for _attempt in range(RETRY_BUDGET):
            rows = tuple(
                tuple(
                    s_mul(a.rows[i][j], sign * rng.randint(0, l))
                    for j in range(a.dim)
                )
                for i in range(a.dim)
            )
            x = Matrix(a.kind, rows)
            assert mat_add(a, x) == a
            if (x,) not in tuples:
                tuples.setdefault((x,))
                break
        else:
            break
    return MarginalSet(additive_word(a), tuple(tuples))
