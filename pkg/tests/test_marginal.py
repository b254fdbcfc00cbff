import random

import pytest

from tropmarg.fixtures import (
    BIL_A,
    BIL_CONSTRAINTS,
    DEF3_A,
    DEF3_ADDITIVE_X,
    DEF3_C1,
    DEF3_C2,
    FF_A,
    FF_B,
    FF_BLOCK_TENSOR,
    FF_C,
    FF_ZERO_PAIRS_1BASED,
    RES_A,
    RES_CAP,
    RES_SAMPLES,
    RES_XHAT,
    RES_XSTAR,
)
from tropmarg.marginal import (
    Box,
    Circle,
    Const,
    MarginalSet,
    WordTemplate,
    additive_marginal_bound,
    additive_word,
    chain_word,
    cover_check,
    diagonal_pairs,
    five_factor_residual,
    five_factor_word,
    left_word,
    make_marginal_set,
    max_possible_matrix,
    n_factor_residual,
    render_two_sided_constraints,
    residual_left,
    residual_right,
    right_word,
    sample_additive_marginal,
    sample_five_factor_marginal,
    sample_left_marginal,
    sample_n_factor_marginal,
    sample_right_marginal,
    sample_sandwich_marginal,
    sandwich_word,
    two_sided_residual,
    verify_marginal,
)
from tropmarg.matrix import dual, make_matrix, mat_add, mat_mul, mat_prod, scalar_mul
from tropmarg.semiring import POS_INF, SemiringKind, s_le

MIN = SemiringKind.MIN_PLUS
MAX = SemiringKind.MAX_PLUS


class TestWordTemplates:
    def test_shapes(self):
        w = sandwich_word(BIL_A)
        assert (w.n_box, w.n_circle, w.arity) == (2, 0, 2)
        assert additive_word(BIL_A).n_circle == 1
        assert chain_word([FF_A, FF_B, FF_C]).arity == 2

    def test_constant_index_out_of_range(self):
        with pytest.raises(ValueError):
            WordTemplate(MIN, 2, (BIL_A,), ((Const(1), Box(0)),))

    def test_circle_must_stand_alone(self):
        with pytest.raises(ValueError):
            WordTemplate(MIN, 2, (BIL_A,), ((Const(0), Circle(0)),))

    def test_box_slots_must_be_contiguous(self):
        with pytest.raises(ValueError):
            WordTemplate(MIN, 2, (BIL_A,), ((Const(0), Box(1)),))

    def test_constant_must_fit(self):
        with pytest.raises(ValueError):
            WordTemplate(MIN, 3, (BIL_A,), ((Const(0), Box(0)),))

    def test_arity_enforced_at_evaluation(self):
        w = sandwich_word(BIL_A)
        with pytest.raises(ValueError):
            w.evaluate([BIL_A])

    def test_neutral_values(self):
        # identity in product slots, all-infinity in additive slots
        assert right_word(DEF3_A).neutral_value() == DEF3_A
        assert left_word(DEF3_A).neutral_value() == DEF3_A
        assert sandwich_word(DEF3_A).neutral_value() == DEF3_A
        assert five_factor_word(FF_A, FF_B, FF_C).neutral_value() == mat_prod(
            MIN, 3, [FF_A, FF_B, FF_C]
        )
        assert additive_word(DEF3_A).neutral_value() == DEF3_A

    def test_chain_word_evaluation(self):
        w = chain_word([FF_A, FF_B, FF_C])
        x = make_matrix(MIN, [[0, 1, 2], [1, 0, 1], [2, 1, 0]])
        y = make_matrix(MIN, [[0, 3, 0], [2, 0, 2], [0, 3, 0]])
        assert w.evaluate([x, y]) == mat_prod(MIN, 3, [FF_A, x, FF_B, y, FF_C])
        with pytest.raises(ValueError):
            chain_word([FF_A])


def test_recorded_membership_example():
    w = right_word(DEF3_A)
    assert verify_marginal(w, DEF3_C1)
    assert verify_marginal(w, DEF3_C2)
    assert verify_marginal(additive_word(DEF3_A), DEF3_ADDITIVE_X)
    assert not verify_marginal(w, scalar_mul(1, DEF3_C1))


def test_marginal_set_verifies_at_construction():
    w = right_word(DEF3_A)
    with pytest.raises(ValueError):
        MarginalSet(w, ((scalar_mul(1, DEF3_C1),),))
    s = make_marginal_set(w, [DEF3_C1, DEF3_C2, DEF3_C1])
    assert s.tuples == ((DEF3_C1,), (DEF3_C2,))  # deduplicated, order kept


class TestOneSidedResiduation:
    def test_principal_solution_golden(self):
        assert residual_right(RES_A).x_star == RES_XSTAR

    def test_outer_corner_golden(self):
        got = max_possible_matrix(diagonal_pairs(3), RES_XSTAR, RES_CAP)
        assert got == RES_XHAT

    def test_principal_solution_solves(self):
        assert mat_mul(RES_A, RES_XSTAR) == RES_A
        left = residual_left(RES_A).x_star
        assert mat_mul(left, RES_A) == RES_A
        assert cover_check(RES_A, RES_XSTAR, "right")

    def test_recorded_samples_live_in_the_box(self):
        for x in RES_SAMPLES:
            assert mat_mul(RES_A, x) == RES_A
            for i in range(3):
                for j in range(3):
                    assert s_le(RES_XSTAR[i][j], x[i][j])
                    assert s_le(x[i][j], RES_XHAT[i][j])

    def test_max_plus_mirror(self):
        a = dual(RES_A)
        star = residual_right(a).x_star
        assert star == dual(RES_XSTAR)
        assert mat_mul(a, star) == a

    def test_infinite_entries_rejected(self):
        a = make_matrix(MIN, [[0, POS_INF], [0, 0]])
        with pytest.raises(ValueError):
            residual_right(a)


class TestCoverCheck:
    def test_no_tight_position_means_no_cover(self):
        a = make_matrix(MIN, [[0, 0], [0, 0]])
        lifted = make_matrix(MIN, [[1, 1], [1, 1]])
        assert not cover_check(a, lifted, "right")
        assert mat_mul(a, lifted) != a

    def test_escape_raises(self):
        a = make_matrix(MIN, [[0, 0], [0, 0]])
        below = make_matrix(MIN, [[-1, 0], [0, 0]])
        with pytest.raises(ValueError, match="escape"):
            cover_check(a, below, "right")

    def test_bad_side(self):
        with pytest.raises(ValueError):
            cover_check(BIL_A, BIL_A, "middle")

    def test_agrees_with_product_equality_inside_box(self):
        rng = random.Random(99)
        for _ in range(200):
            n = rng.randint(2, 3)
            a = make_matrix(
                MIN, [[rng.randint(-5, 5) for _ in range(n)] for _ in range(n)]
            )
            side = rng.choice(["right", "left"])
            table = residual_right(a) if side == "right" else residual_left(a)
            star = table.x_star
            # random point of the box, tight with probability 1/2 per entry
            rows = tuple(
                tuple(
                    star[i][j] + (0 if rng.random() < 0.5 else rng.randint(1, 4))
                    for j in range(n)
                )
                for i in range(n)
            )
            x = make_matrix(MIN, rows)
            prod = mat_mul(a, x) if side == "right" else mat_mul(x, a)
            assert cover_check(a, x, side) == (prod == a)


class TestOneSidedSamplers:
    def test_right_sampler_output(self):
        rng = random.Random(5)
        s = sample_right_marginal(RES_A, 4, RES_CAP, rng)
        assert len(s.tuples) == 4
        for (x,) in s.tuples:
            assert mat_mul(RES_A, x) == RES_A
            assert all(x[i][i] == 0 for i in range(3))  # pinned diagonal

    def test_left_sampler_output(self):
        rng = random.Random(6)
        s = sample_left_marginal(RES_A, 4, RES_CAP, rng)
        for (x,) in s.tuples:
            assert mat_mul(x, RES_A) == RES_A

    def test_small_box_caps_distinct_tuples(self):
        a = make_matrix(MIN, [[5]])
        rng = random.Random(0)
        s = sample_right_marginal(a, 3, 0, rng)
        assert s.tuples == ((make_matrix(MIN, [[0]]),),)

    def test_rejects_empty_request(self):
        with pytest.raises(ValueError):
            sample_right_marginal(RES_A, 0, RES_CAP, random.Random(0))


class TestTwoSided:
    def test_bounds_are_differences(self):
        table = two_sided_residual(BIL_A)
        a = BIL_A
        for i in range(2):
            for p in range(2):
                for q in range(2):
                    for j in range(2):
                        assert table.bounds[i][p][q][j] == a[i][j] - a[p][q]

    def test_rendered_constraints_golden(self):
        assert render_two_sided_constraints(BIL_A) == BIL_CONSTRAINTS

    def test_sampler_output(self):
        rng = random.Random(11)
        s = sample_sandwich_marginal(BIL_A, 5, -6, 6, rng)
        w = sandwich_word(BIL_A)
        assert 1 <= len(s.tuples) <= 5
        for x, y in s.tuples:
            assert mat_prod(MIN, 2, [x, BIL_A, y]) == BIL_A
            assert verify_marginal(w, (x, y))

    def test_sampler_max_plus(self):
        rng = random.Random(12)
        a = dual(BIL_A)
        s = sample_sandwich_marginal(a, 3, -6, 6, rng)
        for x, y in s.tuples:
            assert mat_prod(MAX, 2, [x, a, y]) == a


class TestFiveFactor:
    def test_block_tensor_golden(self):
        table = five_factor_residual(FF_A, FF_B, FF_C)
        assert table.block_matrix() == FF_BLOCK_TENSOR

    def test_zero_pairs(self):
        table = five_factor_residual(FF_A, FF_B, FF_C)
        got_1based = frozenset((p + 1, r + 1) for p, r in table.zero_pairs)
        assert got_1based == FF_ZERO_PAIRS_1BASED
        assert table.px == frozenset(p for p, _ in table.zero_pairs)
        assert table.py == frozenset(r for _, r in table.zero_pairs)

    def test_sampler_output(self):
        rng = random.Random(21)
        d = mat_prod(MIN, 3, [FF_A, FF_B, FF_C])
        s = sample_five_factor_marginal(FF_A, FF_B, FF_C, 4, -10, 10, rng)
        for x, y in s.tuples:
            assert mat_prod(MIN, 3, [FF_A, x, FF_B, y, FF_C]) == d

    def test_mismatched_chain_rejected(self):
        with pytest.raises(ValueError):
            five_factor_residual(FF_A, FF_B, dual(FF_C))


class TestNFactor:
    def test_two_slot_chain_matches_five_factor_bounds(self):
        table5 = five_factor_residual(FF_A, FF_B, FF_C)
        tablen = n_factor_residual([FF_A, FF_B, FF_C])
        k = 3
        for p in range(k):
            for q in range(k):
                for r in range(k):
                    for s in range(k):
                        assert tablen.bound((p, q, r, s)) == table5.bounds[p][q][r][s]

    def test_three_slot_sampler(self):
        rng = random.Random(31)
        chain = [FF_A, FF_B, FF_C, mat_mul(FF_A, FF_B)]
        d = mat_prod(MIN, 3, chain)
        s = sample_n_factor_marginal(chain, 3, -8, 8, rng)
        w = chain_word(chain)
        for t in s.tuples:
            x1, x2, x3 = t
            assert mat_prod(MIN, 3, [chain[0], x1, chain[1], x2, chain[2], x3, chain[3]]) == d
            assert verify_marginal(w, t)

    def test_short_chain_rejected(self):
        with pytest.raises(ValueError):
            n_factor_residual([FF_A])


class TestAdditive:
    def test_bound_is_the_matrix_itself(self):
        assert additive_marginal_bound(DEF3_A) == DEF3_A

    def test_min_plus_samples_sit_above(self):
        rng = random.Random(41)
        s = sample_additive_marginal(DEF3_A, 6, 20, rng)
        for (x,) in s.tuples:
            assert mat_add(DEF3_A, x) == DEF3_A
            assert all(
                s_le(DEF3_A[i][j], x[i][j]) for i in range(3) for j in range(3)
            )

    def test_max_plus_samples_sit_below(self):
        rng = random.Random(42)
        a = dual(DEF3_A)
        s = sample_additive_marginal(a, 6, 20, rng)
        for (x,) in s.tuples:
            assert mat_add(a, x) == a

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            sample_additive_marginal(DEF3_A, 3, -1, random.Random(0))
        with pytest.raises(ValueError):
            sample_additive_marginal(DEF3_A, 0, 5, random.Random(0))


def _rand_square(kind, rng):
    return make_matrix(
        kind, [[rng.randint(-9, 9) for _ in range(3)] for _ in range(3)]
    )


_SAMPLER_NAMES = ["right", "left", "additive", "sandwich", "five_factor", "chain"]


@pytest.mark.parametrize("name", _SAMPLER_NAMES)
def test_sampler_outputs_always_verify_at_volume(name):
    # Hard post-condition, exercised well past anecdote scale: five hundred
    # emitted tuples per sampler, every one checked against its word.
    def draw(a, b, c, rng):
        if name == "right":
            return sample_right_marginal(a, 6, 60, rng)
        if name == "left":
            return sample_left_marginal(a, 6, 60, rng)
        if name == "additive":
            return sample_additive_marginal(a, 6, 8, rng)
        if name == "sandwich":
            return sample_sandwich_marginal(a, 4, -8, 8, rng)
        if name == "five_factor":
            return sample_five_factor_marginal(a, b, c, 3, -8, 8, rng)
        return sample_n_factor_marginal([a, b, c, mat_mul(a, b)], 3, -8, 8, rng)

    seen = 0
    for rep in range(600):
        if seen >= 500:
            break
        kind = MIN if rep % 2 == 0 else MAX
        rng = random.Random(50_000 + 1000 * _SAMPLER_NAMES.index(name) + rep)
        a, b, c = (_rand_square(kind, rng) for _ in range(3))
        s = draw(a, b, c, rng)
        for t in s.tuples:
            assert verify_marginal(s.word, t)
            seen += 1
    assert seen >= 500
