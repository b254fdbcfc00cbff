import random

import pytest

import tropmarg.fixtures as fx
from tropmarg.families import (
    CirculantFamily,
    JonesDeformFamily,
    LdpFamily,
    PolyFamily,
    commute_check,
)
from tropmarg.marginal import SamplerExhausted, verify_marginal
from tropmarg.matrix import identity, make_matrix, mat_pow, mat_prod
from tropmarg.protocols import (
    NoDecomposition,
    ProtocolParams,
    attack_decomposition,
    power_basis,
    run_protocol_multiblock,
    run_protocol_one_sided,
    run_protocol_sandwich,
    run_sidelnikov,
    sample_finite_member,
)
from tropmarg.semiring import SemiringKind

MIN = SemiringKind.MIN_PLUS
MAX = SemiringKind.MAX_PLUS


def _poly_params(w, left_base, right_base, **kw):
    return ProtocolParams(
        kind=w.kind,
        dim=w.dim,
        publics=(w,),
        left_families=(PolyFamily(left_base, 3, -20, 20),),
        right_families=(PolyFamily(right_base, 3, -20, 20),),
        **kw,
    )


class TestParamsValidation:
    def test_needs_publics(self):
        with pytest.raises(ValueError):
            ProtocolParams(MIN, 3, (), (), ())

    def test_family_must_match_kind(self):
        bad = CirculantFamily(MAX, 3, -5, 5)
        with pytest.raises(ValueError):
            ProtocolParams(MIN, 3, (fx.OS_W,), (bad,), (bad,))

    def test_one_family_pair_per_block(self):
        fam = CirculantFamily(MIN, 3, -5, 5)
        with pytest.raises(ValueError):
            ProtocolParams(MIN, 3, (fx.OS_W, fx.OS_W), (fam,), (fam,))

    def test_blocks_property(self):
        assert fx.builtin_params("two-block-3x3").blocks == 2
        assert fx.builtin_params("one-sided-3x3").blocks == 1


class TestScriptedReplays:
    def test_one_sided_recorded_run(self):
        params = fx.builtin_params("one-sided-3x3")
        t = run_protocol_one_sided(params, random.Random(params.seed))
        assert t.agreed
        for label, want in (
            ("M1", fx.OS_M1),
            ("N1", fx.OS_N1),
            ("M2", fx.OS_M2),
            ("N2", fx.OS_N2),
        ):
            assert tuple(x for (x,) in t.message(label).tuples) == want

    def test_sandwich_recorded_run(self):
        params = fx.builtin_params("sandwich4x4")
        t = run_protocol_sandwich(params, random.Random(params.seed))
        assert t.message("u") == fx.SW_U
        assert t.message("v") == fx.SW_V
        assert t.key_a == fx.SW_K and t.key_b == fx.SW_K

    def test_two_block_recorded_run(self):
        params = fx.builtin_params("two-block-3x3")
        t = run_protocol_multiblock(params, random.Random(params.seed))
        assert t.message("u") == (fx.TB_U1, fx.TB_U2)
        assert t.message("v") == (fx.TB_V1, fx.TB_V2)
        assert t.key_a == fx.TB_K and t.key_b == fx.TB_K
        set_labels = [m.label for m in t.messages if m.label not in ("u", "v")]
        assert set_labels == ["M11", "M12", "M13", "M21", "M22", "M23"]

    def test_public_params_strip_the_script(self):
        params = fx.builtin_params("sandwich4x4")
        t = run_protocol_sandwich(params, random.Random(params.seed))
        assert params.script is not None
        assert t.public_params().script is None

    def test_unknown_label(self):
        params = fx.builtin_params("sandwich4x4")
        t = run_protocol_sandwich(params, random.Random(params.seed))
        with pytest.raises(KeyError):
            t.message("M9")


class TestUnscriptedRuns:
    def test_baseline_exchange(self):
        params = _poly_params(fx.OS_W, fx.OS_A, fx.OS_B, seed=3)
        t = run_sidelnikov(params, random.Random(3))
        assert t.agreed
        assert [m.label for m in t.messages] == ["u", "v"]

    def test_one_sided_exchange(self):
        params = _poly_params(fx.OS_W, fx.OS_A, fx.OS_B, seed=4)
        t = run_protocol_one_sided(params, random.Random(4))
        assert t.agreed
        for label in ("M1", "N1", "M2", "N2"):
            s = t.message(label)
            for tup in s.tuples:
                assert verify_marginal(s.word, tup)

    def test_sandwich_exchange(self):
        params = _poly_params(fx.OS_W, fx.OS_A, fx.OS_B, seed=5, n_tuples=2)
        t = run_protocol_sandwich(params, random.Random(5))
        assert t.agreed

    def test_multiblock_rejects_single_block_runner_mismatch(self):
        params = fx.builtin_params("two-block-3x3")
        with pytest.raises(ValueError):
            run_sidelnikov(params, random.Random(0))

    def test_multiblock_three_blocks(self):
        fam = LdpFamily(3, 40, -7)
        w = make_matrix(MIN, [[4, -1, 3], [0, 2, -5], [6, 1, 0]])
        params = ProtocolParams(
            kind=MIN,
            dim=3,
            publics=(w, fx.OS_W, fx.OS_A),
            left_families=(fam,) * 3,
            right_families=(fam,) * 3,
            n_tuples=2,
            seed=9,
        )
        t = run_protocol_multiblock(params, random.Random(9))
        assert t.agreed
        assert len(t.message("u")) == 3

    def test_determinism(self):
        params = _poly_params(fx.OS_W, fx.OS_A, fx.OS_B, seed=6)
        t1 = run_protocol_one_sided(params, random.Random(6))
        t2 = run_protocol_one_sided(params, random.Random(6))
        assert t1.key_a == t2.key_a
        assert [m.payload for m in t1.messages] == [m.payload for m in t2.messages]

    def test_jones_sandwich_on_max_plus(self):
        fam = JonesDeformFamily(fx.JONES_BASE)
        w = make_matrix(MAX, [[1, -2], [0, 3]])
        params = ProtocolParams(
            kind=MAX,
            dim=2,
            publics=(w,),
            left_families=(fam,),
            right_families=(fam,),
            n_tuples=2,
            seed=8,
        )
        t = run_protocol_sandwich(params, random.Random(8))
        assert t.agreed


class TestFiniteMemberSampling:
    def test_finite_member_found(self):
        spec = PolyFamily(fx.OS_A, 3, -20, 20)
        m = sample_finite_member(spec, random.Random(1))
        assert m.is_finite()
        assert commute_check(m, fx.OS_A)

    def test_exhaustion_on_degree_zero_family(self):
        # every degree-0 polynomial value has infinite off-diagonal entries
        spec = PolyFamily(fx.OS_A, 0, 0, 0)
        with pytest.raises(SamplerExhausted):
            sample_finite_member(spec, random.Random(1))


class TestAttack:
    def test_power_basis(self):
        got = power_basis(fx.OS_A, 2)
        assert got == [identity(MIN, 3), fx.OS_A, fx.OS_A_SQ]
        with pytest.raises(ValueError):
            power_basis(fx.OS_A, -1)

    def test_recovers_baseline_key(self):
        params = _poly_params(fx.OS_W, fx.OS_A, fx.OS_B, seed=11)
        t = run_sidelnikov(params, random.Random(11))
        candidate, z = attack_decomposition(
            fx.OS_W,
            t.message("u"),
            t.message("v"),
            power_basis(fx.OS_A, 3),
            power_basis(fx.OS_B, 3),
        )
        assert candidate == t.key_a
        assert len(z) == 4 and len(z[0]) == 4

    def test_reconstruction_certificate_on_failure(self):
        w = make_matrix(MIN, [[0, 0], [0, 0]])
        u = make_matrix(MIN, [[0, 1], [1, 1]])
        with pytest.raises(NoDecomposition) as exc:
            attack_decomposition(w, u, w, [identity(MIN, 2)], [identity(MIN, 2)])
        assert exc.value.z_table == ((1,),)

    def test_input_validation(self):
        w = fx.OS_W
        with pytest.raises(ValueError):
            attack_decomposition(w, w, w, [], [w])
        with pytest.raises(ValueError):
            attack_decomposition(w, w, w, [fx.SW_A], [w])
        inf = identity(MIN, 3)
        with pytest.raises(ValueError):
            attack_decomposition(inf, w, w, [w], [w])

    def test_masked_publication_can_block_the_rewrite(self):
        # the one-sided protocol publishes c2*p1*W*q1*d2; whether that still
        # decomposes over the power basis depends on the draw, so only the
        # dichotomy is asserted: either the attack reproduces the key or it
        # raises with a certificate
        params = _poly_params(fx.OS_W, fx.OS_A, fx.OS_B, seed=13)
        t = run_protocol_one_sided(params, random.Random(13))
        try:
            candidate, _ = attack_decomposition(
                fx.OS_W,
                t.message("u"),
                t.message("v"),
                power_basis(fx.OS_A, 3),
                power_basis(fx.OS_B, 3),
            )
        except NoDecomposition as e:
            assert len(e.z_table) == 4
        else:
            assert candidate.dim == 3
