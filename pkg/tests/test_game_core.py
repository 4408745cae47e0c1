"""Matrix construction, reduction, sign structure and regime classification."""

import random
from fractions import Fraction

import pytest

from snowrep.game_core import (
    ALLC,
    ALLD,
    STFT,
    TFT,
    BasePayoffs,
    RepeatedGameSpec,
    SnowdriftViolation,
    build_repeated_matrix,
    classify_regime,
    cooperation_counts,
    play_rounds,
    reduce_matrix,
    regime_thresholds,
    shift_column,
    sign_structure,
    snowdrift_violation,
    trace_payoff,
    validate_snowdrift,
    EQ_ALLD_TFT,
    SIGN_0,
    SIGN_M,
    SIGN_MM,
    SIGN_P,
    SIGN_PP,
)
from snowrep.dynamics import replicator_rhs

from conftest import random_spec, random_rational_point


def spec642(m):
    return RepeatedGameSpec.of(6, 4, 3, 2, m)


class TestValidation:
    def test_fig1_payoffs_are_valid(self):
        validate_snowdrift(BasePayoffs.of(6, 4, 3, 2))

    def test_equal_t_r_rejected(self):
        assert snowdrift_violation(BasePayoffs.of(3, 3, 1, 0)) == "T>R"
        with pytest.raises(SnowdriftViolation):
            validate_snowdrift(BasePayoffs.of(3, 3, 1, 0))

    def test_swapped_r_s_rejected(self):
        assert snowdrift_violation(BasePayoffs.of(3, 1, 2, 0)) == "R>S"

    def test_m_below_two_rejected(self):
        with pytest.raises(ValueError):
            RepeatedGameSpec.of(6, 4, 3, 2, 1)

    def test_float_payoffs_rejected(self):
        with pytest.raises(TypeError):
            BasePayoffs.of(6.0, 4, 3, 2)


class TestRepeatedMatrix:
    def test_hand_evaluated_m2(self):
        # each closed-form entry evaluated by hand for (6,4,3,2), m=2
        A = build_repeated_matrix(spec642(2))
        expected = [
            [8, 8, 7, 6],
            [8, 8, 9, 5],
            [10, 9, 4, 4],
            [12, 8, 4, 4],
        ]
        assert A.entries == tuple(tuple(Fraction(v) for v in row) for row in expected)

    def test_diagonal_blocks(self):
        for m in (2, 5, 8):
            A = build_repeated_matrix(spec642(m))
            R, P = Fraction(4), Fraction(2)
            assert A[0, 0] == A[0, 1] == A[1, 0] == A[1, 1] == m * R
            assert A[2, 2] == A[2, 3] == A[3, 2] == A[3, 3] == m * P

    def test_matches_round_by_round_trace(self):
        # closed forms against the independent automaton playout
        rnd = random.Random(7)
        for _ in range(25):
            spec = random_spec(rnd)
            A = build_repeated_matrix(spec)
            for i in range(4):
                for j in range(4):
                    assert A[i, j] == trace_payoff(i, j, spec), (spec, i, j)


class TestReducedMatrix:
    def test_hand_evaluated_m2(self):
        a = reduce_matrix(spec642(2))
        assert (a[0, 2], a[0, 3], a[1, 2], a[1, 3]) == (3, 2, 5, 1)
        assert (a[2, 0], a[2, 1], a[3, 0], a[3, 1]) == (2, 1, 4, 0)

    def test_tft_vs_stft_entry_m8(self):
        # ceil(m/2)S + floor(m/2)T - mP = 4*3 + 4*6 - 16
        assert reduce_matrix(spec642(8))[1, 2] == 20

    def test_zero_blocks(self):
        rnd = random.Random(3)
        for _ in range(10):
            a = reduce_matrix(random_spec(rnd))
            for i, j in ((0, 0), (0, 1), (1, 0), (1, 1), (2, 2), (2, 3), (3, 2), (3, 3)):
                assert a[i, j] == 0

    def test_universal_inequalities(self):
        # orderings that hold for every valid spec
        rnd = random.Random(11)
        for _ in range(50):
            a = reduce_matrix(random_spec(rnd))
            assert a[3, 0] > a[2, 0] > 0
            assert a[0, 3] > a[1, 3] > 0
            assert a[1, 2] > 0
            assert a[0, 2] > 0
            assert a[2, 1] > a[3, 1]

    def test_rhs_identical_under_reduction(self):
        rnd = random.Random(13)
        for _ in range(20):
            spec = random_spec(rnd)
            A = build_repeated_matrix(spec)
            a = reduce_matrix(spec)
            x = random_rational_point(rnd, interior=False)
            assert replicator_rhs(x, A) == replicator_rhs(x, a)


class TestShiftColumn:
    def test_shift_first_column_by_minus_mr(self):
        spec = spec642(2)
        A = build_repeated_matrix(spec)
        shifted = shift_column(A, 0, -2 * Fraction(4))
        col = tuple(shifted[i, 0] for i in range(4))
        # (0, 0, T-R, m(T-R))
        assert col == (0, 0, 2, 4)

    def test_zero_shift_is_identity(self):
        A = build_repeated_matrix(spec642(3))
        assert shift_column(A, 2, 0).entries == A.entries

    def test_shift_and_unshift(self):
        A = build_repeated_matrix(spec642(5))
        assert shift_column(shift_column(A, 3, 1), 3, -1).entries == A.entries

    def test_rhs_invariant_under_shift(self):
        rnd = random.Random(17)
        for _ in range(15):
            spec = random_spec(rnd)
            A = build_repeated_matrix(spec)
            j = rnd.randint(0, 3)
            c = Fraction(rnd.randint(-20, 20), rnd.randint(1, 5))
            x = random_rational_point(rnd, interior=False)
            assert replicator_rhs(x, A) == replicator_rhs(x, shift_column(A, j, c))


class TestSignStructure:
    def test_m2_case2_with_zero_entry(self):
        # (T+(m-1)P)/m = 4 = R exactly
        s = sign_structure(spec642(2))
        assert s.case_id == 2
        assert s.tags[(ALLD, TFT)] == SIGN_0

    def test_m8_case2_negative_entry(self):
        s = sign_structure(spec642(8))
        assert s.case_id == 2
        assert s.tags[(ALLD, TFT)] == SIGN_M

    def test_large_r_case7(self):
        # R = 2.9 above max(11/5, 2) for T=3,S=1,P=0,m=6
        s = sign_structure(RepeatedGameSpec.of(3, "2.9", 1, 0, 6))
        assert s.case_id == 7
        assert s.tags[(STFT, TFT)] == SIGN_M
        assert s.tags[(ALLD, TFT)] == SIGN_MM

    def test_threshold_ordering(self):
        # alld_vs_tft below the other two; their minimum is (T+S)/2
        rnd = random.Random(19)
        for _ in range(50):
            th = regime_thresholds(random_spec(rnd))
            assert th.alld_vs_tft < th.stft_vs_tft
            assert th.alld_vs_tft < th.tft_edge
            assert min(th.stft_vs_tft, th.tft_edge) == th.half_ts

    def test_tags_match_exact_signs(self):
        rnd = random.Random(23)
        for _ in range(60):
            spec = random_spec(rnd)
            a = reduce_matrix(spec).entries
            tags = sign_structure(spec).tags
            for col in range(4):
                entries = [(a[row][col], tags[(row, col)])
                           for row in range(4) if (row, col) in tags]
                for value, tag in entries:
                    if tag == SIGN_0:
                        assert value == 0
                    elif tag in (SIGN_P, SIGN_PP):
                        assert value > 0
                    else:
                        assert value < 0
                # within-column ordering: ++ dominates +, -- is below -
                values = {tag: value for value, tag in entries}
                if SIGN_PP in values and SIGN_P in values:
                    assert values[SIGN_PP] > values[SIGN_P]
                if SIGN_M in values and SIGN_MM in values:
                    assert values[SIGN_MM] < values[SIGN_M]


class TestClassifyRegime:
    def test_fig1_parameters(self):
        rc = classify_regime(spec642(8))
        assert rc.theorem_id == 1
        assert rc.equilibrium_case == 2
        assert rc.parity == "even"
        assert rc.boundary_equalities == frozenset()

    def test_m2_equality_flag(self):
        rc = classify_regime(spec642(2))
        assert EQ_ALLD_TFT in rc.boundary_equalities

    def test_theorem2_case2(self):
        rc = classify_regime(RepeatedGameSpec.of(3, "2.1", 1, 0, 6))
        assert rc.theorem_id == 2
        assert rc.equilibrium_case == 5

    def test_theorem4(self):
        rc = classify_regime(RepeatedGameSpec.of(3, "2.9", 1, 0, 6))
        assert rc.theorem_id == 4
        assert rc.equilibrium_case == 5

    def test_knife_edges(self):
        # odd m at R=(T+S)/2 and even m at the tft_edge threshold
        assert classify_regime(RepeatedGameSpec.of(3, 2, 1, 0, 3)).equilibrium_case == 3
        assert classify_regime(RepeatedGameSpec.of(3, "11/5", 1, 0, 6)).equilibrium_case == 4

    def test_every_spec_gets_one_theorem(self):
        rnd = random.Random(29)
        for _ in range(80):
            rc = classify_regime(random_spec(rnd))
            assert rc.theorem_id in (1, 2, 3, 4)
            assert rc.equilibrium_case in (1, 2, 3, 4, 5)
            if rc.parity == "odd":
                assert rc.theorem_id != 2
            else:
                assert rc.theorem_id != 3


# cooperative-move counts for the ten unordered pairings, derived by hand from
# the automata: e.g. ALLC vs STFT cooperates every round except STFT's first
CLOSED_FORM_COUNTS = {
    (ALLC, ALLC): lambda m: 2 * m,
    (ALLC, TFT): lambda m: 2 * m,
    (ALLC, STFT): lambda m: 2 * m - 1,
    (ALLC, ALLD): lambda m: m,
    (TFT, TFT): lambda m: 2 * m,
    (TFT, STFT): lambda m: m,
    (TFT, ALLD): lambda m: 1,
    (STFT, STFT): lambda m: 0,
    (STFT, ALLD): lambda m: 0,
    (ALLD, ALLD): lambda m: 0,
}


class TestCooperationCounts:
    @pytest.mark.parametrize("m", [2, 3, 4, 7, 10])
    def test_closed_forms(self, m):
        C = cooperation_counts(m)
        for (i, j), formula in CLOSED_FORM_COUNTS.items():
            assert C[i, j] == formula(m), (i, j, m)

    def test_symmetry_and_bounds(self):
        for m in (2, 5, 9):
            C = cooperation_counts(m)
            for i in range(4):
                for j in range(4):
                    assert C[i, j] == C[j, i]
                    assert 0 <= C[i, j] <= 2 * m

    def test_spec_m4_values(self):
        C = cooperation_counts(4)
        assert C[TFT, STFT] == 4
        assert C[ALLC, STFT] == 7
        assert C[TFT, ALLD] == 1

    def test_alternation_in_tft_vs_stft(self):
        moves = play_rounds(TFT, STFT, 6)
        assert all(a != b for a, b in moves)
