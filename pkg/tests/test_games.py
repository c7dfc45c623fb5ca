import numpy as np
import pytest

from medgames import (
    Game,
    GameFormatError,
    GameTooLargeError,
    InvalidProfileError,
    MediatedProfile,
    build_mediated_game,
    enumerate_pure_nash,
    game_from_text,
    game_to_text,
    pareto_dominates,
    prisoners_dilemma,
    social_welfare,
    utility,
)
from oracles import nash_oracle, random_game_payoffs

PD = prisoners_dilemma()
C, D = 0, 1


class TestUtility:
    def test_dilemma_cooperate(self):
        assert utility(PD, (C, C)).tolist() == [2.0, 2.0]

    def test_dilemma_defect(self):
        assert utility(PD, (D, D)).tolist() == [1.0, 1.0]

    def test_single_outcome_game(self):
        game = Game((1,), [[5.0]])
        assert utility(game, (0,)).tolist() == [5.0]

    def test_out_of_range_action(self):
        with pytest.raises(InvalidProfileError):
            utility(PD, (0, 2))

    def test_wrong_length(self):
        with pytest.raises(InvalidProfileError):
            utility(PD, (0, 0, 0))


class TestSocialWelfare:
    def test_dilemma_cross_cell(self):
        assert social_welfare(PD, (C, D), {0, 1}) == 3.0

    def test_empty_subset(self):
        assert social_welfare(PD, (D, C), set()) == 0.0

    def test_singleton_subset_reads_tensor(self):
        rng = np.random.default_rng(7)
        payoffs = random_game_payoffs(rng, (2, 2))
        game = Game((2, 2), payoffs)
        assert social_welfare(game, (1, 0), {0}) == payoffs[1, 0, 0]

    def test_default_is_all_players(self):
        assert social_welfare(PD, (C, C)) == 4.0


class TestParetoDominates:
    def test_weakly_better(self):
        assert pareto_dominates((2, 2), (1, 1), {0, 1})

    def test_coordinate_drops(self):
        assert not pareto_dominates((3, 0), (2, 2), {0, 1})

    def test_restricted_subset(self):
        assert pareto_dominates((3, 0), (2, 2), {0})

    def test_equal_vectors_dominate(self):
        assert pareto_dominates((1.5, 2.5), (1.5, 2.5))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            pareto_dominates((1, 2), (1, 2, 3))


class TestEnumeratePureNash:
    def test_dilemma_has_only_defection(self):
        assert enumerate_pure_nash(PD) == [(D, D)]

    def test_constant_game_all_profiles(self):
        game = Game((2, 3), np.zeros((2, 3, 2)))
        assert enumerate_pure_nash(game) == [(i, j) for i in range(2) for j in range(3)]

    def test_cap_guard(self):
        game = Game((2, 2), np.zeros((2, 2, 2)))
        with pytest.raises(GameTooLargeError):
            enumerate_pure_nash(game, cap=3)

    @pytest.mark.parametrize("trial", range(25))
    def test_matches_deviation_oracle_3x3(self, trial):
        rng = np.random.default_rng(1000 + trial)
        payoffs = random_game_payoffs(rng, (3, 3))
        game = Game((3, 3), payoffs)
        assert enumerate_pure_nash(game) == nash_oracle((3, 3), payoffs)

    def test_matches_oracle_many_shapes(self):
        # 1000 random games up to 3 players x 4 actions
        rng = np.random.default_rng(42)
        for _ in range(1000):
            n = int(rng.integers(1, 4))
            counts = tuple(int(c) for c in rng.integers(2, 5, size=n))
            payoffs = random_game_payoffs(rng, counts)
            game = Game(counts, payoffs)
            assert enumerate_pure_nash(game) == nash_oracle(counts, payoffs)


class TestBuildMediatedGame:
    def test_dilemma_pareto_matrix(self):
        med = build_mediated_game(PD, "pareto")
        assert med.action_counts == (4, 4)
        expected = np.array(
            [
                [(2, 2), (0, 3), (2, 2), (0, 3)],
                [(3, 0), (1, 1), (3, 0), (1, 1)],
                [(2, 2), (0, 3), (2, 2), (0, 3)],
                [(3, 0), (1, 1), (3, 0), (2, 2)],
            ],
            dtype=float,
        )
        assert np.array_equal(med.payoffs, expected)

    def test_no_delegation_quadrant_is_original(self):
        rng = np.random.default_rng(5)
        counts = (3, 2)
        game = Game(counts, random_game_payoffs(rng, counts))
        for kind in ("pareto", "punish", "none"):
            med = build_mediated_game(game, kind)
            assert np.array_equal(med.payoffs[:3, :2], game.payoffs)

    def test_punish_both_delegate_maximizes_welfare(self):
        rng = np.random.default_rng(11)
        game = Game((2, 2), random_game_payoffs(rng, (2, 2)))
        med = build_mediated_game(game, "punish")
        welfare = game.payoffs.sum(axis=-1)
        best = welfare.max()
        for a in range(2):
            for b in range(2):
                assert med.payoffs[2 + a, 2 + b].sum() == best

    def test_single_delegator_cells_match_original(self):
        rng = np.random.default_rng(13)
        counts = (2, 3)
        game = Game(counts, random_game_payoffs(rng, counts))
        med = build_mediated_game(game, "pareto")
        for a in range(2):
            for b in range(3):
                assert np.array_equal(med.payoffs[2 + a, b], game.payoffs[a, b])
                assert np.array_equal(med.payoffs[a, 3 + b], game.payoffs[a, b])

    def test_cap_guard(self):
        with pytest.raises(GameTooLargeError):
            build_mediated_game(PD, "pareto", cap=10)


class TestMediatedProfile:
    def test_delegators_derived(self):
        sm = MediatedProfile((0, 1, 2), (True, False, True))
        assert sm.delegators == (0, 2)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            MediatedProfile((0, 1), (True,))


class TestGameValidation:
    def test_flat_payoffs_accepted(self):
        game = Game((2, 2), np.arange(8.0).reshape(4, 2))
        assert game.payoffs.shape == (2, 2, 2)
        assert utility(game, (1, 0)).tolist() == [4.0, 5.0]

    def test_wrong_shape_rejected(self):
        with pytest.raises(ValueError):
            Game((2, 2), np.zeros((2, 3, 2)))

    def test_nonfinite_rejected(self):
        payoffs = np.zeros((2, 2, 2))
        payoffs[0, 0, 0] = np.nan
        with pytest.raises(ValueError):
            Game((2, 2), payoffs)

    def test_payoffs_immutable(self):
        with pytest.raises(ValueError):
            PD.payoffs[0, 0, 0] = 9.0


class TestSerialization:
    def test_round_trip(self):
        rng = np.random.default_rng(3)
        counts = (2, 3, 2)
        game = Game(counts, random_game_payoffs(rng, counts))
        parsed = game_from_text(game_to_text(game))
        assert parsed.action_counts == game.action_counts
        assert np.array_equal(parsed.payoffs, game.payoffs)

    def test_dilemma_text_shape(self):
        text = game_to_text(PD)
        lines = text.strip().splitlines()
        assert lines[0] == "2"
        assert lines[1] == "2 2"
        assert len(lines) == 2 + 4

    def test_missing_cells_rejected(self):
        with pytest.raises(GameFormatError):
            game_from_text("2\n2 2\n1 1\n2 2\n")

    def test_bad_token_rejected(self):
        with pytest.raises(GameFormatError):
            game_from_text("2\n2 2\n1 1\n2 2\nx 3\n4 4\n")

    def test_wrong_utility_count_rejected(self):
        with pytest.raises(GameFormatError):
            game_from_text("1\n2\n1 2\n3\n")
