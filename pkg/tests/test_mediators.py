import numpy as np
import pytest

from medgames import (
    ConfigError,
    Game,
    MediatedProfile,
    MediatorKind,
    pareto_mediate,
    prisoners_dilemma,
    punish_mediate,
    resolve,
    utility,
)
from oracles import pareto_mediator_oracle, punish_mediator_oracle, random_game_payoffs

PD = prisoners_dilemma()
C, D = 0, 1


def random_submission(rng, counts):
    actions = tuple(int(rng.integers(k)) for k in counts)
    delegate = tuple(bool(b) for b in rng.integers(0, 2, size=len(counts)))
    return MediatedProfile(actions, delegate)


class TestParetoMediate:
    def test_dilemma_both_delegate_defect(self):
        out = pareto_mediate(PD, MediatedProfile((D, D), (True, True)))
        assert out.resolved == (C, C)
        assert out.activated
        assert utility(PD, out.resolved).tolist() == [2.0, 2.0]

    def test_dilemma_mixed_cell_unchanged(self):
        # No outcome gives player 1 at least 3 while keeping player 0 at 0
        # with strictly higher delegator welfare.
        out = pareto_mediate(PD, MediatedProfile((C, D), (True, True)))
        assert out.resolved == (C, D)
        assert not out.activated

    def test_single_delegator_is_identity(self):
        rng = np.random.default_rng(0)
        game = Game((3, 3), random_game_payoffs(rng, (3, 3)))
        out = pareto_mediate(game, MediatedProfile((2, 1), (True, False)))
        assert out.resolved == (2, 1)
        assert not out.activated

    def test_three_player_partial_delegation_matches_oracle(self):
        rng = np.random.default_rng(21)
        counts = (3, 3, 3)
        game = Game(counts, random_game_payoffs(rng, counts))
        sm = MediatedProfile((0, 2, 1), (True, False, True))
        out = pareto_mediate(game, sm)
        expected = pareto_mediator_oracle(counts, game.payoffs, sm.actions, sm.delegate)
        assert out.resolved == expected

    def test_pareto_guarantee_and_pinning(self):
        rng = np.random.default_rng(99)
        for _ in range(300):
            n = int(rng.integers(2, 4))
            counts = tuple(int(c) for c in rng.integers(2, 4, size=n))
            game = Game(counts, random_game_payoffs(rng, counts))
            sm = random_submission(rng, counts)
            out = pareto_mediate(game, sm)
            submitted_u = utility(game, sm.actions)
            resolved_u = utility(game, out.resolved)
            for i in range(n):
                if sm.delegate[i] and len(sm.delegators) >= 2:
                    assert resolved_u[i] >= submitted_u[i]
                if not sm.delegate[i]:
                    assert out.resolved[i] == sm.actions[i]


class TestPunishMediate:
    def test_dilemma_both_delegate_welfare_max(self):
        out = punish_mediate(PD, MediatedProfile((D, D), (True, True)))
        assert out.resolved == (C, C)
        assert utility(PD, out.resolved).sum() == 4.0

    def test_dilemma_single_delegator_punishes(self):
        # Player 0 delegates at (C, C); reassigned to D so player 1 earns 0.
        out = punish_mediate(PD, MediatedProfile((C, C), (True, False)))
        assert out.resolved == (D, C)
        assert utility(PD, out.resolved).tolist() == [3.0, 0.0]

    def test_no_delegators_is_identity(self):
        out = punish_mediate(PD, MediatedProfile((C, D), (False, False)))
        assert out.resolved == (C, D)
        assert not out.activated

    def test_non_delegators_pinned(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            counts = (3, 2, 3)
            game = Game(counts, random_game_payoffs(rng, counts))
            sm = random_submission(rng, counts)
            out = punish_mediate(game, sm)
            for i in range(3):
                if not sm.delegate[i]:
                    assert out.resolved[i] == sm.actions[i]


class TestResolve:
    def test_none_kind_is_identity(self):
        out = resolve(PD, MediatedProfile((D, C), (True, True)), "none")
        assert out.resolved == (D, C)
        assert not out.activated

    def test_pareto_dispatch(self):
        out = resolve(PD, MediatedProfile((D, D), (True, True)), MediatorKind.PARETO)
        assert out.resolved == (C, C)

    def test_punish_dispatch(self):
        out = resolve(PD, MediatedProfile((D, D), (True, True)), "punish")
        assert out.resolved == (C, C)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ConfigError):
            resolve(PD, MediatedProfile((C, C), (True, True)), "arbitrator")


class TestOracleEquivalence:
    def test_random_games_match_brute_force(self):
        # Random games up to 3 players x 3 actions with random delegation sets.
        rng = np.random.default_rng(123)
        for _ in range(300):
            n = int(rng.integers(1, 4))
            counts = tuple(int(c) for c in rng.integers(2, 4, size=n))
            game = Game(counts, random_game_payoffs(rng, counts))
            sm = random_submission(rng, counts)
            pareto = pareto_mediate(game, sm)
            punish = punish_mediate(game, sm)
            assert pareto.resolved == pareto_mediator_oracle(
                counts, game.payoffs, sm.actions, sm.delegate
            )
            assert punish.resolved == punish_mediator_oracle(
                counts, game.payoffs, sm.actions, sm.delegate
            )


class TestTieBreaking:
    def test_submitted_preferred_on_tie(self):
        # Two optimal cells; the submitted one wins.
        payoffs = np.array(
            [
                [(1.0, 1.0), (0.0, 0.0)],
                [(0.0, 0.0), (1.0, 1.0)],
            ]
        )
        game = Game((2, 2), payoffs)
        out = pareto_mediate(game, MediatedProfile((1, 1), (True, True)))
        assert out.resolved == (1, 1)
        assert not out.activated
        assert out.num_optima == 2

    def test_lexicographic_among_non_submitted_optima(self):
        # Submitted cell is strictly dominated; two tied optima remain and
        # the lexicographically smallest reassignment wins.
        payoffs = np.array(
            [
                [(1.0, 1.0), (0.5, 0.5)],
                [(1.0, 1.0), (0.0, 0.0)],
            ]
        )
        game = Game((2, 2), payoffs)
        out = pareto_mediate(game, MediatedProfile((1, 1), (True, True)))
        assert out.resolved == (0, 0)
        assert out.activated
        assert out.num_optima == 2

    def test_determinism(self):
        rng = np.random.default_rng(7)
        counts = (3, 3, 2)
        game = Game(counts, random_game_payoffs(rng, counts))
        sm = MediatedProfile((1, 2, 0), (True, True, True))
        results = {punish_mediate(game, sm) for _ in range(5)}
        results |= {punish_mediate(game, sm) for _ in range(5)}
        assert len(results) == 1
