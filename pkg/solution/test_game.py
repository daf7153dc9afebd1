#!/usr/bin/env python3
"""
Test Two-Player Reachability Games

This script checks reachability, ordinal ranking functions, optimal
synthesis, strategy extraction, the incompleteness chain and the explicit
arena conversion on the worked example games.
"""

import sys
from pathlib import Path

import pytest

# Add the current directory to Python path
sys.path.append(str(Path(__file__).parent))

from corank.errors import CertificateInvalidError, CoverageError
from corank.game import (
    OMEGA,
    ZERO,
    Fin,
    GameCoalgebra,
    RankCertificate,
    check_game_ranking,
    extract_strategy,
    game_from_bipartite,
    game_lfp_reach,
    game_rank_by_iteration,
    incompleteness_chain,
    rank_step,
    synthesize_game_rank,
    to_bipartite,
)
from corank.model_io import parse_certificate, parse_model
from corank.reports import Verdict
from corank.testkit import (
    RandomInstanceSpec,
    brute_force_bipartite_reach,
    instance_rngs,
    play_strategy_exhaustively,
    random_game,
)

FIXTURES = Path(__file__).parent / "data" / "fixtures"


def load_game(name: str) -> GameCoalgebra:
    return parse_model((FIXTURES / name).read_text()).body


def load_cert(name: str) -> RankCertificate:
    return parse_certificate((FIXTURES / name).read_text()).certificate


def test_ordinal_arithmetic():
    assert Fin(2) < Fin(3) < OMEGA
    assert not OMEGA < OMEGA
    assert Fin(3).successor_capped(Fin(3)) == Fin(3)
    assert Fin(2).successor_capped(Fin(5)) == Fin(3)
    assert OMEGA.successor_capped(OMEGA) == OMEGA
    assert str(OMEGA) == "omega" and str(Fin(4)) == "4"


def test_tpg_reach_set():
    game = load_game("tpg.lvs")
    assert game_lfp_reach(game) == {"x0", "x2", "x3"}


def test_all_accepting_game():
    game = GameCoalgebra.build(["a", "b"], {"a": [["b"]]}, ["a", "b"])
    assert game_lfp_reach(game) == {"a", "b"}


def test_intro_game_is_won_from_x0():
    assert "x0" in game_lfp_reach(load_game("intro.lvs"))


def test_convergent_certificate_passes():
    report = check_game_ranking(load_game("tpg.lvs"), load_cert("rankfuncconv.crt"), with_reference=True)
    assert report.verdict == Verdict.PASS
    assert {s for s, q in report.bound.items() if q == 1} == {"x0", "x2"}
    assert report.reference == {"x0": 1, "x1": 0, "x2": 1, "x3": 1, "x4": 0}


def test_intro_certificate_passes_and_corruption_fails():
    game = load_game("intro.lvs")
    assert check_game_ranking(game, load_cert("intro.crt")).passed
    report = check_game_ranking(game, load_cert("intro_bad.crt"))
    assert report.verdict == Verdict.FAIL
    assert report.violated_states() == ["x0"]
    assert report.violations[0].expected == Fin(5)


def test_all_cap_certificate_passes_vacuously():
    game = load_game("tpg.lvs")
    report = check_game_ranking(game, RankCertificate(OMEGA, {s: OMEGA for s in game.states}))
    assert report.passed
    assert set(report.bound.values()) == {0}


def test_certificate_coverage_and_cap():
    game = load_game("tpg.lvs")
    with pytest.raises(CoverageError):
        check_game_ranking(game, RankCertificate(OMEGA, {"x0": Fin(1)}))
    with pytest.raises(CertificateInvalidError):
        RankCertificate(Fin(2), {"x0": Fin(3)})


def test_tpg_optimal_rank():
    game = load_game("tpg.lvs")
    cert = synthesize_game_rank(game, OMEGA)
    assert cert.values == {"x0": Fin(1), "x1": OMEGA, "x2": ZERO, "x3": Fin(1), "x4": OMEGA}
    table = cert.as_table(game.states)
    assert rank_step(game, OMEGA)(table) == table


def test_single_accepting_state():
    game = GameCoalgebra.build(["x"], {}, ["x"])
    assert synthesize_game_rank(game).values == {"x": ZERO}


def test_stuck_players():
    # max stuck at "dead", min stuck inside the empty option of "free"
    game = GameCoalgebra.build(["dead", "free"], {"free": [[]]}, [])
    cert = synthesize_game_rank(game, OMEGA)
    assert cert.values == {"dead": OMEGA, "free": Fin(1)}
    assert game_lfp_reach(game) == {"free"}


def test_incompleteness_chain():
    for n in range(1, 11):
        game = incompleteness_chain(n)
        top = f"x{n}"
        assert top in game_lfp_reach(game)
        tight = check_game_ranking(game, synthesize_game_rank(game, Fin(n)))
        assert tight.passed and tight.bound[top] == 0
        assert synthesize_game_rank(game, Fin(n)).values[top] == Fin(n)
        roomy = check_game_ranking(game, synthesize_game_rank(game, Fin(n + 1)))
        assert roomy.passed and roomy.bound[top] == 1


def test_attractor_matches_iteration():
    spec = RandomInstanceSpec(kind="game", max_states=7, max_branching=3)
    for rng in instance_rngs(11, 120):
        game = random_game(rng, spec)
        for cap in (Fin(1), Fin(3), OMEGA):
            assert synthesize_game_rank(game, cap).as_table(game.states) == game_rank_by_iteration(game, cap)


def test_intro_strategy():
    game = load_game("intro.lvs")
    strategy = extract_strategy(game, load_cert("intro.crt"))
    assert strategy.option_for(game, "x0") == frozenset({"x2"})
    assert strategy.option_for(game, "x2") == frozenset({"x3", "x4"})
    assert "x1" not in strategy.choice
    steps = play_strategy_exhaustively(game, strategy, "x0", max_steps=6)
    assert steps is not None and steps <= 5


def test_strategy_needs_a_valid_certificate():
    with pytest.raises(CertificateInvalidError):
        extract_strategy(load_game("intro.lvs"), load_cert("intro_bad.crt"))


def test_tpg_optimal_strategy():
    game = load_game("tpg.lvs")
    strategy = extract_strategy(game, synthesize_game_rank(game))
    assert strategy.option_for(game, "x0") == frozenset({"x2"})
    assert play_strategy_exhaustively(game, strategy, "x0", max_steps=2) <= 2
    assert "x1" not in strategy.choice


def test_bipartite_import_matches():
    game = load_game("tpg.lvs")
    imported = load_game("tpg_bipartite.lvs")
    assert game_lfp_reach(imported) == game_lfp_reach(game)
    arena = to_bipartite(game)
    assert brute_force_bipartite_reach(arena, len(game.states)) == game_lfp_reach(game)
    assert game_from_bipartite(arena) == game


def test_bipartite_round_trip_preserves_reach():
    spec = RandomInstanceSpec(kind="game", max_states=6)
    for rng in instance_rngs(5, 100):
        game = random_game(rng, spec)
        arena = to_bipartite(game)
        assert game_lfp_reach(game_from_bipartite(arena)) == game_lfp_reach(game)
        assert brute_force_bipartite_reach(arena, len(game.states)) == game_lfp_reach(game)


def main():
    """Main function"""
    print("🚀 Two-Player Game Test")
    print("=" * 60)
    tests = [
        test_ordinal_arithmetic,
        test_tpg_reach_set,
        test_all_accepting_game,
        test_intro_game_is_won_from_x0,
        test_convergent_certificate_passes,
        test_intro_certificate_passes_and_corruption_fails,
        test_all_cap_certificate_passes_vacuously,
        test_certificate_coverage_and_cap,
        test_tpg_optimal_rank,
        test_single_accepting_state,
        test_stuck_players,
        test_incompleteness_chain,
        test_attractor_matches_iteration,
        test_intro_strategy,
        test_strategy_needs_a_valid_certificate,
        test_tpg_optimal_strategy,
        test_bipartite_import_matches,
        test_bipartite_round_trip_preserves_reach,
    ]
    failures = 0
    for test in tests:
        try:
            test()
            print(f"   ✅ {test.__name__}")
        except AssertionError as e:
            failures += 1
            print(f"   ❌ {test.__name__}: {e}")

    if failures == 0:
        print("\n🎉 All game tests passed!")
    else:
        print(f"\n❌ {failures} game tests failed.")
    return failures == 0


if __name__ == "__main__":
    main()
