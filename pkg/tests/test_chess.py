import random

import pytest

from voicechess import commands, grammar
from voicechess.chessgame import (
    START_FEN,
    EmptyHistoryError,
    GameState,
    NoLegalMovesError,
    Status,
    computer_move,
    initial_position,
    perft,
    square_index,
    square_name,
)
from voicechess.grammar import Castle, CastleSide, MoveCommand, NewGame, Resign, Undo


class TestBasics:
    def test_initial_fen(self):
        assert initial_position().fen() == START_FEN

    def test_initial_twenty_moves(self):
        assert len(initial_position().legal_moves()) == 20

    def test_initial_status(self):
        assert initial_position().status() is Status.ONGOING

    def test_fen_round_trip(self):
        fens = [
            START_FEN,
            "rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq e3 0 1",
            "8/8/8/4k3/8/8/4K3/4R3 w - - 10 42",
        ]
        for fen in fens:
            assert GameState(fen).fen() == fen

    def test_square_names(self):
        assert square_index("a1") == 0
        assert square_index("h8") == 63
        assert square_name(square_index("e4")) == "e4"


class TestPerft:
    def test_depths_1_to_3(self):
        g = initial_position()
        assert perft(g, 1) == 20
        assert perft(g, 2) == 400
        assert perft(g, 3) == 8902
        assert g.fen() == START_FEN  # enumeration fully unwound

    def test_kiwipete_depth_2(self):
        # widely published tactical test position
        g = GameState("r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1")
        assert perft(g, 1) == 48
        assert perft(g, 2) == 2039

    def test_en_passant_position(self):
        g = GameState("8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1")
        assert perft(g, 1) == 14
        assert perft(g, 2) == 191


class TestStatus:
    def test_fools_mate(self):
        g = GameState("rnb1kbnr/pppp1ppp/8/4p3/6Pq/5P2/PPPPP2P/RNBQKBNR w KQkq - 1 3")
        assert g.status() is Status.CHECKMATE
        assert g.legal_moves() == []

    def test_stalemate(self):
        g = GameState("7k/5Q2/6K1/8/8/8/8/8 b - - 0 1")
        assert g.status() is Status.STALEMATE

    def test_check(self):
        g = GameState("rnbqkbnr/ppp1pppp/8/1B1p4/4P3/8/PPPP1PPP/RNBQK1NR b KQkq - 1 2")
        assert g.status() is Status.CHECK

    def test_fifty_move_draw(self):
        g = GameState("8/8/8/4k3/8/8/4K3/4R3 w - - 100 80")
        assert g.status() is Status.DRAW_50_MOVE

    def test_lone_kings_and_rook_moves(self):
        g = GameState("k7/8/8/4K3/8/8/8/8 w - - 0 1")
        assert len(g.legal_moves()) == 8


class TestApplyUndo:
    def test_apply_then_undo_identity_random_playouts(self):
        rng = random.Random(0)
        g = initial_position()
        steps = 0
        while steps < 1000:
            moves = g.legal_moves()
            if not moves or g.status() in (Status.CHECKMATE, Status.STALEMATE, Status.DRAW_50_MOVE):
                g = initial_position()
                continue
            m = rng.choice(moves)
            before = g.fen()
            g.make_move(m)
            g.unmake_move()
            assert g.fen() == before
            g.make_move(m)  # keep the playout going
            steps += 1

    def test_undo_at_start(self):
        with pytest.raises(EmptyHistoryError):
            initial_position().unmake_move()

    def test_no_move_leaves_own_king_attacked(self):
        rng = random.Random(1)
        g = initial_position()
        for _ in range(300):
            moves = g.legal_moves()
            if not moves:
                g = initial_position()
                continue
            for m in moves:
                g.make_move(m)
                assert not g.in_check(not g.white_to_move)
                g.unmake_move()
            g.make_move(rng.choice(moves))


class TestCommands:
    def test_knight_to_c3(self):
        g = initial_position()
        res = commands.apply_command(g, MoveCommand("knight", "b1", "c3"))
        assert res.ok
        assert g.board[square_index("c3")] == "N"
        assert not g.white_to_move

    def test_blocked_bishop_illegal(self):
        g = initial_position()
        res = commands.apply_command(g, MoveCommand("bishop", "c1", "h6"))
        assert not res.ok and res.error == "ILLEGAL_MOVE"
        assert g.fen() == START_FEN

    def test_undo_restores_full_state(self):
        g = initial_position()
        commands.apply_command(g, MoveCommand("pawn", "e2", "e4"))
        res = commands.apply_command(g, Undo())
        assert res.ok
        assert g.fen() == START_FEN

    def test_undo_empty_history(self):
        res = commands.apply_command(initial_position(), Undo())
        assert res.error == "EMPTY_HISTORY"

    def test_new_game_resets(self):
        g = initial_position()
        commands.apply_command(g, MoveCommand("pawn", "e2", "e4"))
        commands.apply_command(g, NewGame())
        assert g.fen() == START_FEN

    def test_resign(self):
        g = initial_position()
        res = commands.apply_command(g, Resign())
        assert res.ok and g.resigned == "white"
        assert g.status() is Status.RESIGNED

    def test_claim_mate_does_not_mutate(self):
        g = GameState("rnb1kbnr/pppp1ppp/8/4p3/6Pq/5P2/PPPPP2P/RNBQKBNR w KQkq - 1 3")
        before = g.fen()
        res = commands.apply_command(g, grammar.ClaimMate())
        assert res.mate_claimed_correct is True
        assert g.fen() == before
        res2 = commands.apply_command(initial_position(), grammar.ClaimMate())
        assert res2.mate_claimed_correct is False

    def test_castle_kingside(self):
        g = GameState("r3k2r/pppppppp/8/8/8/8/PPPPPPPP/R3K2R w KQkq - 0 1")
        res = commands.apply_command(g, Castle(CastleSide.KINGSIDE))
        assert res.ok and res.move.castle_k
        assert g.board[square_index("g1")] == "K"
        assert g.board[square_index("f1")] == "R"

    def test_castle_auto_ambiguous(self):
        g = GameState("r3k2r/pppppppp/8/8/8/8/PPPPPPPP/R3K2R w KQkq - 0 1")
        res = commands.apply_command(g, Castle(CastleSide.AUTO))
        assert not res.ok and res.error == "AMBIGUOUS_CASTLE"

    def test_castle_auto_single_option(self):
        g = GameState("rn2k2r/pppppppp/8/8/8/8/PPPPPPPP/RN2K2R w KQkq - 0 1")
        res = commands.apply_command(g, Castle(CastleSide.AUTO))
        assert res.ok and res.move.castle_k

    def test_promotion_from_grammar_is_legal(self):
        g = GameState("3r4/4P3/8/8/7k/8/8/7K w - - 0 1")
        res = commands.apply_command(g, MoveCommand("pawn", "e7", "e8", "queen"))
        assert res.ok
        assert g.board[square_index("e8")] == "Q"


class TestComputerMove:
    def test_single_legal_move(self):
        g = GameState("7k/8/8/8/8/8/r6r/K7 w - - 0 1")
        moves = g.legal_moves()
        assert len(moves) == 1
        assert computer_move(g, "RANDOM", 1) == moves[0]
        assert computer_move(g, "GREEDY_MATERIAL", 1) == moves[0]

    def test_greedy_takes_free_queen(self):
        g = GameState("7k/8/8/3q4/4P3/8/8/7K w - - 0 1")
        m = computer_move(g, "GREEDY_MATERIAL", 0)
        assert square_name(m.to_sq) == "d5"

    def test_random_seed_deterministic(self):
        g = initial_position()
        first = computer_move(g, "RANDOM", 123)
        assert all(computer_move(g, "RANDOM", 123) == first for _ in range(100))

    def test_no_legal_moves(self):
        g = GameState("7k/5Q2/6K1/8/8/8/8/8 b - - 0 1")
        with pytest.raises(NoLegalMovesError):
            computer_move(g)
