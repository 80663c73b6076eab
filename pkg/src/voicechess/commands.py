"""Apply parsed voice commands to a game state."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import grammar
from .chessgame import (
    GameState,
    Move,
    Status,
    computer_move,
    square_index,
)


@dataclass(frozen=True)
class ApplyResult:
    ok: bool
    error: Optional[str] = None  # ILLEGAL_MOVE | AMBIGUOUS_CASTLE | EMPTY_HISTORY
    move: Optional[Move] = None
    status: Optional[Status] = None
    mate_claimed_correct: Optional[bool] = None
    session_signal: Optional[str] = None  # "start" | "close"
    new_game: bool = False
    resigned: bool = False


def _matching_moves(state: GameState, cmd: grammar.MoveCommand):
    frm = square_index(cmd.from_square)
    to = square_index(cmd.to_square)
    kind = {"rook": "r", "knight": "n", "bishop": "b", "queen": "q", "king": "k", "pawn": "p"}[
        grammar_name(cmd.piece)
    ]
    promo_map = {"queen": "q", "rook": "r", "bishop": "b", "knight": "n"}
    want_promo = promo_map[cmd.promotion] if cmd.promotion else None
    out = []
    for m in state.legal_moves():
        if m.from_sq == frm and m.to_sq == to and m.piece == kind:
            if (m.promotion or None) == (want_promo or None):
                out.append(m)
    return out


def grammar_name(piece: str) -> str:
    """Accept either the engine's English kind name or a vocabulary word."""
    if piece in ("rook", "knight", "bishop", "queen", "king", "pawn"):
        return piece
    return grammar.PIECE_NAMES[piece]


def apply_command(state: GameState, cmd) -> ApplyResult:
    """Mutate ``state`` per the command; errors leave it untouched."""
    if isinstance(cmd, grammar.MoveCommand):
        matches = _matching_moves(state, cmd)
        if len(matches) != 1:
            return ApplyResult(False, error="ILLEGAL_MOVE", status=state.status())
        state.make_move(matches[0])
        return ApplyResult(True, move=matches[0], status=state.status())
    if isinstance(cmd, grammar.Castle):
        legal = [m for m in state.legal_moves() if m.castle_k or m.castle_q]
        if cmd.side is grammar.CastleSide.KINGSIDE:
            legal = [m for m in legal if m.castle_k]
        elif cmd.side is grammar.CastleSide.QUEENSIDE:
            legal = [m for m in legal if m.castle_q]
        if not legal:
            return ApplyResult(False, error="ILLEGAL_MOVE", status=state.status())
        if len(legal) > 1:
            return ApplyResult(False, error="AMBIGUOUS_CASTLE", status=state.status())
        state.make_move(legal[0])
        return ApplyResult(True, move=legal[0], status=state.status())
    if isinstance(cmd, grammar.Undo):
        if not state.history:
            return ApplyResult(False, error="EMPTY_HISTORY", status=state.status())
        state.unmake_move()
        return ApplyResult(True, status=state.status())
    if isinstance(cmd, grammar.NewGame):
        fresh = GameState()
        state.board = fresh.board
        state.white_to_move = fresh.white_to_move
        state.castling = fresh.castling
        state.ep = fresh.ep
        state.halfmove = fresh.halfmove
        state.fullmove = fresh.fullmove
        state.history = []
        state.resigned = None
        return ApplyResult(True, status=state.status(), new_game=True)
    if isinstance(cmd, grammar.Resign):
        state.resigned = "white" if state.white_to_move else "black"
        return ApplyResult(True, status=state.status(), resigned=True)
    if isinstance(cmd, grammar.ClaimMate):
        return ApplyResult(
            True,
            status=state.status(),
            mate_claimed_correct=state.status() is Status.CHECKMATE,
        )
    if isinstance(cmd, grammar.Start):
        return ApplyResult(True, status=state.status(), session_signal="start")
    if isinstance(cmd, grammar.Close):
        return ApplyResult(True, status=state.status(), session_signal="close")
    raise TypeError(f"unknown command {cmd!r}")


def apply_computer_reply(
    state: GameState, policy: str = "GREEDY_MATERIAL", seed: Optional[int] = None
) -> Move:
    """Pick and play the computer's reply; returns the move made."""
    move = computer_move(state, policy, seed)
    state.make_move(move)
    return move
