"""Chess rules engine: legal move generation, apply/undo, status, FEN,
and a simple computer opponent.

Board layout: 64-slot list, index = rank * 8 + file, a1 = 0. White pieces
are uppercase. Correctness is anchored on perft counts from the initial
position and on apply/undo state identity.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

START_FEN = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"

PIECE_KINDS = {"pawn": "p", "knight": "n", "bishop": "b", "rook": "r", "queen": "q", "king": "k"}
KIND_NAMES = {v: k for k, v in PIECE_KINDS.items()}
MATERIAL = {"p": 1, "n": 3, "b": 3, "r": 5, "q": 9, "k": 0}

_KNIGHT_OFFS = ((1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2))
_KING_OFFS = ((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1))
_BISHOP_DIRS = ((1, 1), (1, -1), (-1, 1), (-1, -1))
_ROOK_DIRS = ((1, 0), (-1, 0), (0, 1), (0, -1))


def square_index(name: str) -> int:
    f = ord(name[0]) - ord("a")
    r = ord(name[1]) - ord("1")
    if not (0 <= f < 8 and 0 <= r < 8):
        raise ValueError(f"bad square {name!r}")
    return r * 8 + f


def square_name(sq: int) -> str:
    return chr(ord("a") + sq % 8) + chr(ord("1") + sq // 8)


class IllegalMoveError(ValueError):
    pass


class AmbiguousCastleError(ValueError):
    pass


class EmptyHistoryError(ValueError):
    pass


class NoLegalMovesError(ValueError):
    pass


class Status(Enum):
    ONGOING = "ONGOING"
    CHECK = "CHECK"
    CHECKMATE = "CHECKMATE"
    STALEMATE = "STALEMATE"
    DRAW_50_MOVE = "DRAW_50_MOVE"
    RESIGNED = "RESIGNED"


@dataclass(frozen=True)
class Move:
    from_sq: int
    to_sq: int
    piece: str  # kind letter, lowercase
    promotion: Optional[str] = None
    capture: bool = False
    en_passant: bool = False
    castle_k: bool = False
    castle_q: bool = False
    double_push: bool = False

    def uci(self) -> str:
        s = square_name(self.from_sq) + square_name(self.to_sq)
        return s + (self.promotion or "")


@dataclass
class _Undo:
    move: Move
    captured: Optional[str]
    castling: str
    ep: Optional[int]
    halfmove: int
    fullmove: int


class GameState:
    """Mutable position plus a reversible move history."""

    def __init__(self, fen: str = START_FEN):
        self.board: List[Optional[str]] = [None] * 64
        self.white_to_move = True
        self.castling = ""
        self.ep: Optional[int] = None
        self.halfmove = 0
        self.fullmove = 1
        self.history: List[_Undo] = []
        self.resigned: Optional[str] = None  # "white" | "black"
        self._load_fen(fen)

    # ---- FEN ----

    def _load_fen(self, fen: str) -> None:
        parts = fen.split()
        if len(parts) < 4:
            raise ValueError(f"bad FEN {fen!r}")
        rows = parts[0].split("/")
        if len(rows) != 8:
            raise ValueError("FEN needs 8 ranks")
        for r, row in enumerate(rows):
            f = 0
            for ch in row:
                if ch.isdigit():
                    f += int(ch)
                else:
                    self.board[(7 - r) * 8 + f] = ch
                    f += 1
            if f != 8:
                raise ValueError(f"bad FEN rank {row!r}")
        self.white_to_move = parts[1] == "w"
        self.castling = "" if parts[2] == "-" else parts[2]
        self.ep = None if parts[3] == "-" else square_index(parts[3])
        self.halfmove = int(parts[4]) if len(parts) > 4 else 0
        self.fullmove = int(parts[5]) if len(parts) > 5 else 1

    def fen(self) -> str:
        rows = []
        for r in range(7, -1, -1):
            row, empty = "", 0
            for f in range(8):
                p = self.board[r * 8 + f]
                if p is None:
                    empty += 1
                else:
                    if empty:
                        row += str(empty)
                        empty = 0
                    row += p
            if empty:
                row += str(empty)
            rows.append(row)
        return " ".join(
            [
                "/".join(rows),
                "w" if self.white_to_move else "b",
                self.castling or "-",
                square_name(self.ep) if self.ep is not None else "-",
                str(self.halfmove),
                str(self.fullmove),
            ]
        )

    # ---- attacks ----

    def _king_square(self, white: bool) -> int:
        target = "K" if white else "k"
        return self.board.index(target)

    def attacked(self, sq: int, by_white: bool) -> bool:
        r, f = sq // 8, sq % 8
        board = self.board
        pawn = "P" if by_white else "p"
        dr = -1 if by_white else 1  # attacker sits one rank behind its strike
        for df in (-1, 1):
            rr, ff = r + dr, f + df
            if 0 <= rr < 8 and 0 <= ff < 8 and board[rr * 8 + ff] == pawn:
                return True
        knight = "N" if by_white else "n"
        for df, dr2 in _KNIGHT_OFFS:
            rr, ff = r + dr2, f + df
            if 0 <= rr < 8 and 0 <= ff < 8 and board[rr * 8 + ff] == knight:
                return True
        king = "K" if by_white else "k"
        for df, dr2 in _KING_OFFS:
            rr, ff = r + dr2, f + df
            if 0 <= rr < 8 and 0 <= ff < 8 and board[rr * 8 + ff] == king:
                return True
        for dirs, kinds in ((_BISHOP_DIRS, "bq"), (_ROOK_DIRS, "rq")):
            hunters = tuple(k.upper() for k in kinds) if by_white else tuple(kinds)
            for df, dr2 in dirs:
                rr, ff = r + dr2, f + df
                while 0 <= rr < 8 and 0 <= ff < 8:
                    p = board[rr * 8 + ff]
                    if p is not None:
                        if p in hunters:
                            return True
                        break
                    rr += dr2
                    ff += df
        return False

    def in_check(self, white: Optional[bool] = None) -> bool:
        side = self.white_to_move if white is None else white
        return self.attacked(self._king_square(side), not side)

    # ---- move generation ----

    def _own(self, p: str) -> bool:
        return p.isupper() == self.white_to_move

    def pseudo_moves(self) -> List[Move]:
        moves: List[Move] = []
        white = self.white_to_move
        board = self.board
        for sq in range(64):
            p = board[sq]
            if p is None or not self._own(p):
                continue
            kind = p.lower()
            r, f = sq // 8, sq % 8
            if kind == "p":
                step = 1 if white else -1
                start_rank = 1 if white else 6
                promo_rank = 7 if white else 0
                one = sq + 8 * step
                if 0 <= one < 64 and board[one] is None:
                    if one // 8 == promo_rank:
                        for pk in "qrbn":
                            moves.append(Move(sq, one, "p", promotion=pk))
                    else:
                        moves.append(Move(sq, one, "p"))
                    two = sq + 16 * step
                    if r == start_rank and board[two] is None:
                        moves.append(Move(sq, two, "p", double_push=True))
                for df in (-1, 1):
                    ff = f + df
                    rr = r + step
                    if not (0 <= ff < 8 and 0 <= rr < 8):
                        continue
                    to = rr * 8 + ff
                    victim = board[to]
                    if victim is not None and not self._own(victim):
                        if rr == promo_rank:
                            for pk in "qrbn":
                                moves.append(Move(sq, to, "p", promotion=pk, capture=True))
                        else:
                            moves.append(Move(sq, to, "p", capture=True))
                    elif self.ep is not None and to == self.ep:
                        moves.append(Move(sq, to, "p", capture=True, en_passant=True))
            elif kind == "n":
                for df, dr in _KNIGHT_OFFS:
                    rr, ff = r + dr, f + df
                    if 0 <= rr < 8 and 0 <= ff < 8:
                        victim = board[rr * 8 + ff]
                        if victim is None or not self._own(victim):
                            moves.append(Move(sq, rr * 8 + ff, "n", capture=victim is not None))
            elif kind == "k":
                for df, dr in _KING_OFFS:
                    rr, ff = r + dr, f + df
                    if 0 <= rr < 8 and 0 <= ff < 8:
                        victim = board[rr * 8 + ff]
                        if victim is None or not self._own(victim):
                            moves.append(Move(sq, rr * 8 + ff, "k", capture=victim is not None))
                moves.extend(self._castle_moves())
            else:
                dirs = {"b": _BISHOP_DIRS, "r": _ROOK_DIRS, "q": _BISHOP_DIRS + _ROOK_DIRS}[kind]
                for df, dr in dirs:
                    rr, ff = r + dr, f + df
                    while 0 <= rr < 8 and 0 <= ff < 8:
                        victim = board[rr * 8 + ff]
                        if victim is None:
                            moves.append(Move(sq, rr * 8 + ff, kind))
                        else:
                            if not self._own(victim):
                                moves.append(Move(sq, rr * 8 + ff, kind, capture=True))
                            break
                        rr += dr
                        ff += df
        return moves

    def _castle_moves(self) -> List[Move]:
        moves: List[Move] = []
        white = self.white_to_move
        home = 0 if white else 56
        king_sq = home + 4
        if self.board[king_sq] != ("K" if white else "k") or self.in_check(white):
            return moves
        k_right = "K" if white else "k"
        q_right = "Q" if white else "q"
        if k_right in self.castling:
            if (
                self.board[home + 5] is None
                and self.board[home + 6] is None
                and self.board[home + 7] == ("R" if white else "r")
                and not self.attacked(home + 5, not white)
                and not self.attacked(home + 6, not white)
            ):
                moves.append(Move(king_sq, home + 6, "k", castle_k=True))
        if q_right in self.castling:
            if (
                self.board[home + 1] is None
                and self.board[home + 2] is None
                and self.board[home + 3] is None
                and self.board[home] == ("R" if white else "r")
                and not self.attacked(home + 3, not white)
                and not self.attacked(home + 2, not white)
            ):
                moves.append(Move(king_sq, home + 2, "k", castle_q=True))
        return moves

    def legal_moves(self) -> List[Move]:
        legal = []
        for m in self.pseudo_moves():
            self.make_move(m)
            if not self.in_check(not self.white_to_move):
                legal.append(m)
            self.unmake_move()
        return legal

    # ---- make / unmake ----

    def make_move(self, m: Move) -> None:
        white = self.white_to_move
        board = self.board
        captured = board[m.to_sq]
        if m.en_passant:
            victim_sq = m.to_sq + (-8 if white else 8)
            captured = board[victim_sq]
            board[victim_sq] = None
        self.history.append(
            _Undo(m, captured, self.castling, self.ep, self.halfmove, self.fullmove)
        )
        piece = board[m.from_sq]
        board[m.from_sq] = None
        if m.promotion:
            piece = m.promotion.upper() if white else m.promotion
        board[m.to_sq] = piece
        if m.castle_k or m.castle_q:
            home = 0 if white else 56
            rook = "R" if white else "r"
            if m.castle_k:
                board[home + 7] = None
                board[home + 5] = rook
            else:
                board[home] = None
                board[home + 3] = rook
        # castling rights fall when king or rook moves, or a rook is taken
        rights = self.castling
        if m.piece == "k":
            rights = rights.replace("K", "").replace("Q", "") if white else rights.replace(
                "k", ""
            ).replace("q", "")
        for sq, flag in ((0, "Q"), (7, "K"), (56, "q"), (63, "k")):
            if m.from_sq == sq or m.to_sq == sq:
                rights = rights.replace(flag, "")
        self.castling = rights
        self.ep = (m.from_sq + m.to_sq) // 2 if m.double_push else None
        self.halfmove = 0 if (m.piece == "p" or m.capture) else self.halfmove + 1
        if not white:
            self.fullmove += 1
        self.white_to_move = not white

    def unmake_move(self) -> None:
        if not self.history:
            raise EmptyHistoryError("no moves to undo")
        rec = self.history.pop()
        m = rec.move
        self.white_to_move = not self.white_to_move
        white = self.white_to_move
        board = self.board
        piece = board[m.to_sq]
        if m.promotion:
            piece = "P" if white else "p"
        board[m.from_sq] = piece
        board[m.to_sq] = None
        if m.en_passant:
            board[m.to_sq + (-8 if white else 8)] = rec.captured
        elif rec.captured is not None:
            board[m.to_sq] = rec.captured
        if m.castle_k or m.castle_q:
            home = 0 if white else 56
            rook = "R" if white else "r"
            if m.castle_k:
                board[home + 5] = None
                board[home + 7] = rook
            else:
                board[home + 3] = None
                board[home] = rook
        self.castling = rec.castling
        self.ep = rec.ep
        self.halfmove = rec.halfmove
        self.fullmove = rec.fullmove

    # ---- status ----

    def status(self) -> Status:
        if self.resigned is not None:
            return Status.RESIGNED
        if self.halfmove >= 100:
            return Status.DRAW_50_MOVE
        has_moves = bool(self.legal_moves())
        checked = self.in_check()
        if not has_moves:
            return Status.CHECKMATE if checked else Status.STALEMATE
        return Status.CHECK if checked else Status.ONGOING


def initial_position() -> GameState:
    return GameState(START_FEN)


def perft(state: GameState, depth: int) -> int:
    if depth == 0:
        return 1
    total = 0
    for m in state.legal_moves():
        state.make_move(m)
        total += perft(state, depth - 1)
        state.unmake_move()
    return total


def material_balance(state: GameState, for_white: bool) -> int:
    score = 0
    for p in state.board:
        if p is None:
            continue
        v = MATERIAL[p.lower()]
        score += v if (p.isupper() == for_white) else -v
    return score


def computer_move(
    state: GameState, policy: str = "RANDOM", seed: Optional[int] = None
) -> Move:
    """Pick a reply: RANDOM (uniform, seedable) or GREEDY_MATERIAL
    (maximize material after the move, random among ties)."""
    moves = state.legal_moves()
    if not moves:
        raise NoLegalMovesError("no legal moves")
    rng = random.Random(seed)
    if policy == "RANDOM":
        return rng.choice(moves)
    if policy != "GREEDY_MATERIAL":
        raise ValueError(f"unknown policy {policy!r}")
    mover_white = state.white_to_move
    best_score = None
    best: List[Move] = []
    for m in moves:
        state.make_move(m)
        score = material_balance(state, mover_white)
        state.unmake_move()
        if best_score is None or score > best_score:
            best_score, best = score, [m]
        elif score == best_score:
            best.append(m)
    return rng.choice(best)
