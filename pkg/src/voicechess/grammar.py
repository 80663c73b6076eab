"""The 29-word command vocabulary and the incremental token parser.

Each recognized clip yields one vocabulary token. Tokens are fed one at a
time; the parser either waits for more, completes one or more commands, or
reports an unexpected token and resets. Move grammar:

    PIECE FILE RANK FILE RANK [PIECE]

where the trailing piece names the promotion for a pawn reaching the last
rank (queen by default). "rok" starts a castle (g -> kingside, c ->
queenside, anything else completes it as AUTO and the token is replayed).
All other control words complete immediately.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from importlib import resources
from typing import List, Optional, Tuple


class Role(Enum):
    FILE = "FILE"
    RANK = "RANK"
    PIECE = "PIECE"
    CONTROL = "CONTROL"


@dataclass(frozen=True)
class VocabEntry:
    word_id: str
    display: str
    role: Role


def load_vocabulary() -> List[VocabEntry]:
    raw = json.loads(
        resources.files("voicechess.data").joinpath("vocabulary.json").read_text("utf-8")
    )
    entries = [VocabEntry(e["word_id"], e["display"], Role(e["role"])) for e in raw]
    assert len(entries) == 29
    return entries


VOCABULARY = load_vocabulary()
WORD_IDS = [e.word_id for e in VOCABULARY]
_ROLE = {e.word_id: e.role for e in VOCABULARY}
_DISPLAY = {e.word_id: e.display for e in VOCABULARY}

PIECE_NAMES = {
    "kale": "rook",
    "at": "knight",
    "fil": "bishop",
    "vezir": "queen",
    "sah": "king",
    "piyon": "pawn",
}
PROMOTION_WORDS = {"vezir": "queen", "kale": "rook", "fil": "bishop", "at": "knight"}


class CastleSide(Enum):
    KINGSIDE = "KINGSIDE"
    QUEENSIDE = "QUEENSIDE"
    AUTO = "AUTO"


@dataclass(frozen=True)
class MoveCommand:
    piece: str  # rook/knight/bishop/queen/king/pawn
    from_square: str  # e.g. "b1"
    to_square: str
    promotion: Optional[str] = None


@dataclass(frozen=True)
class Castle:
    side: CastleSide


@dataclass(frozen=True)
class NewGame:
    pass


@dataclass(frozen=True)
class Start:
    pass


@dataclass(frozen=True)
class Resign:
    pass


@dataclass(frozen=True)
class Undo:
    pass


@dataclass(frozen=True)
class Close:
    pass


@dataclass(frozen=True)
class ClaimMate:
    pass


CommandEvent = object  # any of the dataclasses above

_SIMPLE_CONTROLS = {
    "basla": Start,
    "yeni_oyun": NewGame,
    "cekil": Resign,
    "geri_al": Undo,
    "kapat": Close,
    "mat": ClaimMate,
}

# Slot sequence while a move is being built.
_MOVE_SLOTS = (Role.PIECE, Role.FILE, Role.RANK, Role.FILE, Role.RANK)


@dataclass(frozen=True)
class ParserState:
    pending_tokens: Tuple[str, ...] = ()
    awaiting_castle: bool = False
    awaiting_promotion: bool = False

    @property
    def expected_roles(self) -> Tuple[Role, ...]:
        """Roles acceptable for the next token (empty = anything)."""
        if self.awaiting_castle or self.awaiting_promotion:
            return ()
        if not self.pending_tokens:
            return ()
        return (_MOVE_SLOTS[len(self.pending_tokens)],)


@dataclass(frozen=True)
class ParseError:
    code: str  # UNEXPECTED_TOKEN | UNKNOWN_WORD
    token: str


INITIAL_STATE = ParserState()


def reset(state: ParserState) -> ParserState:
    return INITIAL_STATE


def _move_from_tokens(tokens: Tuple[str, ...], promotion: Optional[str]) -> MoveCommand:
    piece, f1, r1, f2, r2 = tokens
    return MoveCommand(PIECE_NAMES[piece], f1 + r1, f2 + r2, promotion)


def _needs_promotion(tokens: Tuple[str, ...]) -> bool:
    return tokens[0] == "piyon" and tokens[4] in ("1", "8")


def feed_token(
    state: ParserState, word_id: str
) -> Tuple[ParserState, List[CommandEvent], Optional[ParseError]]:
    """Advance the parser by one token.

    Returns the new state, the commands completed by this token (a castle
    or promotion default can complete together with the replayed token's
    own command, hence a list), and an error if the token did not fit.
    Errors reset the parser.
    """
    if word_id not in _ROLE:
        return INITIAL_STATE, [], ParseError("UNKNOWN_WORD", word_id)

    if state.awaiting_castle:
        if _ROLE[word_id] is Role.FILE and word_id in ("g", "c"):
            side = CastleSide.KINGSIDE if word_id == "g" else CastleSide.QUEENSIDE
            return INITIAL_STATE, [Castle(side)], None
        nxt, events, err = feed_token(INITIAL_STATE, word_id)
        return nxt, [Castle(CastleSide.AUTO)] + events, err

    if state.awaiting_promotion:
        if word_id in PROMOTION_WORDS:
            move = _move_from_tokens(state.pending_tokens, PROMOTION_WORDS[word_id])
            return INITIAL_STATE, [move], None
        move = _move_from_tokens(state.pending_tokens, "queen")
        nxt, events, err = feed_token(INITIAL_STATE, word_id)
        return nxt, [move] + events, err

    role = _ROLE[word_id]
    if not state.pending_tokens:
        if role is Role.CONTROL:
            if word_id == "rok":
                return replace(INITIAL_STATE, awaiting_castle=True), [], None
            return INITIAL_STATE, [_SIMPLE_CONTROLS[word_id]()], None
        if role is Role.PIECE:
            return ParserState(pending_tokens=(word_id,)), [], None
        return INITIAL_STATE, [], ParseError("UNEXPECTED_TOKEN", word_id)

    expected = _MOVE_SLOTS[len(state.pending_tokens)]
    if role is not expected:
        return INITIAL_STATE, [], ParseError("UNEXPECTED_TOKEN", word_id)
    tokens = state.pending_tokens + (word_id,)
    if len(tokens) < 5:
        return ParserState(pending_tokens=tokens), [], None
    if _needs_promotion(tokens):
        return ParserState(pending_tokens=tokens, awaiting_promotion=True), [], None
    return INITIAL_STATE, [_move_from_tokens(tokens, None)], None


def flush(state: ParserState) -> Tuple[ParserState, List[CommandEvent]]:
    """Complete any command waiting only on an optional token."""
    if state.awaiting_castle:
        return INITIAL_STATE, [Castle(CastleSide.AUTO)]
    if state.awaiting_promotion:
        return INITIAL_STATE, [_move_from_tokens(state.pending_tokens, "queen")]
    return state, []


def display_of(word_id: str) -> str:
    return _DISPLAY[word_id]


def word_id_of_display(display: str) -> str:
    for e in VOCABULARY:
        if e.display == display:
            return e.word_id
    raise KeyError(display)


def expected_slot_name(state: ParserState) -> str:
    """Human-readable hint for the UI: what the parser expects next."""
    if state.awaiting_castle:
        return "castle side (g/c) or next command"
    if state.awaiting_promotion:
        return "promotion piece or next command"
    if not state.pending_tokens:
        return "piece or control word"
    return _MOVE_SLOTS[len(state.pending_tokens)].value.lower()
