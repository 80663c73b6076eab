"""Real-time HTTP service: recognition -> grammar -> chess, plus speaker
enrollment and session management.

Commands within a session are serialized under a per-session lock;
different sessions run independently. Every state-changing action is
appended to the session's event log, and replaying a log against a fresh
board reproduces the session's final position (see ``replay_events``).
"""

from __future__ import annotations

import argparse
import itertools
import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, StreamingResponse

from . import audio, commands, features, grammar, profiles
from .chessgame import GameState, Status
from .knn import KnnModel, predict


@dataclass
class ServiceConfig:
    corpus_root: Path
    feature_kind: features.BankKind = features.BankKind.GAMMATONE
    k: int = 1
    confirm_moves: bool = True
    takes_per_word: int = profiles.DEFAULT_TAKES_PER_WORD
    listen_host: str = "127.0.0.1"
    listen_port: int = 8000

    @staticmethod
    def from_file(path: Path) -> "ServiceConfig":
        obj = json.loads(Path(path).read_text())
        return ServiceConfig(
            corpus_root=Path(obj["corpus_root"]),
            feature_kind=features.BankKind(obj.get("feature_kind", "GAMMATONE")),
            k=int(obj.get("k", 1)),
            confirm_moves=bool(obj.get("confirm_moves", True)),
            takes_per_word=int(obj.get("takes_per_word", 10)),
            listen_host=obj.get("listen_host", "127.0.0.1"),
            listen_port=int(obj.get("listen_port", 8000)),
        )


class ServiceError(Exception):
    def __init__(self, code: str, message: str = "", http_status: int = 400):
        super().__init__(message or code)
        self.code = code
        self.http_status = http_status


@dataclass
class Session:
    session_id: str
    mode: str  # VS_COMPUTER | TWO_PLAYER
    play_method: str  # PERSON | GENERAL
    speaker_id: Optional[str]
    feature_kind: features.BankKind
    confirm_moves: bool
    model: KnnModel
    game: GameState = field(default_factory=GameState)
    parser: grammar.ParserState = grammar.INITIAL_STATE
    pending: Optional[grammar.MoveCommand] = None
    event_log: List[dict] = field(default_factory=list)
    closed: bool = False
    lock: threading.Lock = field(default_factory=threading.Lock)
    _seq: "itertools.count" = field(default_factory=itertools.count)

    def log(self, kind: str, **data) -> dict:
        entry = {"seq": next(self._seq), "type": kind, **data}
        self.event_log.append(entry)
        return entry


def replay_events(event_log: List[dict]) -> str:
    """Rebuild the final FEN from a session's event log."""
    game = GameState()
    for e in event_log:
        t = e["type"]
        if t == "move_applied" or t == "computer_move":
            uci = e["move"]
            matched = [m for m in game.legal_moves() if m.uci() == uci]
            if len(matched) != 1:
                raise ValueError(f"unreplayable move {uci}")
            game.make_move(matched[0])
        elif t == "undo":
            game.unmake_move()
        elif t == "new_game":
            game = GameState()
        elif t == "resign":
            game.resigned = e["side"]
    return game.fen()


class ChessService:
    """All service behavior, independent of the HTTP layer."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.layout = profiles.CorpusLayout(Path(config.corpus_root))
        self.sessions: Dict[str, Session] = {}
        self.enrollments: Dict[str, profiles.EnrollmentSession] = {}
        self._datasets: Dict[features.BankKind, object] = {}
        self._global_lock = threading.Lock()

    # ---- profiles / enrollment ----

    def list_profiles(self) -> List[dict]:
        profs = profiles.load_profiles(self.layout)
        return [
            {
                "speaker_id": p.speaker_id,
                "display_name": p.display_name,
                "take_count": p.take_count,
                "note": p.note,
            }
            for p in profs.values()
        ]

    def create_profile(self, speaker_id: str, display_name: str, note: str = "") -> dict:
        if not speaker_id or "/" in speaker_id:
            raise ServiceError("BAD_SPEAKER_ID")
        profs = profiles.load_profiles(self.layout)
        profs[speaker_id] = profiles.SpeakerProfile(speaker_id, display_name or speaker_id, note)
        profiles.save_profile_index(self.layout, profs)
        self.enrollments[speaker_id] = profiles.EnrollmentSession(
            speaker_id, self.layout, self.config.takes_per_word
        )
        return {"speaker_id": speaker_id, "display_name": display_name or speaker_id}

    def submit_enrollment_take(self, speaker_id: str, wav_bytes: bytes) -> dict:
        session = self.enrollments.get(speaker_id)
        if session is None:
            raise ServiceError("UNKNOWN_SPEAKER", http_status=404)
        if session.complete:
            raise ServiceError("SESSION_COMPLETE")
        try:
            clip = audio.decode_wav(wav_bytes)
        except ValueError as exc:
            raise ServiceError("BAD_AUDIO", str(exc))
        word_before = session.current_word
        session, verdict = profiles.submit_take(session, clip)
        self.enrollments[speaker_id] = session
        self._datasets.clear()  # corpus changed; rebuild models lazily
        return {
            "accepted": verdict.accepted,
            "reason": verdict.reason.value,
            "word": word_before,
            "word_display": grammar.display_of(word_before),
            "completed_takes": session.completed_takes,
            "total_takes": len(session.word_order) * session.takes_per_word,
            "complete": session.complete,
            "next_word": session.current_word,
        }

    # ---- model plumbing ----

    def _dataset(self, kind: features.BankKind):
        with self._global_lock:
            if kind not in self._datasets:
                ds, report = profiles.load_corpus(self.layout, kind)
                self._datasets[kind] = (ds, report)
            return self._datasets[kind]

    # ---- sessions ----

    def create_session(
        self,
        mode: str = "VS_COMPUTER",
        play_method: str = "GENERAL",
        speaker_id: Optional[str] = None,
        feature_kind: Optional[str] = None,
        k: Optional[int] = None,
        confirm_moves: Optional[bool] = None,
    ) -> Session:
        if mode not in ("VS_COMPUTER", "TWO_PLAYER"):
            raise ServiceError("BAD_MODE")
        kind = features.BankKind(feature_kind) if feature_kind else self.config.feature_kind
        ds, _ = self._dataset(kind)
        k_eff = k or self.config.k
        if play_method == "PERSON":
            if not speaker_id:
                raise ServiceError("UNKNOWN_SPEAKER", http_status=404)
            try:
                model = profiles.build_word_model(ds, "PERSON", speaker_id, k_eff)
            except KeyError:
                raise ServiceError("UNKNOWN_SPEAKER", http_status=404)
            per_word = {}
            for i in range(len(model.training)):
                per_word[model.training.words[i]] = per_word.get(model.training.words[i], 0) + 1
            if len(per_word) < len(grammar.WORD_IDS):
                raise ServiceError("INSUFFICIENT_ENROLLMENT")
        elif play_method == "GENERAL":
            try:
                model = profiles.build_word_model(ds, "GENERAL", k=k_eff)
            except ValueError:
                raise ServiceError("INSUFFICIENT_ENROLLMENT")
        else:
            raise ServiceError("BAD_PLAY_METHOD")
        session = Session(
            session_id=uuid.uuid4().hex,
            mode=mode,
            play_method=play_method,
            speaker_id=speaker_id,
            feature_kind=kind,
            confirm_moves=self.config.confirm_moves if confirm_moves is None else confirm_moves,
            model=model,
        )
        with self._global_lock:
            self.sessions[session.session_id] = session
        session.log("session_created", mode=mode, play_method=play_method)
        return session

    def _get(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None or session.closed:
            raise ServiceError("UNKNOWN_SESSION", http_status=404)
        return session

    def _apply_event(self, session: Session, event) -> dict:
        """Apply one completed grammar command and log the outcome."""
        result = commands.apply_command(session.game, event)
        out = {
            "command": type(event).__name__,
            "ok": result.ok,
            "error": result.error,
            "status": result.status.value if result.status else None,
        }
        if result.ok:
            if result.move is not None:
                session.log("move_applied", move=result.move.uci())
            elif isinstance(event, grammar.Undo):
                session.log("undo")
            elif result.new_game:
                session.log("new_game")
            elif result.resigned:
                session.log("resign", side=session.game.resigned)
            if result.mate_claimed_correct is not None:
                out["mate_claimed_correct"] = result.mate_claimed_correct
            if result.session_signal == "close":
                session.closed = True
                session.log("session_closed")
                out["closed"] = True
            if result.move is not None and session.mode == "VS_COMPUTER":
                if session.game.status() in (Status.ONGOING, Status.CHECK):
                    reply = commands.apply_computer_reply(session.game)
                    session.log("computer_move", move=reply.uci())
                    out["computer_move"] = reply.uci()
        else:
            session.log("command_rejected", command=out["command"], error=result.error)
        return out

    def submit_audio(self, session_id: str, wav_bytes: bytes) -> dict:
        session = self._get(session_id)
        with session.lock:
            try:
                clip = audio.decode_wav(wav_bytes)
            except ValueError as exc:
                session.log("bad_audio", reason="MALFORMED")
                return {"error": "BAD_AUDIO", "reason": f"MALFORMED: {exc}", "fen": session.game.fen()}
            clip = audio.resample(clip, audio.CANONICAL_RATE)
            verdict = audio.validate_take(clip)
            if not verdict.accepted:
                session.log("bad_audio", reason=verdict.reason.value)
                return {
                    "error": "BAD_AUDIO",
                    "reason": verdict.reason.value,
                    "fen": session.game.fen(),
                }
            trimmed = audio.trim_silence(clip)
            emb = features.clip_embedding(
                trimmed.samples, trimmed.sample_rate, profiles._bank_for(session.feature_kind)
            )
            pred = predict(session.model, emb.values)
            session.log("recognized", word=pred.label, votes=pred.votes)
            parser, events, perr = grammar.feed_token(session.parser, pred.label)
            session.parser = parser
            outcome: dict = {
                "recognized": pred.label,
                "votes": pred.votes,
                "mean_distance": pred.mean_distance,
                "expecting": grammar.expected_slot_name(parser),
                "applied": [],
            }
            if perr is not None:
                session.log("parse_error", code=perr.code, token=perr.token)
                outcome["parse_error"] = {"code": perr.code, "token": perr.token}
            for event in events:
                if session.confirm_moves and isinstance(event, grammar.MoveCommand):
                    session.pending = event
                    session.log("pending_move", command=_move_json(event))
                    outcome["pending"] = _move_json(event)
                else:
                    outcome["applied"].append(self._apply_event(session, event))
            outcome["fen"] = session.game.fen()
            outcome["status"] = session.game.status().value
            return outcome

    def get_state(self, session_id: str, last_events: int = 20) -> dict:
        session = self.sessions.get(session_id)
        if session is None:
            raise ServiceError("UNKNOWN_SESSION", http_status=404)
        return {
            "session_id": session.session_id,
            "mode": session.mode,
            "play_method": session.play_method,
            "fen": session.game.fen(),
            "status": session.game.status().value,
            "expecting": grammar.expected_slot_name(session.parser),
            "pending": _move_json(session.pending) if session.pending else None,
            "closed": session.closed,
            "events": session.event_log[-last_events:],
        }

    def confirm_pending(self, session_id: str, accept: bool) -> dict:
        session = self._get(session_id)
        with session.lock:
            if session.pending is None:
                raise ServiceError("NO_PENDING")
            move = session.pending
            session.pending = None
            if not accept:
                session.parser = grammar.reset(session.parser)
                session.log("pending_declined")
                return {"applied": None, "fen": session.game.fen(), "status": session.game.status().value}
            out = self._apply_event(session, move)
            return {"applied": out, "fen": session.game.fen(), "status": session.game.status().value}

    def close_session(self, session_id: str) -> None:
        session = self.sessions.get(session_id)
        if session is None:
            raise ServiceError("UNKNOWN_SESSION", http_status=404)
        session.closed = True
        session.log("session_closed")


def _move_json(cmd: grammar.MoveCommand) -> dict:
    return {
        "piece": cmd.piece,
        "from": cmd.from_square,
        "to": cmd.to_square,
        "promotion": cmd.promotion,
    }


def create_app(config: ServiceConfig):
    service = ChessService(config)
    app = FastAPI(title="voicechess")
    app.state.service = service

    @app.exception_handler(ServiceError)
    async def _service_error(request, exc: ServiceError):
        return JSONResponse({"error": exc.code, "detail": str(exc)}, status_code=exc.http_status)

    @app.get("/profiles")
    def list_profiles():
        return service.list_profiles()

    @app.post("/profiles")
    async def create_profile(request: Request):
        body = await request.json()
        return service.create_profile(
            body.get("speaker_id", ""), body.get("display_name", ""), body.get("note", "")
        )

    @app.post("/profiles/{speaker_id}/enrollment/takes")
    async def enrollment_take(speaker_id: str, request: Request):
        return service.submit_enrollment_take(speaker_id, await request.body())

    @app.post("/sessions")
    async def create_session(request: Request):
        body = await request.json()
        session = service.create_session(
            mode=body.get("mode", "VS_COMPUTER"),
            play_method=body.get("play_method", "GENERAL"),
            speaker_id=body.get("speaker_id"),
            feature_kind=body.get("feature_kind"),
            k=body.get("k"),
            confirm_moves=body.get("confirm_moves"),
        )
        return service.get_state(session.session_id)

    @app.post("/sessions/{session_id}/audio")
    async def submit_audio(session_id: str, request: Request):
        return service.submit_audio(session_id, await request.body())

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str):
        return service.get_state(session_id)

    @app.post("/sessions/{session_id}/confirm")
    async def confirm(session_id: str, request: Request):
        body = await request.json()
        return service.confirm_pending(session_id, bool(body.get("accept")))

    @app.delete("/sessions/{session_id}")
    def delete_session(session_id: str):
        service.close_session(session_id)
        return {"closed": True}

    @app.get("/sessions/{session_id}/events")
    def events(session_id: str, since: int = 0):
        session = service.sessions.get(session_id)
        if session is None:
            raise ServiceError("UNKNOWN_SESSION", http_status=404)

        def stream():
            for e in session.event_log[since:]:
                yield f"data: {json.dumps(e)}\n\n"

        return StreamingResponse(stream(), media_type="text/event-stream")

    return app


def main(argv=None):
    import uvicorn

    parser = argparse.ArgumentParser(description="Run the voice-chess service")
    parser.add_argument("--config", type=Path, help="JSON config file")
    parser.add_argument("--corpus-root", type=Path, default=Path("corpus"))
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    args = parser.parse_args(argv)
    if args.config:
        config = ServiceConfig.from_file(args.config)
    else:
        config = ServiceConfig(corpus_root=args.corpus_root, listen_host=args.host, listen_port=args.port)
    uvicorn.run(create_app(config), host=config.listen_host, port=config.listen_port)


if __name__ == "__main__":
    main()
