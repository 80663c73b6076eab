/**
 * Live-game view state. Holds exactly what the service last reported:
 * board FEN, status, expected-next-token hint, recognized-word ticker,
 * pending-move banner. Never computes chess state locally.
 */

import {
  ChessServiceApi,
  PendingMove,
  RecognitionOutcome,
  SessionState,
} from "./api.js";

export interface TickerEntry {
  word: string;
  confidence: number; // winning votes / k
}

export interface UiSessionView {
  fen: string;
  status: string;
  expecting: string;
  ticker: TickerEntry[];
  pending: PendingMove | null;
  warning: string | null;
  closed: boolean;
}

const START_FEN = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";

export class GameSession {
  view: UiSessionView = {
    fen: START_FEN,
    status: "ONGOING",
    expecting: "piece or control word",
    ticker: [],
    pending: null,
    warning: null,
    closed: false,
  };
  private busy = false;

  constructor(
    private api: ChessServiceApi,
    private sessionId: string,
  ) {}

  syncState(state: SessionState): void {
    this.view = {
      ...this.view,
      fen: state.fen,
      status: state.status,
      expecting: state.expecting,
      pending: state.pending,
      closed: state.closed,
    };
  }

  /** One in-flight audio POST at a time; capture stays disabled meanwhile. */
  get captureEnabled(): boolean {
    return !this.busy && !this.view.closed;
  }

  async submitClip(wav: Blob): Promise<RecognitionOutcome> {
    if (this.busy) {
      throw new Error("a clip is already in flight");
    }
    this.busy = true;
    try {
      const out = await this.api.submitAudio(this.sessionId, wav);
      this.applyOutcome(out);
      return out;
    } finally {
      this.busy = false;
    }
  }

  applyOutcome(out: RecognitionOutcome): void {
    if (out.error) {
      // validation failure: warn, leave the board alone
      this.view = { ...this.view, warning: out.reason ?? out.error, fen: out.fen };
      return;
    }
    const ticker = [...this.view.ticker];
    if (out.recognized && out.votes) {
      const total = Object.values(out.votes).reduce((a, b) => a + b, 0);
      ticker.push({ word: out.recognized, confidence: out.votes[out.recognized] / total });
    }
    const closed = (out.applied ?? []).some((a) => a.command === "Close" && a.ok);
    this.view = {
      fen: out.fen,
      status: out.status ?? this.view.status,
      expecting: out.expecting ?? this.view.expecting,
      ticker,
      pending: out.pending ?? null,
      warning: out.parse_error ? `unexpected word: ${out.parse_error.token}` : null,
      closed: closed || this.view.closed,
    };
  }

  async confirm(accept: boolean): Promise<void> {
    const out = await this.api.confirmPending(this.sessionId, accept);
    this.view = { ...this.view, pending: null, fen: out.fen, status: out.status ?? this.view.status };
  }
}
