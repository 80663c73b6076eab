/**
 * Typed client for the voice-chess service HTTP API.
 *
 * The UI talks to the backend only through this interface; tests substitute
 * a mock implementation.
 */

export interface ProfileInfo {
  speaker_id: string;
  display_name: string;
  take_count: number;
}

export interface EnrollmentTakeResult {
  accepted: boolean;
  reason: string; // OK | TOO_QUIET | TOO_SHORT | TOO_LONG | CLIPPED
  word: string;
  word_display: string;
  completed_takes: number;
  total_takes: number;
  complete: boolean;
  next_word: string | null;
}

export interface PendingMove {
  piece: string;
  from: string;
  to: string;
  promotion: string | null;
}

export interface AppliedCommand {
  command: string;
  ok: boolean;
  error: string | null;
  status: string | null;
  computer_move?: string;
}

export interface RecognitionOutcome {
  error?: string;
  reason?: string;
  recognized?: string;
  votes?: Record<string, number>;
  expecting?: string;
  parse_error?: { code: string; token: string };
  pending?: PendingMove;
  applied?: AppliedCommand[];
  fen: string;
  status?: string;
}

export interface SessionState {
  session_id: string;
  fen: string;
  status: string;
  expecting: string;
  pending: PendingMove | null;
  closed: boolean;
  events: unknown[];
}

export interface SessionConfig {
  mode?: "VS_COMPUTER" | "TWO_PLAYER";
  play_method?: "PERSON" | "GENERAL";
  speaker_id?: string;
  confirm_moves?: boolean;
}

export interface ChessServiceApi {
  listProfiles(): Promise<ProfileInfo[]>;
  createProfile(speakerId: string, displayName: string): Promise<void>;
  submitEnrollmentTake(speakerId: string, wav: Blob): Promise<EnrollmentTakeResult>;
  createSession(config: SessionConfig): Promise<SessionState>;
  submitAudio(sessionId: string, wav: Blob): Promise<RecognitionOutcome>;
  getState(sessionId: string): Promise<SessionState>;
  confirmPending(sessionId: string, accept: boolean): Promise<RecognitionOutcome>;
  closeSession(sessionId: string): Promise<void>;
}

export class HttpChessService implements ChessServiceApi {
  constructor(private baseUrl: string) {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.baseUrl + path, init);
    if (!res.ok) {
      const body = await res.text();
      throw new Error(`${res.status} ${body}`);
    }
    return (await res.json()) as T;
  }

  listProfiles() {
    return this.json<ProfileInfo[]>("/profiles");
  }

  createProfile(speakerId: string, displayName: string) {
    return this.json<void>("/profiles", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ speaker_id: speakerId, display_name: displayName }),
    });
  }

  submitEnrollmentTake(speakerId: string, wav: Blob) {
    return this.json<EnrollmentTakeResult>(`/profiles/${speakerId}/enrollment/takes`, {
      method: "POST",
      body: wav,
    });
  }

  createSession(config: SessionConfig) {
    return this.json<SessionState>("/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(config),
    });
  }

  submitAudio(sessionId: string, wav: Blob) {
    return this.json<RecognitionOutcome>(`/sessions/${sessionId}/audio`, {
      method: "POST",
      body: wav,
    });
  }

  getState(sessionId: string) {
    return this.json<SessionState>(`/sessions/${sessionId}/state`);
  }

  confirmPending(sessionId: string, accept: boolean) {
    return this.json<RecognitionOutcome>(`/sessions/${sessionId}/confirm`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ accept }),
    });
  }

  async closeSession(sessionId: string) {
    await this.json<unknown>(`/sessions/${sessionId}`, { method: "DELETE" });
  }
}
