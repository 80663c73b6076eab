/**
 * Enrollment wizard state machine: walks a new speaker through every
 * vocabulary word, N takes per word. The service is the authority on
 * acceptance and cursor position; this class just mirrors its answers so
 * the UI can prompt, show progress, and replay rejection warnings. A
 * wizard can resume mid-way by seeding completedTakes from the profile.
 */

import { ChessServiceApi, EnrollmentTakeResult } from "./api.js";

export interface WizardView {
  currentWord: string | null;
  currentWordDisplay: string | null;
  completedTakes: number;
  totalTakes: number;
  progress: number; // 0..1
  complete: boolean;
  lastWarning: string | null;
}

export class EnrollmentWizard {
  private view: WizardView;

  constructor(
    private api: ChessServiceApi,
    private speakerId: string,
    private wordOrder: { id: string; display: string }[],
    private takesPerWord = 10,
    completedTakes = 0,
  ) {
    this.view = this.viewFor(completedTakes, null);
  }

  private viewFor(completedTakes: number, warning: string | null): WizardView {
    const total = this.wordOrder.length * this.takesPerWord;
    const wordIndex = Math.floor(completedTakes / this.takesPerWord);
    const word = wordIndex < this.wordOrder.length ? this.wordOrder[wordIndex] : null;
    return {
      currentWord: word ? word.id : null,
      currentWordDisplay: word ? word.display : null,
      completedTakes,
      totalTakes: total,
      progress: completedTakes / total,
      complete: completedTakes >= total,
      lastWarning: warning,
    };
  }

  get state(): WizardView {
    return this.view;
  }

  /** Ship one recorded take; the view advances only if the service accepts. */
  async submitTake(wav: Blob): Promise<EnrollmentTakeResult> {
    const result = await this.api.submitEnrollmentTake(this.speakerId, wav);
    this.view = this.viewFor(
      result.completed_takes,
      result.accepted ? null : result.reason,
    );
    return result;
  }
}
