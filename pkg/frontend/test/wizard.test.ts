import { describe, expect, it } from "vitest";

import { EnrollmentWizard } from "../src/wizard.js";
import { MockService } from "./mockService.js";

const WORDS = Array.from({ length: 29 }, (_, i) => ({
  id: `word${i}`,
  display: `word${i}`,
}));

function clip(): Blob {
  return new Blob([new Uint8Array(4)], { type: "audio/wav" });
}

describe("EnrollmentWizard", () => {
  it("starts at 0/290 on the first word", () => {
    const wizard = new EnrollmentWizard(new MockService(), "s1", WORDS, 10);
    expect(wizard.state).toMatchObject({
      currentWord: "word0",
      completedTakes: 0,
      totalTakes: 290,
      progress: 0,
      complete: false,
    });
  });

  it("shows 10/290 and advances to the second word after ten accepted takes", async () => {
    const wizard = new EnrollmentWizard(new MockService(), "s1", WORDS, 10);
    for (let i = 0; i < 10; i++) {
      await wizard.submitTake(clip());
    }
    expect(wizard.state.completedTakes).toBe(10);
    expect(wizard.state.totalTakes).toBe(290);
    expect(wizard.state.progress).toBeCloseTo(10 / 290, 12);
    expect(wizard.state.currentWord).toBe("word1");
    expect(wizard.state.lastWarning).toBeNull();
  });

  it("does not advance on a rejected take and surfaces the reason", async () => {
    const api = new MockService();
    const wizard = new EnrollmentWizard(api, "s1", WORDS, 10);
    await wizard.submitTake(clip());
    api.rejectNext = "TOO_QUIET";
    const result = await wizard.submitTake(clip());
    expect(result.accepted).toBe(false);
    expect(wizard.state.completedTakes).toBe(1);
    expect(wizard.state.currentWord).toBe("word0");
    expect(wizard.state.lastWarning).toBe("TOO_QUIET");
    // next accepted take clears the warning and advances again
    await wizard.submitTake(clip());
    expect(wizard.state.completedTakes).toBe(2);
    expect(wizard.state.lastWarning).toBeNull();
  });

  it("resumes mid-way from a stored take count", () => {
    const wizard = new EnrollmentWizard(new MockService(), "s1", WORDS, 10, 25);
    expect(wizard.state.currentWord).toBe("word2");
    expect(wizard.state.completedTakes).toBe(25);
  });

  it("completes when every take is in", async () => {
    const api = new MockService();
    api.completedTakes = 289;
    const wizard = new EnrollmentWizard(api, "s1", WORDS, 10, 289);
    const result = await wizard.submitTake(clip());
    expect(result.complete).toBe(true);
    expect(wizard.state).toMatchObject({
      complete: true,
      completedTakes: 290,
      progress: 1,
      currentWord: null,
    });
  });
});
