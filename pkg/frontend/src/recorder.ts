/**
 * Word-clip capture: silence-gated end-pointing over incoming PCM frames
 * and 16 kHz mono 16-bit WAV encoding. The end-pointer and encoder are
 * pure so they test without a microphone; `captureWordClip` wires them to
 * getUserMedia + an AudioWorklet-style PCM callback in the browser.
 */

export const TARGET_RATE = 16000;
export const TRAILING_SILENCE_MS = 400;
export const MAX_CLIP_MS = 2000;
const SILENCE_RMS = 0.01;

/** Encode float PCM in [-1, 1] as a 44-byte-header mono 16-bit WAV. */
export function encodeWav(samples: Float32Array, sampleRate = TARGET_RATE): Blob {
  const buf = new ArrayBuffer(44 + samples.length * 2);
  const dv = new DataView(buf);
  const writeStr = (off: number, s: string) => {
    for (let i = 0; i < s.length; i++) dv.setUint8(off + i, s.charCodeAt(i));
  };
  writeStr(0, "RIFF");
  dv.setUint32(4, 36 + samples.length * 2, true);
  writeStr(8, "WAVE");
  writeStr(12, "fmt ");
  dv.setUint32(16, 16, true);
  dv.setUint16(20, 1, true); // PCM
  dv.setUint16(22, 1, true); // mono
  dv.setUint32(24, sampleRate, true);
  dv.setUint32(28, sampleRate * 2, true);
  dv.setUint16(32, 2, true);
  dv.setUint16(34, 16, true);
  writeStr(36, "data");
  dv.setUint32(40, samples.length * 2, true);
  for (let i = 0; i < samples.length; i++) {
    const v = Math.max(-1, Math.min(1, samples[i]));
    dv.setInt16(44 + i * 2, Math.max(-32768, Math.min(32767, Math.round(v * 32768))), true);
  }
  return new Blob([buf], { type: "audio/wav" });
}

/** Linear resample to the canonical rate. */
export function resampleTo16k(samples: Float32Array, sourceRate: number): Float32Array {
  if (sourceRate === TARGET_RATE) return samples;
  const n = Math.round((samples.length * TARGET_RATE) / sourceRate);
  const out = new Float32Array(n);
  for (let i = 0; i < n; i++) {
    const t = (i * sourceRate) / TARGET_RATE;
    const lo = Math.floor(t);
    const hi = Math.min(lo + 1, samples.length - 1);
    out[i] = samples[lo] + (samples[hi] - samples[lo]) * (t - lo);
  }
  return out;
}

/**
 * Feed PCM frames in; it reports done after 400 ms of trailing silence
 * following speech, or at the 2 s cap. Leading silence is not recorded.
 */
export class Endpointer {
  private chunks: Float32Array[] = [];
  private totalSamples = 0;
  private voiced = false;
  private silentSamples = 0;

  constructor(private sampleRate = TARGET_RATE) {}

  /** Returns true once the clip is complete. */
  push(frame: Float32Array): boolean {
    let sum = 0;
    for (const v of frame) sum += v * v;
    const rms = Math.sqrt(sum / Math.max(frame.length, 1));
    const silent = rms < SILENCE_RMS;
    if (!this.voiced) {
      if (silent) return false; // still waiting for speech
      this.voiced = true;
    }
    this.chunks.push(frame);
    this.totalSamples += frame.length;
    this.silentSamples = silent ? this.silentSamples + frame.length : 0;
    const ms = (n: number) => (1000 * n) / this.sampleRate;
    return ms(this.silentSamples) >= TRAILING_SILENCE_MS || ms(this.totalSamples) >= MAX_CLIP_MS;
  }

  samples(): Float32Array {
    const out = new Float32Array(this.totalSamples);
    let off = 0;
    for (const c of this.chunks) {
      out.set(c, off);
      off += c.length;
    }
    return out;
  }
}

export class NoMicPermissionError extends Error {}

/** Record one word from the microphone and return it as a 16 kHz WAV. */
export async function captureWordClip(): Promise<Blob> {
  let stream: MediaStream;
  try {
    stream = await navigator.mediaDevices.getUserMedia({ audio: true });
  } catch (err) {
    throw new NoMicPermissionError(String(err));
  }
  const ctx = new AudioContext();
  const source = ctx.createMediaStreamSource(stream);
  const proc = ctx.createScriptProcessor(4096, 1, 1);
  const pointer = new Endpointer(ctx.sampleRate);
  const done = new Promise<Float32Array>((resolve) => {
    proc.onaudioprocess = (e) => {
      if (pointer.push(new Float32Array(e.inputBuffer.getChannelData(0)))) {
        resolve(pointer.samples());
      }
    };
  });
  source.connect(proc);
  proc.connect(ctx.destination);
  const raw = await done;
  proc.disconnect();
  source.disconnect();
  stream.getTracks().forEach((t) => t.stop());
  await ctx.close();
  return encodeWav(resampleTo16k(raw, ctx.sampleRate));
}
