/** Character-level language model with shared character embeddings.
 *
 * One LSTM over the characters of each sentence, conditioned at every step
 * on the previous character's embedding and a per-language embedding. All
 * parameters are trained from scratch; the exported language embeddings are
 * whatever the model needed to know about each language's orthotactics.
 */

import { Adam } from "./adam.ts";
import type { EmbeddingExport } from "./data.ts";
import { Lstm, makeParam, initUniform, type Param, type StepCache } from "./lstm.ts";
import { logSoftmax, matvec, matvecTransposeAdd, outerAdd, zeros } from "./math.ts";
import { Rng } from "./rng.ts";

export interface CharLmConfig {
  hiddenDim: number;
  charEmbedDim: number;
  langEmbedDim: number;
  dropout: number;
  epochs: number;
  seed: number;
  learningRate: number;
  heldOutFraction: number;
}

export const CHAR_LM_DEFAULTS: CharLmConfig = {
  hiddenDim: 128,
  charEmbedDim: 100,
  langEmbedDim: 100,
  dropout: 0.3,
  epochs: 10,
  seed: 1,
  learningRate: 3e-3,
  heldOutFraction: 0.1,
};

export interface LanguageText {
  doculectId: string;
  sentences: string[]; // raw character sequences (tokens joined with spaces)
}

export const BOS = 0; // reserved first vocabulary index

export interface CharLmModel {
  config: CharLmConfig;
  languages: string[];
  alphabet: string[]; // index 1.. are characters; 0 is the sentence start
  charIndex: Map<string, number>;
  lstm: Lstm;
  charTable: Param;
  langTable: Param;
  Wout: Param;
  bout: Param;
}

export interface CharLmResult {
  model: CharLmModel;
  export: EmbeddingExport;
  lossCurve: number[];
  heldOutLossCurve: number[];
}

interface CharSequence {
  lang: number;
  chars: number[];
}

function encode(model: CharLmModel, sentence: string): number[] {
  const out: number[] = [];
  for (const ch of sentence) {
    const idx = model.charIndex.get(ch);
    if (idx !== undefined) out.push(idx);
  }
  return out;
}

export function trainCharLm(
  data: LanguageText[], config: Partial<CharLmConfig> = {},
): CharLmResult {
  const cfg: CharLmConfig = { ...CHAR_LM_DEFAULTS, ...config };
  if (cfg.dropout < 0 || cfg.dropout >= 1) throw new Error("dropout must be in [0, 1)");
  if (cfg.hiddenDim < 1 || cfg.charEmbedDim < 1 || cfg.langEmbedDim < 1) {
    throw new Error("dims must be positive");
  }
  if (data.length === 0) throw new Error("no languages to train on");
  for (const lang of data) {
    if (lang.sentences.length === 0) {
      throw new Error(`language ${lang.doculectId} has no sentences`);
    }
  }

  const charSet = new Set<string>();
  for (const lang of data) {
    for (const sentence of lang.sentences) for (const ch of sentence) charSet.add(ch);
  }
  const alphabet = ["\u0000", ...[...charSet].sort()];
  const charIndex = new Map(alphabet.map((ch, i) => [ch, i] as const));

  const rng = new Rng(cfg.seed);
  const languages = data.map((d) => d.doculectId);
  const V = alphabet.length;
  const lstm = new Lstm(cfg.charEmbedDim + cfg.langEmbedDim, cfg.hiddenDim, rng);
  const charTable = makeParam("chars", V * cfg.charEmbedDim);
  initUniform(charTable, rng, 0.5);
  const langTable = makeParam("lang", languages.length * cfg.langEmbedDim);
  initUniform(langTable, rng, 0.1);
  const Wout = makeParam("Wout", V * cfg.hiddenDim);
  initUniform(Wout, rng, 1 / Math.sqrt(cfg.hiddenDim));
  const bout = makeParam("bout", V);
  const model: CharLmModel = {
    config: cfg, languages, alphabet, charIndex, lstm, charTable, langTable, Wout, bout,
  };

  const sequences: CharSequence[] = [];
  data.forEach((lang, idx) => {
    for (const sentence of lang.sentences) {
      const chars = encode(model, sentence);
      if (chars.length >= 1) sequences.push({ lang: idx, chars });
    }
  });
  rng.shuffle(sequences);
  const nHeld = Math.floor(sequences.length * cfg.heldOutFraction);
  const heldOut = sequences.slice(0, nHeld);
  const train = sequences.slice(nHeld);

  const optimizer = new Adam(
    [...lstm.params(), charTable, langTable, Wout, bout],
    { learningRate: cfg.learningRate },
  );
  const lossCurve: number[] = [];
  const evalSet = heldOut.length ? heldOut : train;
  const heldOutLossCurve: number[] = [evaluateSequences(model, evalSet)];  // untrained
  for (let epoch = 0; epoch < cfg.epochs; epoch++) {
    rng.shuffle(train);
    let total = 0;
    let count = 0;
    for (const seq of train) {
      total += trainSequence(model, seq, optimizer, rng);
      count += 1;
    }
    lossCurve.push(total / Math.max(1, count));
    heldOutLossCurve.push(evaluateSequences(model, evalSet));
  }

  const L = cfg.langEmbedDim;
  const vectors = new Map<string, Float64Array>();
  languages.forEach((id, lang) => {
    vectors.set(id, Float64Array.from(langTable.value.subarray(lang * L, (lang + 1) * L)));
  });
  return { model, export: { dim: L, vectors }, lossCurve, heldOutLossCurve };
}

function inputVector(model: CharLmModel, prevChar: number, langVec: Float64Array): Float64Array {
  const C = model.config.charEmbedDim;
  const L = model.config.langEmbedDim;
  const x = zeros(C + L);
  x.set(model.charTable.value.subarray(prevChar * C, (prevChar + 1) * C), 0);
  x.set(langVec, C);
  return x;
}

function languageEmbedding(model: CharLmModel, lang: number): Float64Array {
  const L = model.config.langEmbedDim;
  return model.langTable.value.subarray(lang * L, (lang + 1) * L);
}

function trainSequence(
  model: CharLmModel, seq: CharSequence, optimizer: Adam, rng: Rng,
): number {
  const { lstm, Wout, bout, config } = model;
  const H = config.hiddenDim;
  const C = config.charEmbedDim;
  const L = config.langEmbedDim;
  const V = model.alphabet.length;
  const keep = 1 - config.dropout;
  const langVec = languageEmbedding(model, seq.lang);

  optimizer.zeroGrad();
  let h = zeros(H);
  let c = zeros(H);
  const caches: StepCache[] = [];
  const masks: Float64Array[] = [];
  const dLogitsAll: Float64Array[] = [];
  const prevChars: number[] = [];
  let loss = 0;
  const n = seq.chars.length;
  for (let t = 0; t < n; t++) {
    const prev = t === 0 ? BOS : seq.chars[t - 1];
    prevChars.push(prev);
    const x = inputVector(model, prev, langVec);
    const cache = lstm.step(x, h, c);
    caches.push(cache);
    h = cache.h;
    c = cache.c;

    const mask = zeros(H);
    for (let i = 0; i < H; i++) mask[i] = rng.next() < keep ? 1 / keep : 0;
    masks.push(mask);
    const hDropped = zeros(H);
    for (let i = 0; i < H; i++) hDropped[i] = h[i] * mask[i];

    const logits = zeros(V);
    matvec(Wout.value, V, H, hDropped, logits);
    for (let i = 0; i < V; i++) logits[i] += bout.value[i];
    const logProbs = zeros(V);
    logSoftmax(logits, logProbs);
    const target = seq.chars[t];
    loss += -logProbs[target];
    const dLogits = zeros(V);
    for (let i = 0; i < V; i++) dLogits[i] = Math.exp(logProbs[i]);
    dLogits[target] -= 1;
    dLogitsAll.push(dLogits);
  }

  let dh = zeros(H);
  let dc = zeros(H);
  const dLang = zeros(L);
  const scale = 1 / n;
  for (let t = n - 1; t >= 0; t--) {
    const cache = caches[t];
    const mask = masks[t];
    const dLogits = dLogitsAll[t];
    for (let i = 0; i < V; i++) dLogits[i] *= scale;

    const hDropped = zeros(H);
    for (let i = 0; i < H; i++) hDropped[i] = cache.h[i] * mask[i];
    outerAdd(Wout.grad, V, H, dLogits, hDropped);
    for (let i = 0; i < V; i++) bout.grad[i] += dLogits[i];
    const dhOut = zeros(H);
    matvecTransposeAdd(Wout.value, V, H, dLogits, dhOut);
    for (let i = 0; i < H; i++) dh[i] += dhOut[i] * mask[i];

    const { dx, dhPrev, dcPrev } = lstm.backstep(cache, dh, dc);
    const prev = prevChars[t];
    const base = prev * C;
    for (let i = 0; i < C; i++) model.charTable.grad[base + i] += dx[i];
    for (let i = 0; i < L; i++) dLang[i] += dx[C + i];
    dh = dhPrev;
    dc = dcPrev;
  }
  const base = seq.lang * L;
  for (let i = 0; i < L; i++) model.langTable.grad[base + i] += dLang[i];
  optimizer.step();
  return loss / n;
}

function evaluateSequences(
  model: CharLmModel, sequences: CharSequence[], langOverride?: Float64Array,
): number {
  const { lstm, Wout, bout, config } = model;
  const H = config.hiddenDim;
  const V = model.alphabet.length;
  let total = 0;
  let count = 0;
  for (const seq of sequences) {
    const langVec = langOverride ?? languageEmbedding(model, seq.lang);
    let h = zeros(H);
    let c = zeros(H);
    for (let t = 0; t < seq.chars.length; t++) {
      const prev = t === 0 ? BOS : seq.chars[t - 1];
      const cache = lstm.step(inputVector(model, prev, langVec), h, c);
      h = cache.h;
      c = cache.c;
      const logits = zeros(V);
      matvec(Wout.value, V, H, h, logits);
      for (let i = 0; i < V; i++) logits[i] += bout.value[i];
      const logProbs = zeros(V);
      logSoftmax(logits, logProbs);
      total += -logProbs[seq.chars[t]];
      count += 1;
    }
  }
  return total / Math.max(1, count);
}

/** Held-out per-character loss of sentences from one language, optionally
 * forcing a different language's embedding (the swap test). */
export function heldOutCharLoss(
  model: CharLmModel, lang: number, sentences: string[], embeddingOf?: number,
): number {
  const sequences: CharSequence[] = [];
  for (const sentence of sentences) {
    const chars = encode(model, sentence);
    if (chars.length >= 1) sequences.push({ lang, chars });
  }
  if (sequences.length === 0) throw new Error("no evaluable sentences");
  const override = embeddingOf === undefined ? undefined : languageEmbedding(model, embeddingOf);
  return evaluateSequences(model, sequences, override);
}
