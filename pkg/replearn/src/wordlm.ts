/** Word-level language model over a fixed multilingual embedding space.
 *
 * A single LSTM, shared across languages, reads the previous word's (frozen)
 * embedding concatenated with a per-language embedding and predicts the next
 * word's embedding; the loss is cosine distance. Only the LSTM, the output
 * projection and the language embeddings are trained, so whatever a language
 * embedding learns is by construction about how that language orders and
 * combines words, not about word identity.
 */

import { Adam } from "./adam.ts";
import type { EmbeddingExport } from "./data.ts";
import { Lstm, makeParam, initUniform, type Param, type StepCache } from "./lstm.ts";
import { dot, matvec, matvecTransposeAdd, norm, outerAdd, zeros } from "./math.ts";
import { Rng } from "./rng.ts";

export interface WordLmConfig {
  hiddenDim: number;
  langEmbedDim: number;
  dropout: number;
  epochs: number;
  seed: number;
  learningRate: number;
  heldOutFraction: number;
}

export const WORD_LM_DEFAULTS: WordLmConfig = {
  hiddenDim: 512,
  langEmbedDim: 100,
  dropout: 0.3,
  epochs: 10,
  seed: 1,
  learningRate: 3e-3,
  heldOutFraction: 0.1,
};

export interface LanguageSentences {
  doculectId: string;
  sentences: string[][]; // token sequences
}

interface Sequence {
  lang: number;
  embeddings: Float64Array[];
}

export interface WordLmModel {
  config: WordLmConfig;
  languages: string[];
  embedDim: number;
  lstm: Lstm;
  langTable: Param; // languages x langEmbedDim
  Wout: Param;
  bout: Param;
}

export interface WordLmResult {
  model: WordLmModel;
  export: EmbeddingExport;
  lossCurve: number[];
  heldOutLossCurve: number[];
  skippedTokens: number;
}

const EPS = 1e-12;

/** loss and gradient of cosine distance 1 - cos(pred, target) */
export function cosineDistance(pred: Float64Array, target: Float64Array, dPred: Float64Array): number {
  const np = norm(pred) + EPS;
  const nt = norm(target) + EPS;
  const cos = dot(pred, target) / (np * nt);
  for (let i = 0; i < pred.length; i++) {
    dPred[i] = -(target[i] / (np * nt) - (cos * pred[i]) / (np * np));
  }
  return 1 - cos;
}

function languageEmbedding(model: WordLmModel, lang: number): Float64Array {
  const L = model.config.langEmbedDim;
  return model.langTable.value.subarray(lang * L, (lang + 1) * L);
}

export function trainWordLm(
  data: LanguageSentences[],
  wordEmbeddings: Map<string, Float64Array>,
  config: Partial<WordLmConfig> = {},
): WordLmResult {
  const cfg: WordLmConfig = { ...WORD_LM_DEFAULTS, ...config };
  if (cfg.dropout < 0 || cfg.dropout >= 1) throw new Error("dropout must be in [0, 1)");
  if (cfg.hiddenDim < 1 || cfg.langEmbedDim < 1) throw new Error("dims must be positive");
  if (data.length === 0) throw new Error("no languages to train on");
  const embedDim = wordEmbeddings.values().next().value?.length;
  if (!embedDim) throw new Error("empty word embedding table");

  const rng = new Rng(cfg.seed);
  const languages = data.map((d) => d.doculectId);
  const lstm = new Lstm(embedDim + cfg.langEmbedDim, cfg.hiddenDim, rng);
  const langTable = makeParam("lang", languages.length * cfg.langEmbedDim);
  initUniform(langTable, rng, 0.1);
  const Wout = makeParam("Wout", embedDim * cfg.hiddenDim);
  initUniform(Wout, rng, 1 / Math.sqrt(cfg.hiddenDim));
  const bout = makeParam("bout", embedDim);
  const model: WordLmModel = {
    config: cfg, languages, embedDim, lstm, langTable, Wout, bout,
  };

  // Sentences become embedding sequences; unembedded tokens are skipped.
  let skippedTokens = 0;
  const sequences: Sequence[] = [];
  data.forEach((langData, lang) => {
    for (const tokens of langData.sentences) {
      const embeddings: Float64Array[] = [];
      for (const token of tokens) {
        const vec = wordEmbeddings.get(token);
        if (vec === undefined) {
          skippedTokens += 1;
          continue;
        }
        embeddings.push(vec);
      }
      if (embeddings.length >= 1) sequences.push({ lang, embeddings });
    }
  });
  if (sequences.length === 0) throw new Error("no usable sentences");

  // All languages mixed before the held-out split and each epoch's order.
  rng.shuffle(sequences);
  const nHeld = Math.floor(sequences.length * cfg.heldOutFraction);
  const heldOut = sequences.slice(0, nHeld);
  const train = sequences.slice(nHeld);

  const optimizer = new Adam(
    [...lstm.params(), langTable, Wout, bout],
    { learningRate: cfg.learningRate },
  );

  const lossCurve: number[] = [];
  const evalSet = heldOut.length ? heldOut : train;
  const heldOutLossCurve: number[] = [evaluateWordLm(model, evalSet)];  // untrained
  for (let epoch = 0; epoch < cfg.epochs; epoch++) {
    rng.shuffle(train);
    let total = 0;
    let count = 0;
    for (const seq of train) {
      total += trainSequence(model, seq, optimizer, rng);
      count += 1;
    }
    lossCurve.push(total / Math.max(1, count));
    heldOutLossCurve.push(evaluateWordLm(model, evalSet));
  }

  const L = cfg.langEmbedDim;
  const vectors = new Map<string, Float64Array>();
  languages.forEach((id, lang) => {
    vectors.set(id, Float64Array.from(langTable.value.subarray(lang * L, (lang + 1) * L)));
  });
  return {
    model,
    export: { dim: L, vectors },
    lossCurve,
    heldOutLossCurve,
    skippedTokens,
  };
}

function trainSequence(
  model: WordLmModel, seq: Sequence, optimizer: Adam, rng: Rng,
): number {
  const { lstm, Wout, bout, config } = model;
  const H = config.hiddenDim;
  const E = model.embedDim;
  const L = config.langEmbedDim;
  const langVec = languageEmbedding(model, seq.lang);
  const keep = 1 - config.dropout;

  optimizer.zeroGrad();
  let h = zeros(H);
  let c = zeros(H);
  const caches: StepCache[] = [];
  const masks: Float64Array[] = [];
  const dPreds: Float64Array[] = [];
  let loss = 0;
  const n = seq.embeddings.length;
  for (let t = 0; t < n; t++) {
    const x = zeros(E + L);
    if (t > 0) x.set(seq.embeddings[t - 1], 0);
    x.set(langVec, E);
    const cache = lstm.step(x, h, c);
    caches.push(cache);
    h = cache.h;
    c = cache.c;

    const mask = zeros(H);
    for (let i = 0; i < H; i++) mask[i] = rng.next() < keep ? 1 / keep : 0;
    masks.push(mask);
    const hDropped = zeros(H);
    for (let i = 0; i < H; i++) hDropped[i] = h[i] * mask[i];

    const pred = zeros(E);
    matvec(Wout.value, E, H, hDropped, pred);
    for (let i = 0; i < E; i++) pred[i] += bout.value[i];
    const dPred = zeros(E);
    const stepLoss = cosineDistance(pred, seq.embeddings[t], dPred);
    if (stepLoss < -1e-9 || stepLoss > 2 + 1e-9) {
      throw new Error(`cosine distance ${stepLoss} outside [0, 2]`);
    }
    loss += stepLoss;
    dPreds.push(dPred);
  }

  // backward through time
  let dh = zeros(H);
  let dc = zeros(H);
  const dLang = zeros(L);
  const scale = 1 / n;
  for (let t = n - 1; t >= 0; t--) {
    const cache = caches[t];
    const mask = masks[t];
    const dPred = dPreds[t];
    for (let i = 0; i < E; i++) dPred[i] *= scale;

    const hDropped = zeros(H);
    for (let i = 0; i < H; i++) hDropped[i] = cache.h[i] * mask[i];
    outerAdd(Wout.grad, E, H, dPred, hDropped);
    for (let i = 0; i < E; i++) bout.grad[i] += dPred[i];
    const dhOut = zeros(H);
    matvecTransposeAdd(Wout.value, E, H, dPred, dhOut);
    for (let i = 0; i < H; i++) dh[i] += dhOut[i] * mask[i];

    const { dx, dhPrev, dcPrev } = lstm.backstep(cache, dh, dc);
    for (let i = 0; i < L; i++) dLang[i] += dx[E + i];
    // the word-embedding part of dx is dropped: that table is frozen
    dh = dhPrev;
    dc = dcPrev;
  }
  const base = seq.lang * L;
  for (let i = 0; i < L; i++) model.langTable.grad[base + i] += dLang[i];
  optimizer.step();
  return loss / n;
}

/** Mean per-token cosine distance without dropout (evaluation mode). */
export function evaluateWordLm(
  model: WordLmModel, sequences: Sequence[], langOverride?: Float64Array,
): number {
  const { lstm, Wout, bout, config } = model;
  const H = config.hiddenDim;
  const E = model.embedDim;
  const L = config.langEmbedDim;
  let total = 0;
  let count = 0;
  for (const seq of sequences) {
    const langVec = langOverride ?? languageEmbedding(model, seq.lang);
    let h = zeros(H);
    let c = zeros(H);
    for (let t = 0; t < seq.embeddings.length; t++) {
      const x = zeros(E + L);
      if (t > 0) x.set(seq.embeddings[t - 1], 0);
      x.set(langVec, E);
      const cache = lstm.step(x, h, c);
      h = cache.h;
      c = cache.c;
      const pred = zeros(E);
      matvec(Wout.value, E, H, h, pred);
      for (let i = 0; i < E; i++) pred[i] += bout.value[i];
      total += cosineDistance(pred, seq.embeddings[t], zeros(E));
      count += 1;
    }
  }
  return total / Math.max(1, count);
}

/** Helper shared by tests: sentences to embedding sequences for evaluation. */
export function toSequences(
  data: LanguageSentences[], wordEmbeddings: Map<string, Float64Array>,
): Sequence[] {
  const sequences: Sequence[] = [];
  data.forEach((langData, lang) => {
    for (const tokens of langData.sentences) {
      const embeddings: Float64Array[] = [];
      for (const token of tokens) {
        const vec = wordEmbeddings.get(token);
        if (vec !== undefined) embeddings.push(vec);
      }
      if (embeddings.length >= 1) sequences.push({ lang, embeddings });
    }
  });
  return sequences;
}
