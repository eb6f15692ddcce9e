import { describe, expect, it } from "vitest";

import { heldOutCharLoss, trainCharLm } from "../src/charlm.ts";
import { euclidean } from "../src/math.ts";
import { makeBigramLanguages, makeInventoryLanguages } from "./helpers.ts";

const TOY = { hiddenDim: 32, charEmbedDim: 8, langEmbedDim: 8, epochs: 5, learningRate: 3e-3 };

describe("character-level language model", () => {
  it("S2: held-out loss is strictly lower with the correct language embedding", () => {
    const { data, heldOut } = makeBigramLanguages(200, 9);
    const result = trainCharLm(data, { ...TOY, seed: 1 });
    const outcomes: string[] = [];
    let ok = true;
    for (let lang = 0; lang < 2; lang++) {
      const own = heldOutCharLoss(result.model, lang, heldOut[lang], lang);
      const swapped = heldOutCharLoss(result.model, lang, heldOut[lang], 1 - lang);
      outcomes.push(`lang${lang}: own ${own.toFixed(4)} < swapped ${swapped.toFixed(4)}`);
      ok = ok && own < swapped;
    }
    console.log(`[S2] ${ok ? "PASS" : "FAIL"} - ${outcomes.join("; ")}`);
    expect(ok).toBe(true);
  });

  it("places languages with disjoint inventories farthest apart", () => {
    const data = makeInventoryLanguages(150, 5);
    const result = trainCharLm(data, { ...TOY, seed: 2 });
    const ids = [...result.export.vectors.keys()];
    let bestPair = "";
    let bestDistance = -1;
    for (let i = 0; i < ids.length; i++) {
      for (let j = i + 1; j < ids.length; j++) {
        const d = euclidean(
          result.export.vectors.get(ids[i])!, result.export.vectors.get(ids[j])!,
        );
        if (d > bestDistance) {
          bestDistance = d;
          bestPair = [ids[i], ids[j]].sort().join("+");
        }
      }
    }
    expect(bestPair).toBe("onlyA+onlyB");
  });

  it("training reduces held-out loss from the untrained model", () => {
    const { data } = makeBigramLanguages(150, 4);
    const result = trainCharLm(data, { ...TOY, seed: 3 });
    const curve = result.heldOutLossCurve;
    expect(curve[curve.length - 1]).toBeLessThan(curve[0]);
  });

  it("is deterministic for a fixed seed", () => {
    const { data } = makeBigramLanguages(60, 14);
    const a = trainCharLm(data, { ...TOY, epochs: 2, seed: 6 });
    const b = trainCharLm(data, { ...TOY, epochs: 2, seed: 6 });
    expect(a.lossCurve).toEqual(b.lossCurve);
    for (const [id, vec] of a.export.vectors) {
      expect([...b.export.vectors.get(id)!]).toEqual([...vec]);
    }
  });

  it("rejects a language with no sentences", () => {
    expect(() =>
      trainCharLm([{ doculectId: "empty", sentences: [] }], { ...TOY, seed: 1 }),
    ).toThrow(/no sentences/);
  });

  it("shares one character table across languages", () => {
    const { data } = makeBigramLanguages(40, 2);
    const result = trainCharLm(data, { ...TOY, epochs: 1, seed: 5 });
    // every character of every language resolves through the same table
    expect(result.model.charTable.value.length).toBe(
      result.model.alphabet.length * result.model.config.charEmbedDim,
    );
    for (const lang of data) {
      for (const sentence of lang.sentences.slice(0, 5)) {
        for (const ch of sentence) {
          expect(result.model.charIndex.has(ch)).toBe(true);
        }
      }
    }
  });
});
