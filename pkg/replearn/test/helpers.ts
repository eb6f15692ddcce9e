/** Synthetic corpora with known ground truth for the trainer tests. */

import { Rng } from "../src/rng.ts";
import type { LanguageSentences } from "../src/wordlm.ts";
import type { LanguageText } from "../src/charlm.ts";

export interface OrderCorpus {
  data: LanguageSentences[];
  embeddings: Map<string, Float64Array>;
  verbObjectOrder: Map<string, number>; // doculect -> 1 (VO) / 0 (OV)
}

/** Eight languages over one shared lexicon and embedding space; half put the
 * verb before its object, half after. Objects may carry a modifier so the
 * two orders differ beyond the second token. */
export function makeOrderCorpus(
  sentencesPerLanguage = 300, embedDim = 20, seed = 42,
): OrderCorpus {
  const rng = new Rng(seed);
  const nouns = Array.from({ length: 20 }, (_, i) => `noun${i}`);
  const verbs = Array.from({ length: 10 }, (_, i) => `verb${i}`);
  const mods = Array.from({ length: 6 }, (_, i) => `mod${i}`);

  const embeddings = new Map<string, Float64Array>();
  const categoryOffset: Record<string, number> = { noun: -2, verb: 2, mod: 0 };
  for (const word of [...nouns, ...verbs, ...mods]) {
    const vec = Float64Array.from({ length: embedDim }, () => rng.gauss());
    vec[0] = categoryOffset[word.replace(/\d+$/, "")] + 0.3 * rng.gauss();
    vec[1] = word.startsWith("mod") ? 2 : -1 + 0.3 * rng.gauss();
    embeddings.set(word, vec);
  }

  const data: LanguageSentences[] = [];
  const verbObjectOrder = new Map<string, number>();
  for (let lang = 0; lang < 8; lang++) {
    const vo = lang % 2 === 1;
    const doculectId = `lang${lang}`;
    verbObjectOrder.set(doculectId, vo ? 1 : 0);
    const sentences: string[][] = [];
    for (let s = 0; s < sentencesPerLanguage; s++) {
      const subj = rng.choice(nouns);
      const verb = rng.choice(verbs);
      const objTokens = [rng.choice(nouns)];
      if (rng.next() < 0.5) objTokens.push(rng.choice(mods));
      const sentence = vo
        ? [subj, verb, ...objTokens]
        : [subj, ...objTokens, verb];
      sentences.push(sentence);
    }
    data.push({ doculectId, sentences });
  }
  return { data, embeddings, verbObjectOrder };
}

/** Two languages over one inventory with opposite character-cycle bigram
 * statistics: language 0 follows a->b->c->d->a, language 1 the reverse. */
export function makeBigramLanguages(
  sentencesPerLanguage = 200, seed = 9,
): { data: LanguageText[]; heldOut: string[][] } {
  const rng = new Rng(seed);
  const chars = ["a", "b", "c", "d"];
  const next = (ch: string, forward: boolean): string => {
    const i = chars.indexOf(ch);
    return chars[(i + (forward ? 1 : chars.length - 1)) % chars.length];
  };

  function word(forward: boolean): string {
    let ch = rng.choice(chars);
    let out = ch;
    const len = 4 + rng.int(4);
    for (let i = 1; i < len; i++) {
      ch = next(ch, forward);
      out += ch;
    }
    return out;
  }

  function sentence(forward: boolean): string {
    const n = 3 + rng.int(3);
    return Array.from({ length: n }, () => word(forward)).join(" ");
  }

  const data: LanguageText[] = [];
  const heldOut: string[][] = [];
  for (let lang = 0; lang < 2; lang++) {
    const forward = lang === 0;
    data.push({
      doculectId: `cyc${lang}`,
      sentences: Array.from({ length: sentencesPerLanguage }, () => sentence(forward)),
    });
    heldOut.push(Array.from({ length: 40 }, () => sentence(forward)));
  }
  return { data, heldOut };
}

/** Four languages: two with disjoint character inventories, two mixing both. */
export function makeInventoryLanguages(sentencesPerLanguage = 150, seed = 5): LanguageText[] {
  const rng = new Rng(seed);
  const inventories: Record<string, string[]> = {
    onlyA: ["a", "b", "c", "d"],
    onlyB: ["w", "x", "y", "z"],
    mixed1: ["a", "b", "w", "x"],
    mixed2: ["c", "d", "y", "z"],
  };

  function sentence(inventory: string[]): string {
    const n = 3 + rng.int(3);
    const words: string[] = [];
    for (let w = 0; w < n; w++) {
      const len = 3 + rng.int(4);
      words.push(Array.from({ length: len }, () => rng.choice(inventory)).join(""));
    }
    return words.join(" ");
  }

  return Object.entries(inventories).map(([doculectId, inventory]) => ({
    doculectId,
    sentences: Array.from({ length: sentencesPerLanguage }, () => sentence(inventory)),
  }));
}
