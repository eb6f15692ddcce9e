/** Train a representation model on corpus verse files and export language
 * embeddings in the shared representation format.
 *
 *   node --experimental-strip-types src/cli.ts word \
 *     --texts a.txt,b.txt --embeddings a.emb.tsv,b.emb.tsv --out outdir
 *   node --experimental-strip-types src/cli.ts char --texts a.txt,b.txt --out outdir
 *
 * Word-model token embeddings come from per-doculect embedding dumps
 * (verse_id, token_idx, floats); tokens without a dumped vector are skipped
 * and counted.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { embeddingKey, readEmbeddingDump, readVerseFile, writeRepresentations, writeSidecar } from "./data.ts";
import { trainCharLm, CHAR_LM_DEFAULTS } from "./charlm.ts";
import { trainWordLm, WORD_LM_DEFAULTS, type LanguageSentences } from "./wordlm.ts";

function parseArgs(argv: string[]): { command: string; options: Map<string, string> } {
  const command = argv[0];
  const options = new Map<string, string>();
  for (let i = 1; i < argv.length; i += 2) {
    if (!argv[i].startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`expected --key value pairs, got ${argv[i]}`);
    }
    options.set(argv[i].slice(2), argv[i + 1]);
  }
  return { command, options };
}

function intOption(options: Map<string, string>, key: string, fallback: number): number {
  const raw = options.get(key);
  return raw === undefined ? fallback : Number(raw);
}

function main(argv: string[]): number {
  const { command, options } = parseArgs(argv);
  if (command !== "word" && command !== "char") {
    console.error("usage: cli.ts word|char --texts f1,f2 [--embeddings e1,e2] --out dir");
    return 2;
  }
  const texts = (options.get("texts") ?? "").split(",").filter((p) => p);
  const outDir = options.get("out");
  if (texts.length === 0 || !outDir) {
    console.error("error: --texts and --out are required");
    return 2;
  }
  fs.mkdirSync(outDir, { recursive: true });
  const verseTexts = texts.map(readVerseFile);
  const seed = intOption(options, "seed", 1);
  const epochs = intOption(options, "epochs", 10);

  if (command === "char") {
    const data = verseTexts.map((vt) => ({
      doculectId: vt.doculectId,
      sentences: [...vt.verses.keys()].sort().map((v) => vt.verses.get(v)!.join(" ")),
    }));
    const config = {
      hiddenDim: intOption(options, "hidden", CHAR_LM_DEFAULTS.hiddenDim),
      charEmbedDim: intOption(options, "char-dim", CHAR_LM_DEFAULTS.charEmbedDim),
      langEmbedDim: intOption(options, "lang-dim", CHAR_LM_DEFAULTS.langEmbedDim),
      epochs, seed,
    };
    const result = trainCharLm(data, config);
    writeRepresentations(result.export, path.join(outDir, "charlm_reps.tsv"));
    writeSidecar(
      {
        model: "char_lm", config: { ...CHAR_LM_DEFAULTS, ...config },
        lossCurve: result.lossCurve, heldOutLossCurve: result.heldOutLossCurve,
      },
      path.join(outDir, "charlm_sidecar.json"),
    );
    console.log(`char_lm: final train loss ${result.lossCurve.at(-1)?.toFixed(4)}`);
    return 0;
  }

  const dumps = (options.get("embeddings") ?? "").split(",").filter((p) => p);
  if (dumps.length !== texts.length) {
    console.error("error: word model needs one --embeddings dump per text");
    return 2;
  }
  // Token positions become lookup keys so each token carries the embedding
  // projected at its own position; positions without one are skipped.
  const table = new Map<string, Float64Array>();
  const data: LanguageSentences[] = [];
  verseTexts.forEach((vt, i) => {
    const dump = readEmbeddingDump(dumps[i]);
    const sentences: string[][] = [];
    for (const verse of [...vt.verses.keys()].sort()) {
      const tokens = vt.verses.get(verse)!;
      const keyed: string[] = [];
      for (let idx = 0; idx < tokens.length; idx++) {
        const key = `${vt.doculectId}:${verse}:${idx}`;
        const vec = dump.vectors.get(embeddingKey(verse, idx));
        if (vec !== undefined) table.set(key, vec);
        keyed.push(key);
      }
      sentences.push(keyed);
    }
    data.push({ doculectId: vt.doculectId, sentences });
  });
  const config = {
    hiddenDim: intOption(options, "hidden", WORD_LM_DEFAULTS.hiddenDim),
    langEmbedDim: intOption(options, "lang-dim", WORD_LM_DEFAULTS.langEmbedDim),
    epochs, seed,
  };
  const result = trainWordLm(data, table, config);
  writeRepresentations(result.export, path.join(outDir, "wordlm_reps.tsv"));
  writeSidecar(
    {
      model: "word_lm", config: { ...WORD_LM_DEFAULTS, ...config },
      lossCurve: result.lossCurve, heldOutLossCurve: result.heldOutLossCurve,
      skippedTokens: result.skippedTokens,
    },
    path.join(outDir, "wordlm_sidecar.json"),
  );
  console.log(
    `word_lm: final train loss ${result.lossCurve.at(-1)?.toFixed(4)}, ` +
    `${result.skippedTokens} tokens without embeddings skipped`,
  );
  return 0;
}

process.exit(main(process.argv.slice(2)));
