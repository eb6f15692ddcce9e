/** File formats shared with the corpus/probing toolkit.
 *
 * Verse texts: one `<verse_id>\t<space-separated tokens>` line per verse,
 * `#` comments. Embedding dumps: `verse_id\ttoken_idx\tfloat...`.
 * Representation exports: header `#dim k`, then `id\tfloat...` rows; a JSON
 * sidecar records the training configuration and loss curve.
 */

import * as fs from "node:fs";
import * as path from "node:path";

export interface VerseText {
  doculectId: string;
  verses: Map<string, string[]>;
}

export function readVerseFile(filePath: string): VerseText {
  const doculectId = path.basename(filePath).replace(/\.[^.]+$/, "");
  const verses = new Map<string, string[]>();
  const lines = fs.readFileSync(filePath, "utf-8").split(/\r?\n/);
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i];
    if (!line || line.startsWith("#")) continue;
    const tab = line.indexOf("\t");
    if (tab < 1) throw new Error(`${filePath}:${i + 1}: missing verse-id separator`);
    const verseId = line.slice(0, tab);
    if (verses.has(verseId)) throw new Error(`${filePath}:${i + 1}: duplicate verse ${verseId}`);
    const tokens = line.slice(tab + 1).split(/\s+/).filter((t) => t.length > 0);
    if (tokens.length === 0) throw new Error(`${filePath}:${i + 1}: empty verse`);
    verses.set(verseId, tokens);
  }
  return { doculectId, verses };
}

export interface EmbeddingDump {
  dim: number;
  /** key `${verseId}\u0000${tokenIdx}` */
  vectors: Map<string, Float64Array>;
}

export function embeddingKey(verseId: string, tokenIdx: number): string {
  return `${verseId}\u0000${tokenIdx}`;
}

export function readEmbeddingDump(filePath: string): EmbeddingDump {
  const vectors = new Map<string, Float64Array>();
  let dim = -1;
  const lines = fs.readFileSync(filePath, "utf-8").split(/\r?\n/);
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i];
    if (!line) continue;
    const parts = line.split("\t");
    if (parts.length < 3) throw new Error(`${filePath}:${i + 1}: expected verse, index, floats`);
    const vec = Float64Array.from(parts.slice(2), Number);
    if (vec.some((x) => !Number.isFinite(x))) {
      throw new Error(`${filePath}:${i + 1}: non-finite embedding component`);
    }
    if (dim === -1) dim = vec.length;
    else if (vec.length !== dim) throw new Error(`${filePath}:${i + 1}: inconsistent dimension`);
    vectors.set(embeddingKey(parts[0], Number(parts[1])), vec);
  }
  if (dim === -1) throw new Error(`${filePath}: empty embedding dump`);
  return { dim, vectors };
}

export interface EmbeddingExport {
  dim: number;
  vectors: Map<string, Float64Array>;
}

export function writeRepresentations(exported: EmbeddingExport, filePath: string): void {
  const rows: string[] = [`#dim ${exported.dim}`];
  for (const id of [...exported.vectors.keys()].sort()) {
    const vec = exported.vectors.get(id)!;
    if (vec.length !== exported.dim) throw new Error(`vector ${id} has wrong dimension`);
    rows.push(`${id}\t${[...vec].map((x) => x.toString()).join("\t")}`);
  }
  fs.writeFileSync(filePath, rows.join("\n") + "\n");
}

export function readRepresentations(filePath: string): EmbeddingExport {
  const lines = fs.readFileSync(filePath, "utf-8").split(/\r?\n/);
  const header = lines[0] ?? "";
  if (!header.startsWith("#dim ")) throw new Error(`${filePath}: missing '#dim k' header`);
  const dim = Number(header.slice(5));
  const vectors = new Map<string, Float64Array>();
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i];
    if (!line) continue;
    const parts = line.split("\t");
    if (parts.length !== dim + 1) throw new Error(`${filePath}:${i + 1}: expected id and ${dim} floats`);
    vectors.set(parts[0], Float64Array.from(parts.slice(1), Number));
  }
  return { dim, vectors };
}

export interface TrainingSidecar {
  model: string;
  config: Record<string, unknown>;
  lossCurve: number[];
  heldOutLossCurve?: number[];
  skippedTokens?: number;
}

export function writeSidecar(sidecar: TrainingSidecar, filePath: string): void {
  fs.writeFileSync(filePath, JSON.stringify(sidecar, null, 2) + "\n");
}
