/** Deterministic RNG (splitmix64 core) so training runs are reproducible. */

export class Rng {
  private state: bigint;
  private spare: number | null = null;

  constructor(seed: number | string) {
    if (typeof seed === "string") {
      let h = 0xcbf29ce484222325n;
      for (const ch of seed) {
        h ^= BigInt(ch.codePointAt(0)!);
        h = (h * 0x100000001b3n) & 0xffffffffffffffffn;
      }
      this.state = h;
    } else {
      this.state = BigInt.asUintN(64, BigInt(Math.floor(seed)) * 0x9e3779b97f4a7c15n + 1n);
    }
  }

  /** uniform in [0, 1) */
  next(): number {
    this.state = BigInt.asUintN(64, this.state + 0x9e3779b97f4a7c15n);
    let z = this.state;
    z = BigInt.asUintN(64, (z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n);
    z = BigInt.asUintN(64, (z ^ (z >> 27n)) * 0x94d049bb133111ebn);
    z = z ^ (z >> 31n);
    return Number(z >> 11n) / 9007199254740992;
  }

  int(bound: number): number {
    return Math.floor(this.next() * bound);
  }

  /** standard normal via Box-Muller */
  gauss(): number {
    if (this.spare !== null) {
      const v = this.spare;
      this.spare = null;
      return v;
    }
    let u = 0;
    let v = 0;
    do {
      u = this.next();
    } while (u === 0);
    v = this.next();
    const r = Math.sqrt(-2 * Math.log(u));
    this.spare = r * Math.sin(2 * Math.PI * v);
    return r * Math.cos(2 * Math.PI * v);
  }

  shuffle<T>(items: T[]): void {
    for (let i = items.length - 1; i > 0; i--) {
      const j = this.int(i + 1);
      [items[i], items[j]] = [items[j], items[i]];
    }
  }

  choice<T>(items: T[]): T {
    return items[this.int(items.length)];
  }
}
