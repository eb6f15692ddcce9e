/** Single-layer LSTM with full backpropagation through time.
 *
 * Gate layout in the packed pre-activation vector: [input, forget, output,
 * candidate]. Parameters live in flat arrays so the optimizer can treat
 * every trainable tensor uniformly.
 */

import { matvec, matvecTransposeAdd, outerAdd, sigmoid, zeros } from "./math.ts";
import { Rng } from "./rng.ts";

export interface Param {
  name: string;
  value: Float64Array;
  grad: Float64Array;
}

export function makeParam(name: string, size: number): Param {
  return { name, value: new Float64Array(size), grad: new Float64Array(size) };
}

export function initUniform(param: Param, rng: Rng, scale: number): void {
  for (let i = 0; i < param.value.length; i++) {
    param.value[i] = (rng.next() * 2 - 1) * scale;
  }
}

export interface StepCache {
  x: Float64Array;
  hPrev: Float64Array;
  cPrev: Float64Array;
  gates: Float64Array; // post-activation [i f o g]
  c: Float64Array;
  tanhC: Float64Array;
  h: Float64Array;
}

export class Lstm {
  readonly inputDim: number;
  readonly hiddenDim: number;
  readonly Wx: Param;
  readonly Wh: Param;
  readonly b: Param;

  constructor(inputDim: number, hiddenDim: number, rng: Rng) {
    this.inputDim = inputDim;
    this.hiddenDim = hiddenDim;
    this.Wx = makeParam("lstm.Wx", 4 * hiddenDim * inputDim);
    this.Wh = makeParam("lstm.Wh", 4 * hiddenDim * hiddenDim);
    this.b = makeParam("lstm.b", 4 * hiddenDim);
    initUniform(this.Wx, rng, 1 / Math.sqrt(inputDim));
    initUniform(this.Wh, rng, 1 / Math.sqrt(hiddenDim));
    // forget-gate bias starts positive for stable early training
    for (let i = this.hiddenDim; i < 2 * this.hiddenDim; i++) this.b.value[i] = 1.0;
  }

  params(): Param[] {
    return [this.Wx, this.Wh, this.b];
  }

  step(x: Float64Array, hPrev: Float64Array, cPrev: Float64Array): StepCache {
    const H = this.hiddenDim;
    const z = zeros(4 * H);
    matvec(this.Wx.value, 4 * H, this.inputDim, x, z);
    const zh = zeros(4 * H);
    matvec(this.Wh.value, 4 * H, H, hPrev, zh);
    for (let i = 0; i < 4 * H; i++) z[i] += zh[i] + this.b.value[i];

    const gates = zeros(4 * H);
    for (let i = 0; i < 3 * H; i++) gates[i] = sigmoid(z[i]);
    for (let i = 3 * H; i < 4 * H; i++) gates[i] = Math.tanh(z[i]);

    const c = zeros(H);
    const tanhC = zeros(H);
    const h = zeros(H);
    for (let i = 0; i < H; i++) {
      c[i] = gates[H + i] * cPrev[i] + gates[i] * gates[3 * H + i];
      tanhC[i] = Math.tanh(c[i]);
      h[i] = gates[2 * H + i] * tanhC[i];
    }
    return { x, hPrev, cPrev, gates, c, tanhC, h };
  }

  /** Accumulates parameter gradients; returns gradients w.r.t. x, hPrev, cPrev. */
  backstep(
    cache: StepCache, dh: Float64Array, dc: Float64Array,
  ): { dx: Float64Array; dhPrev: Float64Array; dcPrev: Float64Array } {
    const H = this.hiddenDim;
    const { x, hPrev, cPrev, gates, tanhC } = cache;
    const dz = zeros(4 * H);
    const dcTotal = zeros(H);
    for (let i = 0; i < H; i++) {
      const o = gates[2 * H + i];
      dcTotal[i] = dc[i] + dh[i] * o * (1 - tanhC[i] * tanhC[i]);
      const ig = gates[i];
      const f = gates[H + i];
      const g = gates[3 * H + i];
      const di = dcTotal[i] * g;
      const df = dcTotal[i] * cPrev[i];
      const dout = dh[i] * tanhC[i];
      const dg = dcTotal[i] * ig;
      dz[i] = di * ig * (1 - ig);
      dz[H + i] = df * f * (1 - f);
      dz[2 * H + i] = dout * o * (1 - o);
      dz[3 * H + i] = dg * (1 - g * g);
    }
    outerAdd(this.Wx.grad, 4 * H, this.inputDim, dz, x);
    outerAdd(this.Wh.grad, 4 * H, H, dz, hPrev);
    for (let i = 0; i < 4 * H; i++) this.b.grad[i] += dz[i];

    const dx = zeros(this.inputDim);
    matvecTransposeAdd(this.Wx.value, 4 * H, this.inputDim, dz, dx);
    const dhPrev = zeros(H);
    matvecTransposeAdd(this.Wh.value, 4 * H, H, dz, dhPrev);
    const dcPrev = zeros(H);
    for (let i = 0; i < H; i++) dcPrev[i] = dcTotal[i] * gates[H + i];
    return { dx, dhPrev, dcPrev };
  }
}
