/** Adam optimizer over a flat list of parameters, with global-norm clipping. */

import type { Param } from "./lstm.ts";

export interface AdamConfig {
  learningRate: number;
  beta1: number;
  beta2: number;
  eps: number;
  clipNorm: number;
}

export const ADAM_DEFAULTS: AdamConfig = {
  learningRate: 3e-3,
  beta1: 0.9,
  beta2: 0.999,
  eps: 1e-8,
  clipNorm: 5.0,
};

export class Adam {
  private readonly config: AdamConfig;
  private readonly m: Float64Array[];
  private readonly v: Float64Array[];
  private t = 0;

  constructor(private readonly params: Param[], config: Partial<AdamConfig> = {}) {
    this.config = { ...ADAM_DEFAULTS, ...config };
    this.m = params.map((p) => new Float64Array(p.value.length));
    this.v = params.map((p) => new Float64Array(p.value.length));
  }

  zeroGrad(): void {
    for (const p of this.params) p.grad.fill(0);
  }

  step(): void {
    const { learningRate, beta1, beta2, eps, clipNorm } = this.config;
    let sq = 0;
    for (const p of this.params) {
      for (let i = 0; i < p.grad.length; i++) sq += p.grad[i] * p.grad[i];
    }
    const scale = sq > clipNorm * clipNorm ? clipNorm / Math.sqrt(sq) : 1.0;

    this.t += 1;
    const correction1 = 1 - Math.pow(beta1, this.t);
    const correction2 = 1 - Math.pow(beta2, this.t);
    for (let k = 0; k < this.params.length; k++) {
      const p = this.params[k];
      const m = this.m[k];
      const v = this.v[k];
      for (let i = 0; i < p.value.length; i++) {
        const g = p.grad[i] * scale;
        m[i] = beta1 * m[i] + (1 - beta1) * g;
        v[i] = beta2 * v[i] + (1 - beta2) * g * g;
        const mHat = m[i] / correction1;
        const vHat = v[i] / correction2;
        p.value[i] -= (learningRate * mHat) / (Math.sqrt(vHat) + eps);
      }
    }
  }
}
