/** Small dense-vector helpers on Float64Array. */

export function zeros(n: number): Float64Array {
  return new Float64Array(n);
}

/** y = W x, W stored row-major (rows x cols) */
export function matvec(
  W: Float64Array, rows: number, cols: number, x: Float64Array, y: Float64Array,
): void {
  for (let r = 0; r < rows; r++) {
    let sum = 0;
    const base = r * cols;
    for (let c = 0; c < cols; c++) sum += W[base + c] * x[c];
    y[r] = sum;
  }
}

/** x += W^T d  (accumulating input gradient) */
export function matvecTransposeAdd(
  W: Float64Array, rows: number, cols: number, d: Float64Array, x: Float64Array,
): void {
  for (let r = 0; r < rows; r++) {
    const base = r * cols;
    const dr = d[r];
    if (dr === 0) continue;
    for (let c = 0; c < cols; c++) x[c] += W[base + c] * dr;
  }
}

/** dW += d (outer) x */
export function outerAdd(
  dW: Float64Array, rows: number, cols: number, d: Float64Array, x: Float64Array,
): void {
  for (let r = 0; r < rows; r++) {
    const base = r * cols;
    const dr = d[r];
    if (dr === 0) continue;
    for (let c = 0; c < cols; c++) dW[base + c] += dr * x[c];
  }
}

export function dot(a: Float64Array, b: Float64Array): number {
  let sum = 0;
  for (let i = 0; i < a.length; i++) sum += a[i] * b[i];
  return sum;
}

export function norm(a: Float64Array): number {
  return Math.sqrt(dot(a, a));
}

export function sigmoid(x: number): number {
  return x >= 0 ? 1 / (1 + Math.exp(-x)) : Math.exp(x) / (1 + Math.exp(x));
}

export function euclidean(a: Float64Array, b: Float64Array): number {
  let sum = 0;
  for (let i = 0; i < a.length; i++) {
    const d = a[i] - b[i];
    sum += d * d;
  }
  return Math.sqrt(sum);
}

/** log-softmax in place into out; returns log(prob[target]) */
export function logSoftmax(logits: Float64Array, out: Float64Array): void {
  let max = -Infinity;
  for (let i = 0; i < logits.length; i++) if (logits[i] > max) max = logits[i];
  let sum = 0;
  for (let i = 0; i < logits.length; i++) sum += Math.exp(logits[i] - max);
  const logZ = max + Math.log(sum);
  for (let i = 0; i < logits.length; i++) out[i] = logits[i] - logZ;
}
