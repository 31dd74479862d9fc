/** Thin fetch wrappers; all numbers pass through untouched. */

import type { ModelResponse, OptimizeOutcome, OptimizeRequest } from "./types.js";

export async function fetchModel(base: string): Promise<ModelResponse> {
  const resp = await fetch(`${base}/api/v1/model`);
  if (!resp.ok) {
    throw new Error(`model endpoint returned ${resp.status}`);
  }
  return (await resp.json()) as ModelResponse;
}

export async function postOptimize(
  base: string,
  body: OptimizeRequest,
): Promise<OptimizeOutcome> {
  const resp = await fetch(`${base}/api/v1/optimize`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
  const payload = await resp.json();
  if (resp.ok) {
    return { ok: true, data: payload };
  }
  // the service wraps optimize failures as {"detail": {...}} and validation
  // failures as a flat object
  const error = payload.detail ?? payload;
  return { ok: false, httpStatus: resp.status, error };
}
