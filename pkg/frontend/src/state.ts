/** Scenario state: per-channel bounds, budget, display mode, history. */

import type {
  ModelResponse,
  OptimizeRequest,
  OptimizeResponse,
} from "./types.js";

export const UI_MIN = -3;
export const UI_MAX = 5;
export const HISTORY_LIMIT = 20;

export interface HistoryEntry {
  request: OptimizeRequest;
  objective: number;
  at: number;
}

function clampToUiRange(value: number): number {
  return Math.min(UI_MAX, Math.max(UI_MIN, value));
}

export class ScenarioState {
  readonly names: string[];
  private lower = new Map<string, number>();
  private upper = new Map<string, number>();
  budget: number;
  budgetSense: string;
  naturalUnits = false;
  lastResult: OptimizeResponse | null = null;
  readonly history: HistoryEntry[] = [];

  constructor(model: ModelResponse) {
    this.names = model.variables.map((v) => v.name);
    for (const name of this.names) {
      const lo = model.default_bounds.lower[name];
      const up = model.default_bounds.upper[name];
      this.lower.set(name, clampToUiRange(lo ?? UI_MIN));
      this.upper.set(name, clampToUiRange(up ?? UI_MAX));
    }
    const first = model.default_constraints[0];
    this.budget = first ? first.bound : 30;
    this.budgetSense = first ? first.sense : "<=";
  }

  getLower(name: string): number {
    return this.lower.get(name) ?? UI_MIN;
  }

  getUpper(name: string): number {
    return this.upper.get(name) ?? UI_MAX;
  }

  /** Lower can never cross above upper: the upper bound wins the collision. */
  setLower(name: string, value: number): void {
    const v = clampToUiRange(value);
    this.lower.set(name, Math.min(v, this.getUpper(name)));
  }

  /** Upper can never cross below lower: the lower bound wins the collision. */
  setUpper(name: string, value: number): void {
    const v = clampToUiRange(value);
    this.upper.set(name, Math.max(v, this.getLower(name)));
  }

  setBudget(value: number): void {
    this.budget = value;
  }

  toRequest(): OptimizeRequest {
    const lower: Record<string, number> = {};
    const upper: Record<string, number> = {};
    for (const name of this.names) {
      lower[name] = this.getLower(name);
      upper[name] = this.getUpper(name);
    }
    return {
      lower,
      upper,
      constraints: [{ total: this.budget, sense: this.budgetSense }],
    };
  }

  /** Record a successful run; history keeps the most recent 20, oldest out. */
  recordResult(request: OptimizeRequest, response: OptimizeResponse): void {
    this.lastResult = response;
    this.history.push({
      request: JSON.parse(JSON.stringify(request)),
      objective: response.objective_value,
      at: Date.now(),
    });
    while (this.history.length > HISTORY_LIMIT) {
      this.history.shift();
    }
  }

  /** Restore the bounds and budget captured by a history entry. */
  applyRequest(request: OptimizeRequest): void {
    for (const name of this.names) {
      if (name in request.lower) {
        this.lower.set(name, request.lower[name]);
      }
      if (name in request.upper) {
        this.upper.set(name, request.upper[name]);
      }
    }
    if (request.constraints.length > 0) {
      this.budget = request.constraints[0].total;
      this.budgetSense = request.constraints[0].sense;
    }
  }
}
