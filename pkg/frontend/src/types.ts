/** Wire types for the /api/v1 scenario service. */

export interface VariableInfo {
  name: string;
  mean: number;
  sd: number;
  min: number;
  max: number;
  coefficient: number;
}

export interface ConstraintInfo {
  weights: Record<string, number>;
  bound: number;
  sense: string;
  label: string;
}

export interface ModelResponse {
  variables: VariableInfo[];
  intercept: number;
  default_bounds: {
    lower: Record<string, number | null>;
    upper: Record<string, number | null>;
  };
  default_constraints: ConstraintInfo[];
  provenance: { seed: number; config_hash: string };
}

export interface AllocationRow {
  variable: string;
  z: number;
  level: number;
  contribution: number;
}

export interface OptimizeResponse {
  status: "optimal";
  names: string[];
  z_star: number[];
  objective_value: number;
  contributions: number[];
  binding: { bounds: Record<string, string>; constraints: (string | number)[] };
  intercept: number;
  predicted_volume: number;
  allocation: AllocationRow[];
}

export interface OptimizeRequest {
  lower: Record<string, number>;
  upper: Record<string, number>;
  constraints: { total: number; sense: string }[];
}

export interface ApiError {
  status: string;
  reason?: string;
  variable?: string;
  message?: string;
}

export type OptimizeOutcome =
  | { ok: true; data: OptimizeResponse }
  | { ok: false; httpStatus: number; error: ApiError };
