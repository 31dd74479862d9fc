/** API payload fixtures shaped exactly like the scenario service. */

import type { ModelResponse, OptimizeResponse } from "../src/types.js";

const VARIABLES: [string, number, number, number, number, number][] = [
  ["con", 54113.88, 21606.72, 7657, 99188, 59167.95],
  ["cal", 38964.52, 17162.88, 5361, 77657, 58912.58],
  ["coc", 4357317.52, 1740648.34, 737297, 8041793, 57713.02],
  ["cpc", 87.92, 10.67, 62, 114, -46433.24],
  ["min", 182602.33, 72862.46, 32682, 334945, 58693.49],
  ["jas", 217926.8, 112177.79, 0, 486943, 23596.74],
  ["ads", 14.12, 6.57, 0, 30, 33295.52],
  ["adp", 39.16, 20.22, 0, 82, 29855.06],
  ["sam", 1094355.12, 627396.75, 615, 2614948, 56987.67],
  ["eus", 3556610.79, 1743431.6, 1230, 8204439, 54746.69],
  ["rvs", 8582259.6, 3820827.2, 6660, 18502700, 56685.92],
];

export function modelFixture(): ModelResponse {
  const lower: Record<string, number> = {};
  const upper: Record<string, number> = {};
  const weights: Record<string, number> = {};
  for (const [name] of VARIABLES) {
    lower[name] = -2;
    upper[name] = 4;
    weights[name] = 1;
  }
  return {
    variables: VARIABLES.map(([name, mean, sd, min, max, coefficient]) => ({
      name,
      mean,
      sd,
      min,
      max,
      coefficient,
    })),
    intercept: 1080544.093,
    default_bounds: { lower, upper },
    default_constraints: [{ weights, bound: 30, sense: "<=", label: "total" }],
    provenance: { seed: 20240, config_hash: "abc123" },
  };
}

/** The default optimum with one channel boxed to z = 0. */
export function zeroedChannelFixture(name: string): OptimizeResponse {
  const base = optimizeFixture();
  const i = base.names.indexOf(name);
  const delta = base.contributions[i];
  base.z_star[i] = 0;
  base.contributions[i] = 0;
  base.objective_value -= delta;
  base.predicted_volume -= delta;
  base.allocation[i] = {
    variable: name,
    z: 0,
    level: VARIABLES[i][1],
    contribution: 0,
  };
  return base;
}

export function optimizeFixture(): OptimizeResponse {
  const zStar = [4, 4, 4, -2, 4, -2, 4, 2, 4, 4, 4];
  const names = VARIABLES.map(([name]) => name);
  const contributions = VARIABLES.map(([, , , , , coef], i) => coef * zStar[i]);
  const objective = contributions.reduce((a, b) => a + b, 0);
  return {
    status: "optimal",
    names,
    z_star: zStar,
    objective_value: objective,
    contributions,
    binding: { bounds: {}, constraints: ["total"] },
    intercept: 1080544.093,
    predicted_volume: 1080544.093 + objective,
    allocation: VARIABLES.map(([name, mean, sd], i) => ({
      variable: name,
      z: zStar[i],
      level: mean + zStar[i] * sd,
      contribution: contributions[i],
    })),
  };
}
