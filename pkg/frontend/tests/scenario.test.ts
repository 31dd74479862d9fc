/** End-to-end UI behavior against a stubbed scenario service. */

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { fmt } from "../src/format.js";
import type { OptimizeRequest } from "../src/types.js";
import {
  modelFixture,
  optimizeFixture,
  zeroedChannelFixture,
} from "./fixtures.js";

const SHELL =
  '<div id="banner" hidden></div>' +
  '<div id="model"></div>' +
  '<div id="controls"></div>' +
  '<div id="result"></div>' +
  '<div id="history"></div>';

interface FakeResponse {
  ok: boolean;
  status: number;
  json: () => Promise<unknown>;
}

function json(status: number, payload: unknown): FakeResponse {
  return {
    ok: status >= 200 && status < 300,
    status,
    json: async () => payload,
  };
}

let optimizeBodies: OptimizeRequest[] = [];
let modelHandler: () => FakeResponse | Promise<FakeResponse>;

/** Feasibility mirror of the service: reject when the lower bounds alone
 * overshoot the total, box a channel at zero when asked to. */
function optimizeHandler(body: OptimizeRequest): FakeResponse {
  const total = body.constraints[0]?.total ?? 30;
  const sumLower = Object.values(body.lower).reduce((a, b) => a + b, 0);
  if (sumLower > total + 1e-9) {
    return json(422, {
      detail: {
        status: "infeasible",
        reason: "constraints",
        message: "lower bounds already exceed the total",
      },
    });
  }
  if (body.lower.ads === 0 && body.upper.ads === 0) {
    return json(200, zeroedChannelFixture("ads"));
  }
  return json(200, optimizeFixture());
}

beforeEach(() => {
  document.body.innerHTML = SHELL;
  optimizeBodies = [];
  modelHandler = () => json(200, modelFixture());
  vi.stubGlobal(
    "fetch",
    vi.fn(async (url: unknown, init?: { body?: string }) => {
      const u = String(url);
      if (u.endsWith("/api/v1/model")) {
        return modelHandler();
      }
      if (u.endsWith("/api/v1/optimize")) {
        const body = JSON.parse(init?.body ?? "{}") as OptimizeRequest;
        optimizeBodies.push(body);
        return optimizeHandler(body);
      }
      throw new Error(`unexpected fetch ${u}`);
    }),
  );
});

afterEach(() => {
  vi.unstubAllGlobals();
});

async function startApp(): Promise<void> {
  vi.resetModules();
  await import("../src/main.js");
}

async function bootAndWait(): Promise<void> {
  await startApp();
  await vi.waitFor(
    () => {
      expect(document.querySelectorAll("#model tbody tr").length).toBe(11);
      expect(document.querySelector("#objective-value")).not.toBeNull();
    },
    { timeout: 2000 },
  );
}

function setInput(input: HTMLInputElement, value: string): void {
  input.value = value;
  input.dispatchEvent(new Event("input"));
}

describe("default-bounds scenario", () => {
  it("renders the optimal z vector and objective exactly as returned", async () => {
    const expected = optimizeFixture();
    await bootAndWait();

    const zCells = Array.from(
      document.querySelectorAll("#result td.amount"),
    ).map((td) => td.textContent);
    expect(zCells).toEqual([
      "4",
      "4",
      "4",
      "-2",
      "4",
      "-2",
      "4",
      "2",
      "4",
      "4",
      "4",
    ]);
    expect(document.querySelector("#objective-value")?.textContent).toBe(
      fmt(expected.objective_value),
    );
    expect(document.querySelector("#predicted-volume")?.textContent).toBe(
      fmt(expected.predicted_volume),
    );
  });

  it("sends the model's default bounds and budget on first load", async () => {
    await bootAndWait();
    expect(optimizeBodies.length).toBe(1);
    const body = optimizeBodies[0];
    for (const name of Object.keys(body.lower)) {
      expect(body.lower[name]).toBe(-2);
      expect(body.upper[name]).toBe(4);
    }
    expect(body.constraints).toEqual([{ total: 30, sense: "<=" }]);
  });

  it("lists the run in the history panel", async () => {
    await bootAndWait();
    const buttons = document.querySelectorAll("#history button.replay");
    expect(buttons.length).toBe(1);
  });
});

describe("infeasible edits", () => {
  it("surfaces the 422 reason without losing the previous result", async () => {
    const expected = optimizeFixture();
    await bootAndWait();

    const budgetInput = document.querySelector<HTMLInputElement>(
      '#controls input[type="number"]',
    );
    expect(budgetInput).not.toBeNull();
    setInput(budgetInput!, "-30");

    await vi.waitFor(
      () => {
        expect(
          document.querySelector("#banner .error-banner")?.textContent,
        ).toContain("infeasible: constraints");
      },
      { timeout: 2000 },
    );
    // the last good allocation is still on screen
    expect(document.querySelector("#objective-value")?.textContent).toBe(
      fmt(expected.objective_value),
    );
    expect(document.querySelectorAll("#result tbody tr").length).toBe(11);
  });

  it("clears the banner once the scenario is feasible again", async () => {
    await bootAndWait();
    const budgetInput = document.querySelector<HTMLInputElement>(
      '#controls input[type="number"]',
    )!;
    setInput(budgetInput, "-30");
    await vi.waitFor(
      () => {
        expect(document.querySelector("#banner .error-banner")).not.toBeNull();
      },
      { timeout: 2000 },
    );

    setInput(budgetInput, "30");
    await vi.waitFor(
      () => {
        expect(document.querySelector("#banner .error-banner")).toBeNull();
        expect((document.getElementById("banner") as HTMLElement).hidden).toBe(
          true,
        );
      },
      { timeout: 2000 },
    );
  });
});

describe("channel boxed to zero", () => {
  it("renders that channel's contribution as zero", async () => {
    await bootAndWait();

    // seventh control row = ads; first slider is the lower bound
    const rows = document.querySelectorAll("#controls .control-row");
    const sliders = rows[6].querySelectorAll<HTMLInputElement>(
      'input[type="range"]',
    );
    setInput(sliders[1], "0");
    setInput(sliders[0], "0");

    await vi.waitFor(
      () => {
        const cell = document.querySelector(
          '#result tr[data-variable="ads"] td.contribution',
        );
        expect(cell?.textContent).toBe("0.00");
      },
      { timeout: 2000 },
    );
    const last = optimizeBodies.at(-1)!;
    expect(last.lower.ads).toBe(0);
    expect(last.upper.ads).toBe(0);
  });
});

describe("natural units toggle", () => {
  it("re-renders the last result without another request", async () => {
    await bootAndWait();
    const calls = optimizeBodies.length;

    const toggle = document.querySelector<HTMLInputElement>(
      '#controls input[type="checkbox"]',
    )!;
    toggle.checked = true;
    toggle.dispatchEvent(new Event("change"));

    const conAmount = document.querySelector(
      '#result tr[data-variable="con"] td.amount',
    );
    // 54113.88 + 4 * 21606.72
    expect(conAmount?.textContent).toBe("140,540.76");
    expect(optimizeBodies.length).toBe(calls);
  });
});

describe("replay", () => {
  it("re-issues a stored scenario immediately", async () => {
    await bootAndWait();
    const before = optimizeBodies.length;

    const button = document.querySelector<HTMLButtonElement>(
      "#history button.replay",
    )!;
    button.click();

    await vi.waitFor(
      () => {
        expect(optimizeBodies.length).toBe(before + 1);
      },
      { timeout: 2000 },
    );
    expect(optimizeBodies.at(-1)).toEqual(optimizeBodies[0]);
  });
});

describe("service unreachable", () => {
  it("shows a retry banner and boots once the service returns", async () => {
    modelHandler = () => Promise.reject(new TypeError("connection refused"));
    await startApp();

    await vi.waitFor(
      () => {
        expect(document.querySelector("#retry-load")).not.toBeNull();
      },
      { timeout: 2000 },
    );
    expect(document.querySelectorAll("#model tbody tr").length).toBe(0);

    modelHandler = () => json(200, modelFixture());
    document.querySelector<HTMLButtonElement>("#retry-load")!.click();

    await vi.waitFor(
      () => {
        expect(document.querySelectorAll("#model tbody tr").length).toBe(11);
        expect(document.querySelector("#objective-value")).not.toBeNull();
      },
      { timeout: 2000 },
    );
  });
});
