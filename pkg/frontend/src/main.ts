/** Wiring: load the model, build the controls, keep the view current. */

import { fetchModel, postOptimize } from "./api.js";
import { fmt } from "./format.js";
import {
  clearError,
  renderError,
  renderHistory,
  renderModel,
  renderResult,
  renderRetryBanner,
} from "./render.js";
import { RequestScheduler } from "./scheduler.js";
import { ScenarioState, UI_MAX, UI_MIN } from "./state.js";
import type { OptimizeOutcome, OptimizeRequest } from "./types.js";

const BASE = "";

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing #${id}`);
  }
  return node;
}

function slider(value: number): HTMLInputElement {
  const input = document.createElement("input");
  input.type = "range";
  input.min = String(UI_MIN);
  input.max = String(UI_MAX);
  input.step = "0.1";
  input.value = String(value);
  return input;
}

async function boot(): Promise<void> {
  let model;
  try {
    model = await fetchModel(BASE);
  } catch {
    renderRetryBanner(el("banner"), () => void boot());
    return;
  }
  clearError(el("banner"));

  const state = new ScenarioState(model);
  renderModel(el("model"), model);

  const scheduler = new RequestScheduler<OptimizeRequest, OptimizeOutcome>(
    (req) => postOptimize(BASE, req),
    (outcome) => {
      if (outcome.ok) {
        clearError(el("banner"));
        state.recordResult(lastRequest, outcome.data);
        renderResult(el("result"), outcome.data, state.naturalUnits);
        renderHistory(el("history"), state.history, replay);
      } else {
        // keep the previous allocation on screen; only the banner changes
        renderError(el("banner"), outcome.error);
      }
    },
  );

  let lastRequest = state.toRequest();
  const push = (immediate = false): void => {
    lastRequest = state.toRequest();
    if (immediate) {
      scheduler.submitNow(lastRequest);
    } else {
      scheduler.schedule(lastRequest);
    }
  };

  const replay = (entry: { request: OptimizeRequest }): void => {
    state.applyRequest(entry.request);
    buildControls();
    push(true);
  };

  const controls = el("controls");
  function buildControls(): void {
    controls.innerHTML = "";
    for (const name of state.names) {
      const row = document.createElement("div");
      row.className = "control-row";
      const label = document.createElement("span");
      label.textContent = name;
      const lowerInput = slider(state.getLower(name));
      const upperInput = slider(state.getUpper(name));
      const readout = document.createElement("span");
      readout.className = "readout";
      const paint = (): void => {
        readout.textContent = `[${fmt(state.getLower(name), 1)}, ${fmt(state.getUpper(name), 1)}]`;
      };
      lowerInput.addEventListener("input", () => {
        state.setLower(name, Number(lowerInput.value));
        lowerInput.value = String(state.getLower(name));
        paint();
        push();
      });
      upperInput.addEventListener("input", () => {
        state.setUpper(name, Number(upperInput.value));
        upperInput.value = String(state.getUpper(name));
        paint();
        push();
      });
      paint();
      row.append(label, lowerInput, upperInput, readout);
      controls.append(row);
    }

    const budgetRow = document.createElement("div");
    budgetRow.className = "control-row";
    const budgetLabel = document.createElement("span");
    budgetLabel.textContent = `total z ${state.budgetSense}`;
    const budgetInput = document.createElement("input");
    budgetInput.type = "number";
    budgetInput.step = "1";
    budgetInput.value = String(state.budget);
    budgetInput.addEventListener("input", () => {
      state.setBudget(Number(budgetInput.value));
      push();
    });
    budgetRow.append(budgetLabel, budgetInput);
    controls.append(budgetRow);

    const unitRow = document.createElement("div");
    unitRow.className = "control-row";
    const unitLabel = document.createElement("label");
    const unitToggle = document.createElement("input");
    unitToggle.type = "checkbox";
    unitToggle.checked = state.naturalUnits;
    unitToggle.addEventListener("change", () => {
      state.naturalUnits = unitToggle.checked;
      if (state.lastResult) {
        renderResult(el("result"), state.lastResult, state.naturalUnits);
      }
    });
    unitLabel.append(unitToggle, document.createTextNode(" natural units"));
    unitRow.append(unitLabel);
    controls.append(unitRow);
  }

  buildControls();
  renderHistory(el("history"), state.history, replay);
  push(true);
}

void boot();
