/** DOM rendering. Numbers shown come straight from the API payloads;
 * the only client-side arithmetic is bar sizing and display rounding.
 */

import { fmt, fmtZ } from "./format.js";
import type {
  ApiError,
  ModelResponse,
  OptimizeResponse,
  VariableInfo,
} from "./types.js";
import type { HistoryEntry } from "./state.js";

export function renderModel(el: HTMLElement, model: ModelResponse): void {
  if (model.variables.length === 0) {
    el.innerHTML = '<p class="empty">no model loaded</p>';
    return;
  }
  const rows = model.variables
    .map((v: VariableInfo) => {
      const cls = v.coefficient < 0 ? ' class="negative"' : "";
      return (
        `<tr data-variable="${v.name}">` +
        `<td>${v.name}</td>` +
        `<td>${fmt(v.mean)}</td>` +
        `<td>${fmt(v.sd)}</td>` +
        `<td${cls}>${fmt(v.coefficient)}</td>` +
        "</tr>"
      );
    })
    .join("");
  el.innerHTML =
    "<table><thead><tr>" +
    "<th>channel</th><th>mean</th><th>sd</th><th>coefficient</th>" +
    `</tr></thead><tbody>${rows}</tbody></table>` +
    `<p class="intercept">intercept <span id="model-intercept">${fmt(model.intercept)}</span></p>`;
}

export function renderResult(
  el: HTMLElement,
  result: OptimizeResponse,
  naturalUnits: boolean,
): void {
  const maxAbs = Math.max(
    1e-12,
    ...result.allocation.map((row) => Math.abs(row.contribution)),
  );
  const rows = result.allocation
    .map((row) => {
      const width = Math.round((Math.abs(row.contribution) / maxAbs) * 100);
      const barCls = row.contribution < 0 ? "bar negative" : "bar";
      const amount = naturalUnits ? fmt(row.level) : fmtZ(row.z);
      return (
        `<tr data-variable="${row.variable}">` +
        `<td>${row.variable}</td>` +
        `<td class="amount">${amount}</td>` +
        `<td class="contribution">${fmt(row.contribution)}</td>` +
        `<td class="chart"><div class="${barCls}" style="width:${width}%"></div></td>` +
        "</tr>"
      );
    })
    .join("");
  const unitHeader = naturalUnits ? "level" : "z";
  el.innerHTML =
    "<table><thead><tr>" +
    `<th>channel</th><th>${unitHeader}</th><th>contribution</th><th></th>` +
    `</tr></thead><tbody>${rows}</tbody></table>` +
    '<p class="totals">objective <span id="objective-value">' +
    fmt(result.objective_value) +
    '</span> &middot; predicted volume <span id="predicted-volume">' +
    fmt(result.predicted_volume) +
    "</span></p>";
}

export function renderError(el: HTMLElement, error: ApiError): void {
  const pieces = [error.status];
  if (error.reason) {
    pieces.push(error.reason);
  }
  if (error.variable) {
    pieces.push(error.variable);
  }
  const text = error.message ? `${pieces.join(": ")} (${error.message})` : pieces.join(": ");
  el.innerHTML = `<p class="error-banner">${text}</p>`;
  el.hidden = false;
}

export function clearError(el: HTMLElement): void {
  el.innerHTML = "";
  el.hidden = true;
}

export function renderRetryBanner(el: HTMLElement, onRetry: () => void): void {
  el.innerHTML =
    '<p class="error-banner">cannot reach the scenario service ' +
    '<button id="retry-load">retry</button></p>';
  el.hidden = false;
  el.querySelector("#retry-load")?.addEventListener("click", onRetry);
}

export function renderHistory(
  el: HTMLElement,
  entries: HistoryEntry[],
  onReplay: (entry: HistoryEntry) => void,
): void {
  if (entries.length === 0) {
    el.innerHTML = '<p class="empty">no runs yet</p>';
    return;
  }
  el.innerHTML =
    "<ol>" +
    entries
      .map(
        (e, i) =>
          `<li><button class="replay" data-index="${i}">` +
          `objective ${fmt(e.objective)}</button></li>`,
      )
      .join("") +
    "</ol>";
  for (const button of Array.from(el.querySelectorAll<HTMLButtonElement>(".replay"))) {
    button.addEventListener("click", () => {
      const index = Number(button.dataset.index);
      onReplay(entries[index]);
    });
  }
}
