/** Display formatting only; no arithmetic beyond rounding for presentation. */

export function fmt(value: number, digits = 2): string {
  return value.toLocaleString("en-US", {
    minimumFractionDigits: digits,
    maximumFractionDigits: digits,
  });
}

export function fmtZ(value: number): string {
  return Number.isInteger(value) ? String(value) : fmt(value, 2);
}
