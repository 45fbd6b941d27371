// Scores are displayed with 3 significant digits; full precision lives in
// the trace log on the server side.

export function formatScore(value: number | null | undefined): string {
  if (value === null || value === undefined || Number.isNaN(value)) return '-';
  if (value === 0) return '0';
  const text = value.toPrecision(3);
  // strip exponent notation for moderate magnitudes, trailing zeros otherwise
  const asNumber = Number(text);
  if (Math.abs(asNumber) >= 1e6 || Math.abs(asNumber) < 1e-3) return text;
  return String(asNumber);
}
