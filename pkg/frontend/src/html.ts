/** Small HTML/SVG string helpers shared by the views. All numbers shown
 * to the user are payload values rendered verbatim; geometry (bar widths)
 * is layout only and never displayed as text. */
import { IntervalPayload } from "./api.js";

export function esc(value: unknown): string {
  return String(value)
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

/** "(10, ∞)" / "[300, ∞)" style rendering of an API interval. */
export function formatInterval(interval: IntervalPayload): string {
  const lo = interval.lower === null ? "-∞" : String(interval.lower);
  const hi = interval.upper === null ? "∞" : String(interval.upper);
  const open = interval.lower === null || interval.lower_open ? "(" : "[";
  const close = interval.upper === null || interval.upper_open ? ")" : "]";
  return `${open}${lo}, ${hi}${close}`;
}

export interface BarDatum {
  label: string;
  value: number; // displayed verbatim
  magnitude: number; // drives geometry
  signed?: boolean;
  marker?: boolean; // presence marker for signed charts
}

/** Horizontal bar chart as inline SVG; labels and values are text,
 * bar lengths are proportional geometry. */
export function barChart(data: BarDatum[], cssClass: string): string {
  if (data.length === 0) {
    return `<p class="empty-state">No data to chart.</p>`;
  }
  const rowHeight = 22;
  const labelWidth = 240;
  const chartWidth = 320;
  const height = data.length * rowHeight;
  const maxMagnitude = Math.max(...data.map((d) => Math.abs(d.magnitude)), 1e-12);
  const mid = labelWidth + chartWidth / 2;
  const rows = data
    .map((d, i) => {
      const y = i * rowHeight;
      const scale = (Math.abs(d.magnitude) / maxMagnitude) * (chartWidth / 2 - 4);
      let bar: string;
      if (d.signed) {
        const negative = d.magnitude < 0;
        const x = negative ? mid - scale : mid;
        bar = `<rect x="${x.toFixed(1)}" y="${y + 4}" width="${scale.toFixed(1)}" height="${rowHeight - 8}" class="bar ${negative ? "bar-neg" : "bar-pos"}"></rect>`;
      } else {
        bar = `<rect x="${labelWidth}" y="${y + 4}" width="${(2 * scale).toFixed(1)}" height="${rowHeight - 8}" class="bar bar-pos"></rect>`;
      }
      const marker =
        d.marker === undefined
          ? ""
          : `<circle cx="${labelWidth - 10}" cy="${y + rowHeight / 2}" r="4" class="${d.marker ? "marker-present" : "marker-absent"}"><title>${d.marker ? "feature present" : "feature absent"}</title></circle>`;
      return (
        `<g class="bar-row">` +
        `<text x="0" y="${y + rowHeight - 7}" class="bar-label">${esc(d.label)}</text>` +
        marker +
        bar +
        `<text x="${labelWidth + chartWidth + 8}" y="${y + rowHeight - 7}" class="bar-value">${esc(d.value)}</text>` +
        `</g>`
      );
    })
    .join("");
  const axis = data.some((d) => d.signed)
    ? `<line x1="${mid}" y1="0" x2="${mid}" y2="${height}" class="axis"></line>`
    : "";
  return `<svg class="${cssClass}" width="${labelWidth + chartWidth + 120}" height="${height}" role="img">${axis}${rows}</svg>`;
}

export function banner(kind: "error" | "warning" | "info", text: string, retry = false): string {
  const button = retry ? `<button class="retry" data-action="retry">Retry</button>` : "";
  return `<div class="banner banner-${kind}">${esc(text)}${button}</div>`;
}
