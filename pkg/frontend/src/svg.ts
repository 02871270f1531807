// Small deterministic SVG builder: fixed canvas, fixed style, no
// timestamps, so a render is a pure function of its inputs.

export const WIDTH = 640;
export const HEIGHT = 440;
export const MARGIN = { left: 66, right: 66, top: 40, bottom: 52 };

export const STYLE = {
  frame: '#404040',
  grid: '#d8d8d8',
  text: '#202020',
  sample: '#b03030',
  second: '#2f7d32',
  reference: '#2f7d32',
  ratio: '#2060b0',
  join: '#2f7d32',
};

const XMLNS = 'http://www.w3.org/2000/svg';
const FONT = 'font-family="Helvetica,Arial,sans-serif"';

export function num(x: number): string {
  // fixed two decimals keeps coordinates stable across platforms
  return x.toFixed(2);
}

export function label(x: number): string {
  if (x === 0) return '0';
  const a = Math.abs(x);
  if (a >= 0.01 && a < 10000) return String(+x.toPrecision(3));
  const e = Math.floor(Math.log10(a) + 1e-9);
  const mant = +(x / 10 ** e).toPrecision(3);
  return mant === 1 ? `1e${e}` : `${mant}e${e}`;
}

export interface Scale {
  (x: number): number;
  d0: number;
  d1: number;
}

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const f = ((x: number) => r0 + ((x - d0) / (d1 - d0)) * (r1 - r0)) as Scale;
  f.d0 = d0; f.d1 = d1;
  return f;
}

export function logScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1);
  const f = ((x: number) => r0 + ((Math.log10(x) - l0) / (l1 - l0)) * (r1 - r0)) as Scale;
  f.d0 = d0; f.d1 = d1;
  return f;
}

/** Tick positions covering [lo, hi] with a 1/2/5 step, at most n of them. */
export function niceTicks(lo: number, hi: number, n = 6): number[] {
  if (!(hi > lo)) return [lo];
  const raw = (hi - lo) / n;
  const mag = 10 ** Math.floor(Math.log10(raw));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (m * mag >= raw) { step = m * mag; break; }
  }
  const ticks: number[] = [];
  let t = Math.ceil(lo / step - 1e-9) * step;
  for (; t <= hi + step * 1e-9; t += step) {
    ticks.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  return ticks;
}

/** Powers of ten covering [lo, hi]. */
export function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); 10 ** e <= hi * (1 + 1e-9); e++) {
    ticks.push(10 ** e);
  }
  return ticks;
}

export class SvgDoc {
  private els: string[] = [];

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, w = 1, dash = ''): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : '';
    this.els.push(
      `<line x1="${num(x1)}" y1="${num(y1)}" x2="${num(x2)}" y2="${num(y2)}" stroke="${stroke}" stroke-width="${w}"${d}/>`,
    );
  }

  polyline(pts: [number, number][], stroke: string, w = 1, dash = ''): void {
    if (pts.length < 2) return;
    const d = dash ? ` stroke-dasharray="${dash}"` : '';
    const p = pts.map(([x, y]) => `${num(x)},${num(y)}`).join(' ');
    this.els.push(
      `<polyline points="${p}" fill="none" stroke="${stroke}" stroke-width="${w}"${d}/>`,
    );
  }

  cross(x: number, y: number, r: number, stroke: string): void {
    this.line(x - r, y - r, x + r, y + r, stroke);
    this.line(x - r, y + r, x + r, y - r, stroke);
  }

  text(x: number, y: number, s: string, size = 11, anchor = 'middle', rotate = 0): void {
    const esc = s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
    const tr = rotate ? ` transform="rotate(${rotate} ${num(x)} ${num(y)})"` : '';
    this.els.push(
      `<text x="${num(x)}" y="${num(y)}" ${FONT} font-size="${size}" fill="${STYLE.text}" text-anchor="${anchor}"${tr}>${esc}</text>`,
    );
  }

  toString(): string {
    return [
      `<svg xmlns="${XMLNS}" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
      ...this.els,
      '</svg>',
    ].join('\n') + '\n';
  }
}

export interface Frame {
  doc: SvgDoc;
  x0: number;
  x1: number;
  y0: number;  // bottom edge in screen coordinates
  y1: number;  // top edge
}

export function newFrame(title: string): Frame {
  const doc = new SvgDoc();
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  doc.text((x0 + x1) / 2, y1 - 18, title, 13);
  return { doc, x0, x1, y0, y1 };
}

export function drawBox(f: Frame): void {
  const { doc, x0, x1, y0, y1 } = f;
  doc.line(x0, y0, x1, y0, STYLE.frame);
  doc.line(x0, y1, x1, y1, STYLE.frame);
  doc.line(x0, y0, x0, y1, STYLE.frame);
  doc.line(x1, y0, x1, y1, STYLE.frame);
}

export function xAxis(f: Frame, scale: Scale, ticks: number[], name: string): void {
  for (const t of ticks) {
    const x = scale(t);
    f.doc.line(x, f.y0, x, f.y0 + 4, STYLE.frame);
    f.doc.line(x, f.y0, x, f.y1, STYLE.grid, 0.5);
    f.doc.text(x, f.y0 + 16, label(t));
  }
  f.doc.text((f.x0 + f.x1) / 2, f.y0 + 34, name, 12);
}

export function yAxis(f: Frame, scale: Scale, ticks: number[], name: string): void {
  for (const t of ticks) {
    const y = scale(t);
    f.doc.line(f.x0 - 4, y, f.x0, y, STYLE.frame);
    f.doc.line(f.x0, y, f.x1, y, STYLE.grid, 0.5);
    f.doc.text(f.x0 - 8, y + 4, label(t), 11, 'end');
  }
  f.doc.text(f.x0 - 46, (f.y0 + f.y1) / 2, name, 12, 'middle', -90);
}

export function yAxisRight(f: Frame, scale: Scale, ticks: number[], name: string): void {
  for (const t of ticks) {
    const y = scale(t);
    f.doc.line(f.x1, y, f.x1 + 4, y, STYLE.frame);
    f.doc.text(f.x1 + 8, y + 4, label(t), 11, 'start');
  }
  f.doc.text(f.x1 + 48, (f.y0 + f.y1) / 2, name, 12, 'middle', 90);
}
