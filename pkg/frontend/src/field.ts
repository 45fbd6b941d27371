// The clickable game field: draws prior decisions with their score labels
// and translates canvas clicks into domain coordinates.

import type { ClickEventData } from './api.js';
import { formatScore } from './format.js';
import { FieldTransform, type DomainBox } from './transform.js';

export type ClickHandler = (x1: number, x2: number) => void;

export class FieldView {
  private domain: DomainBox | null = null;
  private markers: ClickEventData[] = [];
  private handler: ClickHandler | null = null;
  private ctx: CanvasRenderingContext2D | null;

  constructor(readonly canvas: HTMLCanvasElement) {
    let ctx: CanvasRenderingContext2D | null = null;
    try {
      ctx = canvas.getContext('2d'); // null under test DOMs without canvas
    } catch {
      ctx = null;
    }
    this.ctx = ctx;
    canvas.addEventListener('click', (ev) => this.handleClick(ev as MouseEvent));
  }

  get transform(): FieldTransform | null {
    if (this.domain === null) return null;
    return new FieldTransform(this.canvas.width, this.canvas.height, this.domain);
  }

  setDomain(domain: DomainBox): void {
    this.domain = domain;
    this.markers = [];
    this.render();
  }

  setMarkers(markers: ClickEventData[]): void {
    this.markers = [...markers];
    this.render();
  }

  onClick(handler: ClickHandler): void {
    this.handler = handler;
  }

  get markerCount(): number {
    return this.markers.length;
  }

  shake(): void {
    this.canvas.classList.remove('shake');
    // force a reflow so repeated rejections retrigger the animation
    void this.canvas.offsetWidth;
    this.canvas.classList.add('shake');
  }

  private handleClick(ev: MouseEvent): void {
    if (this.handler === null) return;
    const t = this.transform;
    if (t === null) return;
    const rect = this.canvas.getBoundingClientRect();
    const px = ev.clientX - rect.left;
    const py = ev.clientY - rect.top;
    const point = t.pixelToDomain(px, py);
    if (point === null) return; // letterbox margin: not a decision
    this.handler(point[0], point[1]);
  }

  render(): void {
    this.canvas.dataset.markers = String(this.markers.length);
    const ctx = this.ctx;
    const t = this.transform;
    if (ctx === null || t === null) return;
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);
    const rect = t.fieldRect();
    ctx.fillStyle = '#10331c';
    ctx.fillRect(rect.x, rect.y, rect.width, rect.height);
    ctx.strokeStyle = '#2d7a44';
    ctx.strokeRect(rect.x, rect.y, rect.width, rect.height);
    for (const marker of this.markers) {
      const [px, py] = t.domainToPixel(marker.x[0] ?? 0, marker.x[1] ?? 0);
      ctx.beginPath();
      ctx.arc(px, py, 5, 0, 2 * Math.PI);
      ctx.fillStyle = '#ffd84d';
      ctx.fill();
      ctx.strokeStyle = '#443300';
      ctx.stroke();
      ctx.fillStyle = '#f2f2f2';
      ctx.font = '12px sans-serif';
      ctx.fillText(formatScore(marker.score), px + 8, py - 8);
    }
  }
}
