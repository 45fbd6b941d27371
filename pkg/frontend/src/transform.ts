// Canvas-to-domain affine mapping. The domain box is letterboxed into the
// canvas so both axes share one scale factor and clicks map linearly.

export interface DomainBox {
  lower: [number, number];
  upper: [number, number];
}

export interface FieldRect {
  x: number;
  y: number;
  width: number;
  height: number;
}

export class FieldTransform {
  readonly scale: number;
  readonly offsetX: number;
  readonly offsetY: number;

  constructor(
    readonly canvasWidth: number,
    readonly canvasHeight: number,
    readonly domain: DomainBox,
  ) {
    const spanX = domain.upper[0] - domain.lower[0];
    const spanY = domain.upper[1] - domain.lower[1];
    this.scale = Math.min(canvasWidth / spanX, canvasHeight / spanY);
    this.offsetX = (canvasWidth - spanX * this.scale) / 2;
    this.offsetY = (canvasHeight - spanY * this.scale) / 2;
  }

  fieldRect(): FieldRect {
    const spanX = this.domain.upper[0] - this.domain.lower[0];
    const spanY = this.domain.upper[1] - this.domain.lower[1];
    return {
      x: this.offsetX,
      y: this.offsetY,
      width: spanX * this.scale,
      height: spanY * this.scale,
    };
  }

  domainToPixel(x1: number, x2: number): [number, number] {
    // canvas y grows downward; the second domain coordinate grows upward
    const px = this.offsetX + (x1 - this.domain.lower[0]) * this.scale;
    const py = this.offsetY + (this.domain.upper[1] - x2) * this.scale;
    return [px, py];
  }

  /** Domain coordinates for a canvas pixel, or null on the letterbox margin. */
  pixelToDomain(px: number, py: number): [number, number] | null {
    const rect = this.fieldRect();
    if (px < rect.x || px > rect.x + rect.width || py < rect.y || py > rect.y + rect.height) {
      return null;
    }
    const x1 = this.domain.lower[0] + (px - this.offsetX) / this.scale;
    const x2 = this.domain.upper[1] - (py - this.offsetY) / this.scale;
    // clamp float residue at the field border onto the closed box
    return [
      Math.min(Math.max(x1, this.domain.lower[0]), this.domain.upper[0]),
      Math.min(Math.max(x2, this.domain.lower[1]), this.domain.upper[1]),
    ];
  }
}
