/**
 * Canvas rendering and pointer interaction: image, box overlay with drag
 * handles, score breakdown, optional foreground-mask layer, wheel zoom
 * and pan. Shuttlecocks are 10-20 px on full-resolution frames, so
 * pixel-level zoom (nearest-neighbor upscaling) is the main affordance.
 */

import {
  CornerBox,
  Handle,
  Viewport,
  hitTest,
  handleCenter,
  imageToScreen,
  moveBox,
  resizeBox,
  screenToImage,
  snapBox,
  toCenterSize,
  toCorners,
  zoomAt,
} from './boxes.js';
import type { BboxPx, LabelRecordJson } from './types.js';

type DragState =
  | { kind: 'none' }
  | { kind: 'pan'; lastX: number; lastY: number }
  | { kind: 'move'; lastX: number; lastY: number }
  | { kind: 'resize'; handle: Handle; lastX: number; lastY: number }
  | { kind: 'draw'; startX: number; startY: number };

export class CanvasView {
  private ctx: CanvasRenderingContext2D;
  private image: HTMLImageElement | null = null;
  private mask: HTMLImageElement | null = null;
  viewport: Viewport = { zoom: 1, panX: 0, panY: 0 };
  /** the box being edited, in image pixels; null = no box shown */
  editBox: CornerBox | null = null;
  /** true once the user has dragged: the box differs from the record */
  dirty = false;
  record: LabelRecordJson | null = null;
  showBox = true;
  showScore = false;
  showMask = false;
  onDirtyChange: ((dirty: boolean) => void) | null = null;
  private drag: DragState = { kind: 'none' };

  constructor(private canvas: HTMLCanvasElement) {
    const ctx = canvas.getContext('2d');
    if (ctx === null) throw new Error('canvas 2d context unavailable');
    this.ctx = ctx;
    canvas.addEventListener('pointerdown', (e) => this.pointerDown(e));
    canvas.addEventListener('pointermove', (e) => this.pointerMove(e));
    canvas.addEventListener('pointerup', (e) => this.pointerUp(e));
    canvas.addEventListener('wheel', (e) => this.wheel(e), { passive: false });
  }

  setFrame(image: HTMLImageElement | null, record: LabelRecordJson | null): void {
    this.image = image;
    this.record = record;
    this.editBox = record?.bbox_px
      ? toCorners({ x_c: record.bbox_px[0], y_c: record.bbox_px[1], w: record.bbox_px[2], h: record.bbox_px[3] })
      : null;
    this.setDirty(false);
    this.fitIfNeeded();
    this.render();
  }

  setMask(mask: HTMLImageElement | null): void {
    this.mask = mask;
    this.render();
  }

  private setDirty(dirty: boolean): void {
    if (this.dirty !== dirty) {
      this.dirty = dirty;
      this.onDirtyChange?.(dirty);
    }
  }

  /** the dragged box in API form, or null when nothing changed */
  pendingBox(): BboxPx | null {
    if (!this.dirty || this.editBox === null) return null;
    return toCenterSize(snapBox(this.editBox));
  }

  discardEdit(): void {
    if (this.record?.bbox_px) {
      const [x, y, w, h] = this.record.bbox_px;
      this.editBox = toCorners({ x_c: x, y_c: y, w, h });
    } else {
      this.editBox = null;
    }
    this.setDirty(false);
    this.render();
  }

  resetView(): void {
    this.viewport = { zoom: 1, panX: 0, panY: 0 };
    this.fitIfNeeded();
    this.render();
  }

  zoomStep(direction: 1 | -1): void {
    const cx = this.canvas.width / 2;
    const cy = this.canvas.height / 2;
    this.viewport = zoomAt(this.viewport, cx, cy, direction > 0 ? 1.5 : 1 / 1.5);
    this.render();
  }

  private fitIfNeeded(): void {
    if (this.image === null) return;
    if (this.viewport.zoom === 1) {
      this.viewport = { zoom: 1, panX: 0, panY: 0 };
    }
  }

  private canvasPos(e: PointerEvent | WheelEvent): { x: number; y: number } {
    const rect = this.canvas.getBoundingClientRect();
    return {
      x: ((e.clientX - rect.left) / rect.width) * this.canvas.width,
      y: ((e.clientY - rect.top) / rect.height) * this.canvas.height,
    };
  }

  private pointerDown(e: PointerEvent): void {
    this.canvas.setPointerCapture(e.pointerId);
    const pos = this.canvasPos(e);
    const img = screenToImage(this.viewport, pos.x, pos.y);
    if (e.button === 1 || e.shiftKey) {
      this.drag = { kind: 'pan', lastX: pos.x, lastY: pos.y };
      return;
    }
    if (this.editBox !== null && this.showBox) {
      const radius = Math.max(6 / this.viewport.zoom, 2);
      const hit = hitTest(this.editBox, img.x, img.y, radius);
      if (hit.kind === 'handle') {
        this.drag = { kind: 'resize', handle: hit.handle, lastX: img.x, lastY: img.y };
        return;
      }
      if (hit.kind === 'inside') {
        this.drag = { kind: 'move', lastX: img.x, lastY: img.y };
        return;
      }
    }
    if (this.editBox === null && this.record !== null) {
      // no box yet (queued frame): draw one
      this.drag = { kind: 'draw', startX: img.x, startY: img.y };
      return;
    }
    if (this.editBox === null && this.record === null) {
      this.drag = { kind: 'draw', startX: img.x, startY: img.y };
      return;
    }
    this.drag = { kind: 'pan', lastX: pos.x, lastY: pos.y };
  }

  private pointerMove(e: PointerEvent): void {
    if (this.drag.kind === 'none') return;
    const pos = this.canvasPos(e);
    const img = screenToImage(this.viewport, pos.x, pos.y);
    const bounds = this.imageBounds();
    switch (this.drag.kind) {
      case 'pan': {
        this.viewport = {
          ...this.viewport,
          panX: this.viewport.panX - (pos.x - this.drag.lastX) / this.viewport.zoom,
          panY: this.viewport.panY - (pos.y - this.drag.lastY) / this.viewport.zoom,
        };
        this.drag.lastX = pos.x;
        this.drag.lastY = pos.y;
        break;
      }
      case 'move': {
        if (this.editBox !== null) {
          this.editBox = moveBox(
            this.editBox,
            img.x - this.drag.lastX,
            img.y - this.drag.lastY,
            bounds.w,
            bounds.h,
          );
          this.setDirty(true);
        }
        this.drag.lastX = img.x;
        this.drag.lastY = img.y;
        break;
      }
      case 'resize': {
        if (this.editBox !== null) {
          this.editBox = resizeBox(
            this.editBox,
            this.drag.handle,
            img.x - this.drag.lastX,
            img.y - this.drag.lastY,
            bounds.w,
            bounds.h,
          );
          this.setDirty(true);
        }
        this.drag.lastX = img.x;
        this.drag.lastY = img.y;
        break;
      }
      case 'draw': {
        this.editBox = {
          x0: Math.min(this.drag.startX, img.x),
          y0: Math.min(this.drag.startY, img.y),
          x1: Math.max(this.drag.startX, img.x),
          y1: Math.max(this.drag.startY, img.y),
        };
        this.setDirty(true);
        break;
      }
    }
    this.render();
  }

  private pointerUp(e: PointerEvent): void {
    this.canvas.releasePointerCapture(e.pointerId);
    if ((this.drag.kind === 'move' || this.drag.kind === 'resize' || this.drag.kind === 'draw') && this.editBox !== null) {
      this.editBox = snapBox(this.editBox);
      this.render();
    }
    this.drag = { kind: 'none' };
  }

  private wheel(e: WheelEvent): void {
    e.preventDefault();
    const pos = this.canvasPos(e);
    const factor = e.deltaY < 0 ? 1.25 : 1 / 1.25;
    this.viewport = zoomAt(this.viewport, pos.x, pos.y, factor);
    this.render();
  }

  private imageBounds(): { w: number; h: number } {
    return {
      w: this.record?.width ?? this.image?.naturalWidth ?? this.canvas.width,
      h: this.record?.height ?? this.image?.naturalHeight ?? this.canvas.height,
    };
  }

  render(): void {
    const { ctx, canvas } = this;
    ctx.save();
    ctx.setTransform(1, 0, 0, 1, 0, 0);
    ctx.fillStyle = '#14161a';
    ctx.fillRect(0, 0, canvas.width, canvas.height);
    const v = this.viewport;
    ctx.setTransform(v.zoom, 0, 0, v.zoom, -v.panX * v.zoom, -v.panY * v.zoom);
    ctx.imageSmoothingEnabled = v.zoom < 2;
    if (this.image !== null) {
      ctx.drawImage(this.image, 0, 0);
    }
    if (this.showMask && this.mask !== null) {
      ctx.globalAlpha = 0.35;
      ctx.drawImage(this.mask, 0, 0);
      ctx.globalAlpha = 1;
    }
    if (this.showBox && this.editBox !== null) {
      const b = this.editBox;
      ctx.lineWidth = 1.5 / v.zoom;
      ctx.strokeStyle = this.dirty ? '#ffb347' : '#3dd873';
      ctx.strokeRect(b.x0, b.y0, b.x1 - b.x0, b.y1 - b.y0);
      const r = 3 / v.zoom;
      ctx.fillStyle = ctx.strokeStyle;
      for (const handle of ['nw', 'n', 'ne', 'e', 'se', 's', 'sw', 'w'] as Handle[]) {
        const c = handleCenter(b, handle);
        ctx.fillRect(c.x - r, c.y - r, 2 * r, 2 * r);
      }
    }
    ctx.restore();
    if (this.showScore && this.record !== null) {
      ctx.save();
      ctx.setTransform(1, 0, 0, 1, 0, 0);
      ctx.font = '13px monospace';
      ctx.fillStyle = '#d7dae0';
      const lines = [
        `status ${this.record.status}`,
        `score ${this.record.pipeline_score?.toFixed(3) ?? 'n/a'}`,
        `editor ${this.record.editor}`,
      ];
      lines.forEach((line, i) => ctx.fillText(line, 10, 20 + 16 * i));
      ctx.restore();
    }
    if (this.editBox !== null && this.showBox) {
      // position readout helps pixel-level nudging
      const b = snapBox(this.editBox);
      const c = toCenterSize(b);
      const screen = imageToScreen(v, b.x0, b.y1);
      ctx.save();
      ctx.setTransform(1, 0, 0, 1, 0, 0);
      ctx.font = '12px monospace';
      ctx.fillStyle = '#9aa4b2';
      ctx.fillText(
        `(${c.x_c.toFixed(1)}, ${c.y_c.toFixed(1)}) ${c.w}x${c.h}`,
        Math.max(screen.x, 4),
        Math.min(screen.y + 16, this.canvas.height - 6),
      );
      ctx.restore();
    }
  }
}
