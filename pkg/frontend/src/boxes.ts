/**
 * Box geometry for the overlay editor: hit testing, drag/resize math,
 * pixel-grid snapping, and image<->screen coordinate transforms.
 *
 * Boxes are edited in corner form (image-pixel coordinates) and converted
 * to the API's center+size form on save.
 */

import type { BboxPx } from './types.js';

/** Corner-form box in image pixels; x1/y1 are exclusive-ish float edges. */
export interface CornerBox {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export type Handle = 'nw' | 'n' | 'ne' | 'e' | 'se' | 's' | 'sw' | 'w';

export type HitResult = { kind: 'handle'; handle: Handle } | { kind: 'inside' } | { kind: 'outside' };

export function toCorners(b: BboxPx): CornerBox {
  return { x0: b.x_c - b.w / 2, y0: b.y_c - b.h / 2, x1: b.x_c + b.w / 2, y1: b.y_c + b.h / 2 };
}

export function toCenterSize(b: CornerBox): BboxPx {
  return {
    x_c: (b.x0 + b.x1) / 2,
    y_c: (b.y0 + b.y1) / 2,
    w: b.x1 - b.x0,
    h: b.y1 - b.y0,
  };
}

/** Snap every edge to the pixel grid, preserving at least minSize. */
export function snapBox(b: CornerBox, minSize = 1): CornerBox {
  let x0 = Math.round(b.x0);
  let y0 = Math.round(b.y0);
  let x1 = Math.round(b.x1);
  let y1 = Math.round(b.y1);
  if (x1 - x0 < minSize) x1 = x0 + minSize;
  if (y1 - y0 < minSize) y1 = y0 + minSize;
  return { x0, y0, x1, y1 };
}

/** Translate, clamped so the box stays inside [0,w]x[0,h]. */
export function moveBox(b: CornerBox, dx: number, dy: number, width: number, height: number): CornerBox {
  const bw = b.x1 - b.x0;
  const bh = b.y1 - b.y0;
  const x0 = Math.min(Math.max(b.x0 + dx, 0), width - bw);
  const y0 = Math.min(Math.max(b.y0 + dy, 0), height - bh);
  return { x0, y0, x1: x0 + bw, y1: y0 + bh };
}

const HANDLE_EDGES: Record<Handle, { x0?: boolean; y0?: boolean; x1?: boolean; y1?: boolean }> = {
  nw: { x0: true, y0: true },
  n: { y0: true },
  ne: { x1: true, y0: true },
  e: { x1: true },
  se: { x1: true, y1: true },
  s: { y1: true },
  sw: { x0: true, y1: true },
  w: { x0: true },
};

/** Drag the given handle by (dx, dy); edges clamp to bounds and minSize. */
export function resizeBox(
  b: CornerBox,
  handle: Handle,
  dx: number,
  dy: number,
  width: number,
  height: number,
  minSize = 1,
): CornerBox {
  const edges = HANDLE_EDGES[handle];
  let { x0, y0, x1, y1 } = b;
  if (edges.x0) x0 = Math.min(Math.max(x0 + dx, 0), x1 - minSize);
  if (edges.x1) x1 = Math.max(Math.min(x1 + dx, width), x0 + minSize);
  if (edges.y0) y0 = Math.min(Math.max(y0 + dy, 0), y1 - minSize);
  if (edges.y1) y1 = Math.max(Math.min(y1 + dy, height), y0 + minSize);
  return { x0, y0, x1, y1 };
}

const HANDLE_ORDER: Handle[] = ['nw', 'n', 'ne', 'e', 'se', 's', 'sw', 'w'];

export function handleCenter(b: CornerBox, handle: Handle): { x: number; y: number } {
  const cx = (b.x0 + b.x1) / 2;
  const cy = (b.y0 + b.y1) / 2;
  switch (handle) {
    case 'nw': return { x: b.x0, y: b.y0 };
    case 'n': return { x: cx, y: b.y0 };
    case 'ne': return { x: b.x1, y: b.y0 };
    case 'e': return { x: b.x1, y: cy };
    case 'se': return { x: b.x1, y: b.y1 };
    case 's': return { x: cx, y: b.y1 };
    case 'sw': return { x: b.x0, y: b.y1 };
    case 'w': return { x: b.x0, y: cy };
  }
}

/** Classify a pointer position against the box; handles take priority. */
export function hitTest(b: CornerBox, x: number, y: number, handleRadius: number): HitResult {
  for (const handle of HANDLE_ORDER) {
    const c = handleCenter(b, handle);
    if (Math.abs(x - c.x) <= handleRadius && Math.abs(y - c.y) <= handleRadius) {
      return { kind: 'handle', handle };
    }
  }
  if (x >= b.x0 && x <= b.x1 && y >= b.y0 && y <= b.y1) {
    return { kind: 'inside' };
  }
  return { kind: 'outside' };
}

/** View transform: image coordinates scaled by zoom, shifted by pan. */
export interface Viewport {
  zoom: number;
  panX: number;
  panY: number;
}

export function imageToScreen(v: Viewport, x: number, y: number): { x: number; y: number } {
  return { x: (x - v.panX) * v.zoom, y: (y - v.panY) * v.zoom };
}

export function screenToImage(v: Viewport, x: number, y: number): { x: number; y: number } {
  return { x: x / v.zoom + v.panX, y: y / v.zoom + v.panY };
}

/** Zoom about a fixed screen point, clamping zoom to >= 1. */
export function zoomAt(v: Viewport, screenX: number, screenY: number, factor: number): Viewport {
  const zoom = Math.min(Math.max(v.zoom * factor, 1), 64);
  const anchor = screenToImage(v, screenX, screenY);
  return {
    zoom,
    panX: anchor.x - screenX / zoom,
    panY: anchor.y - screenY / zoom,
  };
}
