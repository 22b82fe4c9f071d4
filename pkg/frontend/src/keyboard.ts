/**
 * Keyboard-first review bindings. The mapping is pure: a key event goes
 * in, a semantic action comes out, and the controller decides what it
 * means in context.
 */

export type Action =
  | { kind: 'accept' }
  | { kind: 'reject' }
  | { kind: 'commit-adjust' }
  | { kind: 'cancel-adjust' }
  | { kind: 'difficulty'; level: 'easy' | 'medium' | 'hard' }
  | { kind: 'prev' }
  | { kind: 'next' }
  | { kind: 'next-queued' }
  | { kind: 'toggle-context' }
  | { kind: 'toggle-overlay'; overlay: 'box' | 'score' | 'mask' }
  | { kind: 'zoom'; direction: 1 | -1 }
  | { kind: 'zoom-reset' };

export interface KeyStroke {
  key: string;
  shiftKey?: boolean;
  ctrlKey?: boolean;
  metaKey?: boolean;
}

/** Map a keystroke to an action; null when the key is unbound. */
export function actionForKey(stroke: KeyStroke): Action | null {
  if (stroke.ctrlKey || stroke.metaKey) return null;
  switch (stroke.key) {
    case ' ':
    case 'Enter':
      return { kind: 'accept' };
    case 'x':
    case 'n':
      return { kind: 'reject' };
    case 'a':
      return { kind: 'commit-adjust' };
    case 'Escape':
      return { kind: 'cancel-adjust' };
    case '1':
      return { kind: 'difficulty', level: 'easy' };
    case '2':
      return { kind: 'difficulty', level: 'medium' };
    case '3':
      return { kind: 'difficulty', level: 'hard' };
    case 'ArrowLeft':
    case 'h':
      return { kind: 'prev' };
    case 'ArrowRight':
    case 'l':
      return { kind: 'next' };
    case 'q':
      return { kind: 'next-queued' };
    case 'c':
      return { kind: 'toggle-context' };
    case 'b':
      return { kind: 'toggle-overlay', overlay: 'box' };
    case 's':
      return { kind: 'toggle-overlay', overlay: 'score' };
    case 'm':
      return { kind: 'toggle-overlay', overlay: 'mask' };
    case '+':
    case '=':
      return { kind: 'zoom', direction: 1 };
    case '-':
      return { kind: 'zoom', direction: -1 };
    case '0':
      return { kind: 'zoom-reset' };
    default:
      return null;
  }
}

export const KEY_HELP: ReadonlyArray<[string, string]> = [
  ['space/enter', 'accept label, advance'],
  ['drag', 'move or resize the box'],
  ['a', 'commit the adjusted box'],
  ['esc', 'discard the adjustment'],
  ['x / n', 'no object visible'],
  ['1 / 2 / 3', 'difficulty easy / medium / hard'],
  ['← / →', 'previous / next frame'],
  ['q', 'jump to next queued frame'],
  ['c', 'context filmstrip (±2 frames)'],
  ['b / s / m', 'toggle box / score / mask overlay'],
  ['+ / - / 0', 'zoom in / out / reset'],
];
