import type { Outcome } from "./types.js";

/**
 * Keyboard is the primary input: left arrow picks the left image, right
 * arrow the right one, '=' (or numpad equals) declares a tie. Everything
 * else is ignored so typing in other page elements stays safe.
 */
export function keyToOutcome(key: string): Outcome | null {
  switch (key) {
    case "ArrowLeft":
      return "left_first";
    case "ArrowRight":
      return "right_first";
    case "=":
      return "equal";
    default:
      return null;
  }
}
