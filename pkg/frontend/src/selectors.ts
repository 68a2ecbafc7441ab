/** Element selector generation, mirroring the server's resolver contract.
 *
 * These functions are intentionally self-contained (no module-level
 * references) because `buildPickerScript` serializes them with
 * `Function.toString()` into the sandboxed preview frame.
 */

import type { PickedElement } from "./types.js";

export const MAX_SNIPPET_CHARS = 500;

/** Id shortcut when available, else a positional /TAG[i]/... path. */
export function getXPath(element: Element): string {
  const id = element.getAttribute("id");
  if (id) return '//*[@id="' + id + '"]';
  const segments: string[] = [];
  let current: Element = element;
  for (;;) {
    const parent: Node | null = current.parentNode;
    if (!parent || !(parent instanceof Element || parent instanceof Document)) break;
    let position = 0;
    let found = false;
    for (const sibling of Array.from(parent.children)) {
      if (sibling.tagName === current.tagName) {
        position += 1;
        if (sibling === current) {
          found = true;
          break;
        }
      }
    }
    segments.unshift(current.tagName + "[" + (found ? position : 1) + "]");
    if (!(parent instanceof Element)) break;
    current = parent;
  }
  return "/" + segments.join("/");
}

/** Deterministic selector anchored at the nearest id-bearing ancestor. */
export function getCssSelector(element: Element): string {
  const identifier = /^-?[A-Za-z_][A-Za-z0-9_-]*$/;
  const ownId = element.getAttribute("id");
  if (ownId) return "#" + ownId;
  const segments: string[] = [];
  let current: Element | null = element;
  while (current) {
    const currentId = current.getAttribute("id");
    if (currentId && current !== element) {
      segments.unshift("#" + currentId);
      break;
    }
    let classes = "";
    for (const name of (current.getAttribute("class") ?? "").split(/\s+/)) {
      if (name && identifier.test(name)) classes += "." + name;
    }
    let position = 1;
    const parent: Node | null = current.parentNode;
    if (parent && (parent instanceof Element || parent instanceof Document)) {
      let seen = 0;
      for (const sibling of Array.from(parent.children)) {
        if (sibling.tagName === current.tagName) {
          seen += 1;
          if (sibling === current) break;
        }
      }
      position = seen || 1;
    }
    segments.unshift(current.tagName.toLowerCase() + classes + ":nth-of-type(" + position + ")");
    current = current.parentElement;
  }
  return segments.join(" > ");
}

export function getSnippet(element: Element): string {
  return element.outerHTML.substring(0, 500);
}

export function pickElement(element: Element): PickedElement {
  let box: [number, number, number, number] | null = null;
  if (typeof element.getBoundingClientRect === "function") {
    const rect = element.getBoundingClientRect();
    box = [rect.x, rect.y, rect.width, rect.height];
  }
  return {
    xpath: getXPath(element),
    css_selector: getCssSelector(element),
    snippet: getSnippet(element),
    bounding_box: box,
  };
}
