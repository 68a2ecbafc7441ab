/** Sandboxed preview bridge: srcdoc construction plus the injected picker.
 *
 * The frame runs with sandbox="allow-scripts" and no allow-same-origin, so
 * the host can never touch the preview DOM directly; picking happens inside
 * the frame and crosses the boundary via postMessage. The picker script is
 * generated from the exact same compiled functions the host tests against,
 * so client and server selector algorithms cannot drift apart.
 */

import { getCssSelector, getSnippet, getXPath } from "./selectors.js";

export const BRIDGE_SOURCE = "courseforge-picker";
export const PICKER_SCRIPT_ID = "__courseforge_picker__";

export interface BridgeMessage {
  source: typeof BRIDGE_SOURCE;
  type: "ready" | "picked" | "hover" | "error";
  picked?: unknown;
  rect?: [number, number, number, number];
  message?: string;
}

export function buildPickerScript(): string {
  return `<script id="${PICKER_SCRIPT_ID}">
(function () {
  var getXPath = ${getXPath.toString()};
  var getCssSelector = ${getCssSelector.toString()};
  var getSnippet = ${getSnippet.toString()};

  function rectOf(el) {
    var r = el.getBoundingClientRect();
    return [r.x, r.y, r.width, r.height];
  }

  document.addEventListener("mousemove", function (event) {
    var el = event.target;
    if (!(el instanceof Element)) return;
    window.parent.postMessage(
      { source: "${BRIDGE_SOURCE}", type: "hover", rect: rectOf(el) },
      "*"
    );
  }, true);

  document.addEventListener("click", function (event) {
    var el = event.target;
    if (!(el instanceof Element)) return;
    event.preventDefault();
    event.stopPropagation();
    window.parent.postMessage(
      {
        source: "${BRIDGE_SOURCE}",
        type: "picked",
        picked: {
          xpath: getXPath(el),
          css_selector: getCssSelector(el),
          snippet: getSnippet(el),
          bounding_box: rectOf(el)
        }
      },
      "*"
    );
  }, true);

  window.onerror = function (message) {
    window.parent.postMessage(
      { source: "${BRIDGE_SOURCE}", type: "error", message: String(message) },
      "*"
    );
  };

  window.parent.postMessage({ source: "${BRIDGE_SOURCE}", type: "ready" }, "*");
})();
</script>`;
}

/** Append the picker to the document. The user content stays byte-identical
 * and the script lands after it, so positional selectors are unaffected. */
export function buildPreviewSrcdoc(html: string): string {
  const script = buildPickerScript();
  const bodyEnd = html.toLowerCase().lastIndexOf("</body>");
  if (bodyEnd !== -1) {
    return html.slice(0, bodyEnd) + script + "\n" + html.slice(bodyEnd);
  }
  return html + "\n" + script;
}

export function isBridgeMessage(data: unknown): data is BridgeMessage {
  return (
    typeof data === "object" &&
    data !== null &&
    (data as BridgeMessage).source === BRIDGE_SOURCE
  );
}
