/** Live preview pane: sandboxed iframe plus a host-layer highlight overlay.
 *
 * The overlay is positioned in the host document, never drawn inside the
 * sandboxed frame, so the preview stays byte-faithful to the stored version.
 */

import { buildPreviewSrcdoc, isBridgeMessage } from "./bridge.js";
import type { PickedElement } from "./types.js";

export type PickListener = (picked: PickedElement) => void;

export class PreviewPane {
  readonly iframe: HTMLIFrameElement;
  readonly overlay: HTMLDivElement;
  currentHtml: string | null = null;
  private pickListeners: PickListener[] = [];
  private readyListeners: (() => void)[] = [];

  constructor(private host: HTMLElement) {
    this.iframe = host.ownerDocument.createElement("iframe");
    this.iframe.setAttribute("sandbox", "allow-scripts");
    this.iframe.style.width = "100%";
    this.iframe.style.height = "100%";
    this.iframe.style.border = "0";

    this.overlay = host.ownerDocument.createElement("div");
    this.overlay.style.position = "absolute";
    this.overlay.style.pointerEvents = "none";
    this.overlay.style.border = "2px solid #1E88E5";
    this.overlay.style.background = "rgba(30, 136, 229, 0.12)";
    this.overlay.style.display = "none";

    host.style.position = "relative";
    host.appendChild(this.iframe);
    host.appendChild(this.overlay);

    const view = host.ownerDocument.defaultView;
    view?.addEventListener("message", (event: MessageEvent) => this.onMessage(event));
  }

  /** Swap the preview to a new (server-confirmed) document version. */
  render(html: string): void {
    this.currentHtml = html;
    this.clearHighlight();
    this.iframe.srcdoc = buildPreviewSrcdoc(html);
  }

  onPick(listener: PickListener): void {
    this.pickListeners.push(listener);
  }

  onReady(listener: () => void): void {
    this.readyListeners.push(listener);
  }

  showHighlight(rect: [number, number, number, number]): void {
    const frame = this.iframe.getBoundingClientRect();
    const hostRect = this.host.getBoundingClientRect();
    this.overlay.style.left = `${frame.left - hostRect.left + rect[0]}px`;
    this.overlay.style.top = `${frame.top - hostRect.top + rect[1]}px`;
    this.overlay.style.width = `${rect[2]}px`;
    this.overlay.style.height = `${rect[3]}px`;
    this.overlay.style.display = "block";
  }

  clearHighlight(): void {
    this.overlay.style.display = "none";
  }

  private onMessage(event: MessageEvent): void {
    // only the preview frame may drive the overlay and citations
    if (this.iframe.contentWindow && event.source !== this.iframe.contentWindow) return;
    if (!isBridgeMessage(event.data)) return;
    const message = event.data;
    if (message.type === "ready") {
      for (const listener of this.readyListeners) listener();
    } else if (message.type === "hover" && message.rect) {
      this.showHighlight(message.rect);
    } else if (message.type === "picked" && message.picked) {
      const picked = message.picked as PickedElement;
      this.showHighlight(picked.bounding_box ?? [0, 0, 0, 0]);
      for (const listener of this.pickListeners) listener(picked);
    }
  }
}
